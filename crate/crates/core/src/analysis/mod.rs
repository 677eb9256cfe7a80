//! Linear stability, dispersion relations, the Laplacian-pattern predictor
//! and pattern classification.

pub mod classify;
pub mod dispersion;
pub mod eigen;
pub mod predictor;
pub mod stability;

pub use classify::{
    classify_pattern, degree_class_bimodality, two_means_split, Classification, ClassifierOptions, PatternClass,
    TwoMeans,
};
pub use dispersion::{dispersion_relation, log_grid, Crossing, CrossingDirection, DispersionCurve, DispersionOptions, SweepStrategy};
pub use eigen::{eigen_residual, eigen_spectrum, eigenvalues, eigenvector, EigenDecomposition};
pub use predictor::{linear_pattern_predictor, zero_mode, PredictedPattern};
pub use stability::{assemble_system_jacobian, stability_report, ModalSpectrum, StabilityReport};
