use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::eigen;
use crate::error::{Error, Result};
use crate::kinetics::{self, ReactionModel};
use crate::laplacian::LaplacianMatrix;

/// Tolerance for counting eigenvalues tied with the leading one.
const MULTIPLICITY_TOL: f64 = 1e-8;

fn check_rates(model: &dyn ReactionModel, rates: &[f64]) -> Result<()> {
    let m = model.species_count();
    if rates.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: rates.len() });
    }
    Ok(())
}

/// `s Lambda + DF(X*)` for species-major state ordering.
///
/// Block `(a, b)` is `delta_ab * s * rates[a] * M + DF_ab * I`, where `M` is
/// the Laplacian's evolution operator and `DF` the reaction Jacobian at the
/// homogeneous state `steady_state`.
pub fn assemble_system_jacobian(
    laplacian: &LaplacianMatrix,
    model: &dyn ReactionModel,
    steady_state: &[f64],
    rates: &[f64],
    s: f64,
) -> Result<DMatrix<f64>> {
    check_rates(model, rates)?;
    let m = model.species_count();
    if steady_state.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: steady_state.len() });
    }
    let n = laplacian.dim();
    let df = model.jacobian(steady_state)?;
    let op = laplacian.evolution_operator();
    let mut out = DMatrix::zeros(m * n, m * n);
    for a in 0..m {
        let scale = s * rates[a];
        if scale != 0.0 {
            out.view_mut((a * n, a * n), (n, n)).copy_from(&(&op * scale));
        }
        for b in 0..m {
            let d = df[(a, b)];
            for j in 0..n {
                out[(a * n + j, b * n + j)] += d;
            }
        }
    }
    Ok(out)
}

/// Eigen-analysis of `s Lambda + DF(X*)` at one scale parameter.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub s: f64,
    /// Full spectrum, decreasing real part.
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvalue with the largest real part.
    pub leading: Complex64,
    pub leading_vector: Option<DVector<Complex64>>,
    /// Number of eigenvalues within `1e-8` of `leading`; above one the
    /// response may carry polynomial-in-time factors.
    pub leading_multiplicity: usize,
    /// All eigenvalues of the vertex-local reaction Jacobian have negative real part.
    pub reaction_stable: bool,
    pub turing_unstable: bool,
}

impl StabilityReport {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Json<'a> {
            s: f64,
            leading: [f64; 2],
            leading_multiplicity: usize,
            reaction_stable: bool,
            turing_unstable: bool,
            eigenvalues: Vec<[f64; 2]>,
            leading_vector: Option<Vec<[f64; 2]>>,
            #[serde(skip)]
            _p: std::marker::PhantomData<&'a ()>,
        }
        let pair = |c: &Complex64| [c.re, c.im];
        serde_json::to_string_pretty(&Json {
            s: self.s,
            leading: pair(&self.leading),
            leading_multiplicity: self.leading_multiplicity,
            reaction_stable: self.reaction_stable,
            turing_unstable: self.turing_unstable,
            eigenvalues: self.eigenvalues.iter().map(pair).collect(),
            leading_vector: self.leading_vector.as_ref().map(|v| v.iter().map(pair).collect()),
            _p: std::marker::PhantomData,
        })
        .expect("stability report serializes")
    }
}

/// Whether the reaction Jacobian at the homogeneous state is stable.
pub fn reaction_stable(model: &dyn ReactionModel) -> Result<bool> {
    let x = kinetics::steady_state(model)?;
    let values = eigen::eigenvalues(&model.jacobian(&x)?)?;
    Ok(values.iter().all(|v| v.re < 0.0))
}

/// Full eigensolve of the linearized system at scale `s`.
pub fn stability_report(
    laplacian: &LaplacianMatrix,
    model: &dyn ReactionModel,
    rates: &[f64],
    s: f64,
    with_vector: bool,
) -> Result<StabilityReport> {
    let x = kinetics::steady_state(model)?;
    let jac = assemble_system_jacobian(laplacian, model, &x, rates, s)?;
    let eigenvalues = eigen::eigenvalues(&jac)?;
    let leading = eigenvalues[0];
    let leading_multiplicity = eigenvalues.iter().filter(|v| (**v - leading).norm() <= MULTIPLICITY_TOL).count();
    let leading_vector = if with_vector { Some(eigen::eigenvector(&jac, leading)?) } else { None };
    let reaction_stable = reaction_stable(model)?;
    Ok(StabilityReport {
        s,
        turing_unstable: reaction_stable && leading.re > 0.0,
        eigenvalues,
        leading,
        leading_vector,
        leading_multiplicity,
        reaction_stable,
    })
}

/// Spectrum of `s Lambda + DF(X*)` from the Laplacian's own spectrum.
///
/// Reactions at a homogeneous state contribute the same `m x m` block at
/// every vertex, so when the evolution operator is diagonalizable the system
/// splits into one small block `DF + s diag(rates) lambda_k` per Laplacian
/// eigenvalue `lambda_k`. Both named CTRW Laplacians qualify: the
/// degree-proportional one is symmetric and the uniform one is similar to a
/// symmetric matrix through `D^{1/2}`.
#[derive(Debug, Clone)]
pub struct ModalSpectrum {
    laplacian_eigenvalues: Vec<Complex64>,
    reaction_jacobian: DMatrix<f64>,
    rates: Vec<f64>,
}

impl ModalSpectrum {
    pub fn new(laplacian: &LaplacianMatrix, model: &dyn ReactionModel, rates: &[f64]) -> Result<Self> {
        check_rates(model, rates)?;
        let m = model.species_count();
        if m > 2 {
            return Err(Error::InvalidParameters(format!("modal spectrum supports at most 2 species, got {m}")));
        }
        let x = kinetics::steady_state(model)?;
        Ok(Self {
            laplacian_eigenvalues: eigen::eigenvalues(&laplacian.evolution_operator())?,
            reaction_jacobian: model.jacobian(&x)?,
            rates: rates.to_vec(),
        })
    }

    pub fn laplacian_eigenvalues(&self) -> &[Complex64] {
        &self.laplacian_eigenvalues
    }

    /// Eigenvalues of the block belonging to Laplacian eigenvalue `lambda`.
    pub fn block_eigenvalues(&self, lambda: Complex64, s: f64) -> Vec<Complex64> {
        let df = &self.reaction_jacobian;
        match self.rates.len() {
            1 => vec![Complex64::new(df[(0, 0)], 0.0) + lambda * (s * self.rates[0])],
            _ => {
                let a = Complex64::new(df[(0, 0)], 0.0) + lambda * (s * self.rates[0]);
                let d = Complex64::new(df[(1, 1)], 0.0) + lambda * (s * self.rates[1]);
                let bc = Complex64::new(df[(0, 1)] * df[(1, 0)], 0.0);
                let half_tr = (a + d) * 0.5;
                let half_diff = (a - d) * 0.5;
                let root = (half_diff * half_diff + bc).sqrt();
                vec![half_tr + root, half_tr - root]
            }
        }
    }

    /// Full spectrum at `s`, decreasing real part.
    pub fn spectrum(&self, s: f64) -> Vec<Complex64> {
        let mut out: Vec<Complex64> =
            self.laplacian_eigenvalues.iter().flat_map(|&l| self.block_eigenvalues(l, s)).collect();
        out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        out
    }

    /// Largest real part over all blocks.
    pub fn leading_growth(&self, s: f64) -> f64 {
        self.laplacian_eigenvalues
            .iter()
            .flat_map(|&l| self.block_eigenvalues(l, s))
            .fold(f64::NEG_INFINITY, |m, v| m.max(v.re))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{gierer_meinhardt, logistic, GmParams, NoReaction};
    use crate::laplacian::{build_case_a, build_case_b};
    use crate::network::{generate_ba, Network};

    #[test]
    fn uncoupled_blocks_at_zero_scale() {
        let net = generate_ba(12, 2, 1).unwrap();
        let l = build_case_a(&net, 1.0).unwrap();
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let x = gm.steady_state();
        let jac = assemble_system_jacobian(&l, &gm, &x, &[1.0, 1.0 / 256.0], 0.0).unwrap();
        let local = eigen::eigenvalues(&gm.jacobian(&x).unwrap()).unwrap();
        let full = eigen::eigenvalues(&jac).unwrap();
        assert_eq!(full.len(), 24);
        for v in &full {
            assert!(local.iter().any(|w| (v - w).norm() < 1e-10), "{v}");
        }
    }

    #[test]
    fn pure_transport_matches_evolution_operator() {
        let net = generate_ba(15, 2, 3).unwrap();
        let l = build_case_a(&net, 0.8).unwrap();
        let jac = assemble_system_jacobian(&l, &NoReaction::new(1), &[1.0], &[1.0], 1.0).unwrap();
        assert_eq!(jac, l.evolution_operator());
    }

    #[test]
    fn modal_matches_full_on_cycle() {
        let l = build_case_b(&Network::cycle(3).unwrap(), 1.0).unwrap();
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let rates = [1.0, 1.0 / 256.0];
        let modal = ModalSpectrum::new(&l, &gm, &rates).unwrap();
        let mut lam: Vec<f64> = modal.laplacian_eigenvalues().iter().map(|v| v.re).collect();
        lam.sort_by(f64::total_cmp);
        assert!((lam[0] + 3.0).abs() < 1e-12 && (lam[1] + 3.0).abs() < 1e-12 && lam[2].abs() < 1e-12);
        let full = stability_report(&l, &gm, &rates, 1.0, false).unwrap().eigenvalues;
        let modal = modal.spectrum(1.0);
        for (a, b) in full.iter().zip(&modal) {
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn report_leading_vector_and_flags() {
        let net = generate_ba(10, 2, 5).unwrap();
        let l = build_case_a(&net, 1.0).unwrap();
        let model = logistic(1.0).unwrap();
        let report = stability_report(&l, &model, &[1.0], 1.0, true).unwrap();
        assert!(report.reaction_stable);
        assert!(!report.turing_unstable);
        assert!(report.eigenvalues.iter().all(|v| v.re <= report.leading.re));
        let jac = assemble_system_jacobian(&l, &model, &[1.0], &[1.0], 1.0).unwrap();
        let v = report.leading_vector.as_ref().unwrap();
        assert!(eigen::eigen_residual(&jac, report.leading, v) < 1e-10);
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json["eigenvalues"].as_array().unwrap().len(), 10);
    }

    #[test]
    fn rate_length_is_checked() {
        let l = build_case_b(&Network::cycle(4).unwrap(), 1.0).unwrap();
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        assert!(matches!(
            assemble_system_jacobian(&l, &gm, &gm.steady_state(), &[1.0], 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
