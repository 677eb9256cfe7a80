//! Reaction-diffusion on complex networks with continuous-time random walk
//! transport.
//!
//! Networks are generated or loaded in [`network`], turned into transport
//! operators in [`laplacian`], coupled to vertex-local reactions from
//! [`kinetics`] and integrated by [`dynamics`]. [`analysis`] covers linear
//! stability, dispersion relations over the diffusion scale `s`, the linear
//! Laplacian-pattern predictor and pattern classification.

pub mod analysis;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod kinetics;
pub mod laplacian;
pub mod network;
pub mod rng;

pub use error::{Error, Result};
