//! Vertex-local reaction kinetics.
//!
//! A model maps the `m` species concentrations at one vertex to their
//! reaction rates. Birth and death contributions are not exposed
//! separately; with exponential waiting times only their combined rate
//! enters the master equation.

use std::fmt::Debug;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual bound for the stored homogeneous steady state.
pub const STEADY_STATE_RESIDUAL_TOL: f64 = 1e-12;

pub trait ReactionModel: Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn species_count(&self) -> usize;

    /// Writes the rates at one vertex into `out`.
    fn rates(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    /// Analytic `m x m` Jacobian, `J[a][b] = d rate_a / d x_b`.
    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>>;

    /// Closed-form homogeneous steady state.
    fn steady_state(&self) -> Vec<f64>;

    /// Whether rates are only defined for strictly positive concentrations.
    fn requires_positive(&self) -> bool {
        false
    }
}

/// Returns the model's steady state after checking its residual.
pub fn steady_state(model: &dyn ReactionModel) -> Result<Vec<f64>> {
    let x = model.steady_state();
    let residual = steady_state_residual(model, &x)?;
    if residual >= STEADY_STATE_RESIDUAL_TOL {
        return Err(Error::Domain(format!(
            "{} steady state residual {residual:e} exceeds {STEADY_STATE_RESIDUAL_TOL:e}",
            model.name()
        )));
    }
    Ok(x)
}

pub fn steady_state_residual(model: &dyn ReactionModel, x: &[f64]) -> Result<f64> {
    let mut out = vec![0.0; model.species_count()];
    model.rates(x, &mut out)?;
    Ok(out.iter().fold(0.0, |m, v| m.max(v.abs())))
}

fn check_len(x: &[f64], m: usize) -> Result<()> {
    if x.len() == m {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: m, got: x.len() })
    }
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("{name} must be positive and finite, got {value}")))
    }
}

/// `f(u) = r u (1 - u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    r: f64,
}

pub fn logistic(r: f64) -> Result<Logistic> {
    positive("r", r)?;
    Ok(Logistic { r })
}

impl Logistic {
    pub fn r(&self) -> f64 {
        self.r
    }
}

impl ReactionModel for Logistic {
    fn name(&self) -> &'static str {
        "logistic"
    }

    fn species_count(&self) -> usize {
        1
    }

    fn rates(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(x, 1)?;
        out[0] = self.r * x[0] * (1.0 - x[0]);
        Ok(())
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_len(x, 1)?;
        Ok(DMatrix::from_element(1, 1, self.r * (1.0 - 2.0 * x[0])))
    }

    /// The carrying capacity; `u = 0` is the unstable root.
    fn steady_state(&self) -> Vec<f64> {
        vec![1.0]
    }
}

/// Gierer-Meinhardt parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmParams {
    pub c: f64,
    pub rho: f64,
    pub rho0: f64,
    pub mu: f64,
    pub nu: f64,
    pub c_d: f64,
}

impl GmParams {
    /// `rho0 = rho = c = 1`, `nu = 7/32`, `mu = 5/256`, `c_d = 5/128`.
    pub fn standard() -> Self {
        Self { c: 1.0, rho: 1.0, rho0: 1.0, mu: 5.0 / 256.0, nu: 7.0 / 32.0, c_d: 5.0 / 128.0 }
    }

    pub fn validate(&self) -> Result<()> {
        positive("c", self.c)?;
        positive("rho", self.rho)?;
        positive("rho0", self.rho0)?;
        positive("mu", self.mu)?;
        positive("nu", self.nu)?;
        positive("c_d", self.c_d)
    }
}

/// Activator `u`, inhibitor `v`:
///
/// ```text
/// f(u, v) = c rho u^2 / v - mu u + rho0 rho
/// g(u, v) = c_d rho u^2 - nu v
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiererMeinhardt {
    params: GmParams,
}

pub fn gierer_meinhardt(params: GmParams) -> Result<GiererMeinhardt> {
    params.validate()?;
    Ok(GiererMeinhardt { params })
}

impl GiererMeinhardt {
    pub fn params(&self) -> &GmParams {
        &self.params
    }

    fn check_domain(x: &[f64]) -> Result<()> {
        check_len(x, 2)?;
        if !(x[1] > 0.0) || !x[0].is_finite() || !x[1].is_finite() {
            return Err(Error::Domain(format!("Gierer-Meinhardt needs finite u and v > 0, got ({}, {})", x[0], x[1])));
        }
        Ok(())
    }
}

impl ReactionModel for GiererMeinhardt {
    fn name(&self) -> &'static str {
        "gierer-meinhardt"
    }

    fn species_count(&self) -> usize {
        2
    }

    fn rates(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        Self::check_domain(x)?;
        let GmParams { c, rho, rho0, mu, nu, c_d } = self.params;
        let (u, v) = (x[0], x[1]);
        out[0] = c * rho * u * u / v - mu * u + rho0 * rho;
        out[1] = c_d * rho * u * u - nu * v;
        if !(out[0].is_finite() && out[1].is_finite()) {
            return Err(Error::Domain(format!("non-finite Gierer-Meinhardt rates at ({u}, {v})")));
        }
        Ok(())
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Self::check_domain(x)?;
        let GmParams { c, rho, mu, nu, c_d, .. } = self.params;
        let (u, v) = (x[0], x[1]);
        Ok(DMatrix::from_row_slice(
            2,
            2,
            &[2.0 * c * rho * u / v - mu, -c * rho * u * u / (v * v), 2.0 * c_d * rho * u, -nu],
        ))
    }

    /// `u* = (rho0 rho + c nu / c_d) / mu`, `v* = c_d rho u*^2 / nu`.
    fn steady_state(&self) -> Vec<f64> {
        let GmParams { c, rho, rho0, mu, nu, c_d } = self.params;
        let u = (rho0 * rho + c * nu / c_d) / mu;
        let v = c_d * rho * u * u / nu;
        polish_inhibitor(self, u, v)
    }

    fn requires_positive(&self) -> bool {
        true
    }
}

/// The closed form for `v*` is exact in real arithmetic but `g` subtracts two
/// numbers of order `1e3`; picking the neighbouring float with the smallest
/// residual keeps `max(|f|, |g|)` at the rounding floor.
fn polish_inhibitor(model: &GiererMeinhardt, u: f64, v: f64) -> Vec<f64> {
    let mut best = vec![u, v];
    let mut best_res = f64::INFINITY;
    let mut candidate = v;
    for _ in 0..4 {
        candidate = f64::from_bits(candidate.to_bits() - 1);
    }
    for _ in 0..9 {
        if let Ok(res) = steady_state_residual(model, &[u, candidate]) {
            if res < best_res {
                best_res = res;
                best = vec![u, candidate];
            }
        }
        candidate = f64::from_bits(candidate.to_bits() + 1);
    }
    best
}

/// `f(u) = a - b u`, whose linearization is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearDecay {
    a: f64,
    b: f64,
}

pub fn linear_decay(a: f64, b: f64) -> Result<LinearDecay> {
    positive("a", a)?;
    positive("b", b)?;
    Ok(LinearDecay { a, b })
}

impl ReactionModel for LinearDecay {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn species_count(&self) -> usize {
        1
    }

    fn rates(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(x, 1)?;
        out[0] = self.a - self.b * x[0];
        Ok(())
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_len(x, 1)?;
        Ok(DMatrix::from_element(1, 1, -self.b))
    }

    fn steady_state(&self) -> Vec<f64> {
        vec![self.a / self.b]
    }
}

/// Pure transport: every rate is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoReaction {
    species: usize,
}

impl NoReaction {
    pub fn new(species: usize) -> Self {
        Self { species: species.max(1) }
    }
}

impl ReactionModel for NoReaction {
    fn name(&self) -> &'static str {
        "none"
    }

    fn species_count(&self) -> usize {
        self.species
    }

    fn rates(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(x, self.species)?;
        out.iter_mut().for_each(|o| *o = 0.0);
        Ok(())
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_len(x, self.species)?;
        Ok(DMatrix::zeros(self.species, self.species))
    }

    /// Any constant is steady; unity is returned by convention.
    fn steady_state(&self) -> Vec<f64> {
        vec![1.0; self.species]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(model: &dyn ReactionModel, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; model.species_count()];
        model.rates(x, &mut out).unwrap();
        out
    }

    #[test]
    fn logistic_values() {
        let m = logistic(1.0).unwrap();
        assert_eq!(eval(&m, &[1.0]), vec![0.0]);
        assert_eq!(eval(&m, &[0.0]), vec![0.0]);
        assert_eq!(eval(&m, &[0.5]), vec![0.25]);
        let r2 = logistic(2.0).unwrap();
        assert_eq!(r2.jacobian(&[0.0]).unwrap()[(0, 0)], 2.0);
        assert_eq!(steady_state(&m).unwrap(), vec![1.0]);
        assert!(logistic(0.0).is_err());
    }

    #[test]
    fn gm_standard_steady_state() {
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let x = steady_state(&gm).unwrap();
        assert!((x[0] - 337.92).abs() < 1e-10, "{}", x[0]);
        let v_expected = 5.0 / 28.0 * 337.92 * 337.92;
        assert!((x[1] - v_expected).abs() / v_expected < 1e-14, "{}", x[1]);
        assert!(steady_state_residual(&gm, &x).unwrap() < 1e-12);
        let r = eval(&gm, &x);
        assert!(r[0].abs() < 1e-10 && r[1].abs() < 1e-10);
    }

    #[test]
    fn gm_reaction_jacobian_is_stable() {
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let j = gm.jacobian(&gm.steady_state()).unwrap();
        let tr = j[(0, 0)] + j[(1, 1)];
        let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
        // Both eigenvalues in the open left half-plane iff tr < 0 and det > 0.
        assert!(tr < 0.0 && det > 0.0, "tr = {tr}, det = {det}");
    }

    #[test]
    fn gm_domain_errors() {
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let mut out = [0.0; 2];
        assert!(matches!(gm.rates(&[1.0, 0.0], &mut out), Err(Error::Domain(_))));
        assert!(matches!(gm.rates(&[1.0, -2.0], &mut out), Err(Error::Domain(_))));
        assert!(gm.jacobian(&[1.0, 0.0]).is_err());
        assert!(gm.rates(&[f64::NAN, 1.0], &mut out).is_err());
        let mut bad = GmParams::standard();
        bad.mu = 0.0;
        assert!(gierer_meinhardt(bad).is_err());
    }

    #[test]
    fn linear_and_none() {
        let lin = linear_decay(2.0, 4.0).unwrap();
        assert_eq!(steady_state(&lin).unwrap(), vec![0.5]);
        let none = NoReaction::new(2);
        assert_eq!(eval(&none, &[3.0, 4.0]), vec![0.0, 0.0]);
        assert_eq!(none.jacobian(&[3.0, 4.0]).unwrap(), DMatrix::zeros(2, 2));
    }
}
