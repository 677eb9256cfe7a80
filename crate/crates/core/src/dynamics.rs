//! Reaction-diffusion master equations and their time integration.
//!
//! The state is species-major: `X = (u_1..u_J, v_1..v_J)`. Its derivative is
//!
//! ```text
//! dX_a,j/dt = s * rate_a * sum_i L[i][j] X_a,i + F_a(X_.,j)
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetics::{self, ReactionModel};
use crate::laplacian::{LaplacianMatrix, SparseOperator};
use crate::network::Network;
use crate::rng;
use rand::Rng as _;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub t: f64,
    /// Species-major concentrations.
    pub values: Vec<f64>,
}

impl SystemState {
    pub fn new(t: f64, values: Vec<f64>) -> Self {
        Self { t, values }
    }

    /// Concentrations of `species` over all vertices.
    pub fn species(&self, species: usize, vertices: usize) -> &[f64] {
        &self.values[species * vertices..(species + 1) * vertices]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The assembled right-hand side `s Lambda X + F(X)`.
#[derive(Debug, Clone)]
pub struct ReactionDiffusion<'a> {
    operator: SparseOperator,
    rates: Vec<f64>,
    model: &'a dyn ReactionModel,
    s: f64,
}

impl<'a> ReactionDiffusion<'a> {
    /// `rates[a]` multiplies the Laplacian for species `a`.
    pub fn new(laplacian: &LaplacianMatrix, rates: &[f64], model: &'a dyn ReactionModel, s: f64) -> Result<Self> {
        if rates.len() != model.species_count() {
            return Err(Error::DimensionMismatch { expected: model.species_count(), got: rates.len() });
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameters(format!("scale parameter s must be finite and >= 0, got {s}")));
        }
        Ok(Self { operator: laplacian.sparse_operator(), rates: rates.to_vec(), model, s })
    }

    pub fn vertex_count(&self) -> usize {
        self.operator.dim()
    }

    pub fn species_count(&self) -> usize {
        self.rates.len()
    }

    pub fn dim(&self) -> usize {
        self.vertex_count() * self.species_count()
    }

    pub fn model(&self) -> &dyn ReactionModel {
        self.model
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn rhs_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.vertex_count();
        let m = self.species_count();
        if x.len() != n * m || out.len() != n * m {
            return Err(Error::DimensionMismatch { expected: n * m, got: x.len() });
        }
        for a in 0..m {
            let span = a * n..(a + 1) * n;
            self.operator.mul_into(self.s * self.rates[a], &x[span.clone()], &mut out[span]);
        }
        let mut local = vec![0.0; m];
        let mut rates = vec![0.0; m];
        for j in 0..n {
            for a in 0..m {
                local[a] = x[a * n + j];
            }
            self.model.rates(&local, &mut rates)?;
            for a in 0..m {
                out[a * n + j] += rates[a];
            }
        }
        Ok(())
    }

    pub fn rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; x.len()];
        self.rhs_into(x, &mut out)?;
        Ok(out)
    }

    /// `||rhs(x)||_inf`.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        Ok(self.rhs(x)?.iter().fold(0.0, |m, v| m.max(v.abs())))
    }
}

/// Free-function form of [`ReactionDiffusion::rhs`].
pub fn rhs(
    state: &SystemState,
    laplacian: &LaplacianMatrix,
    rates: &[f64],
    model: &dyn ReactionModel,
    s: f64,
) -> Result<Vec<f64>> {
    ReactionDiffusion::new(laplacian, rates, model, s)?.rhs(&state.values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    /// Classical fixed-step fourth-order Runge-Kutta.
    Rk4 { dt: f64 },
    /// Dormand-Prince 5(4) with error control.
    Rk45 { rtol: f64, atol: f64, dt_initial: f64, dt_min: f64, dt_max: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Rk45 { rtol: 1e-10, atol: 1e-12, dt_initial: 1e-3, dt_min: 1e-12, dt_max: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_max: f64,
    /// Absolute stopping threshold on `||rhs||_inf`; `None` means
    /// `1e-9 * (1 + ||X||_inf)` evaluated at each check.
    pub steady_tol: Option<f64>,
    /// Stop as soon as the steady-state test passes.
    pub stop_at_steady: bool,
    /// Record a snapshot every this many time units (plus start and end).
    pub snapshot_interval: Option<f64>,
    /// Hard cap on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::default(),
            t_max: 1e5,
            steady_tol: None,
            stop_at_steady: true,
            snapshot_interval: None,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameters(m));
        match self.method {
            Method::Rk4 { dt } if !(dt > 0.0 && dt.is_finite()) => return bad(format!("dt must be positive, got {dt}")),
            Method::Rk45 { rtol, atol, dt_initial, dt_min, dt_max } => {
                if !(rtol > 0.0 && atol > 0.0) {
                    return bad("rtol and atol must be positive".into());
                }
                if !(dt_min > 0.0 && dt_min <= dt_initial && dt_initial <= dt_max) {
                    return bad("need 0 < dt_min <= dt_initial <= dt_max".into());
                }
            }
            _ => {}
        }
        if !(self.t_max > 0.0) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if let Some(tol) = self.steady_tol {
            if !(tol > 0.0) {
                return bad(format!("steady_tol must be positive, got {tol}"));
            }
        }
        if let Some(dt) = self.snapshot_interval {
            if !(dt > 0.0) {
                return bad(format!("snapshot_interval must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    fn steady_threshold(&self, x: &[f64]) -> f64 {
        self.steady_tol.unwrap_or_else(|| default_steady_tol(x))
    }
}

/// `1e-9 * (1 + ||X||_inf)`.
pub fn default_steady_tol(x: &[f64]) -> f64 {
    1e-9 * (1.0 + x.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    SteadyState,
    Horizon,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<SystemState>,
    pub final_state: SystemState,
    pub termination: Termination,
    /// `||rhs||_inf` at the final state.
    pub final_residual: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    /// Snapshot table: `t,species,vertex,value`.
    pub fn snapshots_csv(&self, vertices: usize) -> String {
        let mut out = String::from("t,species,vertex,value\n");
        for snap in &self.snapshots {
            for (idx, v) in snap.values.iter().enumerate() {
                let _ = writeln!(out, "{:.16e},{},{},{:.16e}", snap.t, idx / vertices, idx % vertices, v);
            }
        }
        out
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Stages {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    next: Vec<f64>,
}

impl Stages {
    fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![0.0; n]), tmp: vec![0.0; n], next: vec![0.0; n] }
    }
}

fn combine(out: &mut [f64], x: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o = x[i] + h * acc;
    }
}

fn admissible(x: &[f64], positive: bool) -> bool {
    x.iter().all(|v| v.is_finite() && (!positive || *v > 0.0))
}

/// Fails with [`Error::Domain`] if the model cannot be evaluated at `x`.
fn try_rhs(system: &ReactionDiffusion<'_>, x: &[f64], out: &mut [f64]) -> Result<bool> {
    match system.rhs_into(x, out) {
        Ok(()) => Ok(out.iter().all(|v| v.is_finite())),
        Err(Error::Domain(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Integrates from `initial` until the horizon or a steady state.
///
/// Steps that leave the model's domain (non-positive concentrations for
/// models that require positivity) are rejected and retried with half the
/// step; falling below `dt_min` is an error.
pub fn integrate(system: &ReactionDiffusion<'_>, initial: &SystemState, config: &IntegratorConfig) -> Result<Trajectory> {
    config.validate()?;
    let n = system.dim();
    if initial.values.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: initial.values.len() });
    }
    let positive = system.model().requires_positive();
    if !admissible(&initial.values, positive) {
        return Err(Error::Domain("initial state outside the model domain".into()));
    }

    let mut t = initial.t;
    let t_end = initial.t + config.t_max;
    let mut x = initial.values.clone();
    let mut st = Stages::new(n);
    system.rhs_into(&x, &mut st.k[0])?;

    let mut snapshots = vec![SystemState::new(t, x.clone())];
    let mut next_snapshot = config.snapshot_interval.map(|dt| t + dt);
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    let (mut h, dt_min, dt_max) = match config.method {
        Method::Rk4 { dt } => (dt, dt * 2f64.powi(-30), dt),
        Method::Rk45 { dt_initial, dt_min, dt_max, .. } => (dt_initial, dt_min, dt_max),
    };
    let mut termination = Termination::Horizon;

    loop {
        let residual = st.k[0].iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if config.stop_at_steady && residual < config.steady_threshold(&x) {
            termination = Termination::SteadyState;
            break;
        }
        if t >= t_end {
            break;
        }
        if accepted + rejected >= config.max_steps {
            break;
        }
        let mut step = h.min(t_end - t);
        if let Some(ns) = next_snapshot {
            if ns > t {
                step = step.min(ns - t);
            }
        }

        let ok = match config.method {
            Method::Rk4 { .. } => rk4_step(system, &x, step, &mut st, positive)?,
            Method::Rk45 { rtol, atol, .. } => {
                match dopri_step(system, &x, step, &mut st, positive, rtol, atol)? {
                    Some(err) if err <= 1.0 => {
                        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                        h = (step * factor).min(dt_max);
                        true
                    }
                    Some(err) => {
                        h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.5);
                        false
                    }
                    None => {
                        h = step * 0.5;
                        false
                    }
                }
            }
        };

        if ok {
            t = if (t + step - t_end).abs() <= 1e-12 * t_end.abs().max(1.0) { t_end } else { t + step };
            std::mem::swap(&mut x, &mut st.next);
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite(t));
            }
            // FSAL: k[6] already holds rhs(x) for the Dormand-Prince step.
            match config.method {
                Method::Rk45 { .. } => st.k.swap(0, 6),
                Method::Rk4 { .. } => system.rhs_into(&x, &mut st.k[0])?,
            }
            accepted += 1;
            if let (Some(ns), Some(dt)) = (next_snapshot, config.snapshot_interval) {
                if t >= ns - 1e-12 * ns.abs().max(1.0) {
                    snapshots.push(SystemState::new(t, x.clone()));
                    next_snapshot = Some(ns + dt);
                }
            }
        } else {
            rejected += 1;
            if let Method::Rk4 { .. } = config.method {
                h = step * 0.5;
            }
            if h < dt_min {
                return Err(Error::StepUnderflow { t, dt_min });
            }
        }
    }

    let final_residual = st.k[0].iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let final_state = SystemState::new(t, x);
    if snapshots.last().map_or(true, |s| s.t != final_state.t) {
        snapshots.push(final_state.clone());
    }
    Ok(Trajectory { snapshots, final_state, termination, final_residual, accepted_steps: accepted, rejected_steps: rejected })
}

fn rk4_step(system: &ReactionDiffusion<'_>, x: &[f64], h: f64, st: &mut Stages, positive: bool) -> Result<bool> {
    let [k1, k2, k3, k4, ..] = &mut st.k;
    combine(&mut st.tmp, x, h, &[(0.5, k1)]);
    if !admissible(&st.tmp, positive) || !try_rhs(system, &st.tmp, k2)? {
        return Ok(false);
    }
    combine(&mut st.tmp, x, h, &[(0.5, k2)]);
    if !admissible(&st.tmp, positive) || !try_rhs(system, &st.tmp, k3)? {
        return Ok(false);
    }
    combine(&mut st.tmp, x, h, &[(1.0, k3)]);
    if !admissible(&st.tmp, positive) || !try_rhs(system, &st.tmp, k4)? {
        return Ok(false);
    }
    combine(&mut st.next, x, h, &[(1.0 / 6.0, k1), (1.0 / 3.0, k2), (1.0 / 3.0, k3), (1.0 / 6.0, k4)]);
    Ok(admissible(&st.next, positive))
}

/// One Dormand-Prince trial step. Returns the scaled error norm, or `None`
/// when a stage left the model domain.
fn dopri_step(
    system: &ReactionDiffusion<'_>,
    x: &[f64],
    h: f64,
    st: &mut Stages,
    positive: bool,
    rtol: f64,
    atol: f64,
) -> Result<Option<f64>> {
    let [k1, k2, k3, k4, k5, k6, k7] = &mut st.k;
    let tmp = &mut st.tmp;
    combine(tmp, x, h, &[(A21, k1)]);
    if !admissible(tmp, positive) || !try_rhs(system, tmp, k2)? {
        return Ok(None);
    }
    combine(tmp, x, h, &[(A31, k1), (A32, k2)]);
    if !admissible(tmp, positive) || !try_rhs(system, tmp, k3)? {
        return Ok(None);
    }
    combine(tmp, x, h, &[(A41, k1), (A42, k2), (A43, k3)]);
    if !admissible(tmp, positive) || !try_rhs(system, tmp, k4)? {
        return Ok(None);
    }
    combine(tmp, x, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
    if !admissible(tmp, positive) || !try_rhs(system, tmp, k5)? {
        return Ok(None);
    }
    combine(tmp, x, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
    if !admissible(tmp, positive) || !try_rhs(system, tmp, k6)? {
        return Ok(None);
    }
    combine(&mut st.next, x, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
    if !admissible(&st.next, positive) || !try_rhs(system, &st.next, k7)? {
        return Ok(None);
    }
    let mut sum = 0.0;
    for i in 0..x.len() {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = atol + rtol * x[i].abs().max(st.next[i].abs());
        sum += (e / sc) * (e / sc);
    }
    Ok(Some((sum / x.len() as f64).sqrt()))
}

/// Homogeneous steady state times `1 + delta`, with `delta` uniform in
/// `[-amplitude, amplitude]` independently per species and vertex.
pub fn perturbed_initial_state(
    model: &dyn ReactionModel,
    network: &Network,
    relative_amplitude: f64,
    seed: u64,
) -> Result<SystemState> {
    if !(0.0..=0.1).contains(&relative_amplitude) {
        return Err(Error::InvalidParameters(format!(
            "relative amplitude must lie in [0, 0.1], got {relative_amplitude}"
        )));
    }
    let x = kinetics::steady_state(model)?;
    let n = network.vertex_count();
    let mut rng = rng::stream(seed, rng::INITIAL_CONDITION_STREAM);
    let mut values = Vec::with_capacity(x.len() * n);
    for &xa in &x {
        for _ in 0..n {
            let delta: f64 = rng.gen_range(-1.0..=1.0) * relative_amplitude;
            values.push(xa * (1.0 + delta));
        }
    }
    Ok(SystemState::new(0.0, values))
}

/// Independent uniform draws in `(0, 1]` for every species and vertex.
pub fn uniform_initial_state(species: usize, vertices: usize, seed: u64) -> SystemState {
    let mut rng = rng::stream(seed, rng::INITIAL_CONDITION_STREAM);
    SystemState::new(0.0, (0..species * vertices).map(|_| 1.0 - rng.gen_range(0.0..1.0)).collect())
}

/// The homogeneous steady state replicated over all vertices.
pub fn homogeneous_state(model: &dyn ReactionModel, vertices: usize) -> Result<SystemState> {
    let x = kinetics::steady_state(model)?;
    Ok(SystemState::new(0.0, x.iter().flat_map(|&xa| std::iter::repeat(xa).take(vertices)).collect()))
}
