use serde::Serialize;

use super::predictor::linear_pattern_predictor;
use super::stability::{self, ModalSpectrum};
use crate::dynamics::{default_steady_tol, ReactionDiffusion};
use crate::error::{Error, Result};
use crate::kinetics::ReactionModel;
use crate::laplacian::{LaplacianMatrix, LaplacianVariant};
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PatternClass {
    Homogeneous,
    LaplacianPattern,
    TuringPattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierOptions {
    /// Largest relative spread across vertices still counted as homogeneous.
    pub homogeneous_tol: f64,
    /// Relative L-infinity distance from the linear predictor above which a
    /// pattern counts as a departure.
    pub predictor_deviation: f64,
    /// Residual bound for the steady-state precondition; defaults to
    /// `1e-9 * (1 + ||X||_inf)`.
    pub steady_tol: Option<f64>,
}

impl Default for ClassifierOptions {
    fn default() -> Self {
        Self { homogeneous_tol: 1e-6, predictor_deviation: 0.1, steady_tol: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub class: PatternClass,
    pub s: f64,
    pub residual: f64,
    /// Per species `(max - min) / max |x|` over vertices.
    pub relative_spread: Vec<f64>,
    /// `None` when the predictor system is singular.
    pub predictor_deviation: Option<f64>,
    pub leading_growth: f64,
    pub reaction_stable: bool,
    pub in_turing_window: bool,
}

impl Classification {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classification serializes")
    }
}

/// Largest real part of the linearized spectrum at `s`.
pub(crate) fn leading_growth(
    laplacian: &LaplacianMatrix,
    model: &dyn ReactionModel,
    rates: &[f64],
    s: f64,
) -> Result<f64> {
    let modal = matches!(laplacian.variant(), LaplacianVariant::CaseA | LaplacianVariant::CaseB)
        && model.species_count() <= 2;
    if modal {
        Ok(ModalSpectrum::new(laplacian, model, rates)?.leading_growth(s))
    } else {
        Ok(stability::stability_report(laplacian, model, rates, s, false)?.leading.re)
    }
}

/// Sorts a steady pattern into one of the three mechanisms.
///
/// Homogeneous when every species is flat to `homogeneous_tol`. Otherwise a
/// Turing pattern when `s` lies inside the Turing window and the pattern is
/// farther than `predictor_deviation` from the linear predictor, and a
/// Laplacian pattern in every other case.
pub fn classify_pattern(
    pattern: &[f64],
    laplacian: &LaplacianMatrix,
    model: &dyn ReactionModel,
    rates: &[f64],
    s: f64,
    options: &ClassifierOptions,
) -> Result<Classification> {
    let system = ReactionDiffusion::new(laplacian, rates, model, s)?;
    if pattern.len() != system.dim() {
        return Err(Error::DimensionMismatch { expected: system.dim(), got: pattern.len() });
    }
    let residual = system.residual(pattern)?;
    let tolerance = options.steady_tol.unwrap_or_else(|| default_steady_tol(pattern));
    if !(residual < tolerance) {
        return Err(Error::NotSteady { residual, tolerance });
    }

    let n = laplacian.dim();
    let relative_spread: Vec<f64> = pattern
        .chunks(n)
        .map(|xs| {
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let scale = xs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if scale == 0.0 { 0.0 } else { (hi - lo) / scale }
        })
        .collect();

    let reaction_stable = stability::reaction_stable(model)?;
    let leading_growth = leading_growth(laplacian, model, rates, s)?;
    let in_turing_window = reaction_stable && leading_growth > 0.0;

    let predictor_deviation = match linear_pattern_predictor(laplacian, model, rates, s) {
        Ok(p) => {
            let scale = p.pattern.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let dist = p.pattern.iter().zip(pattern).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            Some(dist / scale)
        }
        Err(Error::Singular(_)) => None,
        Err(e) => return Err(e),
    };

    let class = if relative_spread.iter().all(|&d| d < options.homogeneous_tol) {
        PatternClass::Homogeneous
    } else if in_turing_window && predictor_deviation.map_or(true, |d| d > options.predictor_deviation) {
        PatternClass::TuringPattern
    } else {
        PatternClass::LaplacianPattern
    };

    Ok(Classification {
        class,
        s,
        residual,
        relative_spread,
        predictor_deviation,
        leading_growth,
        reaction_stable,
        in_turing_window,
    })
}

/// Optimal two-cluster split of a set of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoMeans {
    pub low_mean: f64,
    pub high_mean: f64,
    pub low_count: usize,
    pub high_count: usize,
    /// Pooled within-cluster standard deviation.
    pub spread: f64,
}

impl TwoMeans {
    pub fn separation(&self) -> f64 {
        self.high_mean - self.low_mean
    }

    /// Separation exceeds `ratio` times the within-cluster spread.
    pub fn is_bimodal(&self, ratio: f64) -> bool {
        self.separation() > ratio * self.spread && self.separation() > 0.0
    }
}

/// Exact 1-D two-means: the best split of the sorted values by total
/// within-cluster sum of squares. Needs at least two values.
pub fn two_means_split(values: &[f64]) -> Result<TwoMeans> {
    if values.len() < 2 {
        return Err(Error::InvalidParameters(format!("two-means needs at least 2 values, got {}", values.len())));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(f64::NAN));
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let mut prefix = vec![0.0; n + 1];
    let mut prefix_sq = vec![0.0; n + 1];
    for (i, x) in xs.iter().enumerate() {
        prefix[i + 1] = prefix[i] + x;
        prefix_sq[i + 1] = prefix_sq[i] + x * x;
    }
    let sse = |lo: usize, hi: usize| {
        let c = (hi - lo) as f64;
        let s = prefix[hi] - prefix[lo];
        (prefix_sq[hi] - prefix_sq[lo] - s * s / c).max(0.0)
    };
    let mut best = (f64::INFINITY, 1);
    for k in 1..n {
        let cost = sse(0, k) + sse(k, n);
        if cost < best.0 {
            best = (cost, k);
        }
    }
    let k = best.1;
    // Recompute directly to avoid prefix-sum cancellation in the reported values.
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (low, high) = xs.split_at(k);
    let (ml, mh) = (mean(low), mean(high));
    let ss: f64 = low.iter().map(|x| (x - ml).powi(2)).sum::<f64>() + high.iter().map(|x| (x - mh).powi(2)).sum::<f64>();
    Ok(TwoMeans { low_mean: ml, high_mean: mh, low_count: k, high_count: n - k, spread: (ss / n as f64).sqrt() })
}

/// Two-means split of one species' values over the vertices of `degree`.
pub fn degree_class_bimodality(values: &[f64], network: &Network, degree: usize) -> Result<TwoMeans> {
    if values.len() != network.vertex_count() {
        return Err(Error::DimensionMismatch { expected: network.vertex_count(), got: values.len() });
    }
    let class: Vec<f64> = (0..values.len()).filter(|&j| network.degree(j) == degree).map(|j| values[j]).collect();
    two_means_split(&class)
}
