//! Dispersion relation over the diffusion scale parameter `s`.
//!
//! `Re mu*(s)` is the largest real part of the spectrum of
//! `s Lambda + DF(X*)`. A Turing window is an interval of `s` on which it is
//! positive while the reaction Jacobian alone is stable.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::eigen;
use super::stability::{assemble_system_jacobian, reaction_stable, ModalSpectrum};
use crate::error::{Error, Result};
use crate::kinetics::{self, ReactionModel};
use crate::laplacian::{LaplacianMatrix, LaplacianVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepStrategy {
    /// Modal decomposition for the named Laplacians, full eigensolves otherwise.
    Auto,
    /// One dense eigensolve of the `mJ x mJ` system per sample.
    Full,
    /// One eigensolve of the Laplacian, then `m x m` blocks per sample.
    Modal,
}

#[derive(Debug, Clone)]
pub struct DispersionOptions {
    pub strategy: SweepStrategy,
    /// Target `|Re mu*(s_c)|` at refined crossings.
    pub bisection_tol: f64,
    /// Adjacent samples around a crossing must differ by less than this
    /// fraction of the curve's range.
    pub max_relative_jump: f64,
    pub max_refine_passes: usize,
}

impl Default for DispersionOptions {
    fn default() -> Self {
        Self { strategy: SweepStrategy::Auto, bisection_tol: 1e-8, max_relative_jump: 0.1, max_refine_passes: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossingDirection {
    /// Negative to positive with increasing `s`.
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub s: f64,
    /// `Re mu*` evaluated at `s`.
    pub residual: f64,
    pub direction: CrossingDirection,
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionCurve {
    /// Sample points, increasing; includes refinement points.
    pub s: Vec<f64>,
    pub re_mu_star: Vec<f64>,
    pub crossings: Vec<Crossing>,
    pub reaction_stable: bool,
}

impl DispersionCurve {
    /// `[s_c1, s_c2]` from the first upward to the last downward crossing.
    pub fn turing_window(&self) -> Option<(f64, f64)> {
        if !self.reaction_stable {
            return None;
        }
        let up = self.crossings.iter().find(|c| c.direction == CrossingDirection::Up)?;
        let down = self.crossings.iter().rev().find(|c| c.direction == CrossingDirection::Down)?;
        (down.s > up.s).then_some((up.s, down.s))
    }

    /// `ln(s_c2 / s_c1)`, or zero when there is no window.
    pub fn window_log_width(&self) -> f64 {
        self.turing_window().map_or(0.0, |(a, b)| (b / a).ln())
    }

    pub fn max_growth(&self) -> f64 {
        self.re_mu_star.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `s,re_mu_star` rows with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,re_mu_star\n");
        for (s, g) in self.s.iter().zip(&self.re_mu_star) {
            let _ = writeln!(out, "{s:.16e},{g:.16e}");
        }
        out
    }
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "log_grid needs 0 < lo < hi and n >= 2");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// Default sweep grid: 200 log-spaced points over `[1e-4, 1e2]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(1e-4, 1e2, 200)
}

enum Evaluator {
    Modal(ModalSpectrum),
    Full { laplacian: LaplacianMatrix, steady_state: Vec<f64>, rates: Vec<f64> },
}

impl Evaluator {
    fn growth(&self, model: &dyn ReactionModel, s: f64) -> Result<f64> {
        match self {
            Evaluator::Modal(modal) => Ok(modal.leading_growth(s)),
            Evaluator::Full { laplacian, steady_state, rates } => {
                let wrap = |e: Error| Error::SweepFailure { s, source: Box::new(e) };
                let jac = assemble_system_jacobian(laplacian, model, steady_state, rates, s).map_err(wrap)?;
                let values = eigen::eigenvalues(&jac).map_err(wrap)?;
                Ok(values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.re)))
            }
        }
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        (a * b).sqrt()
    } else {
        0.5 * (a + b)
    }
}

/// `Re mu*(s)` over `s_grid`, with crossings refined by bisection.
pub fn dispersion_relation(
    laplacian: &LaplacianMatrix,
    model: &dyn ReactionModel,
    rates: &[f64],
    s_grid: &[f64],
    options: &DispersionOptions,
) -> Result<DispersionCurve> {
    if s_grid.is_empty() {
        return Err(Error::InvalidParameters("empty s grid".into()));
    }
    if s_grid.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidParameters("s grid must be finite and nonnegative".into()));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameters("s grid must be strictly increasing".into()));
    }
    let modal_ok = matches!(laplacian.variant(), LaplacianVariant::CaseA | LaplacianVariant::CaseB)
        && model.species_count() <= 2;
    let evaluator = match (options.strategy, modal_ok) {
        (SweepStrategy::Modal, false) => {
            return Err(Error::InvalidParameters("modal sweep needs a named Laplacian and at most 2 species".into()))
        }
        (SweepStrategy::Modal, true) | (SweepStrategy::Auto, true) => {
            Evaluator::Modal(ModalSpectrum::new(laplacian, model, rates)?)
        }
        _ => Evaluator::Full {
            laplacian: laplacian.clone(),
            steady_state: kinetics::steady_state(model)?,
            rates: rates.to_vec(),
        },
    };
    let growth_at = |s: f64| evaluator.growth(model, s);

    let mut s: Vec<f64> = s_grid.to_vec();
    let mut g: Vec<f64> = s.par_iter().map(|&x| growth_at(x)).collect::<Result<_>>()?;

    // Refine around sign changes until neighbouring samples are close.
    for _ in 0..options.max_refine_passes {
        let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let limit = options.max_relative_jump * (hi - lo);
        let brackets: Vec<usize> = (0..s.len().saturating_sub(1)).filter(|&i| (g[i] > 0.0) != (g[i + 1] > 0.0)).collect();
        let mut split: Vec<usize> = Vec::new();
        for &b in &brackets {
            for i in b.saturating_sub(1)..=(b + 1).min(s.len() - 2) {
                if (g[i + 1] - g[i]).abs() >= limit && !split.contains(&i) {
                    split.push(i);
                }
            }
        }
        if split.is_empty() {
            break;
        }
        split.sort_unstable();
        let mids: Vec<f64> = split.iter().map(|&i| midpoint(s[i], s[i + 1])).collect();
        let vals: Vec<f64> = mids.par_iter().map(|&x| growth_at(x)).collect::<Result<_>>()?;
        for ((&i, m), v) in split.iter().zip(mids).zip(vals).rev() {
            s.insert(i + 1, m);
            g.insert(i + 1, v);
        }
    }

    let brackets: Vec<usize> = (0..s.len().saturating_sub(1)).filter(|&i| (g[i] > 0.0) != (g[i + 1] > 0.0)).collect();
    let crossings = brackets
        .par_iter()
        .map(|&i| {
            let direction = if g[i + 1] > 0.0 { CrossingDirection::Up } else { CrossingDirection::Down };
            let (mut a, mut b) = (s[i], s[i + 1]);
            let mut ga = g[i];
            let mut best = if g[i].abs() < g[i + 1].abs() { (a, g[i]) } else { (b, g[i + 1]) };
            for _ in 0..200 {
                if best.1.abs() < options.bisection_tol || b - a <= 4.0 * f64::EPSILON * b {
                    break;
                }
                let m = midpoint(a, b);
                let gm = growth_at(m)?;
                if gm.abs() < best.1.abs() {
                    best = (m, gm);
                }
                if (gm > 0.0) == (ga > 0.0) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            Ok(Crossing { s: best.0, residual: best.1, direction })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DispersionCurve { s, re_mu_star: g, crossings, reaction_stable: reaction_stable(model)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{gierer_meinhardt, GmParams};
    use crate::laplacian::{build_case_a, build_case_b, case_b_rescaled_rates};
    use crate::network::generate_ba;

    #[test]
    fn grid_endpoints() {
        let g = default_grid();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[199], 1e2);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn reaction_stable_at_zero() {
        let net = generate_ba(20, 2, 2).unwrap();
        let l = build_case_a(&net, 1.0).unwrap();
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let mut grid = vec![0.0];
        grid.extend(log_grid(1e-3, 10.0, 30));
        let curve = dispersion_relation(&l, &gm, &[1.0, 1.0 / 256.0], &grid, &DispersionOptions::default()).unwrap();
        assert!(curve.re_mu_star[0] < 0.0);
        assert!(curve.reaction_stable);
    }

    #[test]
    fn modal_and_full_sweeps_agree() {
        let net = generate_ba(25, 2, 9).unwrap();
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let (au, av) = case_b_rescaled_rates(&net, 1.0 / 256.0, 1.0).unwrap();
        let l = build_case_b(&net, 1.0).unwrap();
        let grid = log_grid(1e-2, 1e2, 25);
        let modal = dispersion_relation(&l, &gm, &[au, av], &grid, &DispersionOptions::default()).unwrap();
        let full_opts = DispersionOptions { strategy: SweepStrategy::Full, ..Default::default() };
        let full = dispersion_relation(&l, &gm, &[au, av], &grid, &full_opts).unwrap();
        assert_eq!(modal.s.len(), full.s.len());
        for (a, b) in modal.re_mu_star.iter().zip(&full.re_mu_star) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let (w1, w2) = (modal.turing_window().unwrap(), full.turing_window().unwrap());
        assert!((w1.0 / w2.0 - 1.0).abs() < 1e-6 && (w1.1 / w2.1 - 1.0).abs() < 1e-6);
        for c in modal.crossings.iter().chain(&full.crossings) {
            assert!(c.residual.abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let net = generate_ba(10, 2, 2).unwrap();
        let l = build_case_b(&net, 1.0).unwrap();
        let gm = gierer_meinhardt(GmParams::standard()).unwrap();
        let o = DispersionOptions::default();
        assert!(dispersion_relation(&l, &gm, &[1.0, 1.0], &[], &o).is_err());
        assert!(dispersion_relation(&l, &gm, &[1.0, 1.0], &[1.0, 0.5], &o).is_err());
        assert!(dispersion_relation(&l, &gm, &[1.0, 1.0], &[-1.0, 0.5], &o).is_err());
    }

    #[test]
    fn csv_format() {
        let curve = DispersionCurve { s: vec![0.5], re_mu_star: vec![-0.25], crossings: vec![], reaction_stable: true };
        assert_eq!(curve.to_csv(), "s,re_mu_star\n5.0000000000000000e-1,-2.5000000000000000e-1\n");
    }
}
