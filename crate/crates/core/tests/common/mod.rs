//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use ctrw_patterns::kinetics::ReactionModel;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0))
}

/// `p'(z) / p(z)` for `p(z) = det(zI - A)`, i.e. `tr((zI - A)^{-1})`.
/// `None` when `z` is numerically an eigenvalue.
fn log_derivative(a: &DMatrix<f64>, z: Complex64) -> Option<Complex64> {
    let n = a.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { z - a[(i, j)] } else { Complex64::new(-a[(i, j)], 0.0) });
    let inv = m.lu().try_inverse()?;
    let tr: Complex64 = (0..n).map(|i| inv[(i, i)]).sum();
    tr.is_finite().then_some(tr)
}

/// Roots of the characteristic polynomial by simultaneous Aberth-Ehrlich
/// iteration. Uses only LU factorizations, so it shares no code path with
/// the QR eigensolver.
pub fn characteristic_roots(a: &DMatrix<f64>) -> Vec<Complex64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0 + a.iter().fold(0.0_f64, |m, v| m.max(v.abs())) * n as f64;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.7, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut biggest = 0.0_f64;
        for k in 0..n {
            let Some(ld) = log_derivative(a, z[k]) else { continue };
            let newton = 1.0 / ld;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = newton / (1.0 - newton * repulsion);
            if step.is_finite() {
                z[k] -= step;
                biggest = biggest.max(step.norm() / z[k].norm().max(1.0));
            }
        }
        if biggest < 1e-15 {
            break;
        }
    }
    z
}

/// Largest distance in an optimal one-to-one matching of two small
/// multisets (exhaustive over greedy orders seeded from each point).
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut best = f64::INFINITY;
    for start in 0..a.len().max(1) {
        let mut used = vec![false; b.len()];
        let mut worst = 0.0_f64;
        for i in (0..a.len()).map(|i| (i + start) % a.len()) {
            let (j, d) = (0..b.len())
                .filter(|&j| !used[j])
                .map(|j| (j, (a[i] - b[j]).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("sizes agree");
            used[j] = true;
            worst = worst.max(d);
        }
        best = best.min(worst);
    }
    if a.is_empty() {
        0.0
    } else {
        best
    }
}

/// Central-difference Jacobian with step `1e-6 * max(1, |x_b|)`.
pub fn finite_difference_jacobian(model: &dyn ReactionModel, x: &[f64]) -> DMatrix<f64> {
    let m = model.species_count();
    let mut out = DMatrix::zeros(m, m);
    let mut plus = vec![0.0; m];
    let mut minus = vec![0.0; m];
    for b in 0..m {
        let h = 1e-6 * x[b].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[b] += h;
        xm[b] -= h;
        model.rates(&xp, &mut plus).unwrap();
        model.rates(&xm, &mut minus).unwrap();
        for a in 0..m {
            out[(a, b)] = (plus[a] - minus[a]) / (2.0 * h);
        }
    }
    out
}

/// Angle between two real vectors in radians.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}
