//! Dense nonsymmetric eigensolver.
//!
//! Eigenvalues come from diagonal balancing, Householder reduction to upper
//! Hessenberg form and the Francis double-shift QR iteration. Eigenvectors,
//! when requested, are recovered by complex inverse iteration against the
//! original (unbalanced) matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// QR sweeps allowed per eigenvalue before giving up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;
const INVERSE_ITERATION_STEPS: usize = 3;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Sorted by decreasing real part, then decreasing imaginary part.
    pub values: Vec<Complex64>,
    /// Unit-norm eigenvectors aligned with `values`, when requested.
    pub vectors: Option<Vec<DVector<Complex64>>>,
}

/// Row-major square working matrix.
struct Work {
    n: usize,
    a: Vec<f64>,
}

impl Work {
    fn from(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = m[(i, j)];
            }
        }
        Self { n, a }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Scales rows and columns by powers of two until their off-diagonal norms
/// are comparable. A diagonal similarity, so the spectrum is unchanged.
fn balance(w: &mut Work) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = w.n;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += w.at(j, i).abs();
                    r += w.at(i, j).abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    *w.at_mut(i, j) *= ginv;
                }
                for j in 0..n {
                    *w.at_mut(j, i) *= f;
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (orthogonal similarity).
fn hessenberg(w: &mut Work) {
    let n = w.n;
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    let mut col = vec![0.0; n];
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| w.at(i, m - 1).abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..=high).rev() {
            ort[i] = w.at(i, m - 1) / scale;
            h += ort[i] * ort[i];
        }
        let mut g = h.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        h -= ort[m] * g;
        ort[m] -= g;

        // H <- (I - u u^T / h) H
        col[m..n].iter_mut().for_each(|c| *c = 0.0);
        for i in m..=high {
            let oi = ort[i];
            let row = &w.a[i * n..(i + 1) * n];
            for j in m..n {
                col[j] += oi * row[j];
            }
        }
        for j in m..n {
            col[j] /= h;
        }
        for i in m..=high {
            let oi = ort[i];
            let row = &mut w.a[i * n..(i + 1) * n];
            for j in m..n {
                row[j] -= col[j] * oi;
            }
        }

        // H <- H (I - u u^T / h)
        for i in 0..=high {
            let row = &mut w.a[i * n..(i + 1) * n];
            let f: f64 = (m..=high).map(|j| ort[j] * row[j]).sum::<f64>() / h;
            for j in m..=high {
                row[j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        *w.at_mut(m, m - 1) = scale * g;
    }
    for i in 2..n {
        for j in 0..i - 1 {
            *w.at_mut(i, j) = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hessenberg_qr(w: &mut Work) -> Result<Vec<Complex64>> {
    let n = w.n;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let eps = f64::EPSILON;

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += w.at(i, j).abs();
        }
    }

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            // Look for a negligible subdiagonal element.
            let mut l = nu;
            while l >= 1 {
                let mut s = w.at(l - 1, l - 1).abs() + w.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if w.at(l, l - 1).abs() <= eps * s {
                    *w.at_mut(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }

            let mut x = w.at(nu, nu);
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = w.at(nu - 1, nu - 1);
            let mut ww = w.at(nu, nu - 1) * w.at(nu - 1, nu);
            if l == nu - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + ww;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nu - 1] = x + z;
                    wr[nu] = if z != 0.0 { x - ww / z } else { x + z };
                    wi[nu - 1] = 0.0;
                    wi[nu] = 0.0;
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = z;
                    wi[nu] = -z;
                }
                nn -= 2;
                break;
            }

            if its == MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::EigenNoConvergence(nu + 1));
            }
            if its > 0 && its % 10 == 0 {
                // Exceptional shift.
                t += x;
                for i in 0..=nu {
                    *w.at_mut(i, i) -= x;
                }
                let s = w.at(nu, nu - 1).abs() + w.at(nu - 1, nu - 2).abs();
                x = 0.75 * s;
                y = x;
                ww = -0.4375 * s * s;
            }
            its += 1;

            // Find two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = w.at(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - ww) / w.at(m + 1, m) + w.at(m, m + 1);
                q = w.at(m + 1, m + 1) - z - rr - ss;
                r = w.at(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = w.at(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (w.at(m - 1, m - 1).abs() + z.abs() + w.at(m + 1, m + 1).abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                *w.at_mut(i, i - 2) = 0.0;
                if i != m + 2 {
                    *w.at_mut(i, i - 3) = 0.0;
                }
            }

            // Double QR step on rows l..=nu and columns m..=nu.
            let mut xk = 0.0;
            for k in m..nu {
                if k != m {
                    p = w.at(k, k - 1);
                    q = w.at(k + 1, k - 1);
                    r = if k != nu - 1 { w.at(k + 2, k - 1) } else { 0.0 };
                    xk = p.abs() + q.abs() + r.abs();
                    if xk != 0.0 {
                        p /= xk;
                        q /= xk;
                        r /= xk;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        *w.at_mut(k, k - 1) = -w.at(k, k - 1);
                    }
                } else {
                    *w.at_mut(k, k - 1) = -s * xk;
                }
                p += s;
                let hx = p / s;
                let hy = q / s;
                let hz = r / s;
                q /= p;
                r /= p;
                let third = k != nu - 1;
                for j in k..=nu {
                    let mut pp = w.at(k, j) + q * w.at(k + 1, j);
                    if third {
                        pp += r * w.at(k + 2, j);
                        *w.at_mut(k + 2, j) -= pp * hz;
                    }
                    *w.at_mut(k + 1, j) -= pp * hy;
                    *w.at_mut(k, j) -= pp * hx;
                }
                let mmin = nu.min(k + 3);
                for i in l..=mmin {
                    let mut pp = hx * w.at(i, k) + hy * w.at(i, k + 1);
                    if third {
                        pp += hz * w.at(i, k + 2);
                        *w.at_mut(i, k + 2) -= pp * r;
                    }
                    *w.at_mut(i, k + 1) -= pp * q;
                    *w.at_mut(i, k) -= pp;
                }
            }
            if l >= nu - 1 {
                break;
            }
        }
    }

    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

fn check_input(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameters("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    check_input(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut w = Work::from(a);
    balance(&mut w);
    hessenberg(&mut w);
    let mut values = hessenberg_qr(&mut w)?;
    sort_spectrum(&mut values);
    Ok(values)
}

/// Eigenvalues, and optionally unit eigenvectors, of a real square matrix.
pub fn eigen_spectrum(a: &DMatrix<f64>, with_vectors: bool) -> Result<EigenDecomposition> {
    let values = eigenvalues(a)?;
    let vectors = if with_vectors {
        Some(values.iter().map(|&lambda| eigenvector(a, lambda)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(EigenDecomposition { values, vectors })
}

/// Unit eigenvector for an (approximate) eigenvalue by inverse iteration.
pub fn eigenvector(a: &DMatrix<f64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    check_input(a)?;
    let n = a.nrows();
    let norm = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    // Shift slightly off the eigenvalue so the factorization is nonsingular.
    let shift = lambda + Complex64::new(norm * 1e3 * f64::EPSILON, norm * 1e3 * f64::EPSILON * 0.5);
    let mut b: DMatrix<Complex64> = a.map(|v| Complex64::new(v, 0.0));
    for i in 0..n {
        b[(i, i)] -= shift;
    }
    let lu = b.lu();
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), 0.0));
    v /= Complex64::new(v.norm(), 0.0);
    for _ in 0..INVERSE_ITERATION_STEPS {
        let next = lu.solve(&v).ok_or(Error::Singular(f64::INFINITY))?;
        let nrm = next.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::Singular(f64::INFINITY));
        }
        v = next / Complex64::new(nrm, 0.0);
    }
    // Fix the phase so the largest component is real and positive.
    let (imax, _) = v.iter().enumerate().fold((0, 0.0), |best, (i, c)| if c.norm() > best.1 { (i, c.norm()) } else { best });
    let phase = v[imax] / Complex64::new(v[imax].norm(), 0.0);
    Ok(v / phase)
}

/// `||A v - lambda v||_2` for a unit vector `v`.
pub fn eigen_residual(a: &DMatrix<f64>, lambda: Complex64, v: &DVector<Complex64>) -> f64 {
    let ac: DMatrix<Complex64> = a.map(|x| Complex64::new(x, 0.0));
    (ac * v - v * lambda).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn identity() {
        let values = eigenvalues(&DMatrix::identity(3, 3)).unwrap();
        assert!(values.iter().all(|v| close(*v, Complex64::new(1.0, 0.0), 1e-14)));
    }

    #[test]
    fn rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let values = eigenvalues(&a).unwrap();
        assert!(close(values[0], Complex64::new(0.0, 1.0), 1e-14));
        assert!(close(values[1], Complex64::new(0.0, -1.0), 1e-14));
    }

    #[test]
    fn triangular_and_small() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 5.0, -1.0, 0.0, -3.0, 7.0, 0.0, 0.0, 0.5]);
        let values = eigenvalues(&a).unwrap();
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        assert!((re[0] - 2.0).abs() < 1e-13 && (re[1] - 0.5).abs() < 1e-13 && (re[2] + 3.0).abs() < 1e-13);
        assert_eq!(eigenvalues(&DMatrix::from_element(1, 1, -4.0)).unwrap(), vec![Complex64::new(-4.0, 0.0)]);
        assert!(eigenvalues(&DMatrix::<f64>::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn badly_scaled_companion() {
        // (z - 1)(z - 10)(z - 100)(z - 1000) = z^4 - 1111 z^3 + 112110 z^2 - 1111000 z + 1e6
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[1111.0, -112110.0, 1111000.0, -1e6, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        );
        let values = eigenvalues(&a).unwrap();
        for (v, expected) in values.iter().zip([1000.0, 100.0, 10.0, 1.0]) {
            assert!((v.re - expected).abs() < 1e-8 * expected, "{v} vs {expected}");
            assert!(v.im.abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, -2.0, 1.0, 3.0, 6.0, -4.0, 2.0, 1.0, 8.0]);
        let dec = eigen_spectrum(&a, true).unwrap();
        let norm = a.norm();
        for (lambda, v) in dec.values.iter().zip(dec.vectors.unwrap()) {
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!(eigen_residual(&a, *lambda, &v) <= 1e-10 * norm);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, f64::NAN, 0.0, 1.0]);
        assert!(eigenvalues(&a).is_err());
        assert!(eigenvalues(&DMatrix::zeros(2, 3)).is_err());
    }
}
