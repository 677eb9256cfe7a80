mod common;

use common::{characteristic_roots, matching_distance, random_matrix, rng};
use ctrw_patterns::analysis::{eigen_residual, eigen_spectrum, eigenvalues};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

#[test]
fn random_8x8_matches_characteristic_roots() {
    let mut r = rng(8);
    for _ in 0..20 {
        let a = random_matrix(&mut r, 8);
        let qr = eigenvalues(&a).unwrap();
        let roots = characteristic_roots(&a);
        let d = matching_distance(&qr, &roots);
        assert!(d < 1e-6, "distance {d:e}");
    }
}

#[test]
fn mixed_sizes_and_scales() {
    let mut r = rng(21);
    for trial in 0..100 {
        let n = r.gen_range(1..=12);
        let scale = 10f64.powi(r.gen_range(-3..=3));
        let a = random_matrix(&mut r, n) * scale;
        let qr = eigenvalues(&a).unwrap();
        assert_eq!(qr.len(), n);
        let d = matching_distance(&qr, &characteristic_roots(&a));
        assert!(d < 1e-6 * scale.max(1.0), "trial {trial}: n = {n}, distance {d:e}");
    }
}

#[test]
fn spectra_are_closed_under_conjugation() {
    let mut r = rng(5);
    for _ in 0..50 {
        let n = r.gen_range(2..=12);
        let values = eigenvalues(&random_matrix(&mut r, n)).unwrap();
        let conj: Vec<Complex64> = values.iter().map(|v| v.conj()).collect();
        assert!(matching_distance(&values, &conj) < 1e-8);
    }
}

#[test]
fn eigenpairs_have_small_backward_error() {
    let mut r = rng(13);
    for _ in 0..50 {
        let n = r.gen_range(1..=12);
        let a = random_matrix(&mut r, n);
        let norm = a.norm();
        let dec = eigen_spectrum(&a, true).unwrap();
        for (lambda, v) in dec.values.iter().zip(dec.vectors.as_ref().unwrap()) {
            assert!((v.norm() - 1.0).abs() < 1e-10);
            assert!(eigen_residual(&a, *lambda, v) <= 1e-8 * norm);
        }
    }
}

#[test]
fn structured_matrices() {
    // Companion matrix of (z - 1)(z - 2)(z - 3)(z - 4).
    let c = DMatrix::from_row_slice(4, 4, &[10.0, -35.0, 50.0, -24.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let expected: Vec<Complex64> = [4.0, 3.0, 2.0, 1.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    assert!(matching_distance(&eigenvalues(&c).unwrap(), &expected) < 1e-9);
    // Jordan block: a defective eigenvalue is located to ~sqrt(eps).
    let j = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 0.0, 3.0]);
    assert!(eigenvalues(&j).unwrap().iter().all(|v| (v - Complex64::new(3.0, 0.0)).norm() < 1e-7));
    // Zero matrix and 1x1.
    assert!(eigenvalues(&DMatrix::zeros(5, 5)).unwrap().iter().all(|v| v.norm() == 0.0));
    assert_eq!(eigenvalues(&DMatrix::from_element(1, 1, -2.5)).unwrap(), vec![Complex64::new(-2.5, 0.0)]);
}
