mod common;

use common::{finite_difference_jacobian, rng};
use ctrw_patterns::kinetics::{gierer_meinhardt, linear_decay, logistic, GmParams, ReactionModel};
use rand::Rng;

fn check(model: &dyn ReactionModel, states: impl Iterator<Item = Vec<f64>>) -> usize {
    let mut count = 0;
    for x in states {
        let analytic = model.jacobian(&x).unwrap();
        let numeric = finite_difference_jacobian(model, &x);
        let scale = analytic.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        // Entry (a, b) cannot beat the cancellation floor of its difference
        // quotient, 4 eps |F_a| / h_b.
        let mut rates = vec![0.0; x.len()];
        model.rates(&x, &mut rates).unwrap();
        for a in 0..x.len() {
            for b in 0..x.len() {
                let floor = 4.0 * f64::EPSILON * rates[a].abs() / (1e-6 * x[b].abs().max(1.0));
                let err = (analytic[(a, b)] - numeric[(a, b)]).abs();
                assert!(
                    err <= 1e-6 * scale + floor,
                    "{} at {x:?}, entry ({a}, {b}): error {err:e}, scale {scale:e}",
                    model.name()
                );
            }
        }
        count += 1;
    }
    count
}

#[test]
fn logistic_jacobian() {
    let mut r = rng(1);
    let model = logistic(1.7).unwrap();
    assert!(check(&model, (0..200).map(|_| vec![r.gen_range(-2.0..3.0)])) >= 100);
}

#[test]
fn linear_jacobian() {
    let mut r = rng(2);
    let model = linear_decay(0.3, 2.0).unwrap();
    assert!(check(&model, (0..200).map(|_| vec![r.gen_range(-10.0..10.0)])) >= 100);
}

#[test]
fn gierer_meinhardt_jacobian() {
    let mut r = rng(3);
    let model = gierer_meinhardt(GmParams::standard()).unwrap();
    // Log-uniform over the concentration ranges seen in patterns.
    let states = (0..300).map(|_| vec![10f64.powf(r.gen_range(-1.0..4.0)), 10f64.powf(r.gen_range(-1.0..6.0))]);
    assert!(check(&model, states) >= 100);
}

#[test]
fn gierer_meinhardt_jacobian_at_steady_state() {
    let model = gierer_meinhardt(GmParams::standard()).unwrap();
    let j = model.jacobian(&model.steady_state()).unwrap();
    assert!((j[(0, 0)] - 0.013613).abs() < 1e-5);
    assert!((j[(1, 0)] - 26.4).abs() < 1e-9);
    assert_eq!(j[(1, 1)], -7.0 / 32.0);
    assert!(j[(0, 0)] + j[(1, 1)] < 0.0 && j.determinant() > 0.0);
}
