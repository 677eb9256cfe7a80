use nalgebra::{DMatrix, DVector};

use super::eigen;
use super::stability::assemble_system_jacobian;
use crate::error::{Error, Result};
use crate::kinetics::{self, ReactionModel};
use crate::laplacian::LaplacianMatrix;

/// Condition-number estimate above which the predictor refuses to solve.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct PredictedPattern {
    /// Offset from the homogeneous state, species-major.
    pub delta: Vec<f64>,
    /// Homogeneous state plus `delta`.
    pub pattern: Vec<f64>,
    /// 1-norm condition number of `s Lambda + DF(X*)`.
    pub condition: f64,
}

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Linearized steady pattern around the reaction equilibrium:
///
/// ```text
/// delta = -(s Lambda + DF(X*))^{-1} s Lambda X*
/// ```
///
/// with `X*` the homogeneous state replicated over vertices and
/// `Lambda = diag(rates) (x) M`.
pub fn linear_pattern_predictor(
    laplacian: &LaplacianMatrix,
    model: &dyn ReactionModel,
    rates: &[f64],
    s: f64,
) -> Result<PredictedPattern> {
    let x = kinetics::steady_state(model)?;
    let n = laplacian.dim();
    let m = model.species_count();
    let system = assemble_system_jacobian(laplacian, model, &x, rates, s)?;

    // Symmetric Laplacians with zero row sums also have zero column sums, so
    // the constant vector is annihilated exactly; skip the round-off.
    let constant_null = laplacian.is_symmetric(0.0);
    let mut forcing = DVector::zeros(m * n);
    if !constant_null && s != 0.0 {
        for (a, &xa) in x.iter().enumerate() {
            let transported = laplacian.apply(&vec![xa; n])?;
            for (j, t) in transported.iter().enumerate() {
                forcing[a * n + j] = -s * rates[a] * t;
            }
        }
    }

    let lu = system.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::Singular(f64::INFINITY))?;
    let condition = norm1(&system) * norm1(&inverse);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::Singular(condition));
    }
    let lu = system.clone().lu();
    let mut delta = lu.solve(&forcing).ok_or(Error::Singular(condition))?;
    // One round of iterative refinement.
    let residual = &forcing - &system * &delta;
    if let Some(correction) = lu.solve(&residual) {
        delta += correction;
    }

    let delta: Vec<f64> = delta.iter().copied().collect();
    let pattern = (0..m * n).map(|i| x[i / n] + delta[i]).collect();
    Ok(PredictedPattern { delta, pattern, condition })
}

/// Unit-sum vector annihilated by the evolution operator.
///
/// Fails with [`Error::ZeroModeDimension`] unless exactly one eigenvalue is
/// zero, which is the case precisely for connected networks.
pub fn zero_mode(laplacian: &LaplacianMatrix) -> Result<Vec<f64>> {
    let op = laplacian.evolution_operator();
    let n = op.nrows();
    let scale = op.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-9 * scale;
    let zeros = eigen::eigenvalues(&op)?.iter().filter(|v| v.norm() <= tol).count();
    if zeros != 1 {
        return Err(Error::ZeroModeDimension(zeros));
    }
    // Replace the last equation by the normalization sum(x) = 1.
    let mut system = op.clone();
    for j in 0..n {
        system[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let lu = system.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::Singular(f64::INFINITY))?;
    let residual = &rhs - &system * &x;
    if let Some(c) = lu.solve(&residual) {
        x += c;
    }
    let sum: f64 = x.iter().sum();
    Ok(x.iter().map(|v| v / sum).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{linear_decay, logistic};
    use crate::laplacian::{build_case_a, build_case_b};
    use crate::network::{generate_ba, Network};

    #[test]
    fn symmetric_laplacian_predicts_nothing() {
        let net = generate_ba(40, 3, 1).unwrap();
        let l = build_case_b(&net, 1.0 / 6.0).unwrap();
        let p = linear_pattern_predictor(&l, &logistic(1.0).unwrap(), &[1.0], 2.0).unwrap();
        assert!(p.delta.iter().all(|d| *d == 0.0));
        assert!(p.pattern.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn consistency_residual() {
        let net = generate_ba(60, 3, 2).unwrap();
        let l = build_case_a(&net, 1.0).unwrap();
        let model = logistic(1.0).unwrap();
        for s in [1e-3, 0.5, 1.0, 30.0, 1e6] {
            let p = linear_pattern_predictor(&l, &model, &[1.0], s).unwrap();
            let sys = assemble_system_jacobian(&l, &model, &[1.0], &[1.0], s).unwrap();
            let lu_star = l.apply(&vec![1.0; 60]).unwrap();
            let lhs = sys * DVector::from_vec(p.delta.clone());
            let worst = (0..60).map(|j| (lhs[j] + s * lu_star[j]).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "s = {s}: residual {worst:e}");
        }
    }

    #[test]
    fn singular_system_is_reported() {
        // s L + Df with Df = 0 is singular (zero mode).
        let l = build_case_a(&Network::star(5).unwrap(), 1.0).unwrap();
        let lin = linear_decay(1.0, 1e-30).unwrap();
        assert!(matches!(linear_pattern_predictor(&l, &lin, &[1.0], 1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn star_zero_mode() {
        let l = build_case_a(&Network::star(4).unwrap(), 1.0).unwrap();
        let z = zero_mode(&l).unwrap();
        let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in z.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let r = l.apply(&z).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn case_b_zero_mode_is_uniform() {
        let net = generate_ba(30, 2, 8).unwrap();
        let z = zero_mode(&build_case_b(&net, 0.4).unwrap()).unwrap();
        assert!(z.iter().all(|v| (v - 1.0 / 30.0).abs() < 1e-13));
    }

    #[test]
    fn disconnected_graph_has_two_zero_modes() {
        let net = Network::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(zero_mode(&build_case_b(&net, 1.0).unwrap()), Err(Error::ZeroModeDimension(2))));
    }
}
