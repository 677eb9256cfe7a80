//! CTRW network Laplacians for exponential waiting times.
//!
//! Entry `L[i][j]` couples source vertex `i` to destination vertex `j`:
//!
//! ```text
//! L[i][j] = alpha(i) * lambda(i -> j) - alpha(j) * delta(i, j)
//! du_j/dt = sum_i L[i][j] * u_i
//! ```
//!
//! so the operator acting on a concentration vector is the *transpose* of
//! the stored matrix. Every consumer goes through [`LaplacianMatrix::apply`],
//! [`LaplacianMatrix::evolution_operator`] or [`SparseOperator`] rather than
//! multiplying `entries()` directly.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;

/// Row-sum tolerance for jump matrices handed to [`build_general`].
const JUMP_NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplacianVariant {
    /// Identical waiting-time rate on every vertex.
    CaseA,
    /// Waiting-time rate proportional to vertex degree (the graph Laplacian).
    CaseB,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RateParams {
    CaseA { alpha: f64 },
    CaseB { alpha: f64 },
    General { alpha_per_vertex: Vec<f64> },
}

/// How `entries` maps onto the evolution equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexConvention {
    /// `du_j/dt = sum_i L[i][j] u_i`: rows are sources, columns destinations.
    SourceRowDestinationColumn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    entries: DMatrix<f64>,
    variant: LaplacianVariant,
    rates: RateParams,
    convention: IndexConvention,
}

impl LaplacianMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn variant(&self) -> LaplacianVariant {
        self.variant
    }

    pub fn rates(&self) -> &RateParams {
        &self.rates
    }

    pub fn convention(&self) -> IndexConvention {
        self.convention
    }

    /// The matrix `M` with `du/dt = M u`.
    pub fn evolution_operator(&self) -> DMatrix<f64> {
        match self.convention {
            IndexConvention::SourceRowDestinationColumn => self.entries.transpose(),
        }
    }

    /// Evaluates `sum_i L[i][j] u_i` for every destination `j`.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.len() });
        }
        let mut out = vec![0.0; n];
        match self.convention {
            IndexConvention::SourceRowDestinationColumn => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = self.entries.column(j).iter().zip(u).map(|(l, x)| l * x).sum();
                }
            }
        }
        Ok(out)
    }

    /// Compressed form of the evolution operator for repeated application.
    pub fn sparse_operator(&self) -> SparseOperator {
        SparseOperator::from_dense(&self.evolution_operator())
    }

    /// Largest `|sum_j L[i][j]|` over rows.
    pub fn max_row_sum(&self) -> f64 {
        self.entries.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i + 1..n).all(|j| (self.entries[(i, j)] - self.entries[(j, i)]).abs() <= tol))
    }

    /// Full dense matrix, row-major, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.entries.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Row-compressed real matrix used for the diffusion term during integration.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    n: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for r in 0..n {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != 0.0 {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_start.push(cols.len());
        }
        Self { n, row_start, cols, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `out = scale * M x`.
    pub fn mul_into(&self, scale: f64, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate().take(self.n) {
            let span = self.row_start[r]..self.row_start[r + 1];
            let acc: f64 = self.cols[span.clone()].iter().zip(&self.values[span]).map(|(&c, v)| v * x[c]).sum();
            *o = scale * acc;
        }
    }
}

/// Uniform jump probabilities over edges: row `i` holds `A[i][j] / k_i`.
pub fn uniform_jump_matrix(network: &Network) -> Result<DMatrix<f64>> {
    network.require_positive_degrees()?;
    let n = network.vertex_count();
    let mut jump = DMatrix::zeros(n, n);
    for i in 0..n {
        let k = network.degree(i) as f64;
        for &j in network.neighbors(i) {
            jump[(i, j)] = 1.0 / k;
        }
    }
    Ok(jump)
}

/// General CTRW Laplacian from per-vertex rates and a jump matrix whose row
/// `i` is the distribution of destinations for a walker leaving `i`.
pub fn build_general(network: &Network, alpha_per_vertex: &[f64], jump: &DMatrix<f64>) -> Result<LaplacianMatrix> {
    let n = network.vertex_count();
    if alpha_per_vertex.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alpha_per_vertex.len() });
    }
    if jump.nrows() != n || jump.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: jump.nrows().max(jump.ncols()) });
    }
    if let Some((j, a)) = alpha_per_vertex.iter().enumerate().find(|(_, a)| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameters(format!("alpha at vertex {j} must be positive, got {a}")));
    }
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            let p = jump[(i, j)];
            if p < 0.0 {
                return Err(Error::InvalidParameters(format!("negative jump probability at ({i}, {j})")));
            }
            if p != 0.0 && !network.has_edge(i, j) {
                return Err(Error::JumpOnNonEdge { from: i, to: j });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > JUMP_NORMALIZATION_TOL {
            return Err(Error::JumpNotNormalized { row: i, sum });
        }
    }
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = alpha_per_vertex[i] * jump[(i, j)];
        }
        entries[(i, i)] -= alpha_per_vertex[i];
    }
    Ok(LaplacianMatrix {
        entries,
        variant: LaplacianVariant::General,
        rates: RateParams::General { alpha_per_vertex: alpha_per_vertex.to_vec() },
        convention: IndexConvention::SourceRowDestinationColumn,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!("alpha must be positive and finite, got {alpha}")))
    }
}

/// `L[i][j] = alpha * (A[i][j] / k_i - delta(i, j))`.
pub fn build_case_a(network: &Network, alpha: f64) -> Result<LaplacianMatrix> {
    check_alpha(alpha)?;
    network.require_positive_degrees()?;
    let n = network.vertex_count();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        let k = network.degree(i) as f64;
        for &j in network.neighbors(i) {
            entries[(i, j)] = alpha / k;
        }
        entries[(i, i)] = -(alpha / k) * k;
    }
    Ok(LaplacianMatrix {
        entries,
        variant: LaplacianVariant::CaseA,
        rates: RateParams::CaseA { alpha },
        convention: IndexConvention::SourceRowDestinationColumn,
    })
}

/// `L[i][j] = alpha * (A[i][j] - k_j delta(i, j))`.
pub fn build_case_b(network: &Network, alpha: f64) -> Result<LaplacianMatrix> {
    check_alpha(alpha)?;
    let n = network.vertex_count();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for &j in network.neighbors(i) {
            entries[(i, j)] = alpha;
        }
        entries[(i, i)] = -alpha * network.degree(i) as f64;
    }
    Ok(LaplacianMatrix {
        entries,
        variant: LaplacianVariant::CaseB,
        rates: RateParams::CaseB { alpha },
        convention: IndexConvention::SourceRowDestinationColumn,
    })
}

/// Scales base species rates by `J / sum_j k_j` so the mean waiting time of
/// the degree-proportional operator matches the uniform one.
pub fn case_b_rescaled_rates(network: &Network, base_alpha_u: f64, base_alpha_v: f64) -> Result<(f64, f64)> {
    let degree_sum = network.degree_sum();
    if degree_sum == 0 {
        return Err(Error::InvalidParameters("network has no edges; degree sum is zero".into()));
    }
    let factor = network.vertex_count() as f64 / degree_sum as f64;
    Ok((base_alpha_u * factor, base_alpha_v * factor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::generate_ba;

    fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows.len(), rows[0].len(), &rows.concat())
    }

    #[test]
    fn general_two_vertex_exchange() {
        let p2 = Network::path(2).unwrap();
        let jump = mat(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let l = build_general(&p2, &[1.0, 1.0], &jump).unwrap();
        assert_eq!(l.entries(), &mat(&[&[-1.0, 1.0], &[1.0, -1.0]]));
        assert_eq!(l.variant(), LaplacianVariant::General);
    }

    #[test]
    fn general_matches_named_cases() {
        let net = generate_ba(30, 2, 4).unwrap();
        let jump = uniform_jump_matrix(&net).unwrap();
        let a = build_general(&net, &vec![0.7; 30], &jump).unwrap();
        assert!((a.entries() - build_case_a(&net, 0.7).unwrap().entries()).amax() < 1e-15);
        let alpha_b: Vec<f64> = net.degrees().iter().map(|&k| 0.3 * k as f64).collect();
        let b = build_general(&net, &alpha_b, &jump).unwrap();
        assert!((b.entries() - build_case_b(&net, 0.3).unwrap().entries()).amax() < 1e-15);
    }

    #[test]
    fn general_rejects_bad_jumps() {
        let p3 = Network::path(3).unwrap();
        let bad_norm = mat(&[&[0.0, 0.5, 0.0], &[0.5, 0.0, 0.5], &[0.0, 1.0, 0.0]]);
        assert!(matches!(build_general(&p3, &[1.0; 3], &bad_norm), Err(Error::JumpNotNormalized { row: 0, .. })));
        let non_edge = mat(&[&[0.0, 0.0, 1.0], &[0.5, 0.0, 0.5], &[0.0, 1.0, 0.0]]);
        assert!(matches!(
            build_general(&p3, &[1.0; 3], &non_edge),
            Err(Error::JumpOnNonEdge { from: 0, to: 2 })
        ));
        let ok = uniform_jump_matrix(&p3).unwrap();
        assert!(build_general(&p3, &[1.0, 0.0, 1.0], &ok).is_err());
    }

    #[test]
    fn case_a_cycle_and_path() {
        let c3 = build_case_a(&Network::cycle(3).unwrap(), 1.0).unwrap();
        assert_eq!(c3.entries(), &mat(&[&[-1.0, 0.5, 0.5], &[0.5, -1.0, 0.5], &[0.5, 0.5, -1.0]]));
        let p3 = build_case_a(&Network::path(3).unwrap(), 1.0).unwrap();
        assert_eq!(p3.entries()[(0, 1)], 1.0);
        assert_eq!(p3.entries()[(1, 0)], 0.5);
        assert!(!p3.is_symmetric(0.0));
    }

    #[test]
    fn case_a_star_degree_vector_is_stationary() {
        let l = build_case_a(&Network::star(4).unwrap(), 1.0).unwrap();
        let du = l.apply(&[3.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(du.iter().all(|x| x.abs() < 1e-15), "{du:?}");
    }

    #[test]
    fn case_a_rejects_isolated_vertex() {
        let net = Network::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(build_case_a(&net, 1.0), Err(Error::ZeroDegree(2))));
    }

    #[test]
    fn case_b_star_and_constant_null() {
        let l = build_case_b(&Network::star(4).unwrap(), 1.0).unwrap();
        let expected = mat(&[
            &[-3.0, 1.0, 1.0, 1.0],
            &[1.0, -1.0, 0.0, 0.0],
            &[1.0, 0.0, -1.0, 0.0],
            &[1.0, 0.0, 0.0, -1.0],
        ]);
        assert_eq!(l.entries(), &expected);
        assert_eq!(l.apply(&[2.5; 4]).unwrap(), vec![0.0; 4]);
        let p2 = build_case_b(&Network::path(2).unwrap(), 1.0).unwrap();
        assert_eq!(p2.entries(), &mat(&[&[-1.0, 1.0], &[1.0, -1.0]]));
    }

    #[test]
    fn apply_uses_column_convention() {
        // L[0][1] = 1 and L[1][0] = 1/2 on P3: vertex 1 receives 1 * u_0.
        let l = build_case_a(&Network::path(3).unwrap(), 1.0).unwrap();
        let du = l.apply(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(du, vec![-1.0, 1.0, 0.0]);
        let m = l.evolution_operator();
        let dense: Vec<f64> = (&m * nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0])).iter().copied().collect();
        assert_eq!(du, dense);
        let mut sparse = vec![0.0; 3];
        l.sparse_operator().mul_into(1.0, &[1.0, 0.0, 0.0], &mut sparse);
        assert_eq!(du, sparse);
    }

    #[test]
    fn rescaled_rates() {
        let (au, av) = case_b_rescaled_rates(&Network::complete(4).unwrap(), 1.0, 1.0 / 256.0).unwrap();
        assert!((au - 1.0 / 3.0).abs() < 1e-16);
        assert!((av - 1.0 / 768.0).abs() < 1e-18);
        let single = Network::from_edges(1, []).unwrap();
        assert!(case_b_rescaled_rates(&single, 1.0, 1.0).is_err());
    }

    #[test]
    fn csv_dump_is_row_major() {
        let l = build_case_b(&Network::path(2).unwrap(), 1.0).unwrap();
        let csv = l.to_csv();
        let first: Vec<f64> = csv.lines().next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first, vec![-1.0, 1.0]);
    }
}
