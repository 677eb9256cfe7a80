//! Undirected simple graphs and their generators.

mod generators;
mod io;

pub use generators::{generate, generate_ba, generate_ws, ring_lattice, GeneratorConfig, Variant};
pub use io::{load_edge_list, parse_edge_list, save_edge_list, write_edge_list};

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An undirected simple graph on vertices `0..vertex_count`.
///
/// Neighbor lists are kept sorted, so edge queries are a binary search and
/// iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Network {
    /// Builds a network from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if vertex_count == 0 {
            return Err(Error::InvalidParameters("network must have at least one vertex".into()));
        }
        let mut neighbors = vec![Vec::new(); vertex_count];
        let mut edge_count = 0;
        for (i, j) in edges {
            if i >= vertex_count || j >= vertex_count {
                return Err(Error::InvalidParameters(format!(
                    "edge ({i}, {j}) out of range for {vertex_count} vertices"
                )));
            }
            if i == j {
                return Err(Error::InvalidParameters(format!("self-loop at vertex {i}")));
            }
            neighbors[i].push(j);
            neighbors[j].push(i);
            edge_count += 1;
        }
        for (i, list) in neighbors.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameters(format!("duplicate edge ({i}, {})", w[0])));
            }
        }
        Ok(Self { neighbors, edge_count })
    }

    pub(crate) fn from_sorted_neighbors(neighbors: Vec<Vec<usize>>) -> Self {
        let edge_count = neighbors.iter().map(Vec::len).sum::<usize>() / 2;
        Self { neighbors, edge_count }
    }

    /// Cycle `C_n`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameters(format!("cycle needs n >= 3, got {n}")));
        }
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Self> {
        Self::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
    }

    /// Star with hub `0` and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameters(format!("star needs n >= 2, got {n}")));
        }
        Self::from_edges(n, (1..n).map(|i| (0, i)))
    }

    /// Path `P_n`.
    pub fn path(n: usize) -> Result<Self> {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.neighbors[vertex].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn degree_sum(&self) -> usize {
        2 * self.edge_count
    }

    pub fn min_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn neighbors(&self, vertex: usize) -> &[usize] {
        &self.neighbors[vertex]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let n = self.vertex_count();
        let mut a = DMatrix::zeros(n, n);
        for (i, j) in self.edges() {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    /// Adjacency as an array of 0/1 rows, for JSON dumps.
    pub fn adjacency_rows(&self) -> Vec<Vec<u8>> {
        let n = self.vertex_count();
        (0..n)
            .map(|i| {
                let mut row = vec![0u8; n];
                for &j in &self.neighbors[i] {
                    row[j] = 1;
                }
                row
            })
            .collect()
    }

    pub fn adjacency_json(&self) -> String {
        serde_json::to_string(&self.adjacency_rows()).expect("adjacency rows serialize")
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.neighbors[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Fails with [`Error::ZeroDegree`] if some vertex is isolated.
    pub fn require_positive_degrees(&self) -> Result<()> {
        match self.neighbors.iter().position(Vec::is_empty) {
            Some(v) => Err(Error::ZeroDegree(v)),
            None => Ok(()),
        }
    }
}
