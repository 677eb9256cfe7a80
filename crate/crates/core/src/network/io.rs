//! Edge-list text format.
//!
//! ```text
//! # vertices 3
//! 0 1
//! 1 2
//! ```
//!
//! Indices are 0-based, one edge per line. Blank lines and further `#`
//! comment lines are ignored. The writer emits edges as `i j` with `i < j`
//! in lexicographic order, which is the canonical form.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use super::Network;
use crate::error::{Error, Result};

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text)
}

pub fn save_edge_list(network: &Network, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_edge_list(network))?;
    Ok(())
}

pub fn write_edge_list(network: &Network) -> String {
    let mut out = format!("# vertices {}\n", network.vertex_count());
    for (i, j) in network.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Network> {
    let mut vertex_count: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        if let Some(comment) = line.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            if parts.next() == Some("vertices") {
                if vertex_count.is_some() {
                    return Err(err("repeated vertices header".into()));
                }
                let n = parts
                    .next()
                    .ok_or_else(|| err("missing vertex count".into()))?
                    .parse::<usize>()
                    .map_err(|e| err(format!("bad vertex count: {e}")))?;
                if n == 0 {
                    return Err(err("vertex count must be positive".into()));
                }
                vertex_count = Some(n);
            }
            continue;
        }
        let n = vertex_count.ok_or_else(|| err("edge before '# vertices J' header".into()))?;
        let mut parts = line.split_whitespace();
        let mut index = |name: &str| -> Result<usize> {
            parts
                .next()
                .ok_or_else(|| err(format!("missing {name} endpoint")))?
                .parse::<usize>()
                .map_err(|e| err(format!("bad {name} endpoint: {e}")))
        };
        let i = index("first")?;
        let j = index("second")?;
        if parts.next().is_some() {
            return Err(err("expected exactly two indices".into()));
        }
        if i >= n || j >= n {
            return Err(err(format!("index out of range for {n} vertices")));
        }
        if i == j {
            return Err(err(format!("self-loop at vertex {i}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(err(format!("duplicate edge ({i}, {j})")));
        }
        edges.push((i, j));
    }

    let n = vertex_count.ok_or(Error::Parse { line: 0, message: "missing '# vertices J' header".into() })?;
    Network::from_edges(n, edges)
}
