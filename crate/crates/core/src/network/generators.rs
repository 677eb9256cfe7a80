use std::collections::BTreeSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::Network;
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Attempts allowed before small-world generation gives up on connectivity.
const WS_MAX_ATTEMPTS: usize = 100;
/// First RNG stream used by connectivity retries; sits clear of the named streams.
const WS_RETRY_STREAM_BASE: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Barabási-Albert preferential attachment.
    Ba,
    /// Watts-Strogatz rewired ring lattice.
    Ws,
    Ring,
    Complete,
    Star,
    Path,
}

/// Parameters for [`generate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub variant: Variant,
    pub vertices: usize,
    /// Attachment count (BA) or lattice neighbor count (WS). Ignored otherwise.
    #[serde(default)]
    pub k: usize,
    /// Rewiring probability (WS only).
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub seed: u64,
}

pub fn generate(config: &GeneratorConfig) -> Result<Network> {
    match config.variant {
        Variant::Ba => generate_ba(config.vertices, config.k, config.seed),
        Variant::Ws => generate_ws(config.vertices, config.k, config.p, config.seed),
        Variant::Ring => Network::cycle(config.vertices),
        Variant::Complete => Network::complete(config.vertices),
        Variant::Star => Network::star(config.vertices),
        Variant::Path => Network::path(config.vertices),
    }
}

/// Uniform index in `0..n` drawn through `u64` so the sequence does not
/// depend on the platform's `usize` width.
fn uniform_index(rng: &mut Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

/// Barabási-Albert graph on `vertices` vertices.
///
/// Growth starts from the complete graph on `k + 1` vertices. Each new vertex
/// attaches to `k` distinct existing vertices chosen with probability
/// proportional to degree; duplicate draws are redrawn.
pub fn generate_ba(vertices: usize, k: usize, seed: u64) -> Result<Network> {
    if k == 0 || vertices <= k {
        return Err(Error::InvalidParameters(format!(
            "BA requires vertices > k >= 1 (vertices = {vertices}, k = {k})"
        )));
    }
    let mut rng = rng::stream(seed, rng::NETWORK_STREAM);
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); vertices];
    // Each vertex appears here once per incident edge end.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * k * vertices);

    for i in 0..=k {
        for j in i + 1..=k {
            neighbors[i].push(j);
            neighbors[j].push(i);
            endpoints.push(i);
            endpoints.push(j);
        }
    }

    let mut targets: Vec<usize> = Vec::with_capacity(k);
    for v in k + 1..vertices {
        targets.clear();
        while targets.len() < k {
            let t = endpoints[uniform_index(&mut rng, endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            neighbors[v].push(t);
            neighbors[t].push(v);
            endpoints.push(v);
            endpoints.push(t);
        }
    }

    for list in &mut neighbors {
        list.sort_unstable();
    }
    Ok(Network::from_sorted_neighbors(neighbors))
}

/// Edges of the deterministic ring lattice used as the small-world base.
///
/// Every vertex links to the `k / 2` nearest vertices on each side. For odd
/// `k` the remaining stub is filled by a matching at ring distance
/// `(k + 1) / 2`: vertex `i` pairs with `i + d` when `i mod 2d < d`. The
/// lattice then has `floor(J k / 2)` edges and is `k`-regular whenever
/// `2d` divides `J`; otherwise the few vertices near the wrap that cannot be
/// matched keep degree `k - 1`.
pub fn ring_lattice(vertices: usize, k: usize) -> Result<Vec<(usize, usize)>> {
    if k == 0 || vertices <= k {
        return Err(Error::InvalidParameters(format!(
            "ring lattice requires vertices > k >= 1 (vertices = {vertices}, k = {k})"
        )));
    }
    let n = vertices;
    let half = k / 2;
    let mut edges = Vec::with_capacity(n * k / 2 + 1);
    let mut present: BTreeSet<(usize, usize)> = BTreeSet::new();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));

    for d in 1..=half {
        for i in 0..n {
            let j = (i + d) % n;
            // For k >= n - 1 the two directions can coincide.
            if present.insert(key(i, j)) {
                edges.push((i, j));
            }
        }
    }

    if k % 2 == 1 {
        let d = half + 1;
        let mut matched = vec![false; n];
        for i in 0..n {
            if i % (2 * d) >= d || matched[i] {
                continue;
            }
            let j = (i + d) % n;
            if j == i || matched[j] || present.contains(&key(i, j)) {
                continue;
            }
            matched[i] = true;
            matched[j] = true;
            present.insert(key(i, j));
            edges.push((i, j));
        }
    }
    Ok(edges)
}

/// Watts-Strogatz small-world graph.
///
/// Each lattice edge `(u, v)` is, with probability `p`, replaced by `(u, w)`
/// for `w` uniform over vertices that are neither `u` nor already adjacent to
/// `u`. Disconnected outcomes are discarded and regenerated from the next
/// retry stream.
pub fn generate_ws(vertices: usize, k: usize, p: f64, seed: u64) -> Result<Network> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("WS rewiring probability {p} outside [0, 1]")));
    }
    let lattice = ring_lattice(vertices, k)?;
    for attempt in 0..WS_MAX_ATTEMPTS {
        let stream = if attempt == 0 {
            rng::NETWORK_STREAM
        } else {
            WS_RETRY_STREAM_BASE + attempt as u64
        };
        let mut rng = rng::stream(seed, stream);
        let net = rewire(vertices, &lattice, p, &mut rng);
        if net.is_connected() {
            return Ok(net);
        }
    }
    Err(Error::GenerationFailed {
        attempts: WS_MAX_ATTEMPTS,
        reason: format!("no connected WS graph for vertices = {vertices}, k = {k}, p = {p}"),
    })
}

fn rewire(n: usize, lattice: &[(usize, usize)], p: f64, rng: &mut Rng) -> Network {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in lattice {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    for &(u, v) in lattice {
        // A coin is flipped for every lattice edge so the stream position does
        // not depend on earlier outcomes beyond the redraws.
        let flip: f64 = rng.gen();
        if p == 0.0 || flip >= p || adj[u].len() + 1 >= n {
            continue;
        }
        let w = loop {
            let w = uniform_index(rng, n);
            if w != u && !adj[u].contains(&w) {
                break w;
            }
        };
        adj[u].remove(&v);
        adj[v].remove(&u);
        adj[u].insert(w);
        adj[w].insert(u);
    }
    Network::from_sorted_neighbors(adj.into_iter().map(|s| s.into_iter().collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ba_with_k_equal_seed_size_is_complete() {
        for seed in 0..5 {
            let net = generate_ba(4, 3, seed).unwrap();
            assert_eq!(net, Network::complete(4).unwrap());
        }
    }

    #[test]
    fn ba_edge_count_closed_form() {
        let net = generate_ba(500, 3, 11).unwrap();
        assert_eq!(net.edge_count(), 1494);
        assert_eq!(net.degree_sum(), 2988);
        assert_eq!(net.min_degree(), 3);
        assert!(net.degrees().into_iter().max().unwrap() > 15, "expected a heavy tail");
        assert!(net.is_connected());
    }

    #[test]
    fn ba_is_deterministic() {
        assert_eq!(generate_ba(50, 3, 7).unwrap(), generate_ba(50, 3, 7).unwrap());
        assert_ne!(generate_ba(50, 3, 7).unwrap(), generate_ba(50, 3, 8).unwrap());
    }

    #[test]
    fn ba_rejects_bad_parameters() {
        assert!(generate_ba(3, 3, 0).is_err());
        assert!(generate_ba(10, 0, 0).is_err());
    }

    #[test]
    fn ws_without_rewiring_is_the_lattice() {
        let c10 = generate_ws(10, 2, 0.0, 3).unwrap();
        assert_eq!(c10, Network::cycle(10).unwrap());
        for seed in 0..4 {
            let net = generate_ws(40, 3, 0.0, seed).unwrap();
            let lattice = Network::from_edges(40, ring_lattice(40, 3).unwrap()).unwrap();
            assert_eq!(net, lattice);
            assert_eq!(net.degrees(), vec![3; 40]);
        }
    }

    #[test]
    fn ws_rewiring_preserves_edge_count() {
        let net = generate_ws(500, 3, 0.1, 5).unwrap();
        assert_eq!(net.edge_count(), 750);
        assert_eq!(net.degree_sum(), 1500);
        assert!(net.is_connected());
    }

    #[test]
    fn ws_full_rewiring_small() {
        let net = generate_ws(6, 2, 1.0, 1).unwrap();
        assert_eq!(net.edge_count(), 6);
        assert!(net.is_connected());
        assert!(net.min_degree() >= 1);
        for (i, j) in net.edges() {
            assert_ne!(i, j);
        }
    }

    #[test]
    fn odd_k_lattice_counts() {
        // 4 | 500: exact count and regular
        let e = ring_lattice(500, 3).unwrap();
        assert_eq!(e.len(), 750);
        // 50 is not a multiple of 4: two wrap vertices stay unmatched
        let e = ring_lattice(50, 3).unwrap();
        assert_eq!(e.len(), 74);
        let net = Network::from_edges(12, ring_lattice(12, 5).unwrap()).unwrap();
        assert_eq!(net.degrees(), vec![5; 12]);
        let net = Network::from_edges(8, ring_lattice(8, 5).unwrap()).unwrap();
        assert_eq!(net.edge_count(), 19);
    }

    #[test]
    fn ws_rejects_bad_parameters() {
        assert!(generate_ws(10, 2, 1.5, 0).is_err());
        assert!(generate_ws(3, 3, 0.1, 0).is_err());
    }
}
