use rand::seq::SliceRandom;

use super::Graph;
use crate::rng::CounterRng;
use crate::{Error, Result};

/// One configuration-model draw: the replica matching and its simple projection.
#[derive(Debug, Clone)]
pub struct RegularSample {
    pub graph: Graph,
    pub n: usize,
    pub d: usize,
    /// Perfect matching on the `n*d` replicas; replica `j` of vertex `v` is `v*d + j`.
    pub matching: Vec<[usize; 2]>,
    pub loop_count: usize,
    pub multi_edge_count: usize,
}

impl RegularSample {
    /// No loops and no parallel edges, so the projection is d-regular.
    pub fn is_simple(&self) -> bool {
        self.loop_count == 0 && self.multi_edge_count == 0
    }

    pub fn replica_owner(&self, replica: usize) -> usize {
        replica / self.d
    }
}

/// Validates configuration-model parameters, returning the replica count.
pub(crate) fn check_regular_params(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if d == 0 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    let total = n.checked_mul(d).ok_or_else(|| Error::invalid("n", "n*d overflows"))?;
    if total % 2 == 1 {
        return Err(Error::OddReplicaCount { n: n as u64, d: d as u64 });
    }
    Ok(total)
}

/// Samples a configuration-model matching on `n*d` replicas and projects it.
///
/// The matching is uniform: a Fisher–Yates shuffle of the replicas paired
/// consecutively. Loops are dropped and parallel edges collapsed; both are
/// counted.
pub fn generate_regular(n: usize, d: usize, seed: u64) -> Result<RegularSample> {
    let total = check_regular_params(n, d)?;

    let mut rng = CounterRng::new(seed);
    let mut replicas: Vec<usize> = (0..total).collect();
    replicas.shuffle(&mut rng);

    let matching: Vec<[usize; 2]> = replicas.chunks_exact(2).map(|p| [p[0], p[1]]).collect();
    let mut loop_count = 0;
    let mut edges = Vec::with_capacity(matching.len());
    for &[a, b] in &matching {
        let (u, v) = (a / d, b / d);
        if u == v {
            loop_count += 1;
        } else {
            edges.push((u.min(v), u.max(v)));
        }
    }
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    let multi_edge_count = before - edges.len();

    Ok(RegularSample {
        graph: Graph::from_sorted_unique(n, &edges),
        n,
        d,
        matching,
        loop_count,
        multi_edge_count,
    })
}

/// Samples G(n, d/n) by geometric skipping over the `C(n, 2)` vertex pairs.
pub fn generate_er(n: usize, d: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if !(0.0..=n as f64).contains(&d) {
        return Err(Error::invalid("d", format!("must lie in [0, n] = [0, {n}], got {d}")));
    }
    let p = d / n as f64;
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p >= 1.0 {
        return Ok(Graph::complete(n));
    }

    let mut rng = CounterRng::new(seed);
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    // Pairs (w, v) with w < v are visited in the order v = 1, 2, ...; w = 0..v.
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r = rng.uniform();
        let skip = ((1.0 - r).ln() / log_q).floor();
        // A skip larger than the remaining slot count just ends the scan.
        w += 1 + skip.min(i64::MAX as f64 / 4.0) as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges.sort_unstable();
    Ok(Graph::from_sorted_unique(n, &edges))
}
