//! Simple undirected graphs, random samplers and rooted neighbourhoods.

pub(crate) mod ball;
mod generate;
pub mod io;

pub use ball::{ball_is_canonical_tree, is_canonical_tree, neighborhood, tree_count, tree_fraction, NeighborhoodView};
pub use generate::{generate_er, generate_regular, RegularSample};
pub(crate) use generate::check_regular_params;

use crate::{Error, Result};

/// Read-only adjacency access shared by explicit graphs and implicit trees.
pub trait Topology {
    fn vertex_count(&self) -> usize;
    fn degree(&self, v: usize) -> usize;
    /// The `i`-th neighbour of `v`, `i < degree(v)`.
    fn neighbor(&self, v: usize, i: usize) -> usize;
}

/// Immutable simple undirected graph in compressed sparse row form.
///
/// Vertex ids are `0..n`; neighbour lists are sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::invalid("edges", format!("self-loop at vertex {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(
                "edges",
                format!("duplicate edge {{{}, {}}}", w[0].0, w[0].1),
            ));
        }
        Ok(Self::from_sorted_unique(n, &canon))
    }

    /// `edges` must be sorted, deduplicated, loop free with `u < v < n`.
    pub(crate) fn from_sorted_unique(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0usize; offsets[n]];
        // Lexicographic (u, v) order fills each list in increasing order:
        // the smaller endpoints w < u of u arrive first (as (w, u)) in w order,
        // then the larger ones as (u, v) in v order.
        for &(u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        debug_assert!((0..n).all(|u| targets[offsets[u]..offsets[u + 1]].windows(2).all(|w| w[0] < w[1])));
        Graph { offsets, targets }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, &[])
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::from_sorted_unique(n, &edges)
    }

    /// Path 0 - 1 - ... - (n-1).
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_sorted_unique(n, &edges)
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("n", "a simple cycle needs at least 3 vertices"));
        }
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u).iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        let mut member = vec![false; self.n()];
        for &v in vertices {
            member[v] = true;
        }
        vertices.iter().all(|&u| self.neighbors(u).iter().all(|&v| !member[v]))
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::invalid("perm", "length differs from vertex count"));
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Self::from_edges(self.n(), &edges)
    }
}

impl Topology for Graph {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    #[inline]
    fn degree(&self, v: usize) -> usize {
        Graph::degree(self, v)
    }

    #[inline]
    fn neighbor(&self, v: usize, i: usize) -> usize {
        self.targets[self.offsets[v] + i]
    }
}
