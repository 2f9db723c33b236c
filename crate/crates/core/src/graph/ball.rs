use std::collections::VecDeque;

use rayon::prelude::*;

use super::Graph;
use crate::{Error, Result};

/// The radius-r ball B(root, r) of a graph, with its induced edges.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodView {
    pub root: usize,
    pub radius: usize,
    /// `(vertex, distance)` sorted by distance, then id.
    pub vertices: Vec<(usize, usize)>,
    /// Induced edges `(u, v)`, `u < v`, lexicographic.
    pub induced_edges: Vec<(usize, usize)>,
    pub labels: Option<Vec<f64>>,
}

impl NeighborhoodView {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.iter().any(|&(w, _)| w == v)
    }

    /// Attaches the labels of the ball's vertices, in `vertices` order.
    pub fn with_labels(mut self, labels: &[f64]) -> Result<Self> {
        let mut out = Vec::with_capacity(self.vertices.len());
        for &(v, _) in &self.vertices {
            let x = *labels.get(v).ok_or(Error::MissingLabels {
                labels: labels.len(),
                n: v + 1,
            })?;
            out.push(x);
        }
        self.labels = Some(out);
        Ok(self)
    }
}

/// Breadth-first ball of radius `r` around `u`.
pub fn neighborhood(g: &Graph, u: usize, r: usize) -> Result<NeighborhoodView> {
    let n = g.n();
    if u >= n {
        return Err(Error::VertexOutOfRange { vertex: u, n });
    }
    let mut dist = vec![usize::MAX; n];
    let mut order = vec![u];
    dist[u] = 0;
    let mut queue = VecDeque::from([u]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == r {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let mut vertices: Vec<(usize, usize)> = order.iter().map(|&v| (v, dist[v])).collect();
    vertices.sort_unstable_by_key(|&(v, d)| (d, v));

    let mut induced_edges = Vec::new();
    for &(v, _) in &vertices {
        for &w in g.neighbors(v) {
            if w > v && dist[w] != usize::MAX {
                induced_edges.push((v, w));
            }
        }
    }
    induced_edges.sort_unstable();

    Ok(NeighborhoodView {
        root: u,
        radius: r,
        vertices,
        induced_edges,
        labels: None,
    })
}

/// Vertex count of T_{d,r} (degenerate for d < 3), `None` on overflow.
pub(crate) fn canonical_size(d: usize, r: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut level: usize = 1;
    for depth in 1..=r {
        level = if depth == 1 { d } else { level.checked_mul(d.saturating_sub(1))? };
        if level == 0 {
            break;
        }
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// Whether a ball is isomorphic to the canonical rooted tree T_{d,r}.
///
/// Checked structurally: the ball is a tree (it is connected, so acyclic means
/// `|E| = |V| - 1`), every vertex closer than `r` has degree `d` inside the
/// ball, every vertex at distance `r` is a leaf, and the vertex count is that
/// of T_{d,r}.
pub fn is_canonical_tree(view: &NeighborhoodView, d: usize) -> bool {
    if view.induced_edges.len() + 1 != view.vertices.len() {
        return false;
    }
    if canonical_size(d, view.radius) != Some(view.vertices.len()) {
        return false;
    }
    let mut degree = std::collections::HashMap::with_capacity(view.vertices.len());
    for &(u, v) in &view.induced_edges {
        *degree.entry(u).or_insert(0usize) += 1;
        *degree.entry(v).or_insert(0usize) += 1;
    }
    view.vertices.iter().all(|&(v, dist)| {
        let deg = degree.get(&v).copied().unwrap_or(0);
        if dist < view.radius {
            deg == d
        } else {
            deg == usize::from(view.radius > 0)
        }
    })
}

/// Scratch space for repeated ball checks on one graph.
struct BallScratch {
    stamp: Vec<u32>,
    parent: Vec<usize>,
    depth: Vec<usize>,
    generation: u32,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl BallScratch {
    fn new(n: usize) -> Self {
        BallScratch {
            stamp: vec![0; n],
            parent: vec![0; n],
            depth: vec![0; n],
            generation: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    fn check(&mut self, g: &Graph, u: usize, d: usize, r: usize) -> bool {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let gen = self.generation;
        self.stamp[u] = gen;
        self.parent[u] = usize::MAX;
        self.depth[u] = 0;
        self.frontier.clear();
        self.frontier.push(u);
        for level in 0..r {
            self.next.clear();
            for i in 0..self.frontier.len() {
                let v = self.frontier[i];
                if g.degree(v) != d {
                    return false;
                }
                for &w in g.neighbors(v) {
                    if w == self.parent[v] {
                        continue;
                    }
                    if self.stamp[w] == gen {
                        return false;
                    }
                    self.stamp[w] = gen;
                    self.parent[w] = v;
                    self.depth[w] = level + 1;
                    self.next.push(w);
                }
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        // Boundary vertices must not be adjacent to one another.
        self.frontier.iter().all(|&v| {
            g.neighbors(v)
                .iter()
                .all(|&w| w == self.parent[v] || self.stamp[w] != gen)
        })
    }
}

/// Early-exit version of `is_canonical_tree(&neighborhood(g, u, r)?, d)`.
pub fn ball_is_canonical_tree(g: &Graph, u: usize, d: usize, r: usize) -> Result<bool> {
    if u >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: u, n: g.n() });
    }
    Ok(BallScratch::new(g.n()).check(g, u, d, r))
}

/// Number of vertices whose radius-r ball is isomorphic to T_{d,r}.
pub fn tree_count(g: &Graph, d: usize, r: usize) -> usize {
    (0..g.n())
        .into_par_iter()
        .map_init(|| BallScratch::new(g.n()), |scratch, u| scratch.check(g, u, d, r) as usize)
        .sum()
}

/// Fraction of vertices whose radius-r ball is isomorphic to T_{d,r}.
pub fn tree_fraction(g: &Graph, d: usize, r: usize) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    tree_count(g, d, r) as f64 / g.n() as f64
}
