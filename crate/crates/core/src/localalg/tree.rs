use crate::graph::{Graph, Topology};
use crate::{Error, Result};

/// n_{d,r}: number of vertices of T_{d,r}, `None` if it does not fit in `usize`.
pub fn tree_size(d: usize, r: usize) -> Option<usize> {
    crate::graph::ball::canonical_size(d, r)
}

/// T_{d,r} addressed arithmetically, without storing adjacency.
///
/// Vertices are numbered breadth first with the root at 0 and the children of
/// each vertex on consecutive ids, the same numbering [`canonical_tree`]
/// materialises.
#[derive(Debug, Clone)]
pub struct ImplicitTree {
    d: usize,
    depth: usize,
    /// `level_start[k]` is the first id at depth k; one extra entry holds the size.
    level_start: Vec<usize>,
}

impl ImplicitTree {
    pub fn new(d: usize, depth: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid("d", format!("canonical trees need d >= 2, got {d}")));
        }
        let mut level_start = vec![0usize, 1];
        let mut width = 1usize;
        for k in 1..=depth {
            width = if k == 1 { Some(d) } else { width.checked_mul(d - 1) }
                .ok_or_else(|| Error::invalid("r", "tree too large to address"))?;
            let next = level_start[k]
                .checked_add(width)
                .ok_or_else(|| Error::invalid("r", "tree too large to address"))?;
            level_start.push(next);
        }
        Ok(ImplicitTree { d, depth, level_start })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.level_start[self.depth + 1]
    }

    #[inline]
    pub fn level_of(&self, v: usize) -> usize {
        self.level_start.partition_point(|&s| s <= v) - 1
    }

    #[inline]
    fn first_child(&self, v: usize, level: usize) -> usize {
        if level == 0 {
            1
        } else {
            self.level_start[level + 1] + (v - self.level_start[level]) * (self.d - 1)
        }
    }

    #[inline]
    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.level_of(v) {
            0 => None,
            1 => Some(0),
            k => Some(self.level_start[k - 1] + (v - self.level_start[k]) / (self.d - 1)),
        }
    }
}

impl Topology for ImplicitTree {
    fn vertex_count(&self) -> usize {
        self.size()
    }

    #[inline]
    fn degree(&self, v: usize) -> usize {
        let level = self.level_of(v);
        match (level == 0, level == self.depth) {
            (true, true) => 0,
            (true, false) => self.d,
            (false, true) => 1,
            (false, false) => self.d,
        }
    }

    #[inline]
    fn neighbor(&self, v: usize, i: usize) -> usize {
        let level = self.level_of(v);
        if level == 0 {
            1 + i
        } else if i == 0 {
            self.parent(v).expect("non-root vertex has a parent")
        } else {
            self.first_child(v, level) + i - 1
        }
    }
}

/// T_{d,r} materialised as a [`Graph`] with root 0.
#[derive(Debug, Clone)]
pub struct CanonicalTree {
    pub d: usize,
    pub r: usize,
    pub graph: Graph,
}

pub fn canonical_tree(d: usize, r: usize) -> Result<CanonicalTree> {
    let shape = ImplicitTree::new(d, r)?;
    let n = shape.size();
    if n > 1 << 26 {
        return Err(Error::invalid("r", format!("T_{{{d},{r}}} has {n} vertices, too many to materialise")));
    }
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (shape.parent(v).unwrap(), v)).collect();
    let mut sorted = edges;
    sorted.sort_unstable();
    Ok(CanonicalTree {
        d,
        r,
        graph: Graph::from_sorted_unique(n, &sorted),
    })
}
