//! Text edge-list format.
//!
//! ```text
//! # localfactor-graph v1 n=<n> model=<reg|er> d=<d> seed=<seed> loops=<c> multi=<c>
//! <u> <v>
//! ...
//! ```
//!
//! Edges are 0-indexed with `u < v`, strictly increasing in lexicographic
//! order, one per newline-terminated line.

use std::io::{BufRead, Write};

use super::{Graph, RegularSample};
use crate::{Error, Model, Result};

const MAGIC: &str = "# localfactor-graph v1";

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListHeader {
    pub n: usize,
    pub model: Model,
    pub d: f64,
    pub seed: u64,
    pub loops: usize,
    pub multi: usize,
}

impl EdgeListHeader {
    pub fn for_regular(sample: &RegularSample, seed: u64) -> Self {
        EdgeListHeader {
            n: sample.n,
            model: Model::Reg,
            d: sample.d as f64,
            seed,
            loops: sample.loop_count,
            multi: sample.multi_edge_count,
        }
    }

    pub fn for_er(g: &Graph, d: f64, seed: u64) -> Self {
        EdgeListHeader {
            n: g.n(),
            model: Model::Er,
            d,
            seed,
            loops: 0,
            multi: 0,
        }
    }

    fn render(&self) -> String {
        let d = match self.model {
            Model::Reg => format!("{}", self.d as u64),
            Model::Er => format!("{}", self.d),
        };
        format!(
            "{MAGIC} n={} model={} d={d} seed={} loops={} multi={}",
            self.n, self.model, self.seed, self.loops, self.multi
        )
    }

    fn parse(line: &str) -> Result<Self> {
        let bad = |reason: String| Error::Parse { line: 1, reason };
        let rest = line
            .strip_prefix(MAGIC)
            .ok_or_else(|| bad(format!("header must start with `{MAGIC}`")))?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        const KEYS: [&str; 6] = ["n", "model", "d", "seed", "loops", "multi"];
        if fields.len() != KEYS.len() {
            return Err(bad(format!("expected {} header fields, found {}", KEYS.len(), fields.len())));
        }
        let mut values = [""; 6];
        for ((field, key), slot) in fields.iter().zip(KEYS).zip(values.iter_mut()) {
            *slot = field
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| bad(format!("expected `{key}=...`, found `{field}`")))?;
        }
        fn num<T: std::str::FromStr>(key: &str, s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse {
                line: 1,
                reason: format!("`{key}` has invalid value `{s}`"),
            })
        }
        let model: Model = values[1]
            .parse()
            .map_err(|_| bad(format!("unknown model `{}`", values[1])))?;
        let d = match model {
            Model::Reg => num::<u64>("d", values[2])? as f64,
            Model::Er => num::<f64>("d", values[2])?,
        };
        Ok(EdgeListHeader {
            n: num("n", values[0])?,
            model,
            d,
            seed: num("seed", values[3])?,
            loops: num("loops", values[4])?,
            multi: num("multi", values[5])?,
        })
    }
}

pub fn write_edge_list<W: Write>(out: &mut W, header: &EdgeListHeader, g: &Graph) -> Result<()> {
    if header.n != g.n() {
        return Err(Error::invalid("header", "vertex count disagrees with the graph"));
    }
    writeln!(out, "{}", header.render())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<(EdgeListHeader, Graph)> {
    let mut lines = input.lines();
    let first = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "empty input".into(),
    })??;
    let header = EdgeListHeader::parse(&first)?;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        let bad = |reason: String| Error::Parse { line: lineno, reason };
        let mut parts = line.split(' ');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad(format!("expected `<u> <v>`, found `{line}`")));
        };
        let u: usize = a.parse().map_err(|_| bad(format!("invalid vertex `{a}`")))?;
        let v: usize = b.parse().map_err(|_| bad(format!("invalid vertex `{b}`")))?;
        if u >= v {
            return Err(bad(format!("edge `{u} {v}` must satisfy u < v")));
        }
        if v >= header.n {
            return Err(bad(format!("vertex {v} out of range for n={}", header.n)));
        }
        if let Some(&last) = edges.last() {
            if (u, v) <= last {
                return Err(bad(format!("edge `{u} {v}` is not after `{} {}`", last.0, last.1)));
            }
        }
        edges.push((u, v));
    }
    Ok((header.clone(), Graph::from_sorted_unique(header.n, &edges)))
}
