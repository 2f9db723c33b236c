use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Topology};
use crate::rng::{Channel, VertexField};
use crate::{Error, Result};

/// Per-vertex labels in [0, 1].
pub trait Labels {
    fn label(&self, v: usize) -> f64;
}

impl Labels for [f64] {
    #[inline]
    fn label(&self, v: usize) -> f64 {
        self[v]
    }
}

impl Labels for Vec<f64> {
    #[inline]
    fn label(&self, v: usize) -> f64 {
        self[v]
    }
}

/// Base labels of a keyed vertex field, drawn on demand.
impl Labels for VertexField {
    #[inline]
    fn label(&self, v: usize) -> f64 {
        VertexField::label(self, v as u64, Channel::Base)
    }
}

/// A decoration: one label in [0, 1] per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoration(Vec<f64>);

impl Decoration {
    pub fn new(labels: Vec<f64>) -> Result<Self> {
        if let Some((vertex, &value)) = labels.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
            return Err(Error::LabelOutOfRange { vertex, value });
        }
        Ok(Decoration(labels))
    }

    /// i.i.d. uniform labels; vertex `v` gets the base draw of the stream,
    /// so this equals the `x` half of `sample_coupled(n, _, seed)`.
    pub fn sample(n: usize, seed: u64) -> Self {
        let field = VertexField::new(seed);
        Decoration((0..n).map(|v| Labels::label(&field, v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Labels for Decoration {
    #[inline]
    fn label(&self, v: usize) -> f64 {
        self.0[v]
    }
}

/// A decision function f(u, G, x) that reads only B(u, radius).
pub trait DecisionRule: Sync {
    fn radius(&self) -> usize;

    fn decide<T, L>(&self, u: usize, g: &T, x: &L) -> bool
    where
        T: Topology + ?Sized,
        L: Labels + ?Sized;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RuleFamily {
    /// Join iff strictly smaller than every neighbour.
    LocalMin,
    /// Labels are split into `rounds` equal intervals processed in order; a
    /// vertex joins in its round unless a neighbour joined earlier or a
    /// neighbour in the same interval has a smaller label.
    MultiRoundGreedy { rounds: u32 },
    /// Local minima whose label falls in an accepting bucket of `table`
    /// (bucket `i` covers `[i/len, (i+1)/len)`).
    CustomTable { table: Vec<bool> },
}

/// One of the built-in r-local independence rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LocalRule {
    family: RuleFamily,
}

impl LocalRule {
    pub fn local_min() -> Self {
        LocalRule {
            family: RuleFamily::LocalMin,
        }
    }

    pub fn multi_round_greedy(rounds: u32) -> Result<Self> {
        if rounds == 0 {
            return Err(Error::invalid("rounds", "multi-round-greedy needs at least one round"));
        }
        Ok(LocalRule {
            family: RuleFamily::MultiRoundGreedy { rounds },
        })
    }

    pub fn custom_table(table: Vec<bool>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::invalid("table", "decision table must have at least one bucket"));
        }
        Ok(LocalRule {
            family: RuleFamily::CustomTable { table },
        })
    }

    pub fn family(&self) -> &RuleFamily {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            RuleFamily::LocalMin => "local-min",
            RuleFamily::MultiRoundGreedy { .. } => "multi-round-greedy",
            RuleFamily::CustomTable { .. } => "custom-table",
        }
    }

    /// `rule=<family>;r=<radius>;params=<k=v,...>`
    pub fn descriptor(&self) -> String {
        let params = match &self.family {
            RuleFamily::LocalMin => String::new(),
            RuleFamily::MultiRoundGreedy { rounds } => format!("rounds={rounds}"),
            RuleFamily::CustomTable { table } => {
                format!("table={}", table.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
            }
        };
        format!("rule={};r={};params={params}", self.family_name(), self.radius())
    }
}

impl fmt::Display for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

impl FromStr for LocalRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: String| Error::RuleDescriptor {
            descriptor: s.to_string(),
            reason,
        };
        let mut parts = s.splitn(3, ';');
        let (Some(family), Some(radius), Some(params)) = (
            parts.next().and_then(|p| p.strip_prefix("rule=")),
            parts.next().and_then(|p| p.strip_prefix("r=")),
            parts.next().and_then(|p| p.strip_prefix("params=")),
        ) else {
            return Err(bad("expected `rule=<family>;r=<radius>;params=<k=v,...>`".into()));
        };
        let radius: usize = radius.parse().map_err(|_| bad(format!("invalid radius `{radius}`")))?;
        let mut kv = Vec::new();
        for item in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("parameter `{item}` is not k=v")))?;
            kv.push((k, v));
        }
        let take = |key: &str| -> Result<&str> {
            match kv.as_slice() {
                [(k, v)] if *k == key => Ok(*v),
                _ => Err(bad(format!("expected exactly the parameter `{key}`"))),
            }
        };
        let rule = match family {
            "local-min" => {
                if !kv.is_empty() {
                    return Err(bad("local-min takes no parameters".into()));
                }
                LocalRule::local_min()
            }
            "multi-round-greedy" => {
                let v = take("rounds")?;
                let rounds = v.parse().map_err(|_| bad(format!("invalid round count `{v}`")))?;
                LocalRule::multi_round_greedy(rounds).map_err(|e| bad(e.to_string()))?
            }
            "custom-table" => {
                let v = take("table")?;
                let table = v
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(bad(format!("table must be a 0/1 string, found `{v}`"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                LocalRule::custom_table(table).map_err(|e| bad(e.to_string()))?
            }
            other => return Err(bad(format!("unknown rule family `{other}`"))),
        };
        if rule.radius() != radius {
            return Err(bad(format!("{} has radius {}, descriptor says {radius}", family, rule.radius())));
        }
        Ok(rule)
    }
}

impl TryFrom<String> for LocalRule {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LocalRule> for String {
    fn from(rule: LocalRule) -> String {
        rule.descriptor()
    }
}

/// Strict total order on (label, id): ties in labels go to the smaller id.
#[inline]
fn precedes(xv: f64, v: usize, xu: f64, u: usize) -> bool {
    xv < xu || (xv == xu && v < u)
}

#[inline]
fn bucket(x: f64, buckets: usize) -> usize {
    ((x * buckets as f64) as usize).min(buckets - 1)
}

#[inline]
fn is_local_min<T: Topology + ?Sized, L: Labels + ?Sized>(u: usize, g: &T, x: &L) -> bool {
    let xu = x.label(u);
    (0..g.degree(u)).all(|i| {
        let v = g.neighbor(u, i);
        !precedes(x.label(v), v, xu, u)
    })
}

fn greedy_joins<T: Topology + ?Sized, L: Labels + ?Sized>(u: usize, g: &T, x: &L, rounds: usize) -> bool {
    let xu = x.label(u);
    let t = bucket(xu, rounds);
    let deg = g.degree(u);
    let mut inline = [(0usize, 0usize); 64];
    let mut spill = Vec::new();
    let mut count = 0;
    for i in 0..deg {
        let v = g.neighbor(u, i);
        let xv = x.label(v);
        let tv = bucket(xv, rounds);
        if tv == t && precedes(xv, v, xu, u) {
            return false;
        }
        if tv < t {
            if count < inline.len() {
                inline[count] = (tv, v);
            } else {
                if spill.is_empty() {
                    spill.extend_from_slice(&inline);
                }
                spill.push((tv, v));
            }
            count += 1;
        }
    }
    let earlier = if spill.is_empty() { &mut inline[..count] } else { &mut spill[..] };
    // Earliest rounds first: they recurse least and usually settle the answer.
    earlier.sort_unstable();
    !earlier.iter().any(|&(_, v)| greedy_joins(v, g, x, rounds))
}

impl DecisionRule for LocalRule {
    fn radius(&self) -> usize {
        match self.family {
            RuleFamily::LocalMin | RuleFamily::CustomTable { .. } => 1,
            RuleFamily::MultiRoundGreedy { rounds } => rounds as usize,
        }
    }

    fn decide<T, L>(&self, u: usize, g: &T, x: &L) -> bool
    where
        T: Topology + ?Sized,
        L: Labels + ?Sized,
    {
        match &self.family {
            RuleFamily::LocalMin => is_local_min(u, g, x),
            RuleFamily::MultiRoundGreedy { rounds } => greedy_joins(u, g, x, *rounds as usize),
            RuleFamily::CustomTable { table } => table[bucket(x.label(u), table.len())] && is_local_min(u, g, x),
        }
    }
}

fn check_inputs(g: &Graph, x: &Decoration) -> Result<()> {
    if x.len() < g.n() {
        return Err(Error::MissingLabels { labels: x.len(), n: g.n() });
    }
    Ok(())
}

/// f(u, G, x) for a single vertex.
pub fn evaluate_rule<R: DecisionRule>(rule: &R, u: usize, g: &Graph, x: &Decoration) -> Result<bool> {
    check_inputs(g, x)?;
    if u >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: u, n: g.n() });
    }
    Ok(rule.decide(u, g, x))
}

/// I_G(f, x) together with the number of label ties that were broken by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleOutcome {
    /// Selected vertices in increasing order.
    pub members: Vec<usize>,
    /// Edges whose endpoints carry identical labels.
    pub ties: usize,
}

impl RuleOutcome {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn intersection_size(&self, other: &RuleOutcome) -> usize {
        let (mut i, mut j, mut k) = (0, 0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    k += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        k
    }
}

/// Runs a built-in rule on every vertex of `g`.
///
/// Multi-round greedy is executed round by round over the whole graph rather
/// than by per-vertex recursion; the result is the same set.
pub fn run_rule(rule: &LocalRule, g: &Graph, x: &Decoration) -> Result<RuleOutcome> {
    check_inputs(g, x)?;
    let n = g.n();
    let members: Vec<usize> = match rule.family() {
        RuleFamily::LocalMin | RuleFamily::CustomTable { .. } => (0..n).filter(|&u| rule.decide(u, g, x)).collect(),
        RuleFamily::MultiRoundGreedy { rounds } => {
            let rounds = *rounds as usize;
            let round: Vec<usize> = (0..n).map(|u| bucket(x.label(u), rounds)).collect();
            let mut by_round = vec![Vec::new(); rounds];
            for u in 0..n {
                by_round[round[u]].push(u);
            }
            let mut joined = vec![false; n];
            for (t, batch) in by_round.iter().enumerate() {
                for &u in batch {
                    let xu = x.label(u);
                    joined[u] = g.neighbors(u).iter().all(|&v| {
                        let blocked_earlier = round[v] < t && joined[v];
                        let blocked_now = round[v] == t && precedes(x.label(v), v, xu, u);
                        !blocked_earlier && !blocked_now
                    });
                }
            }
            (0..n).filter(|&u| joined[u]).collect()
        }
    };
    assert!(g.is_independent(&members), "{rule} produced a non-independent set");
    let ties = g.edges().filter(|&(u, v)| x.label(u) == x.label(v)).count();
    Ok(RuleOutcome { members, ties })
}
