use std::f64::consts::LN_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::logmath::{ln_binomial, ln_factorial, log_sum_exp};
use crate::{Error, Model, Result};

/// Parameters (n, d, m, k[, l]) of an overlap count.
///
/// `l` is the number of configuration-model edges between the replicas of
/// I \ J and J \ I; it only applies to the regular model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapQuery {
    pub n: u64,
    pub d: f64,
    pub m: u64,
    pub k: u64,
    pub l: Option<u64>,
}

impl OverlapQuery {
    pub fn er(n: u64, d: f64, m: u64, k: u64) -> Self {
        OverlapQuery { n, d, m, k, l: None }
    }

    pub fn reg(n: u64, d: u64, m: u64, k: u64, l: u64) -> Self {
        OverlapQuery {
            n,
            d: d as f64,
            m,
            k,
            l: Some(l),
        }
    }

    /// |I ∪ J| = 2m - k.
    pub fn union_size(&self) -> u64 {
        2 * self.m - self.k
    }

    fn check_sets(&self) -> Result<()> {
        if self.k > self.m {
            return Err(Error::Domain(format!("k = {} exceeds m = {}", self.k, self.m)));
        }
        if self.m > self.n {
            return Err(Error::Domain(format!("m = {} exceeds n = {}", self.m, self.n)));
        }
        if 2 * self.m - self.k > self.n {
            return Err(Error::Domain(format!(
                "2m - k = {} exceeds n = {}",
                2 * self.m - self.k,
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogExpectation {
    /// Natural log; `-inf` for an expectation of zero.
    pub log_value: f64,
    pub query: OverlapQuery,
}

impl LogExpectation {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// ln E|Overlap(n, d, m, k)| in G(n, d/n).
///
/// E = n! / (k! (m-k)!² (n-2m+k)!) · (1 - d/n)^(C(2m-k, 2) - (m-k)²): ordered
/// pairs of m-sets meeting in k vertices, times the probability that none of
/// the vertex pairs inside I or inside J is an edge.
pub fn log_expected_overlap_er(q: &OverlapQuery) -> Result<LogExpectation> {
    if q.l.is_some() {
        return Err(Error::Domain("the Erdős–Rényi count takes no cross-edge parameter l".into()));
    }
    q.check_sets()?;
    if !(q.d > 0.0 && q.d < q.n as f64) {
        return Err(Error::Domain(format!("need 0 < d < n, got d = {} with n = {}", q.d, q.n)));
    }
    let (n, m, k) = (q.n, q.m, q.k);
    let r = 2 * m - k;
    let pairs = ln_factorial(n) - ln_factorial(k) - 2.0 * ln_factorial(m - k) - ln_factorial(n - r);
    let forbidden = (r as u128 * (r as u128).saturating_sub(1) / 2) - ((m - k) as u128).pow(2);
    let absent = if forbidden == 0 {
        0.0
    } else {
        forbidden as f64 * (-q.d / n as f64).ln_1p()
    };
    Ok(LogExpectation {
        log_value: pairs + absent,
        query: *q,
    })
}

fn regular_degree(q: &OverlapQuery) -> Result<u64> {
    if !(q.d >= 1.0 && q.d.fract() == 0.0 && q.d < u32::MAX as f64) {
        return Err(Error::Domain(format!("regular degree must be a positive integer, got {}", q.d)));
    }
    let d = q.d as u64;
    if (q.n * d) % 2 == 1 {
        return Err(Error::OddReplicaCount { n: q.n, d });
    }
    Ok(d)
}

/// ln E|A(m, k, l)| in the configuration model: pairs (I, J) of independent
/// m-sets meeting in k vertices with exactly l replica edges between
/// I \ J and J \ I.
///
/// The count is the multinomial choice of (I ∩ J, I \ J, J \ I, rest), times
/// the ways to place the l cross edges, the edges from I ∪ J to its
/// complement and a perfect matching of the remaining replicas, divided by
/// the number (nd)! / ((nd/2)! 2^(nd/2)) of perfect matchings.
pub fn log_expected_overlap_reg(q: &OverlapQuery) -> Result<LogExpectation> {
    let l = q
        .l
        .ok_or_else(|| Error::Domain("the regular-graph term needs the cross-edge count l".into()))?;
    q.check_sets()?;
    let d = regular_degree(q)?;
    let (n, m, k) = (q.n, q.m, q.k);
    let diff = (m - k) * d;
    if l > diff {
        return Err(Error::CrossEdgeRange { l, max: diff });
    }
    let nd = n * d;
    let rd = (2 * m - k) * d;
    let boundary = rd - 2 * l;
    if 2 * rd > nd + 2 * l {
        return Err(Error::Nonnegativity(format!(
            "nd - 2Rd + 2l = {} - {} + {} is negative",
            nd,
            2 * rd,
            2 * l
        )));
    }
    let rest = nd + 2 * l - 2 * rd;
    debug_assert!(rest % 2 == 0);

    let choose_sets = ln_factorial(n) - ln_factorial(k) - 2.0 * ln_factorial(m - k) - ln_factorial(n - (2 * m - k));
    let cross = 2.0 * ln_binomial(diff, l) + ln_factorial(l);
    let outward = ln_binomial(nd - rd, boundary) + ln_factorial(boundary);
    let inner = ln_factorial(rest) - ln_factorial(rest / 2) - (rest / 2) as f64 * LN_2;
    let all = ln_factorial(nd / 2) + (nd / 2) as f64 * LN_2 - ln_factorial(nd);
    Ok(LogExpectation {
        log_value: choose_sets + cross + outward + inner + all,
        query: *q,
    })
}

/// ln E|Overlap_d(n, m, k)|: log-sum-exp of the feasible l terms.
pub fn log_expected_overlap_reg_total(n: u64, d: u64, m: u64, k: u64) -> Result<LogExpectation> {
    let base = OverlapQuery { n, d: d as f64, m, k, l: None };
    base.check_sets()?;
    regular_degree(&base)?;
    let terms: Vec<f64> = (0..=(m - k) * d)
        .filter_map(|l| log_expected_overlap_reg(&OverlapQuery { l: Some(l), ..base }).ok())
        .map(|e| e.log_value)
        .collect();
    Ok(LogExpectation {
        log_value: log_sum_exp(terms),
        query: base,
    })
}

/// Columns `model,n,d,m,k,l,log_value`; `l` is empty for ER rows and totals.
pub fn write_exact_csv<W: Write>(out: W, model: Model, rows: &[LogExpectation]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "n", "d", "m", "k", "l", "log_value"])
        .map_err(crate::coupling::csv_error)?;
    for r in rows {
        let q = &r.query;
        w.write_record([
            model.to_string(),
            q.n.to_string(),
            q.d.to_string(),
            q.m.to_string(),
            q.k.to_string(),
            q.l.map(|l| l.to_string()).unwrap_or_default(),
            r.log_value.to_string(),
        ])
        .map_err(crate::coupling::csv_error)?;
    }
    w.flush()?;
    Ok(())
}
