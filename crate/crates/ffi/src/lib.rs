//! C ABI over `localfactor`.
//!
//! Graphs and rules are opaque handles created and freed here. Every fallible
//! call returns an [`LfStatus`]; on failure, [`lf_last_error_message`] gives
//! the message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use localfactor::graph::{generate_er, generate_regular, tree_fraction, Graph};
use localfactor::localalg::{estimate_density, run_rule, Decoration, LocalRule};
use localfactor::moments::{
    forbidden_window, log_expected_overlap_er, log_expected_overlap_reg, log_expected_overlap_reg_total,
    max_rate_reg_over_y, min_d_for_window, rate_er, rate_reg, OverlapQuery, WindowOptions,
};
use localfactor::{coupling, Error, Model};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A mathematical precondition failed: parity, domain, l-range, ...
    Precondition = 3,
    NotConverged = 4,
    NotFound = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LfModel {
    Er = 0,
    Reg = 1,
}

impl From<LfModel> for Model {
    fn from(m: LfModel) -> Model {
        match m {
            LfModel::Er => Model::Er,
            LfModel::Reg => Model::Reg,
        }
    }
}

/// Bernoulli Monte Carlo estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LfEstimate {
    pub value: f64,
    pub std_error: f64,
    pub hits: u64,
    pub trials: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LfWindow {
    pub d: u64,
    pub beta: f64,
    /// Meaningful only when `has_window` is true.
    pub zhat_max: f64,
    pub has_window: bool,
    pub theoretical_bound: f64,
    pub empty_by_theory: bool,
}

/// A simple graph.
pub struct LfGraph(Graph);

/// A built-in local rule.
pub struct LfRule(LocalRule);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).unwrap_or_default()
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(e: &Error) -> LfStatus {
    match e {
        Error::InvalidParameter { .. }
        | Error::VertexOutOfRange { .. }
        | Error::MissingLabels { .. }
        | Error::LabelOutOfRange { .. }
        | Error::Parse { .. }
        | Error::RuleDescriptor { .. } => LfStatus::InvalidArgument,
        Error::OddReplicaCount { .. }
        | Error::Domain(_)
        | Error::CrossEdgeRange { .. }
        | Error::Nonnegativity(_)
        | Error::ToleranceBelowResolution { .. }
        | Error::TargetOutOfRange { .. } => LfStatus::Precondition,
        Error::NotConverged { .. } => LfStatus::NotConverged,
        Error::WindowNotFound { .. } => LfStatus::NotFound,
        Error::Io(_) | Error::Json(_) => LfStatus::Io,
    }
}

fn guard<F: FnOnce() -> Result<(), LfStatus>>(f: F) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            LfStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside localfactor".into());
            LfStatus::Panic
        }
    }
}

fn fail(e: Error) -> LfStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> LfStatus {
    set_error(format!("{what} is null"));
    LfStatus::NullPointer
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, LfStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, LfStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Samples a d-regular configuration-model graph (projected to simple).
///
/// # Safety
/// `out_graph` must be a valid pointer; the handle written there must be
/// released with `lf_graph_free`.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_regular(n: usize, d: usize, seed: u64, out_graph: *mut *mut LfGraph) -> LfStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let s = generate_regular(n, d, seed).map_err(fail)?;
        *slot = Box::into_raw(Box::new(LfGraph(s.graph)));
        Ok(())
    })
}

/// Samples G(n, d/n).
///
/// # Safety
/// As for `lf_graph_regular`.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_er(n: usize, d: f64, seed: u64, out_graph: *mut *mut LfGraph) -> LfStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let g = generate_er(n, d, seed).map_err(fail)?;
        *slot = Box::into_raw(Box::new(LfGraph(g)));
        Ok(())
    })
}

/// Builds a graph from `edge_count` pairs `(edges[2i], edges[2i+1])`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` readable values (it may be null when
/// `edge_count` is 0); `out_graph` as for `lf_graph_regular`.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_from_edges(
    n: usize,
    edges: *const usize,
    edge_count: usize,
    out_graph: *mut *mut LfGraph,
) -> LfStatus {
    guard(|| {
        let slot = out(out_graph, "out_graph")?;
        let flat: &[usize] = if edge_count == 0 {
            &[]
        } else {
            if edges.is_null() {
                return Err(null("edges"));
            }
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        let g = Graph::from_edges(n, &pairs).map_err(fail)?;
        *slot = Box::into_raw(Box::new(LfGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_free(graph: *mut LfGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Vertex count, 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_vertex_count(graph: *const LfGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.n())
}

/// Edge count, 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_edge_count(graph: *const LfGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Copies up to `capacity` sorted neighbours of `v` into `buf` and writes the
/// full degree to `out_degree`.
///
/// # Safety
/// `graph` must be a live handle, `buf` must have room for `capacity` values
/// (null allowed when `capacity` is 0) and `out_degree` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_neighbors(
    graph: *const LfGraph,
    v: usize,
    buf: *mut usize,
    capacity: usize,
    out_degree: *mut usize,
) -> LfStatus {
    guard(|| {
        let g = &handle(graph, "graph")?.0;
        let deg = out(out_degree, "out_degree")?;
        if v >= g.n() {
            return Err(fail(Error::VertexOutOfRange { vertex: v, n: g.n() }));
        }
        let nbrs = g.neighbors(v);
        *deg = nbrs.len();
        let k = nbrs.len().min(capacity);
        if k > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(nbrs.as_ptr(), buf, k);
        }
        Ok(())
    })
}

/// Fraction of vertices whose radius-r ball is the canonical tree T_{d,r}.
///
/// # Safety
/// `graph` must be a live handle and `out_fraction` valid.
#[no_mangle]
pub unsafe extern "C" fn lf_graph_tree_fraction(graph: *const LfGraph, d: usize, r: usize, out_fraction: *mut f64) -> LfStatus {
    guard(|| {
        let g = &handle(graph, "graph")?.0;
        *out(out_fraction, "out_fraction")? = tree_fraction(g, d, r);
        Ok(())
    })
}

/// Parses `rule=<family>;r=<radius>;params=<k=v>`.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string; `out_rule` must be valid and
/// the handle written there released with `lf_rule_free`.
#[no_mangle]
pub unsafe extern "C" fn lf_rule_parse(descriptor: *const c_char, out_rule: *mut *mut LfRule) -> LfStatus {
    guard(|| {
        let slot = out(out_rule, "out_rule")?;
        if descriptor.is_null() {
            return Err(null("descriptor"));
        }
        let text = CStr::from_ptr(descriptor).to_str().map_err(|_| {
            set_error("descriptor is not UTF-8".into());
            LfStatus::InvalidArgument
        })?;
        let rule: LocalRule = text.parse().map_err(fail)?;
        *slot = Box::into_raw(Box::new(LfRule(rule)));
        Ok(())
    })
}

/// # Safety
/// `rule` must be null or a handle from `lf_rule_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_rule_free(rule: *mut LfRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// Locality radius, 0 for a null handle.
///
/// # Safety
/// `rule` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_rule_radius(rule: *const LfRule) -> usize {
    use localfactor::localalg::DecisionRule;
    rule.as_ref().map_or(0, |r| DecisionRule::radius(&r.0))
}

/// Runs the rule on every vertex. `mask_out[v]` is set to 1 for members and
/// 0 otherwise; the member count goes to `out_size`.
///
/// # Safety
/// `labels` and `mask_out` must each hold `n` values with `n` equal to the
/// graph's vertex count; all handles must be live.
#[no_mangle]
pub unsafe extern "C" fn lf_rule_run(
    rule: *const LfRule,
    graph: *const LfGraph,
    labels: *const f64,
    n: usize,
    mask_out: *mut u8,
    out_size: *mut usize,
) -> LfStatus {
    guard(|| {
        let rule = &handle(rule, "rule")?.0;
        let g = &handle(graph, "graph")?.0;
        let size = out(out_size, "out_size")?;
        if n != g.n() {
            return Err(fail(Error::MissingLabels { labels: n, n: g.n() }));
        }
        if n > 0 && (labels.is_null() || mask_out.is_null()) {
            return Err(null("labels or mask_out"));
        }
        let x = if n == 0 { Vec::new() } else { std::slice::from_raw_parts(labels, n).to_vec() };
        let x = Decoration::new(x).map_err(fail)?;
        let outcome = run_rule(rule, g, &x).map_err(fail)?;
        if n > 0 {
            let mask = std::slice::from_raw_parts_mut(mask_out, n);
            mask.fill(0);
            for &v in &outcome.members {
                mask[v] = 1;
            }
        }
        *size = outcome.size();
        Ok(())
    })
}

/// Root-acceptance probability on the canonical tree.
///
/// # Safety
/// `rule` must be a live handle and `out_estimate` valid.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_density(
    rule: *const LfRule,
    d: usize,
    trials: u64,
    seed: u64,
    out_estimate: *mut LfEstimate,
) -> LfStatus {
    guard(|| {
        let rule = &handle(rule, "rule")?.0;
        let slot = out(out_estimate, "out_estimate")?;
        let e = estimate_density(rule, d, trials, seed).map_err(fail)?;
        *slot = LfEstimate { value: e.alpha_hat, std_error: e.std_error, hits: e.hits, trials: e.trials };
        Ok(())
    })
}

/// γ(p) on the canonical tree; the same seed as `lf_estimate_density` gives
/// identical counts at p = 1.
///
/// # Safety
/// As for `lf_estimate_density`.
#[no_mangle]
pub unsafe extern "C" fn lf_estimate_gamma(
    rule: *const LfRule,
    d: usize,
    p: f64,
    trials: u64,
    seed: u64,
    out_estimate: *mut LfEstimate,
) -> LfStatus {
    guard(|| {
        let rule = &handle(rule, "rule")?.0;
        let slot = out(out_estimate, "out_estimate")?;
        let e = coupling::estimate_gamma(rule, d, p, trials, seed).map_err(fail)?;
        *slot = LfEstimate { value: e.gamma_hat, std_error: e.std_error, hits: e.hits, trials: e.trials };
        Ok(())
    })
}

/// ln E|Overlap(n, d, m, k)| in G(n, d/n).
///
/// # Safety
/// `out_log` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_log_expected_overlap_er(n: u64, d: f64, m: u64, k: u64, out_log: *mut f64) -> LfStatus {
    guard(|| {
        let slot = out(out_log, "out_log")?;
        *slot = log_expected_overlap_er(&OverlapQuery::er(n, d, m, k)).map_err(fail)?.log_value;
        Ok(())
    })
}

/// ln E|A(m, k, l)| in the configuration model.
///
/// # Safety
/// `out_log` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_log_expected_overlap_reg(n: u64, d: u64, m: u64, k: u64, l: u64, out_log: *mut f64) -> LfStatus {
    guard(|| {
        let slot = out(out_log, "out_log")?;
        *slot = log_expected_overlap_reg(&OverlapQuery::reg(n, d, m, k, l)).map_err(fail)?.log_value;
        Ok(())
    })
}

/// ln E|Overlap_d(n, m, k)|, summed over all feasible l.
///
/// # Safety
/// `out_log` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_log_expected_overlap_reg_total(n: u64, d: u64, m: u64, k: u64, out_log: *mut f64) -> LfStatus {
    guard(|| {
        let slot = out(out_log, "out_log")?;
        *slot = log_expected_overlap_reg_total(n, d, m, k).map_err(fail)?.log_value;
        Ok(())
    })
}

/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_rate_er(s: f64, x: f64, d: f64, out_value: *mut f64) -> LfStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        *slot = rate_er(s, x, d).map_err(fail)?.value;
        Ok(())
    })
}

/// # Safety
/// `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_rate_reg(s: f64, x: f64, y: f64, d: f64, out_value: *mut f64) -> LfStatus {
    guard(|| {
        let slot = out(out_value, "out_value")?;
        *slot = rate_reg(s, x, y, d).map_err(fail)?.value;
        Ok(())
    })
}

/// # Safety
/// `out_y` and `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_max_rate_reg_over_y(s: f64, x: f64, d: f64, out_y: *mut f64, out_value: *mut f64) -> LfStatus {
    guard(|| {
        let y = out(out_y, "out_y")?;
        let v = out(out_value, "out_value")?;
        let p = max_rate_reg_over_y(s, x, d).map_err(fail)?;
        *y = p.y.unwrap_or(0.0);
        *v = p.value;
        Ok(())
    })
}

/// # Safety
/// `out_window` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_forbidden_window(
    d: u64,
    beta: f64,
    model: LfModel,
    grid_points: usize,
    out_window: *mut LfWindow,
) -> LfStatus {
    guard(|| {
        let slot = out(out_window, "out_window")?;
        let opts = WindowOptions { grid_points, ..Default::default() };
        let w = forbidden_window(d, beta, model.into(), &opts).map_err(fail)?;
        *slot = LfWindow {
            d: w.d,
            beta: w.beta,
            zhat_max: w.zhat_max.unwrap_or(0.0),
            has_window: w.zhat_max.is_some(),
            theoretical_bound: w.theoretical_bound,
            empty_by_theory: w.empty_by_theory,
        };
        Ok(())
    })
}

/// # Safety
/// `out_d` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lf_min_d_for_window(
    beta: f64,
    zhat_target: f64,
    model: LfModel,
    grid_points: usize,
    d_ceiling: u64,
    out_d: *mut u64,
) -> LfStatus {
    guard(|| {
        let slot = out(out_d, "out_d")?;
        let opts = WindowOptions { grid_points, d_ceiling };
        *slot = min_d_for_window(beta, zhat_target, model.into(), &opts).map_err(fail)?.d;
        Ok(())
    })
}
