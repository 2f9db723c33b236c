use serde::{Deserialize, Serialize};

use super::logmath::{xlogx, xlogx_complement};
use crate::{Error, Result};

/// One evaluation of a rate function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub d: f64,
    pub s: f64,
    pub x: f64,
    pub y: Option<f64>,
    pub value: f64,
}

fn check_sx(s: f64, x: f64, d: f64) -> Result<()> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Domain(format!("d must be positive, got {d}")));
    }
    if !(s.is_finite() && x.is_finite() && x > 0.0 && x <= s) {
        return Err(Error::Domain(format!("need 0 < x <= s, got s = {s}, x = {x}")));
    }
    if 1.0 - 2.0 * s + x <= 0.0 {
        return Err(Error::Domain(format!("need 1 - 2s + x > 0, got s = {s}, x = {x}")));
    }
    Ok(())
}

/// Per-vertex exponent of E|Overlap| in G(n, d/n) at m = s n, k = x n.
pub fn rate_er(s: f64, x: f64, d: f64) -> Result<RatePoint> {
    check_sx(s, x, d)?;
    let a = s - x;
    let entropy = -xlogx(x) - 2.0 * xlogx(a) - xlogx_complement(2.0 * s - x);
    let c = 2.0 * s - x;
    // Scaled by d first so that tiny densities do not underflow when squared.
    let energy = 0.5 * (d * c) * c - (d * a) * a;
    Ok(RatePoint {
        d,
        s,
        x,
        y: None,
        value: entropy - energy,
    })
}

/// Rate of the regular-graph count with cross-edge density y; no domain checks.
fn rate_reg_raw(s: f64, x: f64, y: f64, d: f64) -> f64 {
    let a = s - x;
    let c = 2.0 * s - x;
    -xlogx(x) - 2.0 * xlogx(a) - xlogx_complement(c) + 2.0 * d * xlogx(a) - d * xlogx(y)
        - 2.0 * d * xlogx((a - y).max(0.0))
        + d * xlogx_complement(c)
        - 0.5 * d * xlogx_complement((2.0 * c - 2.0 * y).min(1.0))
}

/// Per-vertex exponent of E|A(m, k, l)| in the configuration model at
/// m = s n, k = x n, l = y n d.
pub fn rate_reg(s: f64, x: f64, y: f64, d: f64) -> Result<RatePoint> {
    check_sx(s, x, d)?;
    if !(y.is_finite() && y >= 0.0 && y <= s - x) {
        return Err(Error::Domain(format!("need 0 <= y <= s - x, got y = {y}")));
    }
    if 1.0 - 4.0 * s + 2.0 * x + 2.0 * y <= 0.0 {
        return Err(Error::Domain(format!("need 1 - 4s + 2x + 2y > 0, got s = {s}, x = {x}, y = {y}")));
    }
    Ok(RatePoint {
        d,
        s,
        x,
        y: Some(y),
        value: rate_reg_raw(s, x, y, d),
    })
}

/// d y + 2 d y log(s - x) - d y log y: the part of the regular rate that
/// survives at leading order once the y-terms are expanded.
pub fn y_part(s: f64, x: f64, y: f64, d: f64) -> f64 {
    d * y + 2.0 * d * y * (s - x).ln() - d * xlogx(y)
}

/// Exact maximizer of `rate_reg` over y: the positive root of
/// y² + (1 - 2s) y - (s - x)² = 0.
pub fn stationary_y(s: f64, x: f64) -> f64 {
    let a = s - x;
    let b = 1.0 - 2.0 * s;
    // Rationalized root, stable when a² is small against b².
    2.0 * a * a / (b + (b * b + 4.0 * a * a).sqrt())
}

/// Golden-section search for the maximum of a unimodal `f` on [lo, hi];
/// stops once the bracket is below `rel_tol` relative to its midpoint.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..500 {
        let mid = 0.5 * (a + b);
        if b - a <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + INV_PHI * (b - a);
            fe = f(e);
        }
    }
    let mut best = (0.5 * (a + b), f(0.5 * (a + b)));
    for (t, ft) in [(c, fc), (e, fe)] {
        if ft > best.1 {
            best = (t, ft);
        }
    }
    best
}

/// Numeric maximizer of `y_part` over [0, s - x].
pub fn maximize_y_part(s: f64, x: f64, d: f64, rel_tol: f64) -> Result<(f64, f64)> {
    check_sx(s, x, d)?;
    let a = s - x;
    if a == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok(golden_section_max(|y| y_part(s, x, y, d), 0.0, a, rel_tol))
}

/// Maximum of `rate_reg` over the feasible y, with its argmax in `y`.
///
/// Candidates are both ends of the feasible interval, (s - x)² when feasible,
/// the closed-form stationary point and a golden-section refinement.
pub fn max_rate_reg_over_y(s: f64, x: f64, d: f64) -> Result<RatePoint> {
    check_sx(s, x, d)?;
    if 1.0 - 2.0 * s <= 0.0 {
        return Err(Error::Domain(format!(
            "need 1 - 2s > 0 for a feasible cross-edge density, got s = {s}"
        )));
    }
    let a = s - x;
    let lo = (2.0 * s - x - 0.5).max(0.0);
    let hi = a;
    let f = |y: f64| rate_reg_raw(s, x, y, d);
    let mut best = (hi, f(hi));
    let mut consider = |y: f64| {
        if y >= lo && y <= hi {
            let v = f(y);
            if v > best.1 {
                best = (y, v);
            }
        }
    };
    if lo == 0.0 {
        consider(0.0);
    }
    consider(a * a);
    consider(stationary_y(s, x));
    if hi > lo {
        let (y, _) = golden_section_max(f, lo, hi, 1e-6);
        consider(y);
    }
    Ok(RatePoint {
        d,
        s,
        x,
        y: Some(best.0),
        value: best.1,
    })
}
