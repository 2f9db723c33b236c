use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rate::{max_rate_reg_over_y, rate_er};
use crate::coupling::csv_error;
use crate::{Error, Model, Result};

/// 2β² - 1 at or below this counts as zero: β = 0.707107 is 1/√2 to the
/// printed precision and is treated as the boundary.
pub const THRESHOLD_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowOptions {
    /// Odd number of ẑ points on the symmetric grid.
    pub grid_points: usize,
    pub d_ceiling: u64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions {
            grid_points: 2001,
            d_ceiling: 1 << 40,
        }
    }
}

impl WindowOptions {
    fn validate(&self) -> Result<()> {
        if self.grid_points < 3 || self.grid_points % 2 == 0 {
            return Err(Error::invalid("grid_points", format!("must be odd and at least 3, got {}", self.grid_points)));
        }
        if self.d_ceiling < 3 {
            return Err(Error::invalid("d_ceiling", "must be at least 3"));
        }
        Ok(())
    }
}

/// Numeric forbidden overlap window at one (d, β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub model: Model,
    pub d: u64,
    pub beta: f64,
    /// Largest grid ẑ with a negative rate on all of [-ẑ, ẑ]; `None` when the
    /// rate is not negative at ẑ = 0.
    pub zhat_max: Option<f64>,
    /// √(2β² - 1), clamped to 0 below the threshold.
    pub theoretical_bound: f64,
    pub empty_by_theory: bool,
    pub grid_step: f64,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.zhat_max.is_none()
    }

    /// Overlap densities x = (1 + ẑ) log d / d over the numeric window.
    pub fn overlap_interval(&self) -> Option<(f64, f64)> {
        let l = (self.d as f64).ln() / self.d as f64;
        self.zhat_max.map(|z| ((1.0 - z) * l, (1.0 + z) * l))
    }

    /// Integer overlaps k, at sets of size n, whose density lies strictly
    /// inside the numeric window.
    pub fn forbidden_overlaps(&self, n: u64) -> Option<(u64, u64)> {
        let (lo, hi) = self.overlap_interval()?;
        let first = (lo * n as f64).floor() as u64 + 1;
        let last = (hi * n as f64).ceil() as u64;
        (last > first).then(|| (first, last - 1))
    }

    /// Whether overlap density `x` falls inside the numeric window.
    pub fn contains_density(&self, x: f64) -> bool {
        self.overlap_interval().is_some_and(|(lo, hi)| x > lo && x < hi)
    }
}

/// s = (1 + β) log d / d.
pub fn set_density(d: f64, beta: f64) -> f64 {
    (1.0 + beta) * d.ln() / d
}

/// The symmetric ẑ grid in ascending order: j β / (N + 1) for |j| <= N.
pub fn zhat_grid(beta: f64, grid_points: usize) -> Vec<f64> {
    let half = (grid_points / 2) as i64;
    let h = beta.min(1.0) / (half + 1) as f64;
    (-half..=half).map(|j| j as f64 * h).collect()
}

/// One rate-scan row; `y_star` is the maximizing cross-edge density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateScanRow {
    pub model: Model,
    pub d: f64,
    pub beta: f64,
    pub zhat: f64,
    pub y_star: Option<f64>,
    pub rate: f64,
}

/// Rate at s = (1 + β) log d / d, x = (1 + ẑ) log d / d; the regular rate is
/// maximized over y.
pub fn rate_at(model: Model, d: f64, beta: f64, zhat: f64) -> Result<RateScanRow> {
    let l = d.ln() / d;
    let (s, x) = ((1.0 + beta) * l, (1.0 + zhat) * l);
    let p = match model {
        Model::Er => rate_er(s, x, d)?,
        Model::Reg => max_rate_reg_over_y(s, x, d)?,
    };
    Ok(RateScanRow {
        model,
        d,
        beta,
        zhat,
        y_star: p.y,
        rate: p.value,
    })
}

fn check_window_args(d: u64, beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("beta", format!("must lie in (0, 1], got {beta}")));
    }
    if d < 3 {
        return Err(Error::invalid("d", format!("must be at least 3, got {d}")));
    }
    Ok(())
}

/// Scans the ẑ grid at (d, β); points outside the rate's domain count as not
/// negative.
pub fn forbidden_window(d: u64, beta: f64, model: Model, opts: &WindowOptions) -> Result<Window> {
    check_window_args(d, beta)?;
    opts.validate()?;
    let grid = zhat_grid(beta, opts.grid_points);
    let half = grid.len() / 2;
    let negative: Vec<bool> = grid
        .par_iter()
        .map(|&z| rate_at(model, d as f64, beta, z).is_ok_and(|r| r.rate < 0.0))
        .collect();
    let mut zhat_max = None;
    for j in 0..=half {
        if negative[half - j] && negative[half + j] {
            zhat_max = Some(grid[half + j]);
        } else {
            break;
        }
    }
    let excess = 2.0 * beta * beta - 1.0;
    let empty_by_theory = excess <= THRESHOLD_SLACK;
    Ok(Window {
        model,
        d,
        beta,
        zhat_max,
        theoretical_bound: if empty_by_theory { 0.0 } else { excess.sqrt() },
        empty_by_theory,
        grid_step: grid[half + 1],
    })
}

/// Result of the doubling-then-bisection search, with every probed window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinDSearch {
    pub d: u64,
    pub window: Window,
    pub probes: Vec<Window>,
}

/// Smallest d on a doubling-then-bisection schedule from d = 3 whose numeric
/// window reaches `zhat_target`.
pub fn min_d_for_window(beta: f64, zhat_target: f64, model: Model, opts: &WindowOptions) -> Result<MinDSearch> {
    opts.validate()?;
    let excess = 2.0 * beta * beta - 1.0;
    if !(beta <= 1.0 && excess > THRESHOLD_SLACK) {
        return Err(Error::invalid("beta", format!("must lie in (1/sqrt(2), 1], got {beta}")));
    }
    let bound = excess.sqrt();
    if !(zhat_target > 0.0 && zhat_target < bound) {
        return Err(Error::invalid(
            "zhat_target",
            format!("must lie in (0, {bound}) for beta = {beta}, got {zhat_target}"),
        ));
    }
    let mut probes = Vec::new();
    let mut probe = |d: u64| -> Result<bool> {
        let w = forbidden_window(d, beta, model, opts)?;
        probes.push(w);
        Ok(w.zhat_max.is_some_and(|z| z >= zhat_target))
    };
    let mut lo = None;
    let mut hi = 3u64;
    while !probe(hi)? {
        lo = Some(hi);
        if hi >= opts.d_ceiling {
            return Err(Error::WindowNotFound {
                target: zhat_target,
                ceiling: opts.d_ceiling,
            });
        }
        hi = (hi * 2).min(opts.d_ceiling);
    }
    if let Some(mut lo) = lo {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if probe(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let window = *probes.iter().rev().find(|w| w.d == hi).expect("hi was probed");
    Ok(MinDSearch { d: hi, window, probes })
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Columns `model,d,beta,zhat,y_star,rate`.
pub fn write_rate_scan_csv<W: Write>(out: W, rows: &[RateScanRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "d", "beta", "zhat", "y_star", "rate"])
        .map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.model.to_string(),
            r.d.to_string(),
            r.beta.to_string(),
            r.zhat.to_string(),
            opt(r.y_star),
            r.rate.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `model,d,beta,zhat_max,theoretical_bound`; empty `zhat_max` for an
/// empty numeric window.
pub fn write_windows_csv<W: Write>(out: W, windows: &[Window]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "d", "beta", "zhat_max", "theoretical_bound"])
        .map_err(csv_error)?;
    for win in windows {
        w.write_record([
            win.model.to_string(),
            win.d.to_string(),
            win.beta.to_string(),
            opt(win.zhat_max),
            win.theoretical_bound.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
