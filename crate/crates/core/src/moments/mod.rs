//! First-moment counts of overlapping independent-set pairs and their rates.
//!
//! Exact expectations are evaluated in natural-log domain through log-gamma,
//! so they stay finite far beyond the point where the counts overflow. The
//! asymptotic rate functions ignore integer rounding; the exact formulas do
//! not, and take `m = floor(n s)`, `k = floor(n x)` from their callers.
//!
//! The union bound over the integers k of a window adds at most
//! `(log n) / n` to the per-vertex exponent, which vanishes in the rate and is
//! not computed here.

mod exact;
mod logmath;
mod rate;
mod window;

pub use exact::{
    log_expected_overlap_er, log_expected_overlap_reg, log_expected_overlap_reg_total, write_exact_csv, LogExpectation,
    OverlapQuery,
};
pub use logmath::{ln_binomial, ln_factorial, log_sum_exp, xlogx};
pub use rate::{
    golden_section_max, max_rate_reg_over_y, maximize_y_part, rate_er, rate_reg, stationary_y, y_part, RatePoint,
};
pub use window::{
    forbidden_window, min_d_for_window, rate_at, set_density, write_rate_scan_csv, write_windows_csv, zhat_grid, MinDSearch,
    RateScanRow, Window, WindowOptions, THRESHOLD_SLACK,
};
