use statrs::function::factorial;

/// ln(n!).
#[inline]
pub fn ln_factorial(n: u64) -> f64 {
    factorial::ln_factorial(n)
}

/// ln C(n, k), `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// ln Σ exp(v), with `-inf` for an empty or all-`-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// t·ln t with 0·ln 0 = 0.
#[inline]
pub fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// (1 - t)·ln(1 - t) evaluated from t, without forming 1 - t; 0 at t = 1.
#[inline]
pub(crate) fn xlogx_complement(t: f64) -> f64 {
    if t == 1.0 {
        0.0
    } else {
        (1.0 - t) * (-t).ln_1p()
    }
}
