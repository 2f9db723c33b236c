use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use localfactor::moments::{
    forbidden_window, ln_binomial, log_expected_overlap_er, log_expected_overlap_reg, log_expected_overlap_reg_total,
    max_rate_reg_over_y, maximize_y_part, min_d_for_window, rate_at, rate_er, rate_reg, y_part, OverlapQuery,
    WindowOptions,
};
use localfactor::{Error, Model};

fn sx(d: f64, beta: f64, zhat: f64) -> (f64, f64) {
    let l = d.ln() / d;
    ((1.0 + beta) * l, (1.0 + zhat) * l)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn maximum_dominates_sampled_y(logd in 0.7f64..7.0, beta in 0.05f64..1.0, zf in -0.95f64..0.99, t in 0.0f64..=1.0) {
        let d = 10f64.powf(logd);
        let (s, x) = sx(d, beta, zf * beta);
        prop_assume!(1.0 - 2.0 * s > 0.0);
        let best = max_rate_reg_over_y(s, x, d).unwrap();
        let lo = (2.0 * s - x - 0.5).max(0.0);
        let y = lo + t * (s - x - lo);
        if let Ok(p) = rate_reg(s, x, y, d) {
            prop_assert!(best.value >= p.value - 1e-12 * p.value.abs().max(1e-300));
        }
    }

    #[test]
    fn er_collapses_to_the_independent_set_moment(n in 2u64..5_000, m_frac in 0.0f64..0.5, d_frac in 0.01f64..0.99) {
        let m = (n as f64 * m_frac) as u64;
        let d = d_frac * n as f64;
        let e = log_expected_overlap_er(&OverlapQuery::er(n, d, m, m)).unwrap().log_value;
        let direct = ln_binomial(n, m) + (m * m.saturating_sub(1) / 2) as f64 * (-d / n as f64).ln_1p();
        prop_assert!((e - direct).abs() <= 1e-9 * direct.abs().max(1.0));
    }

    #[test]
    fn regular_total_dominates_each_term(m in 1u64..6, k_frac in 0.0f64..=1.0, d in 1u64..5) {
        let n = 12u64;
        let k = (m as f64 * k_frac) as u64;
        prop_assume!(2 * m - k <= n && n * d % 2 == 0);
        let total = log_expected_overlap_reg_total(n, d, m, k).unwrap().log_value;
        for l in 0..=d * (m - k) {
            if let Ok(t) = log_expected_overlap_reg(&OverlapQuery::reg(n, d, m, k, l)) {
                prop_assert!(total >= t.log_value - 1e-12);
            }
        }
    }
}

#[test]
fn exact_moments_stay_finite_at_a_billion_vertices() {
    let n = 1_000_000_000u64;
    for (m, k) in [(0, 0), (1, 0), (n / 10, n / 50), (n / 3, n / 3), (n / 2, 0)] {
        let e = log_expected_overlap_er(&OverlapQuery::er(n, 5.0, m, k)).unwrap().log_value;
        assert!(e.is_finite(), "er m={m} k={k}: {e}");
    }
    let m = n / 10;
    let k = n / 20;
    let t = log_expected_overlap_reg(&OverlapQuery::reg(n, 3, m, k, m - k)).unwrap().log_value;
    assert!(t.is_finite());
    let full = log_expected_overlap_reg(&OverlapQuery::reg(n, 4, m, m, 0)).unwrap().log_value;
    assert!(full.is_finite());
}

#[test]
fn named_regular_errors() {
    assert!(matches!(log_expected_overlap_reg(&OverlapQuery::reg(6, 3, 2, 1, 4)), Err(Error::CrossEdgeRange { .. })));
    assert!(matches!(log_expected_overlap_reg(&OverlapQuery::reg(5, 3, 2, 1, 0)), Err(Error::OddReplicaCount { .. })));
    assert!(log_expected_overlap_reg_total(5, 3, 2, 1).is_err());
}

#[test]
fn full_overlap_collapses_to_entropy_minus_energy() {
    let d = 50.0;
    for s in [0.01, 0.05, 0.1] {
        let p = rate_er(s, s, d).unwrap().value;
        let expect = -s * s.ln() - (1.0 - s) * (1.0 - s).ln() - d * s * s / 2.0;
        assert!((p - expect).abs() <= 1e-12);
    }
}

#[test]
fn reg_boundary_at_zero_cross_edges() {
    let (d, s, x) = (40.0f64, 0.06f64, 0.03f64);
    let a = s - x;
    let full = rate_reg(s, x, 0.0, d).unwrap().value;
    let w = 1.0 - 4.0 * s + 2.0 * x;
    let c = 1.0 - 2.0 * s + x;
    let expect = -x * x.ln() - 2.0 * a * a.ln() - c * c.ln() + 2.0 * d * a * a.ln() + d * c * c.ln()
        - 2.0 * d * a * a.ln()
        - d / 2.0 * w * w.ln();
    assert!((full - expect).abs() <= 1e-12, "{full} vs {expect}");
}

#[test]
fn y_part_grid_maximizer_at_degree_one_hundred() {
    let d = 100.0;
    let (s, x) = sx(d, 0.9, 0.0);
    let ys = (s - x) * (s - x);
    // Plain grid over [0, s - x], refined once around the best cell.
    let grid_max = |lo: f64, hi: f64| {
        (0..=20_000)
            .map(|i| lo + (hi - lo) * i as f64 / 20_000.0)
            .max_by(|&a, &b| y_part(s, x, a, d).total_cmp(&y_part(s, x, b, d)))
            .unwrap()
    };
    let coarse = grid_max(0.0, s - x);
    let step = (s - x) / 20_000.0;
    let fine = grid_max((coarse - step).max(0.0), coarse + step);
    assert!(((fine - ys) / ys).abs() <= 1e-3, "grid {fine} vs {ys}");
    let (golden, _) = maximize_y_part(s, x, d, 1e-6).unwrap();
    assert!(((golden - ys) / ys).abs() <= 1e-3);
}

#[test]
fn full_rate_maximizer_approaches_the_y_part_point() {
    // The y-part alone peaks at (s - x)^2; the full regular rate adds y terms
    // through its last log and peaks near (s - x)^2 (1 + 2 s), so the two
    // agree to 1e-3 only once 2 s is below that.
    let mut prev = f64::INFINITY;
    for d in [1e3, 1e4, 1e5, 1e6] {
        let (s, x) = sx(d, 0.9, 0.0);
        let ys = (s - x) * (s - x);
        let y = max_rate_reg_over_y(s, x, d).unwrap().y.unwrap();
        let rel = ((y - ys) / ys).abs();
        println!("d={d:e}: y_star/(s-x)^2 - 1 = {rel:.3e}, 2s = {:.3e}", 2.0 * s);
        assert!(rel < prev);
        if d <= 1e5 {
            assert!((rel - 2.0 * s).abs() <= 0.1 * 2.0 * s);
        }
        prev = rel;
    }
    assert!(prev <= 1e-3);
}

#[test]
fn small_degree_maximum_is_valid() {
    // At d = 5 the regular rate needs s < 1/2, so beta stays small.
    let d = 5.0;
    let (s, x) = sx(d, 0.3, 0.1);
    let best = max_rate_reg_over_y(s, x, d).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let lo = (2.0 * s - x - 0.5).max(0.0);
    for _ in 0..1000 {
        let y = rng.random_range(lo..=(s - x));
        if let Ok(p) = rate_reg(s, x, y, d) {
            assert!(best.value >= p.value);
        }
    }
}

#[test]
fn regular_rate_gap_shrinks_on_the_degree_ladder() {
    for beta in [0.75, 0.9] {
        let scaled: Vec<f64> = [1e3, 1e4, 1e5]
            .iter()
            .map(|&d: &f64| {
                let (s, x) = sx(d, beta, 0.0);
                let gap = max_rate_reg_over_y(s, x, d).unwrap().value - rate_er(s, x, d).unwrap().value;
                gap * d / d.ln().powi(2)
            })
            .collect();
        println!("beta={beta}: (reg - er) d / log^2 d = {scaled:?}");
        assert!(scaled.windows(2).all(|w| w[1].abs() < w[0].abs()), "{scaled:?}");
    }
}

#[test]
fn exact_moment_stirling_gap_decreases() {
    let d = 20.0;
    let (s, x) = sx(d, 0.9, 0.0);
    let rate = rate_er(s, x, d).unwrap().value;
    let mut prev = f64::INFINITY;
    for n in [1e3, 1e4, 1e5, 1e6] {
        let q = OverlapQuery::er(n as u64, d, (n * s) as u64, (n * x) as u64);
        let gap = (log_expected_overlap_er(&q).unwrap().log_value / n - rate).abs();
        assert!(gap < prev);
        prev = gap;
    }
}

#[test]
fn window_threshold_and_unit_beta() {
    let opts = WindowOptions::default();
    let w = forbidden_window(1000, std::f64::consts::FRAC_1_SQRT_2, Model::Er, &opts).unwrap();
    assert!(w.empty_by_theory);
    assert_eq!(w.theoretical_bound, 0.0);
    let w = forbidden_window(1000, 0.707107, Model::Reg, &opts).unwrap();
    assert!(w.empty_by_theory);
    let w = forbidden_window(1000, 1.0, Model::Er, &opts).unwrap();
    assert_eq!(w.theoretical_bound, 1.0);
    assert!(forbidden_window(2, 0.9, Model::Er, &opts).is_err());
    assert!(forbidden_window(100, 1.1, Model::Er, &opts).is_err());
}

#[test]
fn window_at_the_solver_degree() {
    let opts = WindowOptions::default();
    let bound = 0.62f64.sqrt();
    for model in [Model::Er, Model::Reg] {
        let search = min_d_for_window(0.9, 0.7 * bound, model, &opts).unwrap();
        let z = search.window.zhat_max.unwrap();
        println!("{model} beta=0.9: d0={} zhat_max={z:.5} bound={bound:.5}", search.d);
        assert!(z >= 0.7 * bound);
        let at_zero = rate_at(model, search.d as f64, 0.9, 0.0).unwrap();
        assert!(at_zero.rate < 0.0);
    }
}

#[test]
fn min_degree_baselines() {
    let opts = WindowOptions::default();
    let search = min_d_for_window(0.95, 0.5, Model::Er, &opts).unwrap();
    println!("er beta=0.95 target 0.5: d = {}", search.d);
    assert_eq!(search.d, 7);
    assert!(matches!(min_d_for_window(0.6, 0.1, Model::Er, &opts), Err(Error::InvalidParameter { name: "beta", .. })));
    assert!(min_d_for_window(0.9, 0.8, Model::Er, &opts).is_err());
}

#[test]
fn window_growth_along_the_doubling_schedule() {
    // Reported, not assumed: list every doubling step where the window shrinks.
    let opts = WindowOptions::default();
    for model in [Model::Er, Model::Reg] {
        for beta in [0.75, 0.9] {
            let mut shrinks = Vec::new();
            let mut d = 4u64;
            let mut prev = forbidden_window(d, beta, model, &opts).unwrap();
            while d < 1 << 40 {
                d *= 2;
                let w = forbidden_window(d, beta, model, &opts).unwrap();
                let (a, b) = (prev.zhat_max.unwrap_or(0.0), w.zhat_max.unwrap_or(0.0));
                if b + w.grid_step < a {
                    shrinks.push(format!("{}->{}: {a:.4}->{b:.4}", d / 2, d));
                }
                prev = w;
            }
            println!("{model} beta={beta}: {} shrinking steps {shrinks:?}", shrinks.len());
        }
    }
}

#[test]
fn rate_sign_matches_the_quadratic_asymptotically() {
    // rate / (log d * log d / d) tends to (z^2 - (2 beta^2 - 1)) / 2; the
    // corrections decay like 1 / log d, so the check runs where the quadratic
    // is clear of zero.
    let d = 1e300f64;
    let scale = d.ln() * d.ln() / d;
    let mut checked = 0;
    for beta in [0.75, 0.8, 0.9, 1.0] {
        for i in -19..20 {
            let z = i as f64 * beta / 20.0;
            let q = 2.0 * (1.0 + beta) - (1.0 + beta).powi(2) - (1.0 + z) + (1.0 + z).powi(2) / 2.0;
            if q.abs() < 0.05 {
                continue;
            }
            let (s, x) = sx(d, beta, z);
            let r = rate_er(s, x, d).unwrap().value / scale;
            assert_eq!(r < 0.0, q < 0.0, "beta={beta} z={z}: rate {r} vs quadratic {q}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}
