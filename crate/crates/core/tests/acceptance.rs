//! End-to-end acceptance checks, one test per criterion. Each prints a single
//! `criterion NN ... PASS|FAIL` line; run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use localfactor::coupling::{estimate_gamma, gamma_sweep, overlap_sweep};
use localfactor::graph::{generate_er, generate_regular, Graph, Topology};
use localfactor::localalg::{
    estimate_density, locality_check, measure_run, run_rule, DecisionRule, Decoration, Labels, LocalRule,
};
use localfactor::moments::{
    forbidden_window, log_expected_overlap_er, log_expected_overlap_reg, log_expected_overlap_reg_total,
    maximize_y_part, min_d_for_window, rate_er, y_part, OverlapQuery, WindowOptions,
};
use localfactor::rng::substream;
use localfactor::Model;

fn report(id: u32, name: &str, passed: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let in_budget = elapsed <= budget;
    let verdict = if passed && in_budget { "PASS" } else { "FAIL" };
    println!(
        "criterion {id:02} {name}: {verdict} ({:.2}s of {:.0}s budget) {detail}",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(passed, "criterion {id} failed: {detail}");
    assert!(in_budget, "criterion {id} exceeded its runtime budget");
}

fn popcount(s: u32) -> u64 {
    s.count_ones() as u64
}

// 1 -----------------------------------------------------------------------

/// E|Overlap| in G(n, q) by enumerating every ordered pair of m-sets: the
/// pair survives iff no vertex pair inside I or inside J is an edge.
fn er_enumeration(n: u32, q: f64, m: u64, k: u64) -> f64 {
    let mut total = 0.0;
    for i in 0u32..(1 << n) {
        if popcount(i) != m {
            continue;
        }
        for j in 0u32..(1 << n) {
            if popcount(j) != m || popcount(i & j) != k {
                continue;
            }
            let mut slots = 0;
            for a in 0..n {
                for b in a + 1..n {
                    let both_i = i >> a & 1 == 1 && i >> b & 1 == 1;
                    let both_j = j >> a & 1 == 1 && j >> b & 1 == 1;
                    if both_i || both_j {
                        slots += 1;
                    }
                }
            }
            total += (1.0 - q).powi(slots);
        }
    }
    total
}

#[test]
fn criterion_01_er_moment_oracle() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut ok = true;
    for (n, d) in [(4u32, 1.0f64), (6, 2.0)] {
        for m in 0..=n as u64 {
            for k in 0..=m {
                if 2 * m - k > n as u64 {
                    continue;
                }
                let oracle = er_enumeration(n, d / n as f64, m, k).ln();
                let got = log_expected_overlap_er(&OverlapQuery::er(n as u64, d, m, k)).unwrap().log_value;
                let err = (got - oracle).abs();
                let rel = err / oracle.abs().max(1e-300);
                worst = worst.max(if oracle == 0.0 { err } else { rel });
                ok &= err <= 1e-9 * oracle.abs() + 1e-12;
                checked += 1;
            }
        }
    }
    let case = log_expected_overlap_er(&OverlapQuery::er(4, 1.0, 2, 1)).unwrap().log_value;
    ok &= (case - 13.5f64.ln()).abs() <= 1e-9 * 13.5f64.ln();
    report(
        1,
        "er_moment_oracle",
        ok,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("{checked} (m,k) cases, worst relative log error {worst:.2e}, n=4 d=1 m=2 k=1 -> {case:.6}"),
    );
}

// 2 -----------------------------------------------------------------------

#[test]
fn criterion_02_regular_moment_oracle() {
    const N: usize = 6;
    const D: usize = 3;
    const SAMPLES: u64 = 1_000_000;
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_0002);
    let mut replicas: Vec<usize> = (0..N * D).collect();
    // sum and sum of squares of the pair count, indexed [m][k]
    let mut sum = [[0f64; N + 1]; N + 1];
    let mut sq = [[0f64; N + 1]; N + 1];
    let mut by_l = [0f64; D + 1];
    let mut by_l_sq = [0f64; D + 1];
    let mut sample_l = [0u32; D + 1];
    let mut counts = [[0u32; N + 1]; N + 1];
    for _ in 0..SAMPLES {
        replicas.shuffle(&mut rng);
        // adj[v] has bit w set for every replica edge v-w, loops included.
        let mut adj = [0u32; N];
        let mut edges = [(0usize, 0usize); N * D / 2];
        for (e, pair) in replicas.chunks_exact(2).enumerate() {
            let (a, b) = (pair[0] / D, pair[1] / D);
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
            edges[e] = (a, b);
        }
        let independent: Vec<u32> = (0u32..1 << N)
            .filter(|&s| (0..N).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
            .collect();
        for row in counts.iter_mut() {
            row.fill(0);
        }
        sample_l.fill(0);
        for &i in &independent {
            for &j in &independent {
                if i.count_ones() == j.count_ones() {
                    counts[i.count_ones() as usize][(i & j).count_ones() as usize] += 1;
                    if i.count_ones() == 2 && (i & j).count_ones() == 1 {
                        let (a, b) = (i & !j, j & !i);
                        let l = edges
                            .iter()
                            .filter(|&&(u, v)| (a >> u & 1 == 1 && b >> v & 1 == 1) || (a >> v & 1 == 1 && b >> u & 1 == 1))
                            .count();
                        sample_l[l] += 1;
                    }
                }
            }
        }
        for (l, &c) in sample_l.iter().enumerate() {
            by_l[l] += c as f64;
            by_l_sq[l] += (c as f64).powi(2);
        }
        for m in 0..=N {
            for k in 0..=m {
                let c = counts[m][k] as f64;
                sum[m][k] += c;
                sq[m][k] += c * c;
            }
        }
    }
    let s = SAMPLES as f64;
    let mut ok = true;
    let mut lines = Vec::new();
    let mut worst_z: f64 = 0.0;
    for m in 0..=N {
        for k in 0..=m {
            if 2 * m - k > N {
                continue;
            }
            let mean = sum[m][k] / s;
            let se = ((sq[m][k] / s - mean * mean).max(0.0) / s).sqrt();
            let exact = log_expected_overlap_reg_total(N as u64, D as u64, m as u64, k as u64).unwrap().value();
            let pass = if se == 0.0 { (mean - exact).abs() <= 1e-9 * exact.max(1.0) } else { (mean - exact).abs() <= 3.0 * se };
            if se > 0.0 {
                worst_z = worst_z.max((mean - exact).abs() / se);
            }
            ok &= pass;
            if !pass {
                lines.push(format!("(m={m},k={k}) mc {mean:.5} exact {exact:.5} se {se:.2e}"));
            }
        }
    }
    // Per-l split at m = 2, k = 1.
    for (l, &c) in by_l.iter().enumerate() {
        let mean = c / s;
        let exact = log_expected_overlap_reg(&OverlapQuery::reg(6, 3, 2, 1, l as u64)).map(|e| e.value()).unwrap_or(0.0);
        let se = ((by_l_sq[l] / s - mean * mean).max(0.0) / s).sqrt();
        let pass = if se == 0.0 { (mean - exact).abs() <= 1e-9 * exact.max(1.0) } else { (mean - exact).abs() <= 3.0 * se };
        ok &= pass;
        if !pass {
            lines.push(format!("(m=2,k=1,l={l}) mc {mean:.5} exact {exact:.5}"));
        }
    }
    report(
        2,
        "regular_moment_oracle",
        ok,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("{SAMPLES} matchings, worst |z| = {worst_z:.2} {}", lines.join("; ")),
    );
}

// 3 -----------------------------------------------------------------------

#[test]
fn criterion_03_stirling_consistency() {
    let start = Instant::now();
    let d = 20.0f64;
    let l = d.ln() / d;
    let (s, x) = (1.9 * l, l);
    let rate = rate_er(s, x, d).unwrap().value;
    let gaps: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&n: &f64| {
            let (m, k) = ((n * s).floor() as u64, (n * x).floor() as u64);
            let e = log_expected_overlap_er(&OverlapQuery::er(n as u64, d, m, k)).unwrap().log_value;
            (e / n - rate).abs()
        })
        .collect();
    let ok = gaps.windows(2).all(|w| w[1] < w[0]) && gaps[3] < 1e-2;
    report(3, "stirling_consistency", ok, start.elapsed(), Duration::from_secs(1), &format!("gaps {:?}", gaps.iter().map(|g| format!("{g:.3e}")).collect::<Vec<_>>()));
}

// 4 -----------------------------------------------------------------------

#[test]
fn criterion_04_y_star_identity() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_0004);
    let mut worst_identity: f64 = 0.0;
    let mut worst_argmax: f64 = 0.0;
    for _ in 0..100 {
        let d = 10f64.powf(rng.random_range(3.0..8.0));
        let beta: f64 = rng.random_range(0.05..=1.0);
        let zhat: f64 = rng.random_range(-0.95..beta * 0.99);
        let l = d.ln() / d;
        let (s, x) = ((1.0 + beta) * l, (1.0 + zhat) * l);
        let ys = (s - x) * (s - x);
        let v = y_part(s, x, ys, d);
        worst_identity = worst_identity.max(((v - d * ys) / (d * ys)).abs());
        let (y, _) = maximize_y_part(s, x, d, 1e-6).unwrap();
        worst_argmax = worst_argmax.max(((y - ys) / ys).abs());
    }
    let ok = worst_identity <= 1e-9 && worst_argmax <= 1e-3;
    report(
        4,
        "y_star_identity",
        ok,
        start.elapsed(),
        Duration::from_secs(10),
        &format!("worst identity error {worst_identity:.2e}, worst argmax error {worst_argmax:.2e}"),
    );
}

// 5 -----------------------------------------------------------------------

#[test]
fn criterion_05_window_condition() {
    let start = Instant::now();
    let opts = WindowOptions::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [0.75f64, 0.8, 0.9, 1.0] {
        let bound = (2.0 * beta * beta - 1.0).sqrt();
        for model in [Model::Er, Model::Reg] {
            let w0 = forbidden_window(1000, beta, model, &opts).unwrap();
            ok &= (w0.theoretical_bound - bound).abs() <= 4.0 * f64::EPSILON * bound;
            let search = min_d_for_window(beta, 0.7 * bound, model, &opts).unwrap();
            let w = forbidden_window(search.d, beta, model, &opts).unwrap();
            let z = w.zhat_max.unwrap_or(0.0);
            ok &= z >= 0.7 * bound;
            parts.push(format!("{model} beta={beta}: d0={} zhat_max={z:.4} bound={bound:.4}", search.d));
        }
    }
    report(5, "window_condition", ok, start.elapsed(), Duration::from_secs(60), &parts.join("; "));
}

// 6 -----------------------------------------------------------------------

#[test]
fn criterion_06_density_constant() {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, d) in [3usize, 9, 49].into_iter().enumerate() {
        let e = estimate_density(&LocalRule::local_min(), d, 1_000_000, 600 + i as u64).unwrap();
        let expect = 1.0 / (d as f64 + 1.0);
        let z = (e.alpha_hat - expect) / e.std_error;
        ok &= z.abs() <= 3.0;
        parts.push(format!("d={d}: {:.5} vs {expect:.5} (z={z:+.2})", e.alpha_hat));
    }
    report(6, "density_constant", ok, start.elapsed(), Duration::from_secs(30), &parts.join("; "));
}

// 7 -----------------------------------------------------------------------

#[test]
fn criterion_07_gamma_endpoints() {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for rule in [LocalRule::local_min(), LocalRule::multi_round_greedy(2).unwrap()] {
        let seed = 700;
        let trials = 1_000_000;
        let alpha = estimate_density(&rule, 3, trials, seed).unwrap();
        let top = estimate_gamma(&rule, 3, 1.0, trials, seed).unwrap();
        let bottom = estimate_gamma(&rule, 3, 0.0, trials, seed).unwrap();
        let exact = top.hits == alpha.hits && top.gamma_hat == alpha.alpha_hat;
        let z = (bottom.gamma_hat - alpha.alpha_hat.powi(2)) / bottom.std_error;
        ok &= exact && z.abs() <= 3.0;
        parts.push(format!(
            "{}: gamma(1) == alpha: {exact}, gamma(0) = {:.5} vs alpha^2 = {:.5} (z={z:+.2})",
            rule.family_name(),
            bottom.gamma_hat,
            alpha.alpha_hat.powi(2)
        ));
    }
    report(7, "gamma_endpoints", ok, start.elapsed(), Duration::from_secs(60), &parts.join("; "));
}

// 8 -----------------------------------------------------------------------

#[test]
fn criterion_08_lipschitz() {
    let start = Instant::now();
    let grid: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
    let curve = gamma_sweep(&LocalRule::local_min(), 3, &grid, 1_000_000, 800).unwrap();
    let lip = 3f64.powi(2);
    let allowance = 6.0 * curve.max_std_error();
    let worst = curve
        .grid
        .windows(2)
        .zip(curve.gamma_hat.windows(2))
        .map(|(p, g)| (g[1] - g[0]).abs() - lip * (p[1] - p[0]) - allowance)
        .fold(f64::NEG_INFINITY, f64::max);
    report(
        8,
        "lipschitz",
        worst <= 0.0,
        start.elapsed(),
        Duration::from_secs(120),
        &format!("worst |dgamma| - 9 dp - 6 max_se = {worst:.4}, endpoints {:.5} .. {:.5}", curve.gamma_hat[0], curve.gamma_hat[20]),
    );
}

// 9 -----------------------------------------------------------------------

#[test]
fn criterion_09_graph_tree_consistency() {
    let start = Instant::now();
    let rule = LocalRule::local_min();
    let (n, d, graphs) = (100_000usize, 3usize, 50u64);
    let grid = [0.0, 0.5, 1.0];
    let tree = gamma_sweep(&rule, d, &grid, 1_000_000, 900).unwrap();
    let runs: Vec<_> = (0..graphs)
        .map(|g| overlap_sweep(&rule, n, d, &grid, substream(901, g)).unwrap())
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, &p) in grid.iter().enumerate() {
        let dens: Vec<f64> = runs.iter().map(|r| r[i].overlap_density()).collect();
        let mean = dens.iter().sum::<f64>() / graphs as f64;
        let var = dens.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (graphs - 1) as f64;
        let sigma = (var / graphs as f64 + tree.std_errors[i].powi(2)).sqrt();
        let defect = runs.iter().map(|r| r[i].non_tree as f64 / n as f64).sum::<f64>() / graphs as f64;
        let gap = (mean - tree.gamma_hat[i]).abs();
        let pass = (gap - defect).max(0.0) <= 3.0 * sigma;
        ok &= pass;
        parts.push(format!(
            "p={p}: graph {mean:.5} tree {:.5} gap {gap:.2e} 3sigma {:.2e} defect {defect:.1e}",
            tree.gamma_hat[i],
            3.0 * sigma
        ));
    }
    report(9, "graph_tree_consistency", ok, start.elapsed(), Duration::from_secs(300), &parts.join("; "));
}

// 10 ----------------------------------------------------------------------

/// Weighted least squares slope of y on x with weights w, and its standard error.
fn wls_slope(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - mx) * (c - my)).sum();
    (sxy / sxx, (1.0 / sxx).sqrt())
}

#[test]
fn criterion_10_concentration() {
    let start = Instant::now();
    let runs = 400u64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    for (i, n) in [1_000usize, 10_000, 100_000].into_iter().enumerate() {
        let series = measure_run(&LocalRule::local_min(), n, 3, runs, 1000 + i as u64).unwrap();
        let v = series.variance_per_n();
        // Sampling error of a sample variance: v sqrt(2 / (runs - 1)).
        let se = v * (2.0 / (runs - 1) as f64).sqrt();
        xs.push((n as f64).log10());
        ys.push(v);
        ws.push(1.0 / (se * se));
    }
    let (slope, se) = wls_slope(&xs, &ys, &ws);
    let upper = slope - 1.96 * se;
    report(
        10,
        "concentration",
        upper <= 0.0,
        start.elapsed(),
        Duration::from_secs(300),
        &format!("Var|I|/n = {ys:.4?}, slope {slope:+.4} +- {:.4} (95%)", 1.96 * se),
    );
}

// 11 ----------------------------------------------------------------------

/// Claims radius 1 but also reads the labels two steps away.
struct PlantedNonLocal;

impl DecisionRule for PlantedNonLocal {
    fn radius(&self) -> usize {
        1
    }

    fn decide<T: Topology + ?Sized, L: Labels + ?Sized>(&self, u: usize, g: &T, x: &L) -> bool {
        let mut sum = x.label(u);
        for i in 0..g.degree(u) {
            let v = g.neighbor(u, i);
            for j in 0..g.degree(v) {
                sum += x.label(g.neighbor(v, j));
            }
        }
        sum.fract() < 0.5
    }
}

fn random_graph(rng: &mut ChaCha20Rng) -> Graph {
    let n = rng.random_range(2..200usize);
    if rng.random_bool(0.5) {
        let d = rng.random_range(1..6usize);
        let n = if n * d % 2 == 1 { n + 1 } else { n };
        generate_regular(n, d, rng.random()).unwrap().graph
    } else {
        generate_er(n, rng.random_range(0.0..8.0f64).min(n as f64 - 1.0), rng.random()).unwrap()
    }
}

fn random_rule(rng: &mut ChaCha20Rng) -> LocalRule {
    match rng.random_range(0..3) {
        0 => LocalRule::local_min(),
        1 => LocalRule::multi_round_greedy(rng.random_range(1..5)).unwrap(),
        _ => LocalRule::custom_table((0..rng.random_range(1..6)).map(|_| rng.random_bool(0.6)).collect()).unwrap(),
    }
}

#[test]
fn criterion_11_independence_and_locality() {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed_0011);
    let mut independent = 0;
    for _ in 0..10_000 {
        let g = random_graph(&mut rng);
        let rule = random_rule(&mut rng);
        let x = Decoration::new((0..g.n()).map(|_| rng.random::<f64>()).collect()).unwrap();
        let out = run_rule(&rule, &g, &x).unwrap();
        let no_edge = g.edges().all(|(u, v)| !(out.members.binary_search(&u).is_ok() && out.members.binary_search(&v).is_ok()));
        independent += no_edge as u32;
    }

    let builtins = [
        LocalRule::local_min(),
        LocalRule::multi_round_greedy(3).unwrap(),
        LocalRule::custom_table(vec![true, false, true]).unwrap(),
    ];
    let mut local = [0u32; 3];
    for (r, rule) in builtins.iter().enumerate() {
        for t in 0..1_000u64 {
            let g = random_graph(&mut rng);
            let u = rng.random_range(0..g.n());
            let x = Decoration::sample(g.n(), rng.random());
            local[r] += locality_check(rule, &g, u, &x, 8, t).unwrap() as u32;
        }
    }

    // The planted rule must be caught on a graph where distance-2 vertices exist.
    let g = Graph::path(5);
    let x = Decoration::sample(5, 11);
    let planted_caught = !locality_check(&PlantedNonLocal, &g, 0, &x, 64, 12).unwrap();

    let ok = independent == 10_000 && local.iter().all(|&c| c == 1_000) && planted_caught;
    report(
        11,
        "independence_and_locality",
        ok,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("independent {independent}/10000, locality {local:?} of 1000 each, planted non-local rule caught: {planted_caught}"),
    );
}
