use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{p_grid, Command, ExperimentConfig};
use super::demo::clustering_demo;
use super::report::{Criterion, Report};
use crate::coupling::{csv_error, estimate_gamma, find_p_for_gamma, gamma_sweep, overlap_experiment, OverlapOutcome};
use crate::graph::io::{write_edge_list, EdgeListHeader};
use crate::graph::{generate_er, generate_regular};
use crate::localalg::{estimate_density, measure_run, RuleFamily};
use crate::moments::{
    forbidden_window, log_expected_overlap_er, log_expected_overlap_reg, log_expected_overlap_reg_total, min_d_for_window,
    rate_at, write_exact_csv, write_rate_scan_csv, write_windows_csv, zhat_grid, LogExpectation, OverlapQuery,
    RateScanRow, WindowOptions,
};
use crate::rng::substream;
use crate::{Error, Model, Result};

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

type Outcome = (Value, Vec<Criterion>);

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Gen(a) => {
            let (graph, header) = match a.model {
                Model::Reg => {
                    let s = generate_regular(a.n, a.d as usize, a.seed)?;
                    let h = EdgeListHeader::for_regular(&s, a.seed);
                    (s.graph, h)
                }
                Model::Er => {
                    let g = generate_er(a.n, a.d, a.seed)?;
                    let h = EdgeListHeader::for_er(&g, a.d, a.seed);
                    (g, h)
                }
            };
            if let Some(path) = &a.out {
                let mut w = create(path)?;
                write_edge_list(&mut w, &header, &graph)?;
                w.flush()?;
            }
            Ok((
                json!({
                    "n": header.n,
                    "model": header.model,
                    "d": header.d,
                    "edges": graph.edge_count(),
                    "loops": header.loops,
                    "multi": header.multi,
                }),
                vec![],
            ))
        }
        Command::Density(a) => {
            let rule = a.rule_args.resolve()?;
            let estimate = estimate_density(&rule, a.d, a.trials, a.seed)?;
            let mut out = json!({ "rule": rule.descriptor(), "d": a.d, "estimate": estimate });
            let mut criteria = vec![];
            if matches!(rule.family(), RuleFamily::LocalMin) {
                let expect = 1.0 / (a.d as f64 + 1.0);
                out["reference"] = json!(expect);
                let gap = (estimate.alpha_hat - expect).abs();
                criteria.push(Criterion::new(
                    "local_min_density",
                    gap <= 3.0 * estimate.std_error,
                    format!("|alpha_hat - 1/(d+1)| = {gap:.3e}, 3 std_error = {:.3e}", 3.0 * estimate.std_error),
                ));
            }
            if let Some(n) = a.n {
                let series = measure_run(&rule, n, a.d, a.graphs, substream(a.seed, u64::MAX))?;
                out["graphs"] = json!({
                    "n": n,
                    "runs": a.graphs,
                    "mean_density": series.mean_density(),
                    "density_std_error": series.density_std_error(),
                    "variance_per_n": series.variance_per_n(),
                    "mean_non_tree_fraction": series.mean_non_tree_fraction(),
                    "ties": series.total_ties(),
                });
            }
            Ok((out, criteria))
        }
        Command::Gamma(a) => {
            let rule = a.rule_args.resolve()?;
            match (a.p, a.target) {
                (Some(p), _) => {
                    let e = estimate_gamma(&rule, a.d, p, a.trials, a.seed)?;
                    Ok((json!({ "rule": rule.descriptor(), "d": a.d, "estimate": e }), vec![]))
                }
                (None, Some(target)) => {
                    let tol = a
                        .tol
                        .unwrap_or_else(|| 4.0 * (target * (1.0 - target) / a.trials as f64).sqrt().max(1.0 / a.trials as f64));
                    let s = find_p_for_gamma(&rule, a.d, target, tol, a.trials, a.seed)?;
                    Ok((json!({ "rule": rule.descriptor(), "d": a.d, "target": target, "tol": tol, "search": s }), vec![]))
                }
                (None, None) => Err(Error::invalid("p", "give exactly one of --p and --target")),
            }
        }
        Command::Sweep(a) => {
            let rule = a.rule_args.resolve()?;
            let grid = p_grid(a.points, a.grid.as_deref())?;
            let curve = gamma_sweep(&rule, a.d, &grid, a.trials, a.seed)?;
            if let Some(path) = &a.out {
                curve.write_csv(create(path)?)?;
            }
            let excess = curve.worst_lipschitz_excess();
            let allowance = 6.0 * curve.max_std_error();
            let criteria = if grid.len() > 1 {
                vec![Criterion::new(
                    "lipschitz",
                    excess <= allowance,
                    format!("worst |dgamma| - d^(r+1) dp = {excess:.3e}, allowance {allowance:.3e}"),
                )]
            } else {
                vec![]
            };
            Ok((json!({ "curve": curve }), criteria))
        }
        Command::Couple(a) => {
            let rule = a.rule_args.resolve()?;
            let runs: Vec<OverlapOutcome> = (0..a.graphs)
                .into_par_iter()
                .map(|g| overlap_experiment(&rule, a.n, a.d, a.p, substream(a.seed, g)))
                .collect::<Result<_>>()?;
            if let Some(path) = &a.out {
                let mut w = csv::Writer::from_writer(create(path)?);
                w.write_record(["graph", "n", "intersection", "size_x", "size_y", "ties", "non_tree"])
                    .map_err(csv_error)?;
                for (g, r) in runs.iter().enumerate() {
                    w.write_record([
                        g.to_string(),
                        r.n.to_string(),
                        r.intersection.to_string(),
                        r.size_x.to_string(),
                        r.size_y.to_string(),
                        r.ties.to_string(),
                        r.non_tree.to_string(),
                    ])
                    .map_err(csv_error)?;
                }
                w.flush()?;
            }
            let mean = runs.iter().map(|r| r.overlap_density()).sum::<f64>() / runs.len() as f64;
            Ok((
                json!({ "rule": rule.descriptor(), "p": a.p, "mean_overlap_density": mean, "runs": runs }),
                vec![],
            ))
        }
        Command::Moments(a) => {
            let rows: Vec<LogExpectation> = match a.model {
                Model::Er => vec![log_expected_overlap_er(&OverlapQuery::er(a.n, a.d, a.m, a.k))?],
                Model::Reg => {
                    if a.d.fract() != 0.0 || a.d < 1.0 {
                        return Err(Error::Domain(format!("regular degree must be a positive integer, got {}", a.d)));
                    }
                    let d = a.d as u64;
                    match a.l {
                        Some(l) => vec![log_expected_overlap_reg(&OverlapQuery::reg(a.n, d, a.m, a.k, l))?],
                        None => {
                            let total = log_expected_overlap_reg_total(a.n, d, a.m, a.k)?;
                            let mut rows: Vec<LogExpectation> = (0..=a.m.saturating_sub(a.k) * d)
                                .filter_map(|l| log_expected_overlap_reg(&OverlapQuery::reg(a.n, d, a.m, a.k, l)).ok())
                                .collect();
                            rows.push(total);
                            rows
                        }
                    }
                }
            };
            if let Some(path) = &a.out {
                write_exact_csv(create(path)?, a.model, &rows)?;
            }
            let last = rows.last().expect("at least one row");
            Ok((json!({ "log_value": last.log_value, "rows": rows }), vec![]))
        }
        Command::Rate(a) => {
            let zs = match a.zhat {
                Some(z) => vec![z],
                None => zhat_grid(a.beta, a.points),
            };
            let rows: Vec<RateScanRow> = zs
                .par_iter()
                .map(|&z| rate_at(a.model, a.d, a.beta, z))
                .collect::<Result<_>>()?;
            if let Some(path) = &a.out {
                write_rate_scan_csv(create(path)?, &rows)?;
            }
            let out = if rows.len() == 1 { json!(rows[0]) } else { json!({ "rows": rows.len(), "negative": rows.iter().filter(|r| r.rate < 0.0).count() }) };
            Ok((out, vec![]))
        }
        Command::Window(a) => {
            let opts = WindowOptions { grid_points: a.points, ..Default::default() };
            let w = forbidden_window(a.d, a.beta, a.model, &opts)?;
            if let Some(path) = &a.out {
                write_windows_csv(create(path)?, &[w])?;
            }
            Ok((json!({ "window": w }), vec![]))
        }
        Command::Mind(a) => {
            let opts = WindowOptions { grid_points: a.points, d_ceiling: a.ceiling };
            let bound = (2.0 * a.beta * a.beta - 1.0).sqrt();
            let target = a.target.unwrap_or(0.7 * bound);
            let s = min_d_for_window(a.beta, target, a.model, &opts)?;
            if let Some(path) = &a.out {
                write_windows_csv(create(path)?, &s.probes)?;
            }
            let covers = s.window.zhat_max.is_some_and(|z| z >= target);
            Ok((
                json!({ "d": s.d, "target": target, "window": s.window, "probes": s.probes.len() }),
                vec![Criterion::new(
                    "window_reaches_target",
                    covers,
                    format!("zhat_max = {:?}, target = {target}, bound = {bound}", s.window.zhat_max),
                )],
            ))
        }
        Command::Demo(a) => {
            let rule = a.rule_args.resolve()?;
            let grid = p_grid(a.points, a.grid.as_deref())?;
            let demo = clustering_demo(&rule, a.d, a.n, &grid, a.trials, a.graphs, a.seed)?;
            if let Some(path) = &a.out {
                demo.write_csv(create(path)?)?;
            }
            let criteria = demo.criteria();
            Ok((json!(demo), criteria))
        }
    }
}

/// Runs a validated configuration on its own thread pool.
pub fn execute(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    let start = Instant::now();
    let (outputs, criteria) = pool.install(|| dispatch(&config.command))?;
    Ok(Report {
        tool: "localfactor".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: config.command.name().into(),
        config: config.clone(),
        outputs,
        criteria,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Full CLI: parse, validate, execute, emit. Returns the process exit code:
/// 0 on success, 2 for argument or precondition errors, 1 otherwise.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match ExperimentConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let report = match execute(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_usage() { 2 } else { 1 };
        }
    };
    let emitted = report.to_json().and_then(|json| match &config.report {
        Some(path) => {
            std::fs::write(path, json + "\n")?;
            Ok(())
        }
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{json}")?;
            Ok(())
        }
    });
    match emitted {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
