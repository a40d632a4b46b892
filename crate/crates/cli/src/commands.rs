//! Subcommand implementations and the exit-code policy.
//!
//! Exit codes: `0` success, `1` a check found violations or no feasible
//! parameters exist, `2` invalid configuration or usage, `3` a run produced
//! a non-finite state (the error names the iteration).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hclip_core::analysis::{
    accumulator_thresholds, ensemble_quantiles, verify_clip_error, verify_consensus_contraction,
    verify_gradient_growth, RecordField,
};
use hclip_core::engine::{run, RunConfig, RunResult, SimSetup, StepRecord};
use hclip_core::exec;
use hclip_core::graph::{GraphSchedule, Lemma1Report};
use hclip_core::linalg;
use hclip_core::schedule::{
    check_admissibility, suggest_params, AdmissibilityReport, ProblemConstants, Schedule,
};
use hclip_core::stream::uniform_point;
use hclip_core::{Error, Result};

use crate::args::{Cli, Cmd, GraphArgs, PlotArgs, RunArgs, SuggestArgs, VerifyArgs};
use crate::config::{build_experiment, Experiment, ExperimentConfig, SeedRange};
use crate::csvio;
use crate::svg::{line_chart, Series};

/// Environment variable giving a root directory for run output.
pub const OUT_ENV: &str = "HCLIP_DGD_OUT";

/// Runs one parsed command line and returns the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    let outcome = match cli.cmd {
        Cmd::Run(a) => cmd_run(&a),
        Cmd::Verify(a) => cmd_verify(&a),
        Cmd::Plotdata(a) => cmd_plotdata(&a),
        Cmd::SuggestParams(a) => cmd_suggest(&a),
        Cmd::ValidateGraph(a) => cmd_validate_graph(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Maps an error to the documented exit code.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NumericalFailure { .. } => 3,
        Error::Infeasible(_) => 1,
        _ => 2,
    }
}

fn config_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into())
}

/// Output directory precedence: `--out`, then the config's `run.out`, then
/// `$HCLIP_DGD_OUT/<config stem>`, then `./runs/<config stem>`.
fn resolve_out_dir(
    cli_out: Option<&Path>,
    cfg_out: Option<&Path>,
    env_root: Option<&str>,
    stem: &str,
) -> PathBuf {
    if let Some(p) = cli_out {
        return p.to_path_buf();
    }
    if let Some(p) = cfg_out {
        return p.to_path_buf();
    }
    if let Some(root) = env_root.filter(|r| !r.is_empty()) {
        return PathBuf::from(root).join(stem);
    }
    PathBuf::from("runs").join(stem)
}

fn load_config(
    path: &Path,
    overrides: &[String],
    seed: Option<u64>,
    seeds: Option<&str>,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path, overrides)?;
    if let Some(s) = seed {
        cfg.run.seeds = SeedRange::single(s);
    }
    if let Some(r) = seeds {
        cfg.run.seeds = SeedRange::parse(r)?;
    }
    Ok(cfg)
}

/// Order statistic with the index convention used by the ensemble summaries:
/// `round(q * (n - 1))` on the sorted values.
fn quantile_value(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(f64::total_cmp);
    let idx = (q * (values.len() - 1) as f64).round() as usize;
    values[idx]
}

fn quantile_tag(q: f64) -> String {
    format!("q{}", (q * 100.0).round() as u32)
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

/// Closed-form consensus bound evaluated at every recorded time of a clipped
/// run: `n gamma (beta^(t-1) R1 + tail_t)` with
/// `tail_1 = 0, tail_(t+1) = beta tail_t + lambda_t eta_t`.
fn consensus_bound_series(
    graph: &GraphSchedule,
    schedule: &Schedule,
    result: &RunResult,
) -> Vec<f64> {
    let c = graph.contraction();
    let prefactor = graph.n() as f64 * c.gamma;
    let mut out = Vec::with_capacity(result.records.len());
    let mut tail = 0.0;
    let mut idx = 0;
    for t in 1..=result.cfg.horizon {
        if idx < result.records.len() && result.records[idx].t == t {
            out.push(prefactor * (c.beta.powi((t - 1) as i32) * result.r1 + tail));
            idx += 1;
        }
        tail = c.beta * tail + schedule.clip_level(t) * schedule.step_size(t);
    }
    debug_assert_eq!(idx, result.records.len());
    out
}

fn cmd_run(args: &RunArgs) -> Result<i32> {
    let cfg = load_config(&args.config, &args.overrides, args.seed, args.seeds.as_deref())?;
    let exp = build_experiment(&cfg)?;
    let stem = config_stem(&args.config);
    let env_root = std::env::var(OUT_ENV).ok();
    let out_dir = resolve_out_dir(
        args.out.as_deref(),
        cfg.run.out.as_deref(),
        env_root.as_deref(),
        &stem,
    );
    fs::create_dir_all(&out_dir)?;
    let seeds = cfg.run.seeds.list();
    let setup = SimSetup {
        problem: &exp.problem,
        graph: &exp.graph,
        schedule: &exp.schedule,
        noise: &exp.noise,
    };
    let config_pairs = cfg.pairs();

    for (label, clip_enabled) in cfg.run.mode.variants() {
        let t0 = Instant::now();
        let results: Vec<Result<RunResult>> = exec::with_jobs(args.jobs, || {
            exec::map_indexed(seeds.len(), |k| {
                run(
                    &setup,
                    &RunConfig {
                        horizon: cfg.run.horizon,
                        stride: cfg.run.stride,
                        seed: seeds[k],
                        delta: cfg.run.delta,
                        clip_enabled,
                        record_states: false,
                    },
                )
            })
        });
        let mut runs = Vec::with_capacity(seeds.len());
        for (k, r) in results.into_iter().enumerate() {
            match r {
                Ok(r) => runs.push(r),
                Err(e) => {
                    eprintln!("{label} run with seed {} failed", seeds[k]);
                    return Err(e);
                }
            }
        }
        let elapsed = t0.elapsed().as_secs_f64();

        for (seed, result) in seeds.iter().zip(&runs) {
            let base = out_dir.join(format!("{label}_seed{seed}"));
            let diag_values;
            let diag = if args.diag && clip_enabled {
                diag_values = consensus_bound_series(&exp.graph, &exp.schedule, result);
                Some(("diag_consensus_bound", diag_values.as_slice()))
            } else {
                None
            };
            csvio::write_records(&base.with_extension("csv"), &result.records, diag)?;

            let thresholds = accumulator_thresholds(result.delta1, cfg.run.delta);
            let mut meta = config_pairs.clone();
            meta.push(("seed".into(), seed.to_string()));
            meta.push(("mode".into(), label.to_string()));
            meta.push(("sigma".into(), exp.sigma.to_string()));
            meta.push(("r1".into(), result.r1.to_string()));
            meta.push(("delta1".into(), result.delta1.to_string()));
            meta.push(("max_accumulator".into(), result.max_accumulator.to_string()));
            meta.push(("threshold_primary".into(), thresholds.primary.to_string()));
            meta.push(("threshold_alternate".into(), thresholds.alternate.to_string()));
            meta.push(("wall_time_s".into(), format!("{elapsed:.3}")));
            csvio::write_meta(&base.with_extension("meta"), &meta)?;
        }

        if runs.len() >= 10 {
            let record_sets: Vec<Vec<StepRecord>> =
                runs.iter().map(|r| r.records.clone()).collect();
            let rows = ensemble_quantiles(&record_sets, RecordField::RunAvgGap, &[0.25, 0.5, 0.75])?;
            csvio::write_table(&out_dir.join(format!("summary_{label}.csv")), "t,q25,q50,q75", &rows)?;
        }

        let mut finals: Vec<f64> = runs
            .iter()
            .map(|r| r.records.last().expect("horizon >= 1 records t = 1").run_avg_gap)
            .collect();
        let median = quantile_value(&mut finals, 0.5);
        println!(
            "{label}: {} run(s) x {} steps -> {} ({elapsed:.1}s); median final run-avg gap {median:.6e}",
            runs.len(),
            cfg.run.horizon,
            out_dir.display()
        );
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    match args.suite.as_str() {
        "lemma1" => verify_mixing(args),
        "lemma2" => verify_trajectories(args, true, false),
        "eq6" => verify_trajectories(args, false, true),
        "lemma5" => verify_clip_pairs(args),
        "condition7" => verify_condition(args),
        "all" => {
            let mut code = verify_mixing(args)?;
            code = code.max(verify_trajectories(args, true, true)?);
            code = code.max(verify_clip_pairs(args)?);
            code = code.max(verify_condition(args)?);
            println!("all: {}", if code == 0 { "PASS" } else { "FAIL" });
            Ok(code)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown verify suite `{other}` (expected lemma1, lemma2, lemma5, eq6, condition7, or all)"
        ))),
    }
}

fn required_config(args: &VerifyArgs) -> Result<ExperimentConfig> {
    let path = args.config.as_ref().ok_or_else(|| {
        Error::InvalidArgument(format!("verify {} needs --config", args.suite))
    })?;
    load_config(path, &args.overrides, args.seed, args.seeds.as_deref())
}

/// Entrywise mixing-bound sweep over randomly generated valid schedules.
fn verify_mixing(args: &VerifyArgs) -> Result<i32> {
    if args.trials == 0 {
        return Err(Error::InvalidArgument("lemma1 needs --trials >= 1".into()));
    }
    let t0 = Instant::now();
    let outcomes: Vec<Result<(usize, usize, f64, bool, Lemma1Report)>> =
        exec::with_jobs(args.jobs, || {
            exec::map_indexed(args.trials, |k| {
                let u = uniform_point(args.check_seed, k as u64, 3, 0.0, 1.0);
                let n = 2 + (u[0] * 7.0) as usize;
                let b = 1 + (u[1] * 4.0) as usize;
                let eta = 0.05 + 0.45 * u[2];
                let g = GraphSchedule::random(n, b, eta, 2 * b, k as u64)?;
                let valid = g.validate(4 * b)?.pass;
                let report = g.verify_lemma1(args.max_gap, args.starts, k as u64)?;
                Ok((n, b, eta, valid, report))
            })
        });
    let mut schedules = 0usize;
    let mut samples = 0usize;
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_desc = String::new();
    for outcome in outcomes {
        let (n, b, eta, valid, report) = outcome?;
        schedules += 1;
        samples += report.samples;
        violations += report.violations;
        if !valid {
            violations += 1;
            println!("lemma1: generated schedule n={n} b={b} failed validation");
        }
        if report.worst_margin > worst {
            worst = report.worst_margin;
            worst_desc = format!("n={n} b={b} eta={eta:.3} at {:?}", report.worst_at);
        }
    }
    println!(
        "lemma1: {schedules} schedules, {samples} entry checks (gaps <= {}), {violations} violations, worst margin {worst:.3e} ({worst_desc}) [{:.1}s]",
        args.max_gap,
        t0.elapsed().as_secs_f64()
    );
    Ok(if violations == 0 { 0 } else { 1 })
}

/// Re-runs the configured experiment clipped at full resolution and checks
/// the consensus-contraction and/or gradient-growth bounds on every state.
fn verify_trajectories(args: &VerifyArgs, consensus: bool, growth: bool) -> Result<i32> {
    let cfg = required_config(args)?;
    let exp = build_experiment(&cfg)?;
    // The bounds under test assume a valid mixing schedule; an invalid one is
    // a precondition failure, not a bound violation.
    let report = exp.graph.validate(exp.graph.period().max(4 * exp.graph.window_b()))?;
    if let Some(v) = &report.violation {
        return Err(Error::InvalidArgument(format!(
            "graph schedule failed validation: {} at t={}: {}",
            v.clause, v.t, v.detail
        )));
    }
    let setup = SimSetup {
        problem: &exp.problem,
        graph: &exp.graph,
        schedule: &exp.schedule,
        noise: &exp.noise,
    };
    let t0 = Instant::now();
    let mut cons = (0usize, 0usize, f64::NEG_INFINITY); // checked, violations, worst
    let mut grow = (0usize, 0usize, f64::NEG_INFINITY);
    let mut above_half = 0usize;
    for seed in cfg.run.seeds.list() {
        let result = exec::with_jobs(args.jobs, || {
            run(
                &setup,
                &RunConfig {
                    horizon: cfg.run.horizon,
                    stride: 1,
                    seed,
                    delta: cfg.run.delta,
                    clip_enabled: true,
                    record_states: true,
                },
            )
        })?;
        if consensus {
            let chk = verify_consensus_contraction(&result, &exp.graph, &exp.schedule)?;
            println!(
                "lemma2 seed {seed}: {} states checked, {} violations, worst margin {:.3e}",
                chk.checked, chk.violations, chk.worst_margin
            );
            cons.0 += chk.checked;
            cons.1 += chk.violations;
            cons.2 = cons.2.max(chk.worst_margin);
        }
        if growth {
            let rep = verify_gradient_growth(&result, &exp.problem, &exp.schedule)?;
            println!(
                "eq6 seed {seed}: {} gradients checked, {} violations, worst margin {:.3e}, {} above half clip level",
                rep.check.checked, rep.check.violations, rep.check.worst_margin,
                rep.half_clip_violations
            );
            grow.0 += rep.check.checked;
            grow.1 += rep.check.violations;
            grow.2 = grow.2.max(rep.check.worst_margin);
            above_half += rep.half_clip_violations;
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let mut code = 0;
    if consensus {
        println!(
            "lemma2: {} states, {} violations, worst margin {:.3e} [{elapsed:.1}s]",
            cons.0, cons.1, cons.2
        );
        if cons.1 > 0 {
            code = 1;
        }
    }
    if growth {
        println!(
            "eq6: {} gradients, {} violations, worst margin {:.3e}, {} above half clip level [{elapsed:.1}s]",
            grow.0, grow.1, grow.2, above_half
        );
        if grow.1 > 0 {
            code = 1;
        }
    }
    Ok(code)
}

/// Monte Carlo check of the clipping-error cap and moment bounds at random
/// gradients, each paired with a clip level above twice its norm.
fn verify_clip_pairs(args: &VerifyArgs) -> Result<i32> {
    if args.pairs == 0 || args.samples == 0 {
        return Err(Error::InvalidArgument("lemma5 needs --pairs >= 1 and --samples >= 1".into()));
    }
    if !(args.margin.is_finite() && args.margin > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lemma5 needs a positive --margin, got {}",
            args.margin
        )));
    }
    let cfg = required_config(args)?;
    let exp = build_experiment(&cfg)?;
    let dim = exp.problem.dim();
    let n = exp.problem.n_agents();
    let t0 = Instant::now();
    let mut failures = 0usize;
    for k in 0..args.pairs {
        let x = uniform_point(args.check_seed, 500 + k as u64, dim, -2.0, 2.0);
        let grad = exp.problem.agent(k % n).gradient(&x);
        let lambda = 2.0 * linalg::norm(&grad) + args.margin;
        let report = exec::with_jobs(args.jobs, || {
            verify_clip_error(
                &grad,
                lambda,
                &exp.noise,
                exp.sigma,
                exp.p,
                args.samples,
                args.check_seed.wrapping_add(k as u64),
            )
        })?;
        let ok = report.cap_violations == 0 && report.moments_ok == Some(true);
        println!(
            "lemma5 pair {k}: cap violations {}, bias {:.4e} (bound {:.4e}), second moment {:.4e} (bound {:.4e}) -> {}",
            report.cap_violations,
            report.bias_norm,
            report.bias_bound,
            report.second_moment,
            report.second_bound,
            if ok { "ok" } else { "FAIL" }
        );
        if !ok {
            failures += 1;
        }
    }
    println!(
        "lemma5: {} pairs x {} samples, {failures} failing pairs [{:.1}s]",
        args.pairs,
        args.samples,
        t0.elapsed().as_secs_f64()
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

/// Builds the problem constants for the configured instance, using a
/// one-step probe run to fix the seed-dependent radius and distance.
fn problem_constants(
    cfg: &ExperimentConfig,
    exp: &Experiment,
    seed: u64,
) -> Result<ProblemConstants> {
    let setup = SimSetup {
        problem: &exp.problem,
        graph: &exp.graph,
        schedule: &exp.schedule,
        noise: &exp.noise,
    };
    let probe = run(
        &setup,
        &RunConfig {
            horizon: 1,
            stride: 1,
            seed,
            delta: cfg.run.delta,
            clip_enabled: true,
            record_states: false,
        },
    )?;
    let c = exp.graph.contraction();
    Ok(ProblemConstants {
        n_agents: exp.problem.n_agents(),
        gamma: c.gamma,
        beta: c.beta,
        lipschitz: exp.problem.lipschitz(),
        grad_norm_at_opt: exp.problem.grad_norm_at_opt(),
        init_radius: probe.r1,
        initial_distance: probe.delta1,
        sigma: exp.sigma,
        p: exp.p,
        delta: cfg.run.delta,
    })
}

fn print_constants(pc: &ProblemConstants) {
    println!(
        "constants: n={} gamma={:.6} beta={:.9} L={:.6} Bstar={:.6} R1={:.6} Delta1={:.6} sigma={:.6} p={} delta={}",
        pc.n_agents,
        pc.gamma,
        pc.beta,
        pc.lipschitz,
        pc.grad_norm_at_opt,
        pc.init_radius,
        pc.initial_distance,
        pc.sigma,
        pc.p,
        pc.delta
    );
}

fn print_clauses(report: &AdmissibilityReport) {
    for c in &report.clauses {
        let status = if c.skipped {
            "skipped (reported only)"
        } else if c.satisfied {
            "ok"
        } else {
            "VIOLATED"
        };
        println!("  {:<18} lhs {:>14.6e}  rhs {:>14.6e}  {status}", c.label, c.lhs, c.rhs);
    }
}

/// Checks every admissibility clause of the configured schedule.
fn verify_condition(args: &VerifyArgs) -> Result<i32> {
    let cfg = required_config(args)?;
    let exp = build_experiment(&cfg)?;
    let seed = args.seed.unwrap_or(cfg.run.seeds.first);
    let pc = problem_constants(&cfg, &exp, seed)?;
    print_constants(&pc);
    let report = check_admissibility(&exp.schedule, &pc, args.practical)?;
    print_clauses(&report);
    let verdict = if report.admissible { "admissible" } else { "NOT admissible" };
    let scope = if args.practical { " (practical: transient-budget clause reported only)" } else { "" };
    println!("condition7: {verdict}{scope}");
    Ok(if report.admissible { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// suggest-params
// ---------------------------------------------------------------------------

fn cmd_suggest(args: &SuggestArgs) -> Result<i32> {
    let cfg = load_config(&args.config, &args.overrides, None, None)?;
    let exp = build_experiment(&cfg)?;
    let seed = args.seed.unwrap_or(cfg.run.seeds.first);
    let pc = problem_constants(&cfg, &exp, seed)?;
    print_constants(&pc);
    match suggest_params(&pc) {
        Ok((schedule, report)) => {
            println!("suggested schedule (paste into the config):");
            println!("[schedule]");
            println!("m = {}", schedule.m);
            println!("b1 = {}", schedule.b1);
            println!("kappa = {}", schedule.kappa);
            println!("lambda = {}", schedule.lambda);
            println!("alpha = {}", schedule.alpha);
            print_clauses(&report);
            println!("suggest-params: admissible");
            Ok(0)
        }
        Err(Error::Infeasible(msg)) => {
            println!("suggest-params: no feasible parameters ({msg})");
            Ok(1)
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// validate-graph
// ---------------------------------------------------------------------------

fn cmd_validate_graph(args: &GraphArgs) -> Result<i32> {
    let cfg = ExperimentConfig::load(&args.config, &args.overrides)?;
    let graph = cfg.graph.build()?;
    let horizon = args.horizon.unwrap_or_else(|| graph.period().max(4 * graph.window_b()));
    let c = graph.contraction();
    println!(
        "graph: n={} window={} floor={} period={}",
        graph.n(),
        graph.window_b(),
        graph.weight_floor(),
        graph.period()
    );
    println!("contraction: gamma={:.6} beta={:.9}", c.gamma, c.beta);
    let report = graph.validate(horizon)?;
    match &report.violation {
        Some(v) => {
            println!("validate-graph: INVALID over horizon {horizon}: {} at t={}: {}", v.clause, v.t, v.detail);
            Ok(1)
        }
        None => {
            let sample = graph.verify_lemma1(100, 4, 0)?;
            println!(
                "validate-graph: valid over horizon {horizon}; mixing-bound sample: {} checks, {} violations, worst margin {:.3e}",
                sample.samples, sample.violations, sample.worst_margin
            );
            Ok(if sample.violations == 0 { 0 } else { 1 })
        }
    }
}

// ---------------------------------------------------------------------------
// plotdata
// ---------------------------------------------------------------------------

/// Splits `mode_seedN.csv` into its mode and seed; rejects derived files.
fn run_file_parts(name: &str) -> Option<(String, u64)> {
    let stem = name.strip_suffix(".csv")?;
    if stem.starts_with("summary_") || stem.starts_with("plot_") {
        return None;
    }
    let (mode, seed) = stem.rsplit_once("_seed")?;
    if mode.is_empty() {
        return None;
    }
    Some((mode.to_string(), seed.parse().ok()?))
}

fn cmd_plotdata(args: &PlotArgs) -> Result<i32> {
    let field = RecordField::parse(&args.field).ok_or_else(|| {
        let names: Vec<&str> = RecordField::ALL.iter().map(|f| f.name()).collect();
        Error::InvalidArgument(format!(
            "unknown field `{}` (expected one of {})",
            args.field,
            names.join(", ")
        ))
    })?;
    let mut qs = Vec::new();
    for part in args.quantiles.split(',') {
        let q: f64 = part.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("bad quantile `{part}` in --quantiles"))
        })?;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "quantiles must lie strictly inside (0, 1), got {q}"
            )));
        }
        qs.push(q);
    }
    if qs.is_empty() {
        return Err(Error::InvalidArgument("--quantiles is empty".into()));
    }

    let mut groups: BTreeMap<String, Vec<(u64, PathBuf)>> = BTreeMap::new();
    for entry in fs::read_dir(&args.runs)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some((mode, seed)) = run_file_parts(&name) {
            groups.entry(mode).or_default().push((seed, entry.path()));
        }
    }
    if groups.is_empty() {
        return Err(Error::MalformedInput(format!(
            "no run CSVs (mode_seedN.csv) found in {}",
            args.runs.display()
        )));
    }
    let out_dir = args.out.clone().unwrap_or_else(|| args.runs.clone());
    fs::create_dir_all(&out_dir)?;

    let mut chart = Vec::new();
    for (mode, mut files) in groups {
        files.sort_by_key(|(seed, _)| *seed);
        let mut runs = Vec::with_capacity(files.len());
        for (_, path) in &files {
            runs.push(csvio::read_records(path)?);
        }
        if runs.len() >= 10 {
            let rows = ensemble_quantiles(&runs, field, &qs)?;
            for (qi, q) in qs.iter().enumerate() {
                let series: Vec<(usize, Vec<f64>)> =
                    rows.iter().map(|(t, v)| (*t, vec![v[qi]])).collect();
                let path =
                    out_dir.join(format!("plot_{}_{mode}_{}.csv", field.name(), quantile_tag(*q)));
                csvio::write_table(&path, "t,value", &series)?;
                println!("wrote {}", path.display());
                chart.push(Series {
                    label: format!("{mode} {}", quantile_tag(*q)),
                    points: series.iter().map(|(t, v)| (*t as f64, v[0])).collect(),
                });
            }
        } else {
            eprintln!(
                "note: {mode} has {} run(s) (< 10), writing per-seed series instead of quantiles",
                runs.len()
            );
            for ((seed, _), records) in files.iter().zip(&runs) {
                let series: Vec<(usize, Vec<f64>)> =
                    records.iter().map(|r| (r.t, vec![field.extract(r)])).collect();
                let path =
                    out_dir.join(format!("plot_{}_{mode}_seed{seed}.csv", field.name()));
                csvio::write_table(&path, "t,value", &series)?;
                println!("wrote {}", path.display());
                chart.push(Series {
                    label: format!("{mode} seed {seed}"),
                    points: series.iter().map(|(t, v)| (*t as f64, v[0])).collect(),
                });
            }
        }
    }

    if args.svg {
        let doc = line_chart(
            &chart,
            &format!("{} vs t", field.name()),
            "t",
            field.name(),
            args.log_y,
        )?;
        let path = out_dir.join(format!("plot_{}.svg", field.name()));
        csvio::write_atomic(&path, doc.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_dir_precedence_is_flag_config_env_default() {
        let cli = PathBuf::from("cli-dir");
        let cfg = PathBuf::from("cfg-dir");
        assert_eq!(
            resolve_out_dir(Some(&cli), Some(&cfg), Some("env-root"), "exp"),
            PathBuf::from("cli-dir")
        );
        assert_eq!(
            resolve_out_dir(None, Some(&cfg), Some("env-root"), "exp"),
            PathBuf::from("cfg-dir")
        );
        assert_eq!(
            resolve_out_dir(None, None, Some("env-root"), "exp"),
            PathBuf::from("env-root").join("exp")
        );
        assert_eq!(resolve_out_dir(None, None, None, "exp"), PathBuf::from("runs").join("exp"));
        assert_eq!(
            resolve_out_dir(None, None, Some(""), "exp"),
            PathBuf::from("runs").join("exp"),
            "an empty env var must not produce a rooted path"
        );
    }

    #[test]
    fn run_file_names_parse_and_derived_files_are_skipped() {
        assert_eq!(run_file_parts("clipped_seed12.csv"), Some(("clipped".into(), 12)));
        assert_eq!(run_file_parts("baseline_seed1.csv"), Some(("baseline".into(), 1)));
        assert_eq!(run_file_parts("summary_clipped.csv"), None);
        assert_eq!(run_file_parts("plot_run_avg_gap_clipped_q50.csv"), None);
        assert_eq!(run_file_parts("clipped_seed12.meta"), None);
        assert_eq!(run_file_parts("_seed3.csv"), None);
    }

    #[test]
    fn quantile_helpers_use_the_summary_convention() {
        let mut v = vec![5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(quantile_value(&mut v, 0.5), 3.0);
        let mut v = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_value(&mut v, 0.25), 2.0, "round(0.25 * 3) = 1");
        assert_eq!(quantile_tag(0.25), "q25");
        assert_eq!(quantile_tag(0.5), "q50");
    }

    #[test]
    fn config_stem_falls_back_for_odd_paths() {
        assert_eq!(config_stem(Path::new("presets/example1-desk.ini")), "example1-desk");
        assert_eq!(config_stem(Path::new("x.ini")), "x");
    }
}
