//! One function per experiment. Each resolves its parameters (recording
//! them for the output header), fans trials out over the harness and folds
//! the results in trial order.

use std::f64::consts::PI;

use noisy_oracle_core::bits::BitString;
use noisy_oracle_core::checks;
use noisy_oracle_core::classical::{self, lower_bound_trial, noisy_or_upper_with};
use noisy_oracle_core::density::{trace_distance_density, DensityAccumulator, DensityMatrix};
use noisy_oracle_core::grover::{
    angle_inequality_gap, commutator_norm, grover_success_prob, phase_count_moments, repeat_short_runs, GroverInstance,
    GroverMode, GroverRunner, ShortRunConfig,
};
use noisy_oracle_core::oracle::{FaultTrace, FaultyOracleConfig, TruthTable};
use noisy_oracle_core::rng::{substream, substream_seed};
use noisy_oracle_core::robust::{compute_t, evolve_query, robustify, robustify_with, run, Level, OracleMode, Program, RobustParams};
use noisy_oracle_core::stats::{mean, mean_half_width, Frequency};
use noisy_oracle_core::walk::{self, EnumerationMode};
use noisy_oracle_core::StateVector;
use rand::Rng;

use crate::config::{Experiment, ExperimentConfig, Params, Resolver};
use crate::error::{Result, RunError};
use crate::format::{parse_algorithm, parse_truth_table};
use crate::harness::{map_chunks, map_trials};
use crate::output::RunResult;

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunResult> {
    let p = &config.params;
    let seed = config.seed;
    match config.experiment {
        Experiment::Concentration => concentration(p, seed),
        Experiment::FCheck => f_check(p, seed),
        Experiment::GCheck => g_check(p, seed),
        Experiment::RobustRun => robust_run(p, seed),
        Experiment::WalkEnumerate => walk_enumerate(p, seed),
        Experiment::WalkChernoff => walk_chernoff(p, seed),
        Experiment::Commutator => commutator(p, seed),
        Experiment::PhaseGrover => phase_grover(p, seed),
        Experiment::ShortRuns => short_runs(p, seed),
        Experiment::ClassicalOr => classical_or(p, seed),
        Experiment::TraceDistance => trace_distance(p, seed),
    }
}

fn frequency(hits: &[bool]) -> Frequency {
    let mut f = Frequency::default();
    hits.iter().for_each(|&h| f.record(h));
    f
}

/// Iterations maximising the fault-free success probability.
pub fn optimal_iterations(size: u64) -> u64 {
    let theta = (1.0 / (size as f64).sqrt()).asin();
    (PI / (4.0 * theta) - 0.5).round().max(0.0) as u64
}

fn concentration(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let source = r.choice("check", &p.check, &["walk", "circuit"])?;
    let gamma = r.gamma()?;
    let delta = r.delta()?;
    let t = r.t(Some(compute_t(Level::F, gamma, delta, 1, 1)?), 1 << 32)?;
    let trials = r.trials()?;
    let n = if source == "circuit" { Some(r.n(3, 1, 10)? as usize) } else { None };
    let tails = map_trials(trials, |i| -> Result<bool> {
        Ok(match n {
            Some(n) => checks::f_concentration_trial(n, t, seed, i)? > gamma,
            None => walk::tail_trial(t, gamma, seed, i),
        })
    })?;
    let freq = frequency(&tails);
    let mut out = RunResult::new(
        "concentration",
        seed,
        r.into_echo(),
        &["source", "n", "t", "gamma", "delta", "trials", "tail_freq", "half_width", "seed"],
    );
    out.metric("tail_freq", freq.value(), Some(freq.half_width()));
    out.metric("delta", delta, None);
    out.row(vec![
        source.as_str().into(),
        n.map(|n| n as u64).into(),
        t.into(),
        gamma.into(),
        delta.into(),
        trials.into(),
        freq.value().into(),
        freq.half_width().into(),
        seed.into(),
    ]);
    Ok(out)
}

fn f_check(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let t_max = r.t(Some(10), u64::from(walk::MAX_ENUMERATION_T))?;
    let n = r.n(2, 1, 8)?;
    let k = r.k(n, (1 << n) - 1)?;
    let f = TruthTable::single_marked(n as usize, k)?;
    let gaps = map_trials(t_max, |i| -> Result<f64> { Ok(walk::circuit_vs_walk_check(i as u32 + 1, &f, k)?) })?;
    let mut out = RunResult::new("f-check", seed, r.into_echo(), &["t", "patterns", "max_discrepancy"]);
    out.metric("max_discrepancy", gaps.iter().copied().fold(0.0, f64::max), None);
    for (i, gap) in gaps.into_iter().enumerate() {
        let t = i as u64 + 1;
        out.row(vec![t.into(), (1u64 << t).into(), gap.into()]);
    }
    Ok(out)
}

const EXACT_TOL: f64 = 1e-12;

fn g_check(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let check = r.choice("check", &p.check, &["bound", "superposition", "correlation", "zero-input"])?;
    let gamma = r.gamma()?;
    let delta = r.delta()?;
    let n = r.n(3, 1, 8)? as usize;
    let (m, level) = match check.as_str() {
        "bound" => (1, Level::G),
        "superposition" => (1, Level::F),
        "correlation" => (2, Level::Multi),
        _ => (r.m(1, 3)?, Level::F),
    };
    let t = r.t(Some(compute_t(level, gamma, delta, m as usize, 1)?), 1 << 32)?;
    let trials = if check == "zero-input" { r.trials_or(20)? } else { r.trials()? };
    let states = if check == "zero-input" { r.states(50)? as usize } else { 0 };
    let values = map_trials(trials, |i| -> Result<f64> {
        Ok(match check.as_str() {
            "bound" => checks::g_bound_trial(n, t, seed, i)?,
            "superposition" => checks::f_superposition_trial(n, t, seed, i)?,
            "correlation" => checks::multibit_correlation_trial(n, t, seed, i)?,
            _ => checks::zero_input_identity_trial(n, m as usize, t, states, seed, i)?,
        })
    })?;
    let limit = match check.as_str() {
        "bound" | "superposition" => gamma,
        _ => EXACT_TOL,
    };
    let within: Vec<bool> = values.iter().map(|&v| v <= limit).collect();
    let freq = frequency(&within);
    let max_value = values.iter().copied().fold(0.0, f64::max);
    let mut out = RunResult::new(
        "g-check",
        seed,
        r.into_echo(),
        &["check", "n", "m", "t", "gamma", "delta", "trials", "within_freq", "max_value", "seed"],
    );
    out.metric("within_freq", freq.value(), Some(freq.half_width()));
    out.metric("max_value", max_value, None);
    out.metric("limit", limit, None);
    out.row(vec![
        check.as_str().into(),
        n.into(),
        m.into(),
        t.into(),
        gamma.into(),
        delta.into(),
        trials.into(),
        freq.value().into(),
        max_value.into(),
        seed.into(),
    ]);
    Ok(out)
}

const GROVER_COLUMNS: [&str; 10] = ["mode", "N", "r", "p", "gamma", "delta", "trials", "success_freq", "mean_queries", "seed"];

fn robust_run(p: &Params, seed: u64) -> Result<RunResult> {
    match p.algo.as_deref().unwrap_or("grover") {
        "grover" => grover_run(p, seed, None),
        path => file_run(p, seed, path),
    }
}

fn grover_run(p: &Params, seed: u64, forced_mode: Option<&str>) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let mode = match forced_mode {
        Some(m) => {
            r.echo("mode", m.to_string());
            m.to_string()
        }
        None => r.choice("mode", &p.mode, &["robust", "exact", "faulty", "phase"])?,
    };
    let n = r.size_bits(4, 12)?;
    let size = 1u64 << n;
    let k = r.k(n, size - 1)?;
    let iterations = r.r(optimal_iterations(size), 1 << 16)?;
    let trials = r.trials()?;
    let (grover_mode, p_used, gamma, delta) = match mode.as_str() {
        "exact" => (GroverMode::Exact, None, None, None),
        "faulty" => {
            let pf = r.p(0.5, 0.99)?;
            (GroverMode::Faulty { p: pf }, Some(pf), None, None)
        }
        "robust" => {
            let pf = r.p(0.5, 0.5)?;
            let (g, d) = (r.gamma()?, r.delta()?);
            (GroverMode::Robust { gamma: g, delta: d, p: pf }, Some(pf), Some(g), Some(d))
        }
        _ => {
            let pf = r.p(0.5, 0.99)?;
            let r_phase = r.r_phase(8)?;
            (GroverMode::Phase { r_phase, p: pf }, Some(pf), None, None)
        }
    };
    let instance = GroverInstance::new(n as usize, k, iterations)?;
    let runner = GroverRunner::new(instance, grover_mode)?;
    if let Some(t) = runner.robust_t() {
        r.echo("t", t.to_string());
    }
    let outcomes = map_trials(trials, |i| runner.trial(seed, i))?;
    let freq = frequency(&outcomes.iter().map(|o| o.success).collect::<Vec<_>>());
    let queries: Vec<f64> = outcomes.iter().map(|o| o.queries as f64).collect();
    let exact = grover_success_prob(size, iterations)?;
    let experiment = if forced_mode.is_some() { "phase-grover" } else { "robust-run" };
    let mut out = RunResult::new(experiment, seed, r.into_echo(), &GROVER_COLUMNS);
    out.metric("success_freq", freq.value(), Some(freq.half_width()));
    out.metric("exact_success", exact, None);
    out.metric("mean_queries", mean(&queries), Some(mean_half_width(&queries)));
    if let (Some(g), Some(d)) = (gamma, delta) {
        out.metric("robust_lower_bound", exact - g - d, None);
    }
    if let GroverMode::Phase { r_phase, p } = grover_mode {
        let samples = trials.max(2);
        let moments = phase_count_moments(r_phase, p, iterations.max(1), samples, seed ^ 0x636f_756e_7473)?;
        let n = samples as f64;
        let z = |gap: f64, sigma: f64| gap.abs() / sigma.max(f64::MIN_POSITIVE);
        let mean_z = moments
            .iter()
            .map(|m| z(m.mean - m.expected_mean, (m.expected_variance / n).sqrt()))
            .fold(0.0, f64::max);
        // Normal approximation to the spread of a sample variance.
        let var_z = moments
            .iter()
            .map(|m| z(m.variance - m.expected_variance, m.expected_variance * (2.0 / (n - 1.0)).sqrt()))
            .fold(0.0, f64::max);
        out.metric("count_mean_max_z", mean_z, None);
        out.metric("count_variance_max_z", var_z, None);
    }
    out.row(vec![
        mode.as_str().into(),
        size.into(),
        iterations.into(),
        p_used.into(),
        gamma.into(),
        delta.into(),
        trials.into(),
        freq.value().into(),
        mean(&queries).into(),
        seed.into(),
    ]);
    Ok(out)
}

fn read_text(name: &str, path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{name} = {path}: {e}")))
}

fn file_run(p: &Params, seed: u64, path: &str) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    r.echo("algo", path.to_string());
    let algo = parse_algorithm(&read_text("algo", path)?).map_err(|e| RunError::Config(format!("{path}: {e}")))?;
    let oracle_path = p
        .oracle
        .as_deref()
        .ok_or_else(|| RunError::Config("oracle is required with an algorithm file".into()))?;
    r.echo("oracle", oracle_path.to_string());
    let f = parse_truth_table(&read_text("oracle", oracle_path)?).map_err(|e| RunError::Config(format!("{oracle_path}: {e}")))?;
    algo.check_function(&f).map_err(|e| RunError::Config(e.to_string()))?;
    let mode = r.choice("mode", &p.mode, &["robust", "exact", "faulty"])?;
    let trials = r.trials()?;
    let pf = if mode == "exact" { 0.0 } else { r.p(0.5, if mode == "robust" { 0.5 } else { 0.99 })? };
    let robust = if mode == "robust" {
        let (g, d) = (r.gamma()?, r.delta()?);
        let ra = robustify(&algo, g, d)?;
        r.echo("t", ra.params().t.to_string());
        Some(ra)
    } else {
        None
    };
    let config = if mode == "robust" {
        FaultyOracleConfig::new(pf)?
    } else {
        FaultyOracleConfig::unreduced(pf)?
    };
    let outcomes = map_trials(trials, |i| -> Result<u64> {
        let program = match (&robust, mode.as_str()) {
            (Some(ra), _) => Program::Robust(ra),
            (None, "exact") => Program::FaultFree(&algo),
            _ => Program::Faulty(&algo),
        };
        Ok(run(program, &f, &[], &config, substream_seed(seed, i))?.outcome.value())
    })?;
    let width = algo.layout().width(algo.measured_register())?;
    let mut counts = vec![0u64; 1 << width];
    outcomes.iter().for_each(|&o| counts[o as usize] += 1);
    let mut out = RunResult::new("robust-run", seed, r.into_echo(), &["outcome", "count", "frequency"]);
    for (v, &c) in counts.iter().enumerate() {
        if c > 0 {
            let bits = BitString::new(v as u64, width)?.to_string();
            out.row(vec![bits.as_str().into(), c.into(), (c as f64 / trials as f64).into()]);
        }
    }
    Ok(out)
}

fn walk_enumerate(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let t = r.t(Some(10), u64::from(walk::MAX_ENUMERATION_T))? as u32;
    let mode = r.choice("mode", &p.mode, &["geometric", "walk"])?;
    let (this, other) = if mode == "geometric" {
        (EnumerationMode::Geometric, EnumerationMode::Walk)
    } else {
        (EnumerationMode::Walk, EnumerationMode::Geometric)
    };
    let dist = walk::enumerate_distribution(t, this)?;
    let agree = dist == walk::enumerate_distribution(t, other)?;
    let mut out = RunResult::new(
        "walk-enumerate",
        seed,
        r.into_echo(),
        &["phi_multiple", "probability_numerator", "probability_denominator"],
    );
    out.metric("modes_agree", if agree { 1.0 } else { 0.0 }, None);
    for (phi, prob) in dist {
        out.row(vec![u64::from(phi).into(), (*prob.numer()).into(), (*prob.denom()).into()]);
    }
    Ok(out)
}

fn walk_chernoff(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let t = r.t(Some(256), 1 << 24)?;
    let delta = r.chernoff_delta()?;
    let trials = r.trials()?;
    let threshold = walk::chernoff_threshold(t, delta)?;
    let hits = map_trials(trials, |i| -> Result<bool> { Ok(walk::chernoff_trial(t, threshold, seed, i)) })?;
    let freq = frequency(&hits);
    let mut out = RunResult::new(
        "walk-chernoff",
        seed,
        r.into_echo(),
        &["t", "delta", "threshold", "trials", "tail_freq", "half_width", "seed"],
    );
    out.metric("tail_freq", freq.value(), Some(freq.half_width()));
    out.metric("threshold", threshold, None);
    out.row(vec![
        t.into(),
        delta.into(),
        threshold.into(),
        trials.into(),
        freq.value().into(),
        freq.half_width().into(),
        seed.into(),
    ]);
    Ok(out)
}

/// Grid points for the angle inequality on `[−2π, 2π]`.
pub const ANGLE_GRID: u64 = 10_000;

fn commutator(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let single_size = p.size;
    let single_r = p.r_phase.or(p.r);
    let pairs: Vec<(u64, u64)> = match (single_size, single_r) {
        (Some(size), Some(rp)) => {
            if !(2..=1 << 20).contains(&size) {
                return Err(RunError::Config(format!("N = {size} is outside [2, 2^20]")));
            }
            if rp == 0 {
                return Err(RunError::Config("r_phase = 0 is outside [1, ∞)".into()));
            }
            r.echo("N", size.to_string());
            r.echo("r_phase", rp.to_string());
            vec![(size, rp)]
        }
        (None, None) => {
            r.echo("grid", "N=2..64 r_phase=1..32".into());
            (2..=64).flat_map(|size| (1..=32).map(move |rp| (size, rp))).collect()
        }
        _ => return Err(RunError::Config("N and r_phase must be given together".into())),
    };
    let values = map_trials(pairs.len() as u64, |i| -> Result<(f64, f64)> {
        let (size, rp) = pairs[i as usize];
        Ok(commutator_norm(size, rp)?)
    })?;
    let gap = (0..=ANGLE_GRID)
        .map(|i| angle_inequality_gap(-2.0 * PI + 4.0 * PI * i as f64 / ANGLE_GRID as f64))
        .fold(f64::INFINITY, f64::min);
    let mut out = RunResult::new("commutator", seed, r.into_echo(), &["N", "r_phase", "closed_form", "numeric", "abs_diff"]);
    let worst = values.iter().map(|(c, n)| (c - n).abs()).fold(0.0, f64::max);
    out.metric("max_abs_diff", worst, None);
    out.metric("angle_inequality_min_gap", gap, None);
    for (&(size, rp), &(c, n)) in pairs.iter().zip(&values) {
        out.row(vec![size.into(), rp.into(), c.into(), n.into(), (c - n).abs().into()]);
    }
    Ok(out)
}

fn phase_grover(p: &Params, seed: u64) -> Result<RunResult> {
    grover_run(p, seed, Some("phase"))
}

fn short_runs(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let n = r.size_bits(6, 14)?;
    let size = 1u64 << n;
    let k = r.k(n, size - 1)?;
    let pf = r.p(0.5, 0.5)?;
    let c = r.c(ShortRunConfig::default().c)?;
    let trials = r.trials()?;
    let cfg = ShortRunConfig {
        c,
        ..ShortRunConfig::default()
    };
    let runs = map_trials(trials, |i| repeat_short_runs(n as usize, k, pf, cfg, substream_seed(seed, i)))?;
    let freq = frequency(&runs.iter().map(|o| o.success).collect::<Vec<_>>());
    let queries: Vec<f64> = runs.iter().map(|o| o.queries as f64).collect();
    let run_counts: Vec<f64> = runs.iter().map(|o| o.runs as f64).collect();
    let mut out = RunResult::new(
        "short-runs",
        seed,
        r.into_echo(),
        &["N", "p", "c", "trials", "success_freq", "mean_queries", "seed"],
    );
    out.metric("success_freq", freq.value(), Some(freq.half_width()));
    out.metric("mean_queries", mean(&queries), Some(mean_half_width(&queries)));
    out.metric("mean_runs", mean(&run_counts), Some(mean_half_width(&run_counts)));
    out.row(vec![
        size.into(),
        pf.into(),
        c.into(),
        trials.into(),
        freq.value().into(),
        mean(&queries).into(),
        seed.into(),
    ]);
    Ok(out)
}

fn classical_or(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let n = r.n(64, 1, 1 << 20)? as usize;
    let alpha = r.alpha(0.3)?;
    let queries = r.queries(2, n as u64)? as usize;
    let trials = r.trials()?;
    let zeros = map_trials(trials, |i| lower_bound_trial(n, alpha, queries, &mut substream(seed, i)))?;
    let upper_seed = seed ^ 0x0075_7070_6572;
    let upper = map_trials(trials, |i| {
        let mut rng = substream(upper_seed, i);
        let mut x = vec![false; n];
        x[rng.random_range(0..n)] = true;
        noisy_or_upper_with(&x, alpha, &mut rng)
    })?;
    let lower = frequency(&zeros);
    let errors = frequency(&upper.iter().map(|&(answer, _)| !answer).collect::<Vec<_>>());
    let upper_queries: Vec<f64> = upper.iter().map(|&(_, q)| q as f64).collect();
    let bound = classical::analytic_bound(n, alpha, queries);
    let product = classical::product_formula(n, alpha, queries);
    let mut out = RunResult::new(
        "classical-or",
        seed,
        r.into_echo(),
        &["n", "alpha", "T", "trials", "empirical_all_zero", "analytic_bound", "seed"],
    );
    out.metric("empirical_all_zero", lower.value(), Some(lower.half_width()));
    out.metric("analytic_bound", bound, None);
    out.metric("product_formula", product, None);
    out.metric("upper_error_freq", errors.value(), Some(errors.half_width()));
    out.metric("upper_mean_queries", mean(&upper_queries), Some(mean_half_width(&upper_queries)));
    out.metric("repetitions", classical::repetitions(alpha)? as f64, None);
    out.row(vec![
        n.into(),
        alpha.into(),
        queries.into(),
        trials.into(),
        lower.value().into(),
        bound.into(),
        seed.into(),
    ]);
    Ok(out)
}

/// Trajectories per density accumulator; fixed so sums are formed in the
/// same order for any worker count.
const DENSITY_CHUNK: u64 = 256;

fn trace_distance(p: &Params, seed: u64) -> Result<RunResult> {
    let mut r = Resolver::new(p);
    let gamma = r.gamma()?;
    let delta = r.delta()?;
    let algo = checks::trace_distance_toy_algorithm()?;
    let k = r.k(algo.input_width() as u64, 2)?;
    let t = r.t(Some(compute_t(Level::Algorithm, gamma, delta, 1, algo.queries())?), 1 << 32)?;
    let trials = r.trials()?;
    let f = TruthTable::single_marked(algo.input_width(), k)?;
    let ralgo = robustify_with(
        &algo,
        RobustParams {
            gamma,
            delta,
            m: 1,
            q: algo.queries(),
            t,
        },
    )?;
    let parts = map_chunks(trials, DENSITY_CHUNK, |range| -> Result<DensityAccumulator> {
        let mut acc = DensityAccumulator::new(ralgo.layout().clone())?;
        for i in range {
            acc.add(&checks::robust_trajectory(&ralgo, &f, seed, i)?)?;
        }
        Ok(acc)
    })?;
    let mut total = DensityAccumulator::new(ralgo.layout().clone())?;
    for part in &parts {
        total.merge(part)?;
    }
    let robust = total.finish()?.partial_trace(noisy_oracle_core::circuit::SCRATCH)?;
    let mut ideal = StateVector::basis_index(algo.layout().clone(), 0);
    evolve_query(&algo, &f, &mut ideal, OracleMode::Exact, &mut FaultTrace::replay(Vec::new()))?;
    let distance = trace_distance_density(&DensityMatrix::from_pure(&ideal)?, &robust)?;
    let mut out = RunResult::new(
        "trace-distance",
        seed,
        r.into_echo(),
        &["gamma", "delta", "t", "trajectories", "trace_distance", "bound", "seed"],
    );
    out.metric("trace_distance", distance, None);
    out.metric("bound", gamma + delta, None);
    out.row(vec![
        gamma.into(),
        delta.into(),
        t.into(),
        trials.into(),
        distance.into(),
        (gamma + delta).into(),
        seed.into(),
    ]);
    Ok(out)
}

/// One-line description of a finished run.
pub fn summary(result: &RunResult) -> String {
    let metrics: Vec<String> = result
        .metrics
        .iter()
        .take(3)
        .map(|m| match m.half_width {
            Some(h) => format!("{}={} (±{})", m.name, short(m.value), short(h)),
            None => format!("{}={}", m.name, short(m.value)),
        })
        .collect();
    format!("{} seed={} {}", result.experiment, result.seed, metrics.join(" "))
}

fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').trim_start_matches(['0', '.']).is_empty() && v != 0.0 {
        format!("{v:.3e}")
    } else {
        s
    }
}
