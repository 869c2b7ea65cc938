//! Experiment configuration from TOML files and command-line flags.
//!
//! ```toml
//! experiment = "concentration"
//! seed = 7
//! output = "c.csv"      # optional, defaults to <experiment>.<format>
//! format = "csv"        # or "json"
//!
//! [params]
//! gamma = 0.3
//! t = 493
//! trials = 10000
//! ```
//!
//! Flags given on the command line replace the file's values.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::Deserialize;

use crate::error::{Result, RunError};
use crate::output::{real, OutputFormat};

pub const DEFAULT_GAMMA: f64 = 0.1;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Concentration,
    FCheck,
    GCheck,
    RobustRun,
    WalkEnumerate,
    WalkChernoff,
    Commutator,
    PhaseGrover,
    ShortRuns,
    ClassicalOr,
    TraceDistance,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::Concentration,
        Experiment::FCheck,
        Experiment::GCheck,
        Experiment::RobustRun,
        Experiment::WalkEnumerate,
        Experiment::WalkChernoff,
        Experiment::Commutator,
        Experiment::PhaseGrover,
        Experiment::ShortRuns,
        Experiment::ClassicalOr,
        Experiment::TraceDistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Concentration => "concentration",
            Experiment::FCheck => "f-check",
            Experiment::GCheck => "g-check",
            Experiment::RobustRun => "robust-run",
            Experiment::WalkEnumerate => "walk-enumerate",
            Experiment::WalkChernoff => "walk-chernoff",
            Experiment::Commutator => "commutator",
            Experiment::PhaseGrover => "phase-grover",
            Experiment::ShortRuns => "short-runs",
            Experiment::ClassicalOr => "classical-or",
            Experiment::TraceDistance => "trace-distance",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| RunError::Config(format!("unknown experiment `{s}`")))
    }
}

/// Experiment parameters; each experiment reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Distance bound γ, in (0, π/2)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Failure probability δ
    #[arg(long)]
    pub delta: Option<f64>,
    /// Oracle error rate
    #[arg(long)]
    pub p: Option<f64>,
    /// Classical detection probability
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rounds per F block
    #[arg(long)]
    pub t: Option<u64>,
    /// Search-space size (a power of two)
    #[serde(rename = "N")]
    #[arg(long = "N")]
    pub size: Option<u64>,
    /// Input width in bits
    #[arg(long)]
    pub n: Option<u64>,
    /// Output width in bits
    #[arg(long)]
    pub m: Option<u64>,
    /// Number of oracle calls
    #[arg(long)]
    pub q: Option<u64>,
    /// Grover iterations (commutator: phase root)
    #[arg(long, visible_alias = "iters")]
    pub r: Option<u64>,
    /// Phase root r in e^{iπ/r}
    #[arg(long = "r-phase")]
    pub r_phase: Option<u64>,
    /// Number of trials
    #[arg(long)]
    pub trials: Option<u64>,
    /// Marked item
    #[arg(long)]
    pub k: Option<u64>,
    /// Repetition constant for short runs
    #[arg(long)]
    pub c: Option<f64>,
    /// Classical queries T
    #[serde(rename = "T")]
    #[arg(long = "T")]
    pub queries: Option<u64>,
    /// Random states per input (g-check zero-input)
    #[arg(long)]
    pub states: Option<u64>,
    /// Sub-check or variant, experiment specific
    #[arg(long)]
    pub check: Option<String>,
    /// Oracle mode (exact, faulty, robust, phase) or enumeration mode
    /// (geometric, walk)
    #[arg(long)]
    pub mode: Option<String>,
    /// `grover` or a query-algorithm file
    #[arg(long)]
    pub algo: Option<String>,
    /// Truth-table file for a query-algorithm file
    #[arg(long)]
    pub oracle: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl Params {
    /// `self` with every value set in `top` replaced.
    pub fn overlay(mut self, top: Params) -> Params {
        overlay!(self, top; gamma, delta, p, alpha, t, size, n, m, q, r, r_phase, trials, k, c, queries, states, check, mode, algo, oracle);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            params: Params::default(),
            seed: DEFAULT_SEED,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The result path, `<experiment>.<ext>` when none was given.
    pub fn output_path(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.{}", self.experiment, self.format.extension())))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: String,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<String>,
    #[serde(default)]
    params: Params,
}

pub fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(RunError::Config(format!("format: unknown output format `{other}`"))),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses a configuration file's text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of(text, s.start));
        RunError::Config(format!("line {line}: {}", e.message()))
    })?;
    Ok(ExperimentConfig {
        experiment: file.experiment.parse()?,
        params: file.params,
        seed: file.seed.unwrap_or(DEFAULT_SEED),
        output: file.output,
        format: file.format.as_deref().map(parse_format).transpose()?.unwrap_or(OutputFormat::Csv),
    })
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        RunError::Config(m) => RunError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn range_error(name: &str, value: impl fmt::Display, range: &str) -> RunError {
    RunError::Config(format!("{name} = {value} is outside {range}"))
}

/// Typed, range-checked access with documented defaults. Every value read
/// is recorded for the output header.
#[derive(Debug)]
pub struct Resolver<'a> {
    params: &'a Params,
    echo: Vec<(String, String)>,
}

impl<'a> Resolver<'a> {
    pub fn new(params: &'a Params) -> Self {
        Self {
            params,
            echo: Vec::new(),
        }
    }

    pub fn echo(&mut self, name: &str, value: String) {
        self.echo.push((name.to_string(), value));
    }

    pub fn into_echo(self) -> Vec<(String, String)> {
        self.echo
    }

    fn real_in(&mut self, name: &str, value: Option<f64>, default: Option<f64>, ok: impl Fn(f64) -> bool, range: &str) -> Result<f64> {
        let v = value
            .or(default)
            .ok_or_else(|| RunError::Config(format!("{name} is required")))?;
        if !v.is_finite() || !ok(v) {
            return Err(range_error(name, v, range));
        }
        self.echo(name, real(v));
        Ok(v)
    }

    fn int_in(&mut self, name: &str, value: Option<u64>, default: Option<u64>, lo: u64, hi: u64) -> Result<u64> {
        let v = value
            .or(default)
            .ok_or_else(|| RunError::Config(format!("{name} is required")))?;
        if v < lo || v > hi {
            return Err(range_error(name, v, &format!("[{lo}, {hi}]")));
        }
        self.echo(name, v.to_string());
        Ok(v)
    }

    /// γ in (0, π/2), default 0.1.
    pub fn gamma(&mut self) -> Result<f64> {
        self.gamma_or(DEFAULT_GAMMA)
    }

    pub fn gamma_or(&mut self, default: f64) -> Result<f64> {
        self.real_in("gamma", self.params.gamma, Some(default), |g| g > 0.0 && g < FRAC_PI_2, "(0, π/2)")
    }

    /// δ in (0, 1/5], default 0.1.
    pub fn delta(&mut self) -> Result<f64> {
        self.delta_or(DEFAULT_DELTA)
    }

    pub fn delta_or(&mut self, default: f64) -> Result<f64> {
        self.real_in("delta", self.params.delta, Some(default), |d| d > 0.0 && d <= 0.2, "(0, 1/5]")
    }

    /// δ for the Chernoff tail, in (0, 2].
    pub fn chernoff_delta(&mut self) -> Result<f64> {
        self.real_in("delta", self.params.delta, Some(DEFAULT_DELTA), |d| d > 0.0 && d <= 2.0, "(0, 2]")
    }

    pub fn p(&mut self, default: f64, max: f64) -> Result<f64> {
        self.real_in("p", self.params.p, Some(default), |p| (0.0..=max).contains(&p), &format!("[0, {max}]"))
    }

    pub fn alpha(&mut self, default: f64) -> Result<f64> {
        self.real_in("alpha", self.params.alpha, Some(default), |a| a > 0.0 && a <= 1.0, "(0, 1]")
    }

    pub fn c(&mut self, default: f64) -> Result<f64> {
        self.real_in("c", self.params.c, Some(default), |c| c > 0.0, "(0, ∞)")
    }

    pub fn t(&mut self, default: Option<u64>, hi: u64) -> Result<u64> {
        self.int_in("t", self.params.t, default, 1, hi)
    }

    pub fn trials(&mut self) -> Result<u64> {
        self.trials_or(DEFAULT_TRIALS)
    }

    pub fn trials_or(&mut self, default: u64) -> Result<u64> {
        self.int_in("trials", self.params.trials, Some(default), 1, 1 << 40)
    }

    pub fn n(&mut self, default: u64, lo: u64, hi: u64) -> Result<u64> {
        self.int_in("n", self.params.n, Some(default), lo, hi)
    }

    pub fn m(&mut self, default: u64, hi: u64) -> Result<u64> {
        self.int_in("m", self.params.m, Some(default), 1, hi)
    }

    pub fn r(&mut self, default: u64, hi: u64) -> Result<u64> {
        self.int_in("r", self.params.r, Some(default), 0, hi)
    }

    pub fn r_phase(&mut self, default: u64) -> Result<u64> {
        self.int_in("r_phase", self.params.r_phase, Some(default), 1, 1 << 20)
    }

    /// Marked item below `2^n`.
    pub fn k(&mut self, n: u64, default: u64) -> Result<u64> {
        self.int_in("k", self.params.k, Some(default), 0, (1 << n) - 1)
    }

    pub fn queries(&mut self, default: u64, hi: u64) -> Result<u64> {
        self.int_in("T", self.params.queries, Some(default), 0, hi)
    }

    pub fn states(&mut self, default: u64) -> Result<u64> {
        self.int_in("states", self.params.states, Some(default), 1, 1 << 20)
    }

    /// Search-space size given either as `N` (a power of two) or as `n`.
    pub fn size_bits(&mut self, default_n: u64, hi: u64) -> Result<u64> {
        if let Some(size) = self.params.size {
            if size < 2 || !size.is_power_of_two() || size.trailing_zeros() as u64 > hi {
                return Err(range_error("N", size, &format!("powers of two in [2, 2^{hi}]")));
            }
            let n = size.trailing_zeros() as u64;
            if self.params.n.is_some_and(|given| given != n) {
                return Err(RunError::Config(format!("N = {size} disagrees with n")));
            }
            self.echo("N", size.to_string());
            return Ok(n);
        }
        let n = self.n(default_n, 1, hi)?;
        Ok(n)
    }

    pub fn choice(&mut self, name: &str, value: &Option<String>, allowed: &[&str]) -> Result<String> {
        let v = value.clone().unwrap_or_else(|| allowed[0].to_string());
        if !allowed.contains(&v.as_str()) {
            return Err(RunError::Config(format!("{name} = {v} is not one of {}", allowed.join(", "))));
        }
        self.echo(name, v.clone());
        Ok(v)
    }

    pub fn params(&self) -> &'a Params {
        self.params
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = parse_config("experiment = \"concentration\"\nseed = 3\n").unwrap();
        assert_eq!(c.experiment, Experiment::Concentration);
        assert_eq!(c.seed, 3);
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.output_path(), PathBuf::from("concentration.csv"));
        let mut r = Resolver::new(&c.params);
        assert_eq!(r.gamma().unwrap(), 0.1);
        assert_eq!(r.delta().unwrap(), 0.1);
        assert_eq!(r.trials().unwrap(), 1000);
    }

    #[test]
    fn gamma_out_of_range_names_gamma() {
        let c = parse_config("experiment = \"g-check\"\nseed = 1\n[params]\ngamma = 6.283185307179586\n").unwrap();
        let err = Resolver::new(&c.params).gamma().unwrap_err();
        assert!(err.to_string().contains("gamma"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn parse_errors_report_lines() {
        let err = parse_config("experiment = \"commutator\"\nseed = 1\n[params]\ngamma = oops\n").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = parse_config("experiment = \"commutator\"\n[params]\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_config("experiment = \"nope\"\n").unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn flags_override_file() {
        let file = Params {
            gamma: Some(0.3),
            t: Some(10),
            ..Params::default()
        };
        let flags = Params {
            t: Some(20),
            ..Params::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.gamma, Some(0.3));
        assert_eq!(merged.t, Some(20));
    }

    #[test]
    fn size_and_bits() {
        let p = Params {
            size: Some(16),
            ..Params::default()
        };
        assert_eq!(Resolver::new(&p).size_bits(2, 10).unwrap(), 4);
        let p = Params {
            size: Some(12),
            ..Params::default()
        };
        assert!(Resolver::new(&p).size_bits(2, 10).is_err());
    }
}
