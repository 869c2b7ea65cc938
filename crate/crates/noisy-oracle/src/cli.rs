//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{load_config, parse_format, Experiment, ExperimentConfig, Params};
use crate::error::{Result, RunError};
use crate::experiments::{run_experiment, summary};
use crate::output::RunResult;

#[derive(Debug, Parser)]
#[command(name = "noisy-oracle", version, about = "Simulate query algorithms against faulty oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tail of the F-block success amplitude
    Concentration(RunArgs),
    /// Compare F circuit outcomes with the labeled walk, exhaustively
    FCheck(RunArgs),
    /// Distance and identity checks for the G block
    GCheck(RunArgs),
    /// Run Grover or a query-algorithm file under an oracle mode
    RobustRun(RunArgs),
    /// Angle-walk distributions and tails
    Walk {
        #[command(subcommand)]
        which: WalkCommand,
    },
    /// Norm of the commutator of the phase oracle and the diffusion
    Commutator(RunArgs),
    /// Grover with phase-oracle rounds
    PhaseGrover(RunArgs),
    /// Short Grover runs with classical verification
    ShortRuns(RunArgs),
    /// Classical noisy OR: upper-bound algorithm and lower-bound experiment
    ClassicalOr(RunArgs),
    /// Trace distance of a robust run from the fault-free state
    TraceDistance(RunArgs),
    /// Run the experiment named in a configuration file
    Run(RunArgs),
}

#[derive(Debug, Subcommand)]
enum WalkCommand {
    /// Exact distribution of the final angle
    Enumerate(RunArgs),
    /// Monte Carlo Chernoff tail of the walk
    Chernoff(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Configuration file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Result file, default `<experiment>.<format>`
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[command(flatten)]
    params: Params,
}

impl RunArgs {
    fn resolve(self, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => {
                let file = load_config(path)?;
                if let Some(e) = experiment.filter(|&e| e != file.experiment) {
                    return Err(RunError::Config(format!(
                        "{} names experiment {} but the subcommand is {e}",
                        path.display(),
                        file.experiment
                    )));
                }
                file
            }
            None => ExperimentConfig::new(
                experiment.ok_or_else(|| RunError::Config("run needs --config".into()))?,
            ),
        };
        let mut config = ExperimentConfig {
            params: base.params.clone().overlay(self.params),
            ..base
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = self.out {
            config.output = Some(out);
        }
        if let Some(format) = self.format.as_deref() {
            config.format = parse_format(format)?;
        }
        Ok(config)
    }
}

fn resolve(command: Command) -> Result<ExperimentConfig> {
    let (args, experiment) = match command {
        Command::Concentration(a) => (a, Some(Experiment::Concentration)),
        Command::FCheck(a) => (a, Some(Experiment::FCheck)),
        Command::GCheck(a) => (a, Some(Experiment::GCheck)),
        Command::RobustRun(a) => (a, Some(Experiment::RobustRun)),
        Command::Walk {
            which: WalkCommand::Enumerate(a),
        } => (a, Some(Experiment::WalkEnumerate)),
        Command::Walk {
            which: WalkCommand::Chernoff(a),
        } => (a, Some(Experiment::WalkChernoff)),
        Command::Commutator(a) => (a, Some(Experiment::Commutator)),
        Command::PhaseGrover(a) => (a, Some(Experiment::PhaseGrover)),
        Command::ShortRuns(a) => (a, Some(Experiment::ShortRuns)),
        Command::ClassicalOr(a) => (a, Some(Experiment::ClassicalOr)),
        Command::TraceDistance(a) => (a, Some(Experiment::TraceDistance)),
        Command::Run(a) => (a, None),
    };
    args.resolve(experiment)
}

/// Runs an experiment and writes its result file.
pub fn execute(config: &ExperimentConfig) -> Result<(RunResult, PathBuf)> {
    let result = run_experiment(config)?;
    let path = config.output_path();
    std::fs::write(&path, result.render(config.format)).map_err(|source| RunError::Output {
        path: path.clone(),
        source,
    })?;
    Ok((result, path))
}

/// Parses `args` (program name first), runs and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let started = Instant::now();
    match resolve(cli.command).and_then(|config| execute(&config)) {
        Ok((result, path)) => {
            println!(
                "{} -> {} ({:.2}s)",
                summary(&result),
                path.display(),
                started.elapsed().as_secs_f64()
            );
            0
        }
        Err(e) => {
            eprintln!("noisy-oracle: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
