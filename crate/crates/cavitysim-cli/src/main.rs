//! Batch front end for the cavitysim library.
//!
//! Schedules and state dumps travel through the plain-text formats defined
//! in `cavitysim::format`; reports go to standard output with 12 significant
//! digits, errors to standard error. The exit status is 0 exactly when every
//! requested check passed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cavitysim::compiler::{compile, Device, Schedule, Weights};
use cavitysim::format::{parse_schedule, parse_state, serialize_schedule, serialize_state};
use cavitysim::twostate::{stability_verdict, ChannelParams, TwoStateMatrix};
use cavitysim::verify::{protocol_probabilities, verify_schedule, PROTOCOL_TOL};
use cavitysim::Complex64;

#[derive(Parser)]
#[command(name = "cavitysim", version, about = "Compile, run, and verify cavity-network schedules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a weight vector into a primitive-op schedule.
    Compile(CompileArgs),
    /// Execute a schedule on an initial state; print the trace and dump the
    /// final state.
    Run(RunArgs),
    /// Re-run a schedule and report the outcome checks.
    Verify(VerifyArgs),
    /// Print the outcome probability table for a weight vector.
    Probs(ProbsArgs),
    /// Classify a channel matrix as stable or unstable.
    AnalyzeStability(AnalyzeStabilityArgs),
}

/// Device flags shared by the subcommands that build their own device.
#[derive(Args)]
struct DeviceArgs {
    /// Detuning rate applied while a channel is open.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    epsilon: f64,
    /// Transfer rate between the center and an open channel.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    omega: f64,
    /// Phase rate accrued by amplitudes outside the currently open channel.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    idle_rate: f64,
    /// Cavity count including the center (default: total weight + 1).
    #[arg(long)]
    cavities: Option<usize>,
    /// Internal-state count (default: one per weight entry).
    #[arg(long)]
    internals: Option<usize>,
}

impl DeviceArgs {
    fn device(&self, weights: &Weights) -> Result<Device> {
        let params = ChannelParams::new(self.epsilon, self.omega)?;
        let device = match (self.cavities, self.internals) {
            (None, None) => Device::for_weights(weights, params, self.idle_rate)?,
            (cavities, internals) => Device::new(
                cavities.unwrap_or(weights.total() as usize + 1),
                internals.unwrap_or(weights.entries().len()),
                params,
                self.idle_rate,
            )?,
        };
        Ok(device)
    }
}

#[derive(Args)]
struct CompileArgs {
    /// Comma-separated positive integers, e.g. "3,2".
    #[arg(long)]
    weights: String,
    #[command(flatten)]
    device: DeviceArgs,
    /// Write the schedule here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("initial").required(true))]
struct RunArgs {
    /// Schedule file produced by `compile` (or written by hand).
    #[arg(long)]
    schedule: PathBuf,
    /// Initial state dump; mutually exclusive with --weights.
    #[arg(long, group = "initial")]
    state: Option<PathBuf>,
    /// Build the canonical initial state for these weights instead.
    #[arg(long, group = "initial")]
    weights: Option<String>,
    /// Write the final state dump here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Schedule file to check.
    #[arg(long)]
    schedule: PathBuf,
    /// Target weights; defaults to the ones recorded in the schedule file.
    #[arg(long)]
    weights: Option<String>,
    /// Tolerance for the outcome checks.
    #[arg(long, default_value_t = PROTOCOL_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ProbsArgs {
    /// Comma-separated positive integers, e.g. "3,2".
    #[arg(long)]
    weights: String,
    #[command(flatten)]
    device: DeviceArgs,
}

#[derive(Args)]
struct AnalyzeStabilityArgs {
    /// Matrix diagonal as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    /// Matrix off-diagonal as "re,im".
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Allowed distance of the eigenvalue magnitudes from 1.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

fn parse_weights(text: &str) -> Result<Weights> {
    let entries = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .with_context(|| format!("weight entry {part:?} is not a positive integer"))
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(Weights::new(entries)?)
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("expected \"re,im\", got {text:?}"))?;
    Ok(Complex64::new(
        re.trim().parse().with_context(|| format!("bad real part {re:?}"))?,
        im.trim().parse().with_context(|| format!("bad imaginary part {im:?}"))?,
    ))
}

fn load_schedule(path: &PathBuf) -> Result<Schedule> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading schedule {}", path.display()))?;
    Ok(parse_schedule(&text)?)
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_compile(args: &CompileArgs) -> Result<ExitCode> {
    let weights = parse_weights(&args.weights)?;
    let device = args.device.device(&weights)?;
    let schedule = compile(&weights, &device)?;
    emit(args.output.as_ref(), &serialize_schedule(&schedule))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let schedule = load_schedule(&args.schedule)?;
    let device = schedule.device();
    let initial = match (&args.state, &args.weights) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading state {}", path.display()))?;
            parse_state(&text, device.cavities(), device.internals())?
        }
        (None, Some(weights)) => parse_weights(weights)?.initial_state(device)?,
        _ => bail!("pass exactly one of --state and --weights"),
    };
    let outcome = cavitysim::run(&schedule, &initial)?;
    for entry in &outcome.trace {
        println!("step {} {} norm={:.11e}", entry.step, entry.op.name(), entry.norm);
    }
    emit(args.output.as_ref(), &serialize_state(&outcome.final_state))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let schedule = load_schedule(&args.schedule)?;
    let weights = match &args.weights {
        Some(text) => parse_weights(text)?,
        None => schedule
            .target_weights()
            .cloned()
            .ok_or_else(|| anyhow!("schedule records no target weights; pass --weights"))?,
    };
    let checks = verify_schedule(&schedule, &weights, args.tol)?;
    let mut all_pass = true;
    for check in &checks {
        println!("{check}");
        all_pass &= check.pass;
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_probs(args: &ProbsArgs) -> Result<ExitCode> {
    let weights = parse_weights(&args.weights)?;
    let device = args.device.device(&weights)?;
    let probabilities = protocol_probabilities(&weights, &device)?;
    let table: Vec<String> = probabilities
        .iter()
        .enumerate()
        .map(|(s, p)| format!("A{s} {p:.12}"))
        .collect();
    println!("{}", table.join(" / "));
    Ok(ExitCode::SUCCESS)
}

fn cmd_analyze_stability(args: &AnalyzeStabilityArgs) -> Result<ExitCode> {
    if !(args.tol > 0.0) {
        bail!("--tol must be positive");
    }
    let matrix = TwoStateMatrix::new(parse_complex(&args.alpha)?, parse_complex(&args.beta)?);
    let verdict = stability_verdict(&matrix, args.tol);
    println!(
        "eigenvalue magnitudes {:.11e} {:.11e}",
        verdict.eigenvalue_magnitudes[0], verdict.eigenvalue_magnitudes[1]
    );
    println!(
        "unitarity residuals {:.11e} {:.11e}",
        verdict.unitarity_residuals[0], verdict.unitarity_residuals[1]
    );
    println!("verdict {}", if verdict.stable { "stable" } else { "unstable" });
    Ok(if verdict.stable { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(args) => cmd_compile(args),
        Command::Run(args) => cmd_run(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Probs(args) => cmd_probs(args),
        Command::AnalyzeStability(args) => cmd_analyze_stability(args),
    };
    match result {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(2)
        }
    }
}
