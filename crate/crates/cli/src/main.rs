//! `teleport`: run protocols, sweep channel parameters, verify invariants and
//! dump measurement bases.
//!
//! Exit codes: 0 success, 1 internal or I/O error, 2 invalid input,
//! 3 verification failure.

mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use teleport_core::analytics::{self, Group, NoiseParams};
use teleport_core::bases::{self, BasisSet};
use teleport_core::protocols::{self, ProtocolId};
use teleport_core::sweep::{self, SweepMode};
use teleport_core::{mc_run, Error, InputQubit, McConfig, RunOptions, RunParams};

use output::Sink;

#[derive(Parser, Debug)]
#[command(
    name = "teleport",
    version,
    about = "Probabilistic teleportation over partially entangled channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one protocol at one parameter point.
    Run(RunArgs),
    /// Evaluate one protocol over a grid of channel parameters.
    Sweep(SweepArgs),
    /// Run an invariant suite.
    Verify(VerifyArgs),
    /// Print the amplitudes of a measurement basis.
    Bases(BasesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Mc,
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Bases,
    Formulas,
    Distill,
    Bounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BasisName {
    Bell,
    Ghz3,
    Ghz4,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Monte Carlo samples.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Independent random streams; the estimate depends on this count.
    #[arg(long, default_value_t = 8)]
    workers: usize,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Bell-measurement efficiency.
    #[arg(long)]
    eps_b: Option<f64>,
    /// Unitary-correction efficiency.
    #[arg(long)]
    eps_u: Option<f64>,
    /// Generalized-Bell-measurement efficiency.
    #[arg(long)]
    eps_m: Option<f64>,
}

impl NoiseArgs {
    /// Unset efficiencies default to 1; `None` when no flag was given.
    fn params(&self) -> Result<Option<NoiseParams>, Error> {
        if self.eps_b.is_none() && self.eps_u.is_none() && self.eps_m.is_none() {
            return Ok(None);
        }
        NoiseParams::new(
            self.eps_b.unwrap_or(1.0),
            self.eps_u.unwrap_or(1.0),
            self.eps_m.unwrap_or(1.0),
        )
        .map(Some)
    }
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha_im: f64,
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    beta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_im: f64,
}

impl InputArgs {
    fn qubit(&self) -> Result<InputQubit, Error> {
        InputQubit::new(
            Complex64::new(self.alpha_re, self.alpha_im),
            Complex64::new(self.beta_re, self.beta_im),
        )
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    protocol: String,
    /// Channel parameter in [0, 1].
    #[arg(long, allow_negative_numbers = true)]
    n: f64,
    /// Number of teleportations (chain and network protocols).
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    input: InputArgs,
    /// Include every outcome branch (exact mode).
    #[arg(long)]
    branches: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    protocol: String,
    #[arg(long, default_value_t = 0.0)]
    n_start: f64,
    #[arg(long, default_value_t = 1.0)]
    n_stop: f64,
    #[arg(long, default_value_t = 0.05)]
    n_step: f64,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Largest chain length for the distillation identity.
    #[arg(long, default_value_t = 200)]
    q_max: u32,
}

#[derive(Args, Debug)]
struct BasesArgs {
    #[arg(long, value_enum)]
    basis: BasisName,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit status.
#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(std::io::Error),
    Verify(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_validation() => 2,
            Failure::Core(_) | Failure::Io(_) => 1,
            Failure::Verify(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Verify(a) => verify::run(a.suite, a.q_max).map_err(Failure::Verify),
        Command::Bases(a) => cmd_bases(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Verify(k) => eprintln!("{k} check(s) failed"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn group_of(id: ProtocolId) -> Option<Group> {
    match id {
        ProtocolId::Group1 => Some(Group::One),
        ProtocolId::Group2 => Some(Group::Two),
        ProtocolId::Group3 => Some(Group::Three),
        _ => None,
    }
}

fn cmd_run(a: &RunArgs) -> Result<(), Failure> {
    let id: ProtocolId = a.protocol.parse()?;
    let params = RunParams::new(a.input.qubit()?, a.n, a.q)?;
    let noise = a.noise.params()?;
    let noisy = match (noise, group_of(id)) {
        (None, _) => None,
        (Some(noise), Some(g)) => Some(analytics::noisy_success(g, a.n, &noise)?),
        (Some(_), None) => {
            return Err(Error::InvalidArgument(
                "efficiency flags apply to group1, group2 and group3 only".into(),
            )
            .into())
        }
    };
    let expected = protocols::expected(id, a.n, a.q)?;
    let mut sink = Sink::open(a.out.as_deref())?;
    match a.mode {
        Mode::Exact => {
            let opts = RunOptions {
                keep_branches: a.branches,
                ..RunOptions::default()
            };
            let report = protocols::run(id, &params, &opts)?;
            match a.format {
                Format::Text => output::report_text(&mut sink, &report, noisy)?,
                Format::Csv if a.branches => output::branches_csv(&mut sink, &report)?,
                Format::Csv => output::report_csv(&mut sink, &report, noisy)?,
                Format::Json => output::report_json(&mut sink, &report, noisy)?,
            }
        }
        Mode::Mc => {
            let config = McConfig::new(a.mc.samples, a.mc.seed, a.mc.workers)?;
            let est = mc_run(id.name(), &params, &config)?;
            let row = output::McRow::new(id, &params, config, est, expected.corrected, noisy);
            match a.format {
                Format::Text => row.text(&mut sink)?,
                Format::Csv => row.csv(&mut sink)?,
                Format::Json => row.json(&mut sink)?,
            }
        }
        Mode::Formula => {
            let row = output::FormulaRow {
                protocol: id.name(),
                n: a.n,
                q: a.q,
                direct: expected.direct,
                corrected: expected.corrected,
                noisy,
            };
            match a.format {
                Format::Text => row.text(&mut sink)?,
                Format::Csv => row.csv(&mut sink)?,
                Format::Json => row.json(&mut sink)?,
            }
        }
    }
    sink.finish()?;
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), Failure> {
    let id: ProtocolId = a.protocol.parse()?;
    if a.n_stop < a.n_start {
        return Err(Error::InvalidArgument(format!(
            "n-stop {} is below n-start {}",
            a.n_stop, a.n_start
        ))
        .into());
    }
    let grid = sweep::n_grid(a.n_start, a.n_stop, a.n_step)?;
    let mode = match a.mode {
        Mode::Exact => SweepMode::Exact,
        Mode::Mc => SweepMode::Mc(McConfig::new(a.mc.samples, a.mc.seed, a.mc.workers)?),
        Mode::Formula => SweepMode::Formula,
    };
    let noise = a.noise.params()?;
    let rows = sweep::sweep(
        id,
        &grid,
        a.q,
        &a.input.qubit()?,
        mode,
        noise,
        teleport_core::Execution::Parallel,
    )?;
    let mut sink = Sink::open(a.out.as_deref())?;
    match a.format {
        Format::Json => output::sweep_json(&mut sink, id, &rows)?,
        Format::Csv | Format::Text => output::sweep_csv(&mut sink, &rows, noise.is_some())?,
    }
    sink.finish()?;
    Ok(())
}

fn cmd_bases(a: &BasesArgs) -> Result<(), Failure> {
    let basis: BasisSet = match a.basis {
        BasisName::Bell => bases::bell_basis(a.m)?,
        BasisName::Ghz3 => bases::ghz3_basis(a.m)?,
        BasisName::Ghz4 => bases::ghz4_basis(a.m)?,
    };
    let mut sink = Sink::open(a.out.as_deref())?;
    match a.format {
        Format::Json => output::basis_json(&mut sink, &basis)?,
        Format::Csv | Format::Text => output::basis_csv(&mut sink, &basis)?,
    }
    sink.finish()?;
    Ok(())
}
