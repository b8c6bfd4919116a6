//! Command-line front end: every computation as a reproducible run that
//! writes a CSV or JSON table together with its manifest.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use commands::Ctx;
use config::Settings;
use error::CliError;
use output::{emit, Format};

#[derive(Debug, Parser)]
#[command(name = "motkit", version, about = "Mating-of-trees angle relations: closed forms, special functions and simulators")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; stdout when absent. The manifest goes to <out>.manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with defaults, either top level or under [command.subcommand].
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed of the Monte Carlo streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of Monte Carlo replicas (paths, samples, fields).
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Read input angles in degrees.
    #[arg(long, global = true)]
    degrees: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// κ, κ′, Q, χ, 𝐚 and ρ for one γ.
    Params(commands::ParamsArgs),
    /// The p–θ and c–θ relations.
    #[command(subcommand)]
    Ptheta(commands::PthetaCmd),
    /// Double gamma and boundary Liouville structure constants.
    #[command(subcommand)]
    Specfun(commands::SpecfunCmd),
    /// Monte Carlo checks of the Brownian and permuton statements.
    #[command(subcommand)]
    Mc(commands::McCmd),
    /// Boundary Gaussian multiplicative chaos on the strip.
    #[command(subcommand)]
    Gmc(commands::GmcCmd),
    /// SLE_κ(ρ) driving functions.
    #[command(subcommand)]
    Sle(commands::SleCmd),
    /// Runs the invariant suite; exits 3 if any check fails.
    Selfcheck,
}

impl Command {
    fn name(&self) -> &'static str {
        use commands::*;
        match self {
            Command::Params(_) => "params",
            Command::Ptheta(PthetaCmd::Table { .. }) => "ptheta table",
            Command::Ptheta(PthetaCmd::Invert { .. }) => "ptheta invert",
            Command::Ptheta(PthetaCmd::PcCrosscheck { .. }) => "ptheta pc-crosscheck",
            Command::Specfun(SpecfunCmd::Gammab { .. }) => "specfun gammab",
            Command::Specfun(SpecfunCmd::Barh { .. }) => "specfun barh",
            Command::Specfun(SpecfunCmd::Hspecial { .. }) => "specfun hspecial",
            Command::Specfun(SpecfunCmd::Barr { .. }) => "specfun barr",
            Command::Mc(McCmd::Skew { .. }) => "mc skew",
            Command::Mc(McCmd::T1 { .. }) => "mc t1",
            Command::Mc(McCmd::ExcursionArea { .. }) => "mc excursion-area",
            Command::Mc(McCmd::Permuton { .. }) => "mc permuton",
            Command::Mc(McCmd::InversionRate { .. }) => "mc inversion-rate",
            Command::Gmc(GmcCmd::Sample { .. }) => "gmc sample",
            Command::Gmc(GmcCmd::Moment { .. }) => "gmc moment",
            Command::Sle(SleCmd::Threshold { .. }) => "sle threshold",
            Command::Sle(SleCmd::Farfield { .. }) => "sle farfield",
            Command::Selfcheck => "selfcheck",
        }
    }
}

/// Provenance record written next to every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub seed: Option<u64>,
    pub versions: String,
    pub started: String,
    pub finished: String,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Micros, true)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MOTKIT_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("MOTKIT_THREADS = `{v}` is not a positive integer")))?;
    // a pool built earlier in this process stays in place
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let started = now();
    let name = cli.command.name();
    let settings = Settings::load(cli.config.as_deref(), name)?;
    let mut ctx = Ctx { settings, seed_flag: cli.seed, reps_flag: cli.reps, degrees: cli.degrees, seed: None };
    let flag = cli.format.and_then(|f| f.to_possible_value()).map(|v| v.get_name().to_string());
    let format = ctx.settings.get("format", flag, "csv".to_string())?;
    let format = Format::from_str(&format, true).map_err(|e| CliError::Input(format!("format: {e}")))?;
    let out = ctx.settings.optional("out", cli.out.map(|p| p.display().to_string()))?.map(PathBuf::from);
    let mut failed = Vec::new();
    let table = match &cli.command {
        Command::Params(a) => commands::params(a, &mut ctx)?,
        Command::Ptheta(c) => commands::ptheta_cmd(c, &mut ctx)?,
        Command::Specfun(c) => commands::specfun_cmd(c, &mut ctx)?,
        Command::Mc(c) => commands::mc_cmd(c, &mut ctx)?,
        Command::Gmc(c) => commands::gmc_cmd(c, &mut ctx)?,
        Command::Sle(c) => commands::sle_cmd(c, &mut ctx)?,
        Command::Selfcheck => {
            let (t, f) = commands::selfcheck(&mut ctx);
            failed = f;
            t
        }
    };
    let manifest = RunManifest {
        command: name.to_string(),
        parameters: ctx.settings.effective,
        seed: ctx.seed,
        versions: format!("motkit-cli {}", env!("CARGO_PKG_VERSION")),
        started,
        finished: now(),
    };
    let manifest = serde_json::to_value(&manifest).expect("manifest serializes");
    emit(&table, format, out.as_deref(), &manifest)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure or a
/// failed self-check.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("motkit: {e}");
            e.exit_code()
        }
    }
}
