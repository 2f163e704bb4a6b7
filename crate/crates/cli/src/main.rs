//! Config-driven experiment runner. Each subcommand writes
//! `<out>/<command>.csv` plus `<out>/manifest.json`; exit code 0 means
//! success, 1 a configuration problem, 2 a numerical failure (with a
//! diagnostic JSON on stderr and in `<out>/error.json`).

mod commands;
mod config;
mod output;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use config::{CommandKind, Overrides, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<chromax_core::CoreError> for CliError {
    fn from(e: chromax_core::CoreError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "chromax", version, about = "Chromatic expansion experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump recurrence coefficients (base weight, or per basis segment)
    Recur(CommonArgs),
    /// Dump the Gauss rule of size n_max for each recurrence
    Quad(CommonArgs),
    /// Tabulate the basis functions on a grid
    Basis(CommonArgs),
    /// Compute chromatic expansion coefficients
    Expand(CommonArgs),
    /// Tabulate pointwise reconstructions for each degree
    Reconstruct(CommonArgs),
    /// Run a convergence sweep over the degree list
    Converge(CommonArgs),
    /// Sweep the wavelet-domain expansion error over a window
    Wavelet(CommonArgs),
    /// Dyadic suite: character, transform, and norm checks
    Walsh(CommonArgs),
    /// Diagnostics: Gamma/Lambda, admissibility, identity residuals
    Diag(CommonArgs),
}

impl Command {
    fn split(self) -> (CommandKind, CommonArgs) {
        match self {
            Command::Recur(a) => (CommandKind::Recur, a),
            Command::Quad(a) => (CommandKind::Quad, a),
            Command::Basis(a) => (CommandKind::Basis, a),
            Command::Expand(a) => (CommandKind::Expand, a),
            Command::Reconstruct(a) => (CommandKind::Reconstruct, a),
            Command::Converge(a) => (CommandKind::Converge, a),
            Command::Wavelet(a) => (CommandKind::Wavelet, a),
            Command::Walsh(a) => (CommandKind::Walsh, a),
            Command::Diag(a) => (CommandKind::Diag, a),
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default chromax_out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized checks
    #[arg(long)]
    seed: Option<u64>,
    /// Degree list, e.g. 2,4,8,16
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<usize>>,
    /// Kernel: fourier, laplace, bargmann, walsh, or poisson
    #[arg(long)]
    kernel: Option<String>,
    /// Poisson wavelet order (with --kernel poisson)
    #[arg(long)]
    n: Option<u32>,
    /// Real expansion point
    #[arg(long)]
    x0: Option<f64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };
    std::process::exit(run(cli.command.split()));
}

fn run((command, args): (CommandKind, CommonArgs)) -> i32 {
    let mut cfg = match RunConfig::load(args.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => return report(command, None, e),
    };
    let overrides = Overrides {
        out: args.out,
        seed: args.seed,
        degrees: args.degrees,
        kernel: args.kernel,
        n: args.n,
        x0: args.x0,
    };
    if let Err(e) = cfg.apply_overrides(overrides) {
        return report(command, None, e);
    }
    if let Err(e) = cfg.resolve(command) {
        return report(command, None, e);
    }
    let out_dir = cfg.out_dir();
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        return report(
            command,
            None,
            CliError::config(format!("cannot create {}: {e}", out_dir.display())),
        );
    }
    // A panic inside the numerics is reported like any other numerical
    // failure instead of aborting without artifacts.
    let outcome = catch_unwind(AssertUnwindSafe(|| commands::execute(command, &cfg)))
        .unwrap_or_else(|cause| {
            let detail = if let Some(s) = cause.downcast_ref::<&str>() {
                (*s).to_string()
            } else if let Some(s) = cause.downcast_ref::<String>() {
                s.clone()
            } else {
                "panic in numerical code".to_string()
            };
            Err(CliError::Numerical(format!("panic: {detail}")))
        });
    let (header, rows) = match outcome {
        Ok(data) => data,
        Err(e) => return report(command, Some(&cfg), e),
    };
    let csv_path = out_dir.join(format!("{}.csv", command.name()));
    if let Err(e) = output::write_csv(&csv_path, header, &rows) {
        return report(command, Some(&cfg), e);
    }
    if let Err(e) = output::write_manifest(&out_dir, command.name(), &cfg) {
        return report(command, Some(&cfg), e);
    }
    0
}

fn report(command: CommandKind, cfg: Option<&RunConfig>, e: CliError) -> i32 {
    match e {
        CliError::Config(msg) => {
            eprintln!("config error: {msg}");
            1
        }
        CliError::Numerical(detail) => {
            let dir = cfg.map(|c| c.out_dir());
            output::emit_diagnostic(dir.as_deref(), command.name(), &detail);
            2
        }
    }
}
