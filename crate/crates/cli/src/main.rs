mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use elastica::Error;

/// Elastic spectra on the unit square and unit disk, and two-term
/// Weyl / heat-trace coefficient checks.
#[derive(Debug, Parser)]
#[command(name = "elastica", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryArg {
    Cflv,
    Liu,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Disk,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    Dirichlet,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Potential,
    Fem,
    Analytic,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Counting,
    Heat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Residue,
    Interior,
    Boundary,
    Prop71,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weyl and heat-trace coefficients for both boundary conditions.
    Coeffs {
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        dim: u32,
        #[arg(long, value_enum, default_value = "both")]
        theory: TheoryArg,
        /// Write a JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compute a spectrum and write it as CSV.
    Spectrum {
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, value_enum)]
        bc: BcArg,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long = "lambda-max")]
        lambda_max: f64,
        /// Output CSV; with `--method both`, the base name for
        /// `<stem>.potential.csv`, `<stem>.fem.csv` and `<stem>.comparison.json`.
        #[arg(long)]
        out: PathBuf,
        /// Largest angular index for the potential method.
        #[arg(long)]
        kmax: Option<u32>,
        /// FEM mesh size.
        #[arg(long)]
        h: Option<f64>,
        /// Relative tolerance for pairing eigenvalues in the comparison report.
        #[arg(long, default_value_t = 1e-2)]
        pair_tol: f64,
    },
    /// Fit two-term asymptotics to a spectrum file.
    Fit {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// `lo,hi` in Λ (counting) or t (heat).
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
        /// JSON report path.
        #[arg(long)]
        out: PathBuf,
        /// Plot-ready CSV of the fitted series.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Run the symbol-level consistency suites; exit status 1 on any failure.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    Ok((lo, hi))
}

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCOMPATIBLE: u8 = 3;

/// Command failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub status: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { status: EXIT_USAGE, message: message.into() }
    }

    pub fn incompatible(message: impl Into<String>) -> Self {
        Self { status: EXIT_INCOMPATIBLE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::ParamDomain(_) | Error::Input(_) | Error::Parse(_) => EXIT_USAGE,
            Error::SingularLimit { .. }
            | Error::DegenerateDecomposition(_)
            | Error::Range(_)
            | Error::TailBound { .. }
            | Error::Conditioning { .. } => EXIT_INCOMPATIBLE,
            _ => EXIT_VERIFY,
        };
        Self { status, message: e.to_string() }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ELASTICA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("ELASTICA_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    configure_threads()?;
    match cli.command {
        Command::Coeffs { mu, lambda, dim, theory, json } => commands::coeffs(mu, lambda, dim, theory, json),
        Command::Spectrum { domain, mu, lambda, bc, method, lambda_max, out, kmax, h, pair_tol } => {
            commands::spectrum(commands::SpectrumArgs {
                domain,
                mu,
                lambda,
                bc,
                method,
                lambda_max,
                out,
                kmax,
                h,
                pair_tol,
            })
        }
        Command::Fit { spectrum, model, window, out, series } => {
            commands::fit(&spectrum, model, window, &out, series.as_deref())
        }
        Command::Verify { suite, mu, lambda, dim, json } => commands::verify(suite, mu, lambda, dim, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
