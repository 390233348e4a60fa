//! `adaptsym`: ADAPT runs, spectra, Lie-closure analysis, pool listings and
//! symmetry reports over FCIDUMP fixtures.

mod commands;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adaptsym::adapt::{ParamBudget, ReferenceSpec};
use adaptsym::fcidump::IrrepLabel;
use adaptsym::fock::SectorConstraints;
use adaptsym::pools::PoolFamily;
use adaptsym::Error;

#[derive(Parser, Debug)]
#[command(name = "adaptsym", version, about = "Symmetry-adapted ADAPT-VQE toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run ADAPT-VQE and write a JSON-lines trace plus a summary.
    Adapt(commands::AdaptArgs),
    /// Lowest eigenpairs of a sector.
    Spectrum(commands::SpectrumArgs),
    /// Lie closure of a pool and the subspace reachable from a reference.
    Closure(commands::ClosureArgs),
    /// List the elements of a pool.
    PoolInfo(commands::PoolInfoArgs),
    /// Symmetry expectations of a reference or a dumped state.
    SymmetryReport(commands::SymmetryArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// FCIDUMP fixture.
    #[arg(long)]
    pub fcidump: PathBuf,
    /// Output file (stdout when absent). Must not exist unless --force.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PoolArgs {
    /// Pool family: gsd, sagsd, sagspd, sagspd-full or pdint0.
    #[arg(long, value_parser = parse_pool)]
    pub pool: PoolFamily,
    /// Keep only totally symmetric excitations.
    #[arg(long)]
    pub enforce_spatial: bool,
}

fn parse_pool(s: &str) -> Result<PoolFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// `N,SZ2[,IRREP]`, irrep as a 0-based label.
pub fn parse_sector(s: &str) -> Result<SectorConstraints, String> {
    let f: Vec<&str> = s.split(',').map(str::trim).collect();
    if !(2..=3).contains(&f.len()) {
        return Err(format!("sector `{s}` is not N,SZ2[,IRREP]"));
    }
    let n = f[0].parse().map_err(|_| format!("bad electron count `{}`", f[0]))?;
    let sz2 = f[1].parse().map_err(|_| format!("bad 2·S_z `{}`", f[1]))?;
    let irrep = match f.get(2) {
        Some(t) => Some(
            t.parse::<u8>()
                .map_err(|_| format!("bad irrep `{t}`"))
                .and_then(|b| IrrepLabel::new(b).map_err(|e| e.to_string()))?,
        ),
        None => None,
    };
    Ok(SectorConstraints { n_electrons: Some(n), sz2: Some(sz2), irrep })
}

pub fn parse_reference(s: &str) -> Result<ReferenceSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn parse_budget(s: &str) -> Result<ParamBudget, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A fatal outcome with its exit status.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    pub const MISSING_FIXTURE: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const NUMERICAL: u8 = 4;
    pub const CAP: u8 = 5;

    pub fn config(msg: impl Into<String>) -> Self {
        Failure { code: Self::CONFIG, msg: msg.into() }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Failure { code: 1, msg: msg.into() }
    }

    pub fn missing(msg: impl Into<String>) -> Self {
        Failure { code: Self::MISSING_FIXTURE, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Numerical(_) | Error::NoConvergence { .. } => Failure::NUMERICAL,
            Error::DimensionCap { .. } => Failure::CAP,
            Error::Io(_) => 1,
            _ => Failure::CONFIG,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("ADAPTSYM_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::config(format!("ADAPTSYM_THREADS=`{v}` is not a positive count")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(Failure::CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let run = || -> Result<(), Failure> {
        configure_threads()?;
        match cli.command {
            Command::Adapt(a) => commands::adapt(a),
            Command::Spectrum(a) => commands::spectrum(a),
            Command::Closure(a) => commands::closure(a),
            Command::PoolInfo(a) => commands::pool_info(a),
            Command::SymmetryReport(a) => commands::symmetry_report(a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("adaptsym: {f}");
            ExitCode::from(f.code)
        }
    }
}
