//! Batch front end: job configuration, the on-disk Hecke cache, report
//! files and the exit-code contract (0 ok, 1 construction or configuration
//! failure, 2 uncertified row, 3 identity failure).

pub mod cache;
pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use cache::{CacheEntry, CacheKey, DiskCache, CACHE_VERSION};
pub use commands::{execute, execute_in, Command, Report, Session, EXIT_CONSTRUCTION, EXIT_IDENTITY, EXIT_OK, EXIT_UNCERTIFIED};
pub use config::{ConfigError, JobConfig, SignChoice, VerifyMode};

#[derive(Parser, Debug)]
#[command(name = "mtlab", about = "Mazur–Tate elements and Iwasawa invariants of modular symbols")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// μ and λ of θ_{n,i} for every eigenform, n ≤ n_max.
    Invariants(JobArgs),
    /// Exact identity checks.
    Verify {
        #[command(flatten)]
        job: JobArgs,
        #[arg(long, value_parser = parse_mode)]
        mode: VerifyMode,
    },
    /// μ_min and filtration depth of every eigenform.
    MuMin(JobArgs),
    /// Galois classes of cuspidal eigensymbols and their primes above p.
    Eigenforms(JobArgs),
    /// p-stabilization of ordinary forms and invariants of ψ_{n,i}.
    Stabilize(JobArgs),
}

#[derive(Args, Debug)]
struct JobArgs {
    #[arg(long)]
    level: u64,
    #[arg(long)]
    weight: u32,
    #[arg(long)]
    p: u64,
    /// +, - or both.
    #[arg(long, default_value = "+", value_parser = parse_sign, allow_hyphen_values = true)]
    sign: SignChoice,
    #[arg(long, default_value_t = 8)]
    precision: u32,
    #[arg(long, default_value_t = 3)]
    nmax: u32,
    #[arg(long, default_value_t = 7)]
    ellmax: u64,
    /// Cache directory; MTLAB_CACHE takes precedence.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Old-space depth for verify --mode oldspace.
    #[arg(long, default_value_t = 3)]
    r: u32,
}

fn parse_sign(s: &str) -> Result<SignChoice, String> {
    SignChoice::parse(s).ok_or_else(|| format!("unknown sign {s:?}; use +, - or both"))
}

fn parse_mode(s: &str) -> Result<VerifyMode, String> {
    VerifyMode::parse(s).ok_or_else(|| {
        let names: Vec<_> = VerifyMode::ALL.iter().map(|m| m.name()).collect();
        format!("unknown mode {s:?}; one of {}", names.join(", "))
    })
}

impl JobArgs {
    fn config(&self, env_cache: Option<PathBuf>) -> JobConfig {
        JobConfig {
            level: self.level,
            weight: self.weight,
            p: self.p,
            sign: self.sign,
            precision: self.precision,
            n_max: self.nmax,
            ell_max: self.ellmax,
            cache_dir: env_cache.or_else(|| self.cache.clone()),
            output: self.out.clone(),
            r: self.r,
        }
    }
}

/// Writes `<name>.json` and, when present, `<name>.csv` into `dir`.
pub fn write_report(dir: &Path, report: &Report) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{}.json", report.name)), report.json_text())?;
    if let Some(csv) = &report.csv {
        fs::write(dir.join(format!("{}.csv", report.name)), csv)?;
    }
    Ok(())
}

/// Parses arguments, runs the command, writes reports and returns the exit
/// code. Usage errors exit with 1 as configuration failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONSTRUCTION } else { EXIT_OK };
        }
    };
    let env_cache = std::env::var_os("MTLAB_CACHE").filter(|v| !v.is_empty()).map(PathBuf::from);
    let (cmd, job) = match &cli.command {
        Cmd::Invariants(j) => (Command::Invariants, j),
        Cmd::Verify { job, mode } => (Command::Verify(*mode), job),
        Cmd::MuMin(j) => (Command::MuMin, j),
        Cmd::Eigenforms(j) => (Command::Eigenforms, j),
        Cmd::Stabilize(j) => (Command::Stabilize, j),
    };
    let cfg = job.config(env_cache);
    let report = match execute(cmd, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("mtlab: {e:#}");
            return EXIT_CONSTRUCTION;
        }
    };
    if let Err(e) = write_report(&cfg.output, &report) {
        eprintln!("mtlab: writing reports to {}: {e}", cfg.output.display());
        return EXIT_CONSTRUCTION;
    }
    println!("{}: exit {} ({})", report.name, report.code, cfg.output.join(format!("{}.json", report.name)).display());
    report.code
}
