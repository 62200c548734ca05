//! Batch front end: reads a flat TOML configuration, runs one experiment and
//! writes a TOML report, CSV data and a manifest into the output directory.
//!
//! Exit statuses: 0 success, 1 configuration or usage error, 2 a check ran
//! and failed, 3 range or precondition rejection, 4 I/O failure.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use zsl_core::Parallelism;

pub use config::Config;
pub use output::{emit_plot_data, PlotSource, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_REJECTED: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const REPORT_FILE: &str = "report.toml";
pub const DATA_FILE: &str = "data.csv";
pub const PLOT_FILE: &str = "plot.csv";
pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Core(zsl_core::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core(e) if e.is_rejection() => EXIT_REJECTED,
            CliError::Core(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<zsl_core::Error> for CliError {
    fn from(e: zsl_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    ValidateFamily,
    CheckAdmissibility,
    EvalZeta,
    MeanValue,
    Oscillatory,
    Weyl,
    Discrepancy,
    Density,
    Truncation,
    RandomModel,
}

impl Subcommand {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "zsl", version, about = "Numerical laboratory for joint universality of ζ under exponential shifts")]
pub struct Cli {
    pub subcommand: Subcommand,
    /// Flat TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "zsl-out")]
    pub out: PathBuf,
    /// `key=value` in TOML value syntax; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    subcommand: String,
    tool_version: String,
    seed: u64,
    threads: usize,
    started: String,
    finished: String,
    exit_code: i32,
    files: Vec<String>,
    config: Config,
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: String,
    pub files: Vec<PathBuf>,
}

/// Reads the config file and applies `--override` and `--seed`.
pub fn resolve_config(cli: &Cli) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", cli.config.display())))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string().trim().to_string()))?;
    config::apply_overrides(&mut table, &cli.overrides)?;
    if let Some(seed) = cli.seed {
        table.insert("seed".into(), toml::Value::Integer(seed as i64));
    }
    Config::from_table(table)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn run(cli: &Cli, par: &Parallelism) -> Result<RunOutcome, CliError> {
    let started = chrono::Utc::now();
    let cfg = resolve_config(cli)?;
    let out = commands::dispatch(cli.subcommand, &cfg, par)?;

    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    let mut files = Vec::new();
    let report_path = cli.out.join(REPORT_FILE);
    write_text(&report_path, &out.report)?;
    files.push(report_path);
    if let Some(data) = &out.data {
        let p = cli.out.join(DATA_FILE);
        data.write(&p)?;
        files.push(p);
    }
    if let Some(plot) = &out.plot {
        let p = cli.out.join(PLOT_FILE);
        plot.write(&p)?;
        files.push(p);
    }
    let config_path = cli.out.join(CONFIG_FILE);
    write_text(&config_path, &cfg.to_toml())?;
    files.push(config_path);
    let manifest_path = cli.out.join(MANIFEST_FILE);
    files.push(manifest_path.clone());

    let exit_code = if out.failed { EXIT_CHECK_FAILED } else { EXIT_OK };
    let manifest = Manifest {
        subcommand: cli.subcommand.name(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed.unwrap_or(0),
        threads: par.threads(),
        started: started.to_rfc3339(),
        finished: chrono::Utc::now().to_rfc3339(),
        exit_code,
        files: files.iter().map(|p| p.display().to_string()).collect(),
        config: cfg,
    };
    write_text(&manifest_path, &toml::to_string(&manifest).expect("manifest serialises"))?;
    Ok(RunOutcome {
        exit_code,
        report: out.report,
        files,
    })
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn main_with<I, T>(args: I, par: &Parallelism) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli, par) {
        Ok(o) => {
            print!("{}", o.report);
            o.exit_code
        }
        Err(e) => {
            eprintln!("zsl: {e}");
            e.exit_code()
        }
    }
}
