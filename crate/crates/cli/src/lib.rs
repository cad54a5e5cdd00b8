//! Experiment orchestration for the low-rank matrix single index model:
//! fitting, rate studies, posterior-contraction studies, and validation
//! suites, all driven by flat key=value configuration files.
//!
//! Every command's outputs are a pure function of the configuration file
//! and its seed: reruns produce byte-identical files.

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod study;
pub mod svg;

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "SIXM_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad command line (exit code 2).
    #[error("usage error: {0}")]
    Usage(String),
    /// Bad configuration or input file (exit code 2).
    #[error("{0}")]
    Config(String),
    /// A validation suite failed (exit code 1).
    #[error("suite failure: {0}")]
    Suite(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Suite(_) => 1,
        }
    }
}

impl From<sixm_core::Error> for CliError {
    fn from(e: sixm_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o error: {e}"))
    }
}

/// Output directory resolution: environment override, then the `--out`
/// flag, then the config's `out_dir`.
pub fn resolve_out_dir(
    flag: Option<&Path>,
    cfg: &config::ExperimentConfig,
) -> Result<PathBuf, CliError> {
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or_else(|| flag.map(Path::to_path_buf))
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| {
            CliError::Usage("no output directory: pass --out, set out_dir, or SIXM_OUT_DIR".into())
        })?;
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Parsed command line.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub subcommand: String,
    pub config_path: PathBuf,
    pub out_flag: Option<PathBuf>,
}

pub const USAGE: &str =
    "usage: sixm <fit|rate|contract|validate|gen-data> --config <path> [--out <dir>]";

pub fn parse_args<I: IntoIterator<Item = String>>(args: I) -> Result<Invocation, CliError> {
    let mut it = args.into_iter();
    let subcommand = it.next().ok_or_else(|| CliError::Usage(USAGE.into()))?;
    if !matches!(
        subcommand.as_str(),
        "fit" | "rate" | "contract" | "validate" | "gen-data"
    ) {
        return Err(CliError::Usage(format!(
            "unknown subcommand `{subcommand}`\n{USAGE}"
        )));
    }
    let mut config_path = None;
    let mut out_flag = None;
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                config_path = Some(PathBuf::from(it.next().ok_or_else(|| {
                    CliError::Usage("--config requires a path".into())
                })?))
            }
            "--out" => {
                out_flag = Some(PathBuf::from(it.next().ok_or_else(|| {
                    CliError::Usage("--out requires a directory".into())
                })?))
            }
            other => {
                return Err(CliError::Usage(format!(
                    "unknown argument `{other}`\n{USAGE}"
                )))
            }
        }
    }
    let config_path =
        config_path.ok_or_else(|| CliError::Usage(format!("missing --config\n{USAGE}")))?;
    Ok(Invocation {
        subcommand,
        config_path,
        out_flag,
    })
}

/// Loads the config file and dispatches the subcommand.
pub fn run(inv: &Invocation) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&inv.config_path).map_err(|e| {
        CliError::Config(format!(
            "cannot read config file {}: {e}",
            inv.config_path.display()
        ))
    })?;
    let cfg = config::parse_config(&text)?;
    let out = resolve_out_dir(inv.out_flag.as_deref(), &cfg)?;
    match inv.subcommand.as_str() {
        "gen-data" => commands::gendata::run(&cfg, &out),
        "fit" => commands::fit::run(&cfg, &out),
        "rate" => commands::rate::run(&cfg, &out),
        "contract" => commands::contract::run(&cfg, &out),
        "validate" => commands::validate::run(&cfg, &out),
        _ => unreachable!("validated in parse_args"),
    }
}
