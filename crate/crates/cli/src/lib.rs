//! `chartex` command line: extract charts from PNG files, generate a
//! synthetic corpus, and score extractions against ground truth.

pub mod commands;
pub mod manifest;
pub mod schema;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

pub const EXIT_OK: u8 = 0;
/// I/O or usage error.
pub const EXIT_ERROR: u8 = 1;
/// Nothing was extracted or evaluated.
pub const EXIT_EMPTY: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, message: impl ToString) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            message: message.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "chartex",
    version,
    about = "Extract data from raster bar charts"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// External OCR command; the built-in recogniser is used when unset.
    #[arg(long, global = true, env = "CHARTEX_OCR_CMD", value_name = "CMD")]
    pub ocr_cmd: Option<String>,
    /// Worker threads for per-file work; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args, Default, Clone)]
pub struct ExtractArgs {
    /// Also write `<stem>.chart.csv` next to each chart document.
    #[arg(long)]
    pub csv: bool,
    /// Write the text mask, edge map and overlay of every input here.
    #[arg(long, value_name = "DIR")]
    pub debug_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write `<stem>.chart.json` for every bar-chart panel of each input.
    Extract {
        /// PNG files or directories of PNG files.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        opts: ExtractArgs,
    },
    /// Render a synthetic corpus of `NNNN.png` / `NNNN.truth.json` pairs.
    Gen {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = chartex::chartgen::DEFAULT_CORPUS_SEED)]
        seed: u64,
    },
    /// Score `*.chart.json` predictions against `*.truth.json` files.
    Eval {
        pred_dir: PathBuf,
        truth_dir: PathBuf,
        /// Report directory; defaults to the prediction directory.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Limits of agreement at bias ± z·sd.
        #[arg(long)]
        loa_z: Option<f64>,
    },
    /// Extract every PNG in a directory, then score against any truth files there.
    Pipeline {
        dir: PathBuf,
        #[command(flatten)]
        opts: ExtractArgs,
        #[arg(long)]
        loa_z: Option<f64>,
    },
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: Cli) -> u8 {
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("chartex: {e}");
            EXIT_ERROR
        }
    }
}
