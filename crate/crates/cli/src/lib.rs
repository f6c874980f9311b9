//! The `sensormap` command-line pipeline.
//!
//! Every subcommand accepts `--config FILE` (`key = value` lines); flags
//! given on the command line override file values. Failures print a single
//! `error[kind]: message` line and exit with 2 (usage or config), 3 (data
//! format) or 4 (numerical failure).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod cmd;
pub mod config;
pub mod error;
pub mod meta;
pub mod svg;
pub mod table;
pub mod trace;
pub mod turbofan;

pub use error::{CliError, CliResult};

use config::Config;

#[derive(Debug, Parser)]
#[command(name = "sensormap", version, about = "Embed, cluster-check and drift-score multivariate sensor data")]
pub struct Cli {
    /// `key = value` configuration file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn a raw vibration trace into banded spectral feature rows.
    Featurize(cmd::featurize::FeaturizeArgs),
    /// Embed a feature table with t-SNE or kernel PCA.
    Fit(cmd::fit::FitArgs),
    /// Score new rows with a saved kernel PCA model, optionally against a baseline.
    Score(cmd::score::ScoreArgs),
    /// Learn a normal-operation baseline from an embedding.
    Baseline(cmd::baseline::BaselineArgs),
    /// Print the Davies-Bouldin index of a labelled embedding.
    Dbindex(cmd::dbindex::DbindexArgs),
    /// Draw an embedding as an SVG scatter plot.
    Plot(cmd::plot::PlotArgs),
    /// Convert turbofan run-to-failure text records to a feature table.
    IngestTurbofan(cmd::ingest::IngestArgs),
}

/// Parse `args` (including the program name) and run the command, writing
/// reports and `-` outputs to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(stdout, "{}", e.render()).map_err(table::io_err)?;
                return Ok(());
            }
            let text = e.render().to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::usage(first.trim_start_matches("error: ")));
        }
    };
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Featurize(a) => cmd::featurize::run(a, &config, stdout),
        Command::Fit(a) => cmd::fit::run(a, &config, stdout),
        Command::Score(a) => cmd::score::run(a, &config, stdout),
        Command::Baseline(a) => cmd::baseline::run(a, &config, stdout),
        Command::Dbindex(a) => cmd::dbindex::run(a, &config, stdout),
        Command::Plot(a) => cmd::plot::run(a, &config, stdout),
        Command::IngestTurbofan(a) => cmd::ingest::run(a, &config, stdout),
    }
}
