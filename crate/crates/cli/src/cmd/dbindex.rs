use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use sensormap::metrics::davies_bouldin_by;

use super::list;
use crate::config::Config;
use crate::error::CliResult;
use crate::table::{io_err, Table};

#[derive(Debug, Args)]
pub struct DbindexArgs {
    /// Embedding CSV with a label column.
    pub embedding: PathBuf,
    /// Column holding the group labels [default: label].
    #[arg(long)]
    pub label_col: Option<String>,
    /// Coordinate columns [default: every dimN column].
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<String>,
}

pub fn run(a: DbindexArgs, cfg: &Config, stdout: &mut dyn Write) -> CliResult<()> {
    let label_col = cfg.pick(a.label_col, "label-col", "label".to_string())?;
    let dims = list(&a.dims, cfg, "dims");
    let table = Table::read(&a.embedding)?;
    let labels = table.strings(table.column(&label_col)?);
    let cols = table.dims(if dims.is_empty() { None } else { Some(&dims) })?;
    let coords = table.matrix(&cols)?;
    let db = davies_bouldin_by(coords.view(), &labels)?;
    writeln!(stdout, "{db}").map_err(io_err)
}
