use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use super::require;
use crate::config::Config;
use crate::error::{write_file, CliError, CliResult};
use crate::svg::{render, Coloring, Scatter};
use crate::table::{io_err, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorScale {
    /// Numeric columns with more than 12 distinct values get a ramp.
    Auto,
    Categorical,
    Numeric,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Embedding CSV.
    pub embedding: PathBuf,
    /// SVG file to write (`-` for stdout).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Column that colors the points.
    #[arg(long)]
    pub color_by: Option<String>,
    #[arg(long, value_enum, default_value_t = ColorScale::Auto)]
    pub color_scale: ColorScale,
    /// Horizontal coordinate column.
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    /// Vertical coordinate column.
    #[arg(long, requires = "x")]
    pub y: Option<String>,
    #[arg(long)]
    pub title: Option<String>,
}

pub fn run(a: PlotArgs, cfg: &Config, stdout: &mut dyn Write) -> CliResult<()> {
    let color_by = cfg.pick_opt(a.color_by.clone(), "color-by")?;
    let table = Table::read(&a.embedding)?;
    let (cx, cy) = match (&a.x, &a.y) {
        (Some(x), Some(y)) => (table.column(x)?, table.column(y)?),
        _ => {
            let dims = table.dims(None)?;
            require(dims.len() == 2, || {
                format!(
                    "embedding has {} coordinate columns; choose two with --x and --y",
                    dims.len()
                )
            })?;
            (dims[0], dims[1])
        }
    };
    let coloring = match &color_by {
        None => Coloring::Plain,
        Some(name) => {
            let c = table.column(name)?;
            let numeric = table.is_numeric(c);
            let distinct = {
                let mut v = table.strings(c);
                v.sort();
                v.dedup();
                v.len()
            };
            let use_ramp = match a.color_scale {
                ColorScale::Numeric if !numeric => {
                    return Err(CliError::data(format!("column '{name}' is not numeric")))
                }
                ColorScale::Numeric => true,
                ColorScale::Categorical => false,
                ColorScale::Auto => numeric && distinct > 12,
            };
            if use_ramp {
                Coloring::Numeric { name: name.clone(), values: table.numeric(c)? }
            } else {
                Coloring::Categorical { name: name.clone(), labels: table.strings(c) }
            }
        }
    };
    let svg = render(&Scatter {
        x: table.numeric(cx)?,
        y: table.numeric(cy)?,
        x_label: table.headers[cx].clone(),
        y_label: table.headers[cy].clone(),
        title: a.title.clone(),
        coloring,
    });
    if a.output.as_os_str() == "-" {
        stdout.write_all(svg.as_bytes()).map_err(io_err)
    } else {
        write_file(&a.output, svg.as_bytes())
    }
}
