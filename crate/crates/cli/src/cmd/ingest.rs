use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use crate::config::Config;
use crate::error::{read_file, CliResult};
use crate::table::{io_err, open_output};
use crate::turbofan::{condition_label, header, parse, summarize, DEFAULT_CYCLE_CUTOFF};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Whitespace-separated turbofan records (26 columns per line).
    pub input: PathBuf,
    /// Feature CSV to write (`-` for stdout).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Cycles up to this count are marked normal.
    #[arg(long)]
    pub cycle_cutoff: Option<u32>,
    /// Write only the normal rows.
    #[arg(long)]
    pub normal_only: bool,
}

pub fn run(a: IngestArgs, cfg: &Config, stdout: &mut dyn Write) -> CliResult<()> {
    let cutoff = cfg.pick(a.cycle_cutoff, "cycle-cutoff", DEFAULT_CYCLE_CUTOFF)?;
    let records = parse(&read_file(&a.input)?).map_err(|e| e.context(a.input.display()))?;
    let summary = summarize(&records);
    {
        let mut w = csv::Writer::from_writer(open_output(&a.output, stdout)?);
        w.write_record(header())?;
        for r in &records {
            let normal = r.cycle <= cutoff;
            if a.normal_only && !normal {
                continue;
            }
            let mut rec = vec![
                r.engine_id.to_string(),
                r.cycle.to_string(),
                condition_label(&r.settings),
                if normal { "yes" } else { "no" }.to_string(),
            ];
            rec.extend(r.tokens.iter().cloned());
            w.write_record(&rec)?;
        }
        w.flush().map_err(io_err)?;
    }
    if a.output.as_os_str() != "-" {
        writeln!(
            stdout,
            "engines: {}\nrecords: {}\nshortest life: {} cycles\nlongest life: {} cycles\nconditions: {}",
            summary.engines, summary.records, summary.shortest_life, summary.longest_life, summary.conditions
        )
        .map_err(io_err)?;
    }
    Ok(())
}
