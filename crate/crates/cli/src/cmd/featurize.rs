use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use sensormap::spectral::{
    band_column_name, featurize_trace, fit_scheme, FrameConfig, SegmentationScheme, DEFAULT_AVERAGE_SECONDS,
    DEFAULT_BANDS, DEFAULT_HOP, DEFAULT_WINDOW,
};

use super::{as_usage, require};
use crate::config::Config;
use crate::error::{write_file, CliError, CliResult};
use crate::meta::{sidecar, SchemeFile, SCHEME_SCHEMA};
use crate::table::{io_err, open_output};
use crate::trace::{read_trace, TraceFormat};

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// Vibration trace: one-column CSV with a header, or raw little-endian f32.
    pub trace: PathBuf,
    /// Feature CSV to write (`-` for stdout).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Sample rate in Hz.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, value_enum, default_value_t = TraceFormat::Auto)]
    pub format: TraceFormat,
    /// Reuse a saved band scheme.
    #[arg(long, conflicts_with = "reference")]
    pub scheme: Option<PathBuf>,
    /// Fit the band scheme on this normal-operation trace.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Where to save a freshly fitted scheme [default: OUTPUT.scheme.json].
    #[arg(long)]
    pub scheme_out: Option<PathBuf>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub hop: Option<usize>,
    /// Moving-average length in seconds.
    #[arg(long)]
    pub average_seconds: Option<f64>,
    #[arg(long)]
    pub bands: Option<usize>,
}

pub fn run(a: FeaturizeArgs, cfg: &Config, stdout: &mut dyn Write) -> CliResult<()> {
    let rate: f64 = cfg
        .pick_opt(a.rate, "rate")?
        .ok_or_else(|| CliError::usage("featurize needs the sample rate (--rate HZ)"))?;
    let window = cfg.pick(a.window, "window", DEFAULT_WINDOW)?;
    let hop = cfg.pick(a.hop, "hop", DEFAULT_HOP)?;
    let seconds = cfg.pick(a.average_seconds, "average-seconds", DEFAULT_AVERAGE_SECONDS)?;
    let bands = cfg.pick(a.bands, "bands", DEFAULT_BANDS)?;
    let frames = FrameConfig::with_average_seconds(window, hop, seconds, rate).map_err(as_usage)?;
    frames.validate().map_err(as_usage)?;
    require(bands >= 1 && bands <= window / 2, || {
        format!("bands must be in 1..={}, got {bands}", window / 2)
    })?;
    let scheme_out = match (&a.scheme, &a.reference) {
        (None, None) => {
            return Err(CliError::usage(
                "no band scheme: pass --scheme FILE or --reference TRACE to fit one",
            ))
        }
        (None, Some(_)) => Some(match &a.scheme_out {
            Some(p) => p.clone(),
            None if a.output.as_os_str() == "-" => {
                return Err(CliError::usage("writing features to stdout needs --scheme-out"))
            }
            None => sidecar(&a.output, ".scheme.json"),
        }),
        _ => None,
    };

    let scheme = match &a.scheme {
        Some(path) => {
            let file = SchemeFile::load(path)?;
            require(file.window == window, || {
                format!("scheme {} was fitted for window {}, not {window}", path.display(), file.window)
            })?;
            SegmentationScheme::new(file.breakpoints).map_err(|e| CliError::from(e).context(path.display()))?
        }
        None => {
            let reference = a.reference.as_ref().expect("checked above");
            let trace = read_trace(reference, a.format, rate)?;
            let seg = fit_scheme(&trace, &frames, bands)?;
            let file = SchemeFile {
                schema: SCHEME_SCHEMA.into(),
                window,
                breakpoints: seg.scheme.breakpoints().to_vec(),
                sse: Some(seg.sse),
            };
            let path = scheme_out.as_ref().expect("set when fitting");
            write_file(path, serde_json::to_string_pretty(&file)?.as_bytes())?;
            seg.scheme
        }
    };

    let trace = read_trace(&a.trace, a.format, rate)?;
    let features = featurize_trace(&trace, &scheme, &frames)?;
    let mut w = csv::Writer::from_writer(open_output(&a.output, stdout)?);
    let mut header: Vec<String> = (0..scheme.n_bands()).map(band_column_name).collect();
    header.push("frame_index".into());
    w.write_record(&header)?;
    for (i, row) in features.view().rows().into_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(i.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}
