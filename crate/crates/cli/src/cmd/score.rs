use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use sensormap::detect::BaselineModel;
use sensormap::kpca::KpcaModel;

use super::list;
use crate::config::Config;
use crate::error::{read_file, CliError, CliResult};
use crate::meta::{fingerprint, load_baseline, load_model, EmbeddingMeta};
use crate::table::{io_err, line_of, open_output, parse_cell, Table, ID_COLUMNS};

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Feature CSV to project through --model.
    pub features: Option<PathBuf>,
    /// Kernel PCA model written by `fit`.
    #[arg(long, requires = "features")]
    pub model: Option<PathBuf>,
    /// Score the coordinates of an existing embedding instead of projecting features.
    #[arg(long, conflicts_with_all = ["features", "model"], requires = "baseline")]
    pub embedding: Option<PathBuf>,
    /// Write a drift report against this baseline instead of coordinates.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// CSV to write (`-` for stdout).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Columns to carry through (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub label_cols: Vec<String>,
    /// Coordinate columns of --embedding [default: every dimN column].
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<String>,
}

/// Refuse to score model projections against a baseline learned elsewhere.
fn check_model_binding(baseline: &BaselineModel, model_fp: &str) -> CliResult<()> {
    let Some(b) = &baseline.binding else {
        log::warn!("baseline has no embedding binding; assuming it matches the model");
        return Ok(());
    };
    match b.method.as_str() {
        "kpca" => match &b.model_fingerprint {
            Some(fp) if fp == model_fp => Ok(()),
            Some(_) => Err(CliError::usage("baseline was learned on a different kernel PCA model")),
            None => Ok(()),
        },
        "tsne" => Err(CliError::usage(
            "baseline was learned on a t-SNE embedding; t-SNE cannot place new points, so drift is \
             only defined for the jointly embedded rows (use score --embedding on that file)",
        )),
        _ => {
            log::warn!("baseline was learned on an external embedding; assuming it matches the model");
            Ok(())
        }
    }
}

fn check_embedding_binding(baseline: &BaselineModel, embedding: &Path) -> CliResult<()> {
    let Some(b) = &baseline.binding else { return Ok(()) };
    let meta = EmbeddingMeta::find(embedding)?;
    let ok = match (b.method.as_str(), &meta) {
        ("kpca", Some(m)) => m.is_kpca() && (b.model_fingerprint.is_none() || m.model_fingerprint == b.model_fingerprint),
        ("kpca", None) => false,
        ("external", _) => true,
        (_, _) => b.model_fingerprint.as_deref() == Some(fingerprint(read_file(embedding)?.as_bytes()).as_str()),
    };
    if ok {
        Ok(())
    } else if b.method == "kpca" {
        Err(CliError::usage("embedding was not produced by the kernel PCA model the baseline was learned on"))
    } else {
        Err(CliError::usage(format!(
            "baseline was learned on a different {} embedding; its drift scores only apply to the jointly embedded file",
            b.method
        )))
    }
}

fn write_drift_header(w: &mut csv::Writer<impl Write>) -> CliResult<()> {
    w.write_record(["index", "score", "nearest_cluster", "alarm"])?;
    Ok(())
}

fn write_drift_row(w: &mut csv::Writer<impl Write>, b: &BaselineModel, i: usize, point: &[f64]) -> CliResult<()> {
    let (score, c) = b.score_point(point)?;
    let alarm = score > b.threshold;
    w.write_record([i.to_string(), score.to_string(), b.cluster_labels[c].clone(), alarm.to_string()])?;
    Ok(())
}

pub fn run(a: ScoreArgs, cfg: &Config, stdout: &mut dyn Write) -> CliResult<()> {
    let baseline = a.baseline.as_deref().map(load_baseline).transpose()?;
    if let Some(emb) = &a.embedding {
        let baseline = baseline.expect("clap requires --baseline");
        check_embedding_binding(&baseline, emb)?;
        let dims = list(&a.dims, cfg, "dims");
        let table = Table::read(emb)?;
        let cols = table.dims(if dims.is_empty() { None } else { Some(&dims) })?;
        let coords = table.matrix(&cols)?;
        let mut w = csv::Writer::from_writer(open_output(&a.output, stdout)?);
        write_drift_header(&mut w)?;
        for (i, row) in coords.view().rows().into_iter().enumerate() {
            write_drift_row(&mut w, &baseline, i, &row.to_vec())?;
        }
        return w.flush().map_err(io_err);
    }

    let (Some(features), Some(model_path)) = (&a.features, &a.model) else {
        return Err(CliError::usage("score needs FEATURES with --model, or --embedding with --baseline"));
    };
    let (model, model_fp) = load_model(model_path)?;
    if let Some(b) = &baseline {
        check_model_binding(b, &model_fp)?;
        if b.n_dims() != model.n_components() {
            return Err(CliError::data(format!(
                "baseline has {} dimensions but the model produces {}",
                b.n_dims(),
                model.n_components()
            )));
        }
    }
    let label_cols = list(&a.label_cols, cfg, "label-cols");
    stream(features, &model, baseline.as_ref(), &label_cols, &a.output, stdout)
}

/// Project one row at a time so memory does not grow with the input.
fn stream(
    features: &Path,
    model: &KpcaModel,
    baseline: Option<&BaselineModel>,
    label_cols: &[String],
    output: &Path,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let file = std::fs::File::open(features)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", features.display())))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(std::io::BufReader::new(file));
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let feature_cols: Vec<usize> = match &model.feature_names {
        Some(names) => names
            .iter()
            .map(|n| {
                headers
                    .iter()
                    .position(|h| h == n)
                    .ok_or_else(|| CliError::data(format!("features lack the model column '{n}'")))
            })
            .collect::<CliResult<_>>()?,
        None => (0..headers.len())
            .filter(|&c| !label_cols.contains(&headers[c]) && !ID_COLUMNS.contains(&headers[c].as_str()))
            .collect(),
    };
    if feature_cols.len() != model.n_features() {
        return Err(CliError::data(format!(
            "model expects {} features, the table provides {}",
            model.n_features(),
            feature_cols.len()
        )));
    }
    let pass: Vec<usize> = (0..headers.len()).filter(|c| !feature_cols.contains(c)).collect();

    let mut w = csv::Writer::from_writer(open_output(output, stdout)?);
    match baseline {
        Some(_) => write_drift_header(&mut w)?,
        None => {
            let mut h: Vec<String> = (1..=model.n_components()).map(|k| format!("dim{k}")).collect();
            h.extend(pass.iter().map(|&c| headers[c].clone()));
            w.write_record(&h)?;
        }
    }
    let mut rec = csv::StringRecord::new();
    let mut raw = vec![0.0; feature_cols.len()];
    let mut i = 0;
    while rdr.read_record(&mut rec)? {
        for (v, &c) in raw.iter_mut().zip(&feature_cols) {
            *v = parse_cell(&rec[c], &headers[c], i)?;
        }
        let scores = model
            .project_row(&raw)
            .map_err(|e| CliError::from(e).context(format!("line {}", line_of(i))))?;
        match baseline {
            Some(b) => write_drift_row(&mut w, b, i, &scores)?,
            None => {
                let mut out: Vec<String> = scores.iter().map(|v| v.to_string()).collect();
                out.extend(pass.iter().map(|&c| rec[c].to_string()));
                w.write_record(&out)?;
            }
        }
        i += 1;
    }
    if i == 0 {
        return Err(CliError::data(format!("{}: no data rows", features.display())));
    }
    w.flush().map_err(io_err)
}
