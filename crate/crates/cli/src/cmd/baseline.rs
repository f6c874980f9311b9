use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use sensormap::detect::{fit_baseline, ClusterSpec, EmbeddingBinding, DEFAULT_THRESHOLD};

use super::{list, require};
use crate::config::Config;
use crate::error::{read_file, write_file, CliError, CliResult};
use crate::meta::{fingerprint, EmbeddingMeta};
use crate::table::{io_err, RowFilter, Table};

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Embedding CSV produced by `fit`.
    pub embedding: PathBuf,
    /// Baseline JSON to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Group normal rows by this column.
    #[arg(long, conflicts_with = "clusters")]
    pub label_col: Option<String>,
    /// Discover this many normal clusters with k-means [default: 1].
    #[arg(long)]
    pub clusters: Option<usize>,
    /// Keep only rows matching e.g. `cycle<=60` as normal.
    #[arg(long)]
    pub normal_where: Option<String>,
    /// Alarm when the drift score exceeds this.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Coordinate columns [default: every dimN column].
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Where an embedding came from, as far as its sidecar can vouch for it.
pub fn binding_for(embedding: &std::path::Path) -> CliResult<EmbeddingBinding> {
    let external = EmbeddingBinding { method: "external".into(), model_fingerprint: None };
    let Some(meta) = EmbeddingMeta::find(embedding)? else {
        return Ok(external);
    };
    if fingerprint(read_file(embedding)?.as_bytes()) != meta.embedding_fingerprint {
        log::warn!("{} changed since it was written; treating it as external", embedding.display());
        return Ok(external);
    }
    Ok(if meta.is_kpca() {
        EmbeddingBinding { method: "kpca".into(), model_fingerprint: meta.model_fingerprint }
    } else {
        EmbeddingBinding { method: meta.method, model_fingerprint: Some(meta.embedding_fingerprint) }
    })
}

pub fn run(a: BaselineArgs, cfg: &Config, stdout: &mut dyn Write) -> CliResult<()> {
    let label_col = cfg.pick_opt(a.label_col.clone(), "label-col")?;
    let clusters = cfg.pick_opt(a.clusters, "clusters")?;
    require(label_col.is_none() || clusters.is_none(), || {
        "give either a label column or a cluster count, not both".into()
    })?;
    let clusters = clusters.unwrap_or(1);
    require(clusters >= 1, || "clusters must be >= 1".into())?;
    let threshold = cfg.pick(a.threshold, "threshold", DEFAULT_THRESHOLD)?;
    require(threshold.is_finite() && threshold > 0.0, || format!("threshold must be positive, got {threshold}"))?;
    let filter: Option<RowFilter> = cfg.pick_opt(a.normal_where.clone(), "normal-where")?.map(|s| s.parse()).transpose()?;
    let seed = cfg.pick(a.seed, "seed", 0u64)?;
    let dims = list(&a.dims, cfg, "dims");

    let table = Table::read(&a.embedding)?;
    let table = match &filter {
        Some(f) => table.keep_rows(&f.mask(&table)?),
        None => table,
    };
    if table.rows.is_empty() {
        return Err(CliError::data("no rows left after the normal-row filter"));
    }
    let cols = table.dims(if dims.is_empty() { None } else { Some(&dims) })?;
    let coords = table.matrix(&cols)?;
    let labels = match &label_col {
        Some(l) => Some(table.strings(table.column(l)?)),
        None => None,
    };
    let spec = match &labels {
        Some(l) => ClusterSpec::Labels(l),
        None => ClusterSpec::KMeans { k: clusters, seed },
    };
    let model = fit_baseline(coords.view(), spec)?
        .with_threshold(threshold)?
        .with_binding(binding_for(&a.embedding)?);
    write_file(&a.output, model.to_json()?.as_bytes())?;
    writeln!(
        stdout,
        "baseline: {} cluster(s) from {} normal row(s), threshold {}",
        model.cluster_labels.len(),
        coords.n_rows(),
        model.threshold
    )
    .map_err(io_err)?;
    for (l, s) in model.cluster_labels.iter().zip(&model.scales) {
        writeln!(stdout, "  {l}: scale {s}").map_err(io_err)?;
    }
    Ok(())
}
