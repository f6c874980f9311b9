use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use ndarray::Array2;
use sensormap::kpca::{kpca_fit_exact, kpca_fit_nystrom, KernelChoice, KpcaConfig};
use sensormap::tsne::{tsne_fit, TsneConfig};

use super::{as_usage, list, require};
use crate::config::Config;
use crate::error::{write_file, CliError, CliResult};
use crate::meta::{fingerprint, sidecar, EmbeddingMeta, EMBEDDING_META_SCHEMA};
use crate::table::{io_err, open_output, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Tsne,
    KpcaExact,
    KpcaNystrom,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Tsne => "tsne",
            Method::KpcaExact => "kpca-exact",
            Method::KpcaNystrom => "kpca-nystrom",
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Method as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Rbf,
    Linear,
}

impl FromStr for KernelArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <KernelArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Feature table (CSV with a header row).
    pub features: PathBuf,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Embedding CSV to write (`-` for stdout).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Kernel PCA model file [default: OUTPUT.model.json].
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Columns to carry through instead of embedding (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub label_cols: Vec<String>,
    #[arg(long)]
    pub perplexity: Option<f64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Output dimensions.
    #[arg(long)]
    pub components: Option<usize>,
    /// Nyström landmark count.
    #[arg(long)]
    pub landmarks: Option<usize>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// RBF bandwidth; the median heuristic is used when absent.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Standardize feature columns first.
    #[arg(long)]
    pub standardize: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
}

enum Plan {
    Tsne(TsneConfig),
    Kpca { cfg: KpcaConfig, landmarks: Option<usize>, seed: u64 },
}

fn plan(a: &FitArgs, cfg: &Config) -> CliResult<(Method, Plan, bool)> {
    let method = cfg
        .pick_opt(a.method, "method")?
        .ok_or_else(|| CliError::usage("fit needs --method tsne|kpca-exact|kpca-nystrom"))?;
    let seed = cfg.pick(a.seed, "seed", 0u64)?;
    let components = cfg.pick(a.components, "components", 2usize)?;
    let standardize = cfg.pick(a.standardize, "standardize", true)?;
    require(components >= 1, || "components must be >= 1".into())?;
    let plan = match method {
        Method::Tsne => {
            let d = TsneConfig::default();
            let t = TsneConfig {
                perplexity: cfg.pick(a.perplexity, "perplexity", d.perplexity)?,
                learning_rate: cfg.pick(a.learning_rate, "learning-rate", d.learning_rate)?,
                max_iter: cfg.pick(a.iterations, "iterations", d.max_iter)?,
                out_dims: components,
                seed,
                ..d
            };
            t.validate().map_err(as_usage)?;
            Plan::Tsne(t)
        }
        Method::KpcaExact | Method::KpcaNystrom => {
            let kernel = match (cfg.pick(a.kernel, "kernel", KernelArg::Rbf)?, cfg.pick_opt(a.gamma, "gamma")?) {
                (KernelArg::Linear, Some(_)) => {
                    return Err(CliError::usage("--gamma only applies to the rbf kernel"))
                }
                (KernelArg::Linear, None) => KernelChoice::Linear,
                (KernelArg::Rbf, None) => KernelChoice::RbfMedian,
                (KernelArg::Rbf, Some(g)) => {
                    require(g.is_finite() && g > 0.0, || format!("gamma must be positive, got {g}"))?;
                    KernelChoice::Rbf(g)
                }
            };
            let landmarks = if method == Method::KpcaNystrom {
                let c = cfg.pick(a.landmarks, "landmarks", 100usize)?;
                require(c >= components, || {
                    format!("landmarks ({c}) must be at least the component count ({components})")
                })?;
                Some(c)
            } else {
                None
            };
            Plan::Kpca {
                cfg: KpcaConfig { components, kernel, standardize },
                landmarks,
                seed,
            }
        }
    };
    Ok((method, plan, standardize))
}

pub fn run(a: FitArgs, cfg: &Config, stdout: &mut dyn Write) -> CliResult<()> {
    let (method, plan, standardize) = plan(&a, cfg)?;
    let to_stdout = a.output.as_os_str() == "-";
    let model_path = match (&plan, &a.model) {
        (Plan::Tsne(_), Some(_)) => return Err(CliError::usage("t-SNE produces no model; drop --model")),
        (Plan::Tsne(_), None) => None,
        (Plan::Kpca { .. }, Some(p)) => Some(p.clone()),
        (Plan::Kpca { .. }, None) if to_stdout => {
            return Err(CliError::usage("writing the embedding to stdout needs --model"))
        }
        (Plan::Kpca { .. }, None) => Some(sidecar(&a.output, ".model.json")),
    };
    let label_cols = list(&a.label_cols, cfg, "label-cols");

    let table = Table::read(&a.features)?;
    let (feats, pass) = table.split_features(&label_cols)?;
    let x = table.matrix(&feats)?;
    let n = x.n_rows();

    let (coords, model_text): (Array2<f64>, Option<String>) = match plan {
        Plan::Tsne(t) => {
            t.validate_for(n).map_err(as_usage)?;
            let x = if standardize { sensormap::numerics::standardize(&x).0 } else { x };
            (tsne_fit(&x, &t)?.coords, None)
        }
        Plan::Kpca { cfg: k, landmarks, seed } => {
            require(k.components <= n, || format!("cannot extract {} components from {n} rows", k.components))?;
            let fit = match landmarks {
                None => kpca_fit_exact(&x, &k)?,
                Some(c) => {
                    require(c <= n, || format!("landmarks ({c}) exceed the row count ({n})"))?;
                    kpca_fit_nystrom(&x, c, &k, seed)?
                }
            };
            if fit.model.dropped_components > 0 {
                log::warn!(
                    "{} requested component(s) had non-positive eigenvalues and were dropped",
                    fit.model.dropped_components
                );
            }
            (fit.scores, Some(fit.model.to_json()?))
        }
    };

    let mut buf = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=coords.ncols()).map(|k| format!("dim{k}")).collect();
    header.extend(pass.iter().map(|&c| table.headers[c].clone()));
    buf.write_record(&header)?;
    for (i, row) in coords.rows().into_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.extend(pass.iter().map(|&c| table.rows[i][c].clone()));
        buf.write_record(&rec)?;
    }
    let csv_bytes = buf.into_inner().map_err(|e| CliError::usage(e.to_string()))?;

    let model_fingerprint = match (&model_path, &model_text) {
        (Some(p), Some(text)) => {
            write_file(p, text.as_bytes())?;
            Some(fingerprint(text.as_bytes()))
        }
        _ => None,
    };
    let mut out = open_output(&a.output, stdout)?;
    out.write_all(&csv_bytes).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    if !to_stdout {
        let meta = EmbeddingMeta {
            schema: EMBEDDING_META_SCHEMA.into(),
            method: method.name().into(),
            model_fingerprint,
            embedding_fingerprint: fingerprint(&csv_bytes),
        };
        write_file(
            &EmbeddingMeta::path_for(&a.output),
            serde_json::to_string_pretty(&meta)?.as_bytes(),
        )?;
    }
    Ok(())
}
