//! Drift scoring against a baseline of normal operation.
//!
//! A baseline summarises each normal cluster by its centroid and the 95th
//! percentile of member distances to that centroid. A point's drift score is
//! its distance to a centroid in units of that cluster's scale, minimised over
//! clusters, so a score of 1 sits on the shell that holds 95% of the normal
//! training points. Scores above the threshold raise an alarm.
//!
//! There is no notion of "fault" beyond this threshold; it is a calibration
//! knob, not a probability.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::metrics::cluster_summaries;
use crate::numerics::kmeans;
use crate::{Error, FeatureMatrix, Result};

pub const BASELINE_SCHEMA: &str = "baseline/v1";
pub const MIN_CLUSTER_SIZE: usize = 5;
pub const SCALE_PERCENTILE: f64 = 95.0;
pub const DEFAULT_THRESHOLD: f64 = 1.0;

/// How normal points are grouped into clusters.
#[derive(Debug, Clone, Copy)]
pub enum ClusterSpec<'a> {
    Labels(&'a [String]),
    KMeans { k: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineSource {
    LabelsGiven,
    KmeansDiscovered,
}

/// The embedding a baseline was learned in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingBinding {
    /// `kpca`, `tsne` or `external`.
    pub method: String,
    /// Fingerprint of the model that produced the coordinates, if any.
    pub model_fingerprint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub schema: String,
    #[serde(with = "crate::dense")]
    pub centroids: Array2<f64>,
    pub scales: Vec<f64>,
    pub cluster_labels: Vec<String>,
    pub source: BaselineSource,
    pub threshold: f64,
    pub binding: Option<EmbeddingBinding>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub scores: Vec<f64>,
    pub nearest_cluster: Vec<usize>,
    pub alarms: Vec<bool>,
    pub threshold: f64,
}

impl DriftReport {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn alarm_rate(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.alarms.iter().filter(|&&a| a).count() as f64 / self.len() as f64
    }
}

/// Linearly interpolated percentile (`q` in `[0, 100]`) of unsorted values.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty set");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Learn centroids and percentile scales from normal-operation coordinates.
pub fn fit_baseline(normal: ArrayView2<f64>, clusters: ClusterSpec<'_>) -> Result<BaselineModel> {
    if normal.nrows() == 0 || normal.ncols() == 0 {
        return Err(Error::InvalidInput("baseline needs a non-empty coordinate matrix".into()));
    }
    let (labels, source): (Vec<String>, _) = match clusters {
        ClusterSpec::Labels(l) => (l.to_vec(), BaselineSource::LabelsGiven),
        ClusterSpec::KMeans { k, seed } => {
            let fm = FeatureMatrix::new(normal.to_owned())?;
            let km = kmeans(&fm, k, seed)?;
            (
                km.assignments.iter().map(|a| a.to_string()).collect(),
                BaselineSource::KmeansDiscovered,
            )
        }
    };
    if labels.len() != normal.nrows() {
        return Err(Error::DimensionMismatch {
            expected: normal.nrows(),
            actual: labels.len(),
        });
    }
    // k-means labels are numeric strings; order them numerically.
    let summaries = cluster_summaries(normal, &labels)?;
    let mut order: Vec<String> = summaries.keys().cloned().collect();
    if source == BaselineSource::KmeansDiscovered {
        order.sort_by_key(|l| l.parse::<usize>().unwrap_or(usize::MAX));
    }

    let p = normal.ncols();
    let mut centroids = Array2::zeros((order.len(), p));
    let mut scales = Vec::with_capacity(order.len());
    for (c, label) in order.iter().enumerate() {
        let centroid = &summaries[label].0;
        centroids.row_mut(c).assign(centroid);
        let cvec = centroid.to_vec();
        let dists: Vec<f64> = labels
            .iter()
            .zip(normal.rows())
            .filter(|(l, _)| *l == label)
            .map(|(_, r)| euclid(&r.to_vec(), &cvec))
            .collect();
        if dists.len() < MIN_CLUSTER_SIZE {
            return Err(Error::InvalidInput(format!(
                "cluster '{label}' has {} member(s); at least {MIN_CLUSTER_SIZE} are required",
                dists.len()
            )));
        }
        let scale = percentile(&dists, SCALE_PERCENTILE);
        if !(scale > 0.0) {
            return Err(Error::Degenerate(format!(
                "cluster '{label}' has zero spread; its scale is undefined"
            )));
        }
        scales.push(scale);
    }
    Ok(BaselineModel {
        schema: BASELINE_SCHEMA.to_string(),
        centroids,
        scales,
        cluster_labels: order,
        source,
        threshold: DEFAULT_THRESHOLD,
        binding: None,
    })
}

impl BaselineModel {
    pub fn n_dims(&self) -> usize {
        self.centroids.ncols()
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(Error::InvalidInput(format!(
                "threshold must be positive, got {threshold}"
            )));
        }
        self.threshold = threshold;
        Ok(self)
    }

    pub fn with_binding(mut self, binding: EmbeddingBinding) -> Self {
        self.binding = Some(binding);
        self
    }

    /// Score and nearest cluster for one point.
    pub fn score_point(&self, point: &[f64]) -> Result<(f64, usize)> {
        if point.len() != self.n_dims() {
            return Err(Error::DimensionMismatch {
                expected: self.n_dims(),
                actual: point.len(),
            });
        }
        let mut best = (f64::INFINITY, 0);
        for (c, (centroid, &scale)) in self.centroids.rows().into_iter().zip(&self.scales).enumerate() {
            let s = euclid(point, centroid.as_slice().expect("standard layout")) / scale;
            if s < best.0 {
                best = (s, c);
            }
        }
        Ok(best)
    }

    pub fn drift_score(&self, coords: ArrayView2<f64>) -> Result<DriftReport> {
        let mut report = DriftReport {
            scores: Vec::with_capacity(coords.nrows()),
            nearest_cluster: Vec::with_capacity(coords.nrows()),
            alarms: Vec::with_capacity(coords.nrows()),
            threshold: self.threshold,
        };
        if coords.ncols() != self.n_dims() {
            return Err(Error::DimensionMismatch {
                expected: self.n_dims(),
                actual: coords.ncols(),
            });
        }
        for row in coords.rows() {
            let (s, c) = self.score_point(&row.to_vec())?;
            report.scores.push(s);
            report.nearest_cluster.push(c);
            report.alarms.push(s > self.threshold);
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("schema")
            .and_then(|s| s.as_str())
            .unwrap_or_default()
            .to_string();
        if found != BASELINE_SCHEMA {
            return Err(Error::Schema {
                expected: BASELINE_SCHEMA.into(),
                found,
            });
        }
        let m: BaselineModel = serde_json::from_value(value)?;
        let k = m.centroids.nrows();
        if k == 0 || m.scales.len() != k || m.cluster_labels.len() != k {
            return Err(Error::InvalidInput("inconsistent baseline: cluster count".into()));
        }
        if m.scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidInput("inconsistent baseline: non-positive scale".into()));
        }
        Ok(m)
    }
}
