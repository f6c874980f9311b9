//! Cluster separation measured with the Davies–Bouldin index.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2, ArrayView2};

use crate::{Error, Result};

/// Coordinates together with one group label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEmbedding {
    coords: Array2<f64>,
    labels: Vec<String>,
}

impl LabeledEmbedding {
    pub fn new(coords: Array2<f64>, labels: Vec<String>) -> Result<Self> {
        if coords.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: coords.nrows(),
                actual: labels.len(),
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("embedding contains non-finite values".into()));
        }
        Ok(Self { coords, labels })
    }

    pub fn coords(&self) -> ArrayView2<'_, f64> {
        self.coords.view()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Per-cluster centroid and mean distance of members to it, keyed by label.
pub fn cluster_summaries<L: Ord + Clone>(
    coords: ArrayView2<f64>,
    labels: &[L],
) -> Result<BTreeMap<L, (Array1<f64>, f64)>> {
    if coords.nrows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: coords.nrows(),
            actual: labels.len(),
        });
    }
    let mut members: BTreeMap<L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        members.entry(l.clone()).or_default().push(i);
    }
    Ok(members
        .into_iter()
        .map(|(l, idx)| {
            let mut centroid = Array1::zeros(coords.ncols());
            for &i in &idx {
                centroid += &coords.row(i);
            }
            centroid /= idx.len() as f64;
            let scatter = idx
                .iter()
                .map(|&i| euclid(coords.row(i).iter(), centroid.iter()))
                .sum::<f64>()
                / idx.len() as f64;
            (l, (centroid, scatter))
        })
        .collect())
}

fn euclid<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> f64 {
    a.zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Davies–Bouldin index of a labelled point set; lower means tighter,
/// better separated groups.
///
/// Scatter is the mean Euclidean distance of members to their centroid.
pub fn davies_bouldin_by<L: Ord + Clone>(coords: ArrayView2<f64>, labels: &[L]) -> Result<f64> {
    let clusters: Vec<(Array1<f64>, f64)> =
        cluster_summaries(coords, labels)?.into_values().collect();
    let k = clusters.len();
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "Davies-Bouldin needs at least 2 clusters, got {k}"
        )));
    }
    let mut total = 0.0;
    for (i, (ci, si)) in clusters.iter().enumerate() {
        let mut worst = f64::NEG_INFINITY;
        for (j, (cj, sj)) in clusters.iter().enumerate() {
            if i == j {
                continue;
            }
            let m = euclid(ci.iter(), cj.iter());
            if m == 0.0 {
                return Err(Error::Degenerate(format!(
                    "clusters {i} and {j} share a centroid; the index is undefined"
                )));
            }
            worst = worst.max((si + sj) / m);
        }
        total += worst;
    }
    Ok(total / k as f64)
}

pub fn davies_bouldin(e: &LabeledEmbedding) -> Result<f64> {
    davies_bouldin_by(e.coords(), e.labels())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn hand_computed_pair() {
        let x = array![[0.0, 0.0], [0.0, 2.0], [10.0, 0.0], [10.0, 2.0]];
        let db = davies_bouldin_by(x.view(), &[0, 0, 1, 1]).unwrap();
        assert!((db - 0.2).abs() <= 1e-15);
    }

    #[test]
    fn singletons_have_zero_index() {
        let x = array![[0.0], [1.0]];
        assert_eq!(davies_bouldin_by(x.view(), &["a", "b"]).unwrap(), 0.0);
    }

    #[test]
    fn three_clusters_take_the_worst_partner() {
        // Scatters 1, 1, 0; centroids at 0, 4, 100 on a line.
        let x = array![[-1.0], [1.0], [3.0], [5.0], [100.0]];
        let db = davies_bouldin_by(x.view(), &[0, 0, 1, 1, 2]).unwrap();
        let expected = (0.5 + 0.5 + 1.0 / 96.0) / 3.0;
        assert!((db - expected).abs() <= 1e-15);
    }

    #[test]
    fn errors() {
        let x = array![[0.0], [1.0]];
        assert!(davies_bouldin_by(x.view(), &[1, 1]).is_err());
        let y = array![[0.0], [1.0], [0.5], [0.5]];
        assert!(matches!(
            davies_bouldin_by(y.view(), &[0, 0, 1, 1]),
            Err(Error::Degenerate(_))
        ));
        assert!(davies_bouldin_by(x.view(), &[0]).is_err());
        assert!(LabeledEmbedding::new(array![[f64::NAN]], vec!["a".into()]).is_err());
    }

    #[test]
    fn label_type_does_not_matter() {
        let x = array![[0.0, 0.0], [0.0, 2.0], [10.0, 0.0], [10.0, 2.0]];
        let e = LabeledEmbedding::new(x.clone(), vec!["n".into(), "n".into(), "f".into(), "f".into()])
            .unwrap();
        assert_eq!(davies_bouldin(&e).unwrap(), davies_bouldin_by(x.view(), &[3, 3, 7, 7]).unwrap());
    }
}
