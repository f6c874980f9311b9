use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::distance::sq_dist;
use super::FeatureMatrix;
use crate::{Error, Result};

/// Lloyd iteration budget.
pub const KMEANS_MAX_ITER: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// `k x d`.
    pub centroids: Array2<f64>,
    pub assignments: Vec<usize>,
    /// Sum of squared distances from each point to its assigned centroid.
    pub inertia: f64,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Number of times an empty cluster was re-seeded.
    pub empty_repairs: usize,
}

/// k-means with greedy k-means++ seeding and Lloyd refinement.
pub fn kmeans(x: &FeatureMatrix, k: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_with_budget(x, k, seed, KMEANS_MAX_ITER)
}

pub fn kmeans_with_budget(
    x: &FeatureMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<KMeansResult> {
    let n = x.n_rows();
    let d = x.n_cols();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "cluster count {k} must be in 1..={n}"
        )));
    }
    let data = x.as_array().as_standard_layout().into_owned();
    let flat = data.as_slice().expect("standard layout");
    let row = |i: usize| &flat[i * d..(i + 1) * d];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = plus_plus(flat, n, d, k, &mut rng);
    let mut centroids = vec![0.0; k * d];
    for (c, &i) in seeds.iter().enumerate() {
        centroids[c * d..(c + 1) * d].copy_from_slice(row(i));
    }

    let mut assignments = vec![usize::MAX; n];
    let mut dists = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut empty_repairs = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut changed = false;
        let mut inertia = 0.0;
        for i in 0..n {
            let (best, dist) = nearest(row(i), &centroids, k, d);
            if best != assignments[i] {
                changed = true;
                assignments[i] = best;
            }
            dists[i] = dist;
            inertia += dist;
        }
        history.push(inertia);
        if !changed {
            converged = true;
            break;
        }
        empty_repairs += update_centroids(flat, d, k, &mut assignments, &mut centroids);
    }
    if !converged {
        // Budget exhausted after an update step; reassign once more so the
        // reported assignment matches the reported centroids.
        for i in 0..n {
            let (best, dist) = nearest(row(i), &centroids, k, d);
            assignments[i] = best;
            dists[i] = dist;
        }
    }
    let inertia = dists.iter().sum();
    Ok(KMeansResult {
        centroids: Array2::from_shape_vec((k, d), centroids).expect("k x d"),
        assignments,
        inertia,
        inertia_history: history,
        iterations,
        converged,
        empty_repairs,
    })
}

fn nearest(p: &[f64], centroids: &[f64], k: usize, d: usize) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for c in 0..k {
        let dist = sq_dist(p, &centroids[c * d..(c + 1) * d]);
        if dist < best_d {
            best_d = dist;
            best = c;
        }
    }
    (best, best_d)
}

/// Recompute centroids as cluster means. An empty cluster takes over the
/// point lying farthest from its own (new) centroid. Returns the number of
/// repairs made.
fn update_centroids(
    flat: &[f64],
    d: usize,
    k: usize,
    assignments: &mut [usize],
    centroids: &mut [f64],
) -> usize {
    let n = assignments.len();
    let mut sums = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (i, &c) in assignments.iter().enumerate() {
        counts[c] += 1;
        for (s, v) in sums[c * d..(c + 1) * d].iter_mut().zip(&flat[i * d..(i + 1) * d]) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            for (dst, s) in centroids[c * d..(c + 1) * d]
                .iter_mut()
                .zip(&sums[c * d..(c + 1) * d])
            {
                *dst = s * inv;
            }
        }
    }
    let mut repairs = 0;
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = -1.0;
        for i in 0..n {
            let a = assignments[i];
            if counts[a] < 2 {
                continue;
            }
            let dist = sq_dist(&flat[i * d..(i + 1) * d], &centroids[a * d..(a + 1) * d]);
            if dist > far_d {
                far_d = dist;
                far = Some(i);
            }
        }
        if let Some(i) = far {
            counts[assignments[i]] -= 1;
            assignments[i] = c;
            counts[c] = 1;
            centroids[c * d..(c + 1) * d].copy_from_slice(&flat[i * d..(i + 1) * d]);
            repairs += 1;
        }
    }
    repairs
}

/// Greedy k-means++: each new centre is the best of a few D^2-weighted
/// candidates.
fn plus_plus(flat: &[f64], n: usize, d: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let row = |i: usize| &flat[i * d..(i + 1) * d];
    let trials = 2 + (k as f64).ln().floor() as usize;
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let first = rng.random_range(0..n);
    chosen.push(first);
    taken[first] = true;
    let mut closest: Vec<f64> = (0..n).map(|i| sq_dist(row(i), row(first))).collect();
    let mut candidate_d = vec![0.0; n];
    while chosen.len() < k {
        let total: f64 = closest.iter().sum();
        let pick = if total <= 0.0 {
            // All remaining points coincide with a centre.
            (0..n).find(|&i| !taken[i]).expect("k <= n")
        } else {
            let mut best = None;
            let mut best_pot = f64::INFINITY;
            for _ in 0..trials {
                let target = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut cand = n - 1;
                for (i, &c) in closest.iter().enumerate() {
                    acc += c;
                    if acc > target && c > 0.0 {
                        cand = i;
                        break;
                    }
                }
                while closest[cand] == 0.0 && cand > 0 {
                    cand -= 1;
                }
                let pot: f64 = (0..n)
                    .map(|i| closest[i].min(sq_dist(row(i), row(cand))))
                    .sum();
                if pot < best_pot {
                    best_pot = pot;
                    best = Some(cand);
                }
            }
            best.expect("at least one trial")
        };
        chosen.push(pick);
        taken[pick] = true;
        for i in 0..n {
            candidate_d[i] = sq_dist(row(i), row(pick));
        }
        for (c, nd) in closest.iter_mut().zip(&candidate_d) {
            if *nd < *c {
                *c = *nd;
            }
        }
    }
    chosen
}
