//! Exact t-SNE.
//!
//! Input affinities are Gaussian conditionals whose per-point bandwidths are
//! calibrated to a target perplexity, symmetrised into a joint distribution.
//! Output affinities use a Student-t kernel with one degree of freedom, and
//! the layout is found by momentum gradient descent on KL(P || Q) with an
//! early-exaggeration phase.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::numerics::pairwise_sq_dists;
use crate::{Error, FeatureMatrix, Result};

/// Entry floor for joint affinities.
pub const AFFINITY_FLOOR: f64 = 1e-12;

/// Perplexity tolerance the bandwidth search must reach.
pub const PERPLEXITY_TOL: f64 = 1e-3;

/// Bracket expansions (doublings or halvings of beta) before giving up.
const BRACKET_DOUBLINGS: usize = 50;

const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub learning_rate: f64,
    pub out_dims: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub early_exaggeration: f64,
    pub early_exaggeration_iters: usize,
    pub momentum_initial: f64,
    pub momentum_final: f64,
    pub momentum_switch_iter: usize,
    /// Record KL every this many iterations (0 disables the trace).
    pub kl_every: usize,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            learning_rate: 100.0,
            out_dims: 2,
            max_iter: 1000,
            seed: 0,
            early_exaggeration: 12.0,
            early_exaggeration_iters: 250,
            momentum_initial: 0.5,
            momentum_final: 0.8,
            momentum_switch_iter: 250,
            kl_every: 50,
        }
    }
}

impl TsneConfig {
    /// Checks that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.perplexity.is_finite() && self.perplexity > 1.0) {
            return bad(format!("perplexity must be > 1, got {}", self.perplexity));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if !matches!(self.out_dims, 2 | 3) {
            return bad(format!("output dimension must be 2 or 3, got {}", self.out_dims));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be >= 1".into());
        }
        if !(self.early_exaggeration >= 1.0) {
            return bad("early exaggeration factor must be >= 1".into());
        }
        for m in [self.momentum_initial, self.momentum_final] {
            if !(0.0..1.0).contains(&m) {
                return bad(format!("momentum must be in [0, 1), got {m}"));
            }
        }
        Ok(())
    }

    /// Checks against the number of observations.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if n < 4 {
            return Err(Error::InvalidInput(format!(
                "t-SNE needs at least 4 observations, got {n}"
            )));
        }
        if self.perplexity >= n as f64 {
            return Err(Error::InvalidInput(format!(
                "perplexity {} must be below the number of observations {n}",
                self.perplexity
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AffinityKind {
    /// Rows are distributions `p_{j|i}`.
    Conditional,
    /// One distribution over all ordered pairs.
    Joint,
}

#[derive(Debug, Clone)]
pub struct AffinityMatrix {
    pub values: Array2<f64>,
    pub kind: AffinityKind,
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// `n x out_dims`.
    pub coords: Array2<f64>,
    pub final_kl: f64,
    pub iterations_run: usize,
    /// `(iteration, KL)` samples taken against the unexaggerated P.
    pub kl_trace: Vec<(usize, f64)>,
}

/// Calibrated per-point bandwidths and the resulting conditional affinities.
#[derive(Debug, Clone)]
pub struct Calibration {
    /// `sigma_i`, with `beta_i = 1 / (2 sigma_i^2)`.
    pub sigmas: Vec<f64>,
    pub betas: Vec<f64>,
    pub affinities: AffinityMatrix,
}

/// Entropy (nats) and normalised row for precision `beta`.
fn row_distribution(dists: &[f64], skip: usize, beta: f64, out: &mut [f64]) -> f64 {
    let dmin = dists
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .fold(f64::INFINITY, |m, (_, &d)| m.min(d));
    let mut sum = 0.0;
    for (j, (&d, o)) in dists.iter().zip(out.iter_mut()).enumerate() {
        *o = if j == skip {
            0.0
        } else {
            (-beta * (d - dmin)).exp()
        };
        sum += *o;
    }
    let mut h = 0.0;
    for (j, o) in out.iter_mut().enumerate() {
        if j == skip {
            continue;
        }
        *o /= sum;
        if *o > 0.0 {
            h -= *o * o.ln();
        }
    }
    h
}

/// Find, for each row of the squared-distance matrix, the Gaussian precision
/// whose conditional distribution has the requested perplexity
/// (`2^H` with `H` in bits), by bracketing and bisection on `beta`.
pub fn calibrate_sigmas(d: ArrayView2<f64>, perplexity: f64) -> Result<Calibration> {
    let n = d.nrows();
    if d.ncols() != n {
        return Err(Error::InvalidInput("distance matrix must be square".into()));
    }
    if !(perplexity > 1.0 && perplexity < n as f64) {
        return Err(Error::InvalidInput(format!(
            "perplexity {perplexity} must lie strictly between 1 and {n}"
        )));
    }
    let target = perplexity.ln();
    let mut p = Array2::zeros((n, n));
    let mut betas = vec![0.0; n];
    let mut row = vec![0.0; n];
    for i in 0..n {
        let dists: Vec<f64> = d.row(i).to_vec();
        let spread = {
            let others: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dists[j]).collect();
            let lo = others.iter().cloned().fold(f64::INFINITY, f64::min);
            let mean = others.iter().sum::<f64>() / others.len() as f64;
            mean - lo
        };
        if spread <= 0.0 {
            // Every neighbour is equally far: the row is uniform for any
            // bandwidth and its perplexity is pinned at n - 1.
            let u = 1.0 / (n - 1) as f64;
            for j in 0..n {
                p[[i, j]] = if j == i { 0.0 } else { u };
            }
            betas[i] = 1.0;
            continue;
        }
        let mut beta = 1.0 / spread;
        let entropy = |b: f64, out: &mut [f64]| row_distribution(&dists, i, b, out);

        // Entropy decreases in beta; find [lo, hi] with H(lo) >= target >= H(hi).
        let mut h = entropy(beta, &mut row);
        let (mut lo, mut hi);
        if h > target {
            lo = beta;
            let mut steps = 0;
            loop {
                beta *= 2.0;
                steps += 1;
                h = entropy(beta, &mut row);
                if h <= target {
                    hi = beta;
                    break;
                }
                lo = beta;
                if steps >= BRACKET_DOUBLINGS {
                    return Err(Error::PerplexityBracket { row: i });
                }
            }
        } else {
            hi = beta;
            let mut steps = 0;
            loop {
                beta *= 0.5;
                steps += 1;
                h = entropy(beta, &mut row);
                if h >= target {
                    lo = beta;
                    break;
                }
                hi = beta;
                if steps >= BRACKET_DOUBLINGS {
                    return Err(Error::PerplexityBracket { row: i });
                }
            }
        }
        let mut best = beta;
        for _ in 0..200 {
            if (h.exp() - perplexity).abs() <= 0.01 * PERPLEXITY_TOL {
                break;
            }
            beta = 0.5 * (lo + hi);
            h = entropy(beta, &mut row);
            best = beta;
            if h > target {
                lo = beta;
            } else {
                hi = beta;
            }
        }
        let h = entropy(best, &mut row);
        if (h.exp() - perplexity).abs() > PERPLEXITY_TOL {
            return Err(Error::PerplexityBracket { row: i });
        }
        betas[i] = best;
        p.row_mut(i).assign(&ndarray::ArrayView1::from(&row[..]));
    }
    let sigmas = betas.iter().map(|b| (0.5 / b).sqrt()).collect();
    Ok(Calibration {
        sigmas,
        betas,
        affinities: AffinityMatrix {
            values: p,
            kind: AffinityKind::Conditional,
        },
    })
}

/// Perplexity `2^H(P_i)` of each row of a conditional affinity matrix.
pub fn row_perplexities(p: &AffinityMatrix) -> Vec<f64> {
    p.values
        .rows()
        .into_iter()
        .map(|r| {
            let h: f64 = r.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
            h.exp()
        })
        .collect()
}

/// `p_ij = (p_{j|i} + p_{i|j}) / 2n`, floored at [`AFFINITY_FLOOR`] off the
/// diagonal.
pub fn symmetrize(p: &AffinityMatrix) -> AffinityMatrix {
    let n = p.values.nrows();
    let scale = 1.0 / (2.0 * n as f64);
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[[i, j]] = ((p.values[[i, j]] + p.values[[j, i]]) * scale).max(AFFINITY_FLOOR);
            }
        }
    }
    AffinityMatrix {
        values: out,
        kind: AffinityKind::Joint,
    }
}

/// Student-t joint affinities of a layout, plus the unnormalised kernel
/// values `(1 + |y_i - y_j|^2)^-1` (zero on the diagonal).
pub fn low_dim_affinities(y: ArrayView2<f64>) -> (AffinityMatrix, Array2<f64>) {
    let n = y.nrows();
    let mut num = Array2::zeros((n, n));
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = y
                .row(i)
                .iter()
                .zip(y.row(j).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let v = 1.0 / (1.0 + d2);
            num[[i, j]] = v;
            num[[j, i]] = v;
            total += 2.0 * v;
        }
    }
    let q = num.mapv(|v| if v == 0.0 { 0.0 } else { (v / total).max(AFFINITY_FLOOR) });
    let mut q = q;
    for i in 0..n {
        q[[i, i]] = 0.0;
    }
    (
        AffinityMatrix {
            values: q,
            kind: AffinityKind::Joint,
        },
        num,
    )
}

/// `sum_{i != j} p_ij ln(p_ij / q_ij)`.
pub fn kl_divergence(p: &AffinityMatrix, q: &AffinityMatrix) -> f64 {
    let mut kl = 0.0;
    for ((i, j), &pij) in p.values.indexed_iter() {
        if i == j || pij <= 0.0 {
            continue;
        }
        let qij = q.values[[i, j]].max(AFFINITY_FLOOR);
        kl += pij * (pij / qij).ln();
    }
    kl.max(0.0)
}

/// Gradient of KL(P || Q(Y)) with respect to the layout, and the KL itself:
/// `dC/dy_i = 4 sum_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1`.
pub fn kl_gradient(p: &AffinityMatrix, y: ArrayView2<f64>) -> (Array2<f64>, f64) {
    let y = y.as_standard_layout();
    let n = y.nrows();
    let mut grad = Array2::zeros(y.raw_dim());
    let mut num = vec![0.0; n * n];
    let pv = p.values.as_standard_layout();
    gradient_into(
        pv.as_slice().expect("standard layout"),
        1.0,
        y.as_slice().expect("standard layout"),
        y.ncols(),
        grad.as_slice_mut().expect("fresh array"),
        &mut num,
    );
    let (q, _) = low_dim_affinities(y.view());
    (grad, kl_divergence(p, &q))
}

/// Gradient of KL(scale * P || Q) written into `grad`; `num` is scratch of
/// length `n * n`.
fn gradient_into(p: &[f64], scale: f64, y: &[f64], dims: usize, grad: &mut [f64], num: &mut [f64]) {
    let n = y.len() / dims;
    let mut total = 0.0;
    for i in 0..n {
        let yi = &y[i * dims..(i + 1) * dims];
        num[i * n + i] = 0.0;
        for j in (i + 1)..n {
            let yj = &y[j * dims..(j + 1) * dims];
            let d2: f64 = yi.iter().zip(yj).map(|(a, b)| (a - b) * (a - b)).sum();
            let v = 1.0 / (1.0 + d2);
            num[i * n + j] = v;
            num[j * n + i] = v;
            total += 2.0 * v;
        }
    }
    grad.fill(0.0);
    for i in 0..n {
        let (prow, nrow) = (&p[i * n..(i + 1) * n], &num[i * n..(i + 1) * n]);
        let yi = &y[i * dims..(i + 1) * dims];
        let gi = &mut grad[i * dims..(i + 1) * dims];
        for j in 0..n {
            if j == i {
                continue;
            }
            let q = (nrow[j] / total).max(AFFINITY_FLOOR);
            let w = 4.0 * (scale * prow[j] - q) * nrow[j];
            let yj = &y[j * dims..(j + 1) * dims];
            for k in 0..dims {
                gi[k] += w * (yi[k] - yj[k]);
            }
        }
    }
}

/// Perturb exact duplicate rows so every bandwidth search is well posed.
fn jitter_duplicates(x: &FeatureMatrix, seed: u64) -> FeatureMatrix {
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut data = x.as_array().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut touched = false;
    for i in 0..data.nrows() {
        let key: Vec<u64> = data.row(i).iter().map(|v| v.to_bits()).collect();
        if seen.insert(key, i).is_some() {
            touched = true;
            for v in data.row_mut(i).iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *v += JITTER * z;
            }
        }
    }
    if touched {
        FeatureMatrix::new(data).expect("finite")
    } else {
        x.clone()
    }
}

/// Stateful optimizer; [`tsne_fit`] drives it to completion, interactive
/// callers can step it.
#[derive(Debug, Clone)]
pub struct TsneOptimizer {
    cfg: TsneConfig,
    p: AffinityMatrix,
    y: Array2<f64>,
    update: Array2<f64>,
    grad: Array2<f64>,
    scratch: Vec<f64>,
    iter: usize,
    kl_trace: Vec<(usize, f64)>,
}

impl TsneOptimizer {
    pub fn new(x: &FeatureMatrix, cfg: TsneConfig) -> Result<Self> {
        cfg.validate_for(x.n_rows())?;
        let x = jitter_duplicates(x, cfg.seed);
        let d = pairwise_sq_dists(&x);
        let cal = calibrate_sigmas(d.view(), cfg.perplexity)?;
        let p = symmetrize(&cal.affinities);
        let n = x.n_rows();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let y = Array2::from_shape_simple_fn((n, cfg.out_dims), || {
            let z: f64 = StandardNormal.sample(&mut rng);
            1e-4 * z
        });
        Ok(Self {
            update: Array2::zeros((n, cfg.out_dims)),
            grad: Array2::zeros((n, cfg.out_dims)),
            scratch: vec![0.0; n * n],
            cfg,
            p,
            y,
            iter: 0,
            kl_trace: Vec::new(),
        })
    }

    pub fn joint_p(&self) -> &AffinityMatrix {
        &self.p
    }

    pub fn coords(&self) -> &Array2<f64> {
        &self.y
    }

    pub fn iteration(&self) -> usize {
        self.iter
    }

    pub fn is_done(&self) -> bool {
        self.iter >= self.cfg.max_iter
    }

    pub fn kl(&self) -> f64 {
        let (q, _) = low_dim_affinities(self.y.view());
        kl_divergence(&self.p, &q)
    }

    /// One gradient step. Returns an error if the layout blows up.
    pub fn step(&mut self) -> Result<()> {
        let cfg = &self.cfg;
        let exaggerate = self.iter < cfg.early_exaggeration_iters;
        let momentum = if self.iter < cfg.momentum_switch_iter {
            cfg.momentum_initial
        } else {
            cfg.momentum_final
        };
        let scale = if exaggerate { cfg.early_exaggeration } else { 1.0 };
        gradient_into(
            self.p.values.as_slice().expect("standard layout"),
            scale,
            self.y.as_slice().expect("standard layout"),
            cfg.out_dims,
            self.grad.as_slice_mut().expect("standard layout"),
            &mut self.scratch,
        );
        let lr = cfg.learning_rate;
        for ((u, y), g) in self.update.iter_mut().zip(self.y.iter_mut()).zip(self.grad.iter()) {
            *u = momentum * *u - lr * g;
            *y += *u;
        }
        let means = self.y.mean_axis(ndarray::Axis(0)).expect("n >= 1");
        self.y -= &means;
        self.iter += 1;
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                iteration: self.iter,
            });
        }
        if cfg.kl_every > 0 && self.iter.is_multiple_of(cfg.kl_every) {
            let kl = self.kl();
            self.kl_trace.push((self.iter, kl));
        }
        Ok(())
    }

    pub fn finish(self) -> Embedding {
        let final_kl = self.kl();
        Embedding {
            coords: self.y,
            final_kl,
            iterations_run: self.iter,
            kl_trace: self.kl_trace,
        }
    }
}

/// Embed the rows of `x` with exact t-SNE.
pub fn tsne_fit(x: &FeatureMatrix, cfg: &TsneConfig) -> Result<Embedding> {
    let mut opt = TsneOptimizer::new(x, cfg.clone())?;
    while !opt.is_done() {
        opt.step()?;
    }
    Ok(opt.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{blobs, gaussian_matrix, BlobSpec};
    use ndarray::array;

    #[test]
    fn equidistant_points_are_uniform() {
        let d = array![[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        for perp in [1.2, 1.7, 2.0, 2.9] {
            let p = calibrate_sigmas(d.view(), perp).unwrap().affinities.values;
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 0.0 } else { 0.5 };
                    assert!((p[[i, j]] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn calibration_hits_target_and_matches_grid_search() {
        let x = gaussian_matrix(10, 3, 2);
        let d = pairwise_sq_dists(&x);
        let cal = calibrate_sigmas(d.view(), 5.0).unwrap();
        for (i, perp) in row_perplexities(&cal.affinities).iter().enumerate() {
            assert!((perp - 5.0).abs() <= PERPLEXITY_TOL, "row {i}: {perp}");
            let s: f64 = cal.affinities.values.row(i).sum();
            assert!((s - 1.0).abs() <= 1e-8);
        }
        // Independent grid search over log(beta).
        for i in 0..10 {
            let row = d.row(i);
            let mut best = (f64::INFINITY, 0.0);
            for g in 0..20_001 {
                let beta = 10f64.powf(-4.0 + 8.0 * g as f64 / 20_000.0);
                let w: Vec<f64> = (0..10)
                    .map(|j| if j == i { 0.0 } else { (-beta * row[j]).exp() })
                    .collect();
                let z: f64 = w.iter().sum();
                let h: f64 = w
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|&v| -(v / z) * (v / z).ln())
                    .sum();
                let err = (h.exp() - 5.0).abs();
                if err < best.0 {
                    best = (err, beta);
                }
            }
            let rel = (best.1 - cal.betas[i]).abs() / cal.betas[i];
            assert!(rel < 2e-3, "row {i}: grid {} vs {}", best.1, cal.betas[i]);
        }
    }

    #[test]
    fn tight_pairs() {
        let x = FeatureMatrix::from_rows(&[
            [0.0, 0.0],
            [0.01, 0.0],
            [100.0, 0.0],
            [100.0, 0.01],
        ])
        .unwrap();
        let d = pairwise_sq_dists(&x);
        let cal = calibrate_sigmas(d.view(), 1.5).unwrap();
        let p = &cal.affinities.values;
        // Perplexity 1.5 forces some mass onto the two far points, but the
        // near twin keeps most of it.
        assert!(p[[0, 1]] > 0.85 && p[[1, 0]] > 0.85);
        assert!(p[[2, 3]] > 0.85 && p[[3, 2]] > 0.85);
        assert!((p[[0, 2]] / p[[0, 3]] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn perplexity_out_of_range() {
        let d = Array2::<f64>::zeros((4, 4));
        assert!(calibrate_sigmas(d.view(), 1.0).is_err());
        assert!(calibrate_sigmas(d.view(), 4.0).is_err());
    }

    #[test]
    fn symmetrization() {
        let x = gaussian_matrix(4, 2, 8);
        let cal = calibrate_sigmas(pairwise_sq_dists(&x).view(), 2.0).unwrap();
        let p = &cal.affinities.values;
        let joint = symmetrize(&cal.affinities);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let want = ((p[[i, j]] + p[[j, i]]) / 8.0).max(AFFINITY_FLOOR);
                    assert!((joint.values[[i, j]] - want).abs() <= 1e-15);
                }
            }
        }
        assert!((joint.values.sum() - 1.0).abs() <= 1e-10);
        assert_eq!(joint.values, joint.values.t());

        let sym = AffinityMatrix {
            values: array![[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]],
            kind: AffinityKind::Conditional,
        };
        let j = symmetrize(&sym);
        assert!((j.values[[0, 1]] - 0.5 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn student_t_affinities() {
        let (q, num) = low_dim_affinities(array![[0.0, 0.0], [1.0, 0.0]].view());
        assert_eq!(q.values, array![[0.0, 0.5], [0.5, 0.0]]);
        assert_eq!(num[[0, 1]], 0.5);

        let h = 3f64.sqrt() / 2.0;
        let (q, _) = low_dim_affinities(array![[0.0, 0.0], [1.0, 0.0], [0.5, h]].view());
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!((q.values[[i, j]] - 1.0 / 6.0).abs() < 1e-12);
                }
            }
        }

        let y = gaussian_matrix(6, 2, 13).into_array();
        let (q, _) = low_dim_affinities(y.view());
        let mut z = 0.0;
        for k in 0..6 {
            for l in 0..6 {
                if k != l {
                    z += 1.0 / (1.0 + (&y.row(k) - &y.row(l)).mapv(|v| v * v).sum());
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    let direct = 1.0 / (1.0 + (&y.row(i) - &y.row(j)).mapv(|v| v * v).sum()) / z;
                    assert!((q.values[[i, j]] - direct).abs() <= 1e-12);
                }
            }
        }
        assert!((q.values.sum() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn kl_values() {
        let u = AffinityMatrix {
            values: array![[0.0, 0.25, 0.25], [0.25, 0.0, 0.0], [0.25, 0.0, 0.0]],
            kind: AffinityKind::Joint,
        };
        assert_eq!(kl_divergence(&u, &u), 0.0);

        let p = AffinityMatrix {
            values: array![[0.0, 0.2, 0.1], [0.2, 0.0, 0.2], [0.1, 0.2, 0.0]],
            kind: AffinityKind::Joint,
        };
        let q = AffinityMatrix {
            values: array![[0.0, 0.1, 0.15], [0.1, 0.0, 0.25], [0.15, 0.25, 0.0]],
            kind: AffinityKind::Joint,
        };
        let hand = 2.0
            * (0.2 * (0.2f64 / 0.1).ln()
                + 0.1 * (0.1f64 / 0.15).ln()
                + 0.2 * (0.2f64 / 0.25).ln());
        assert!((kl_divergence(&p, &q) - hand).abs() <= 1e-12);
    }

    #[test]
    fn config_validation() {
        let cfg = TsneConfig {
            perplexity: 10.0,
            ..TsneConfig::default()
        };
        assert!(cfg.validate_for(10).is_err());
        assert!(cfg.validate_for(11).is_ok());
        assert!(cfg.validate_for(3).is_err());
        let cfg = TsneConfig {
            out_dims: 4,
            ..TsneConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn separates_two_blobs() {
        let spec = BlobSpec::line(2, 10, 5, 12.0, 1.0);
        let (x, labels) = blobs(&spec, 3);
        let cfg = TsneConfig {
            perplexity: 5.0,
            // Twelve-fold exaggeration overshoots at n = 20 with the default rate.
            learning_rate: 10.0,
            max_iter: 500,
            seed: 1,
            ..TsneConfig::default()
        };
        let e = tsne_fit(&x, &cfg).unwrap();
        let y = &e.coords;
        let centroid = |c: usize| {
            let rows: Vec<usize> = (0..20).filter(|&i| labels[i] == c).collect();
            let mut m = [0.0; 2];
            for &i in &rows {
                m[0] += y[[i, 0]] / rows.len() as f64;
                m[1] += y[[i, 1]] / rows.len() as f64;
            }
            m
        };
        let cs = [centroid(0), centroid(1)];
        for i in 0..20 {
            let d = |c: &[f64; 2]| (y[[i, 0]] - c[0]).powi(2) + (y[[i, 1]] - c[1]).powi(2);
            let nearest = if d(&cs[0]) <= d(&cs[1]) { 0 } else { 1 };
            assert_eq!(nearest, labels[i], "point {i}: {:?} {:?}", y.row(i), cs);
        }
        assert!(e.final_kl >= 0.0);
        let at100 = e.kl_trace.iter().find(|(it, _)| *it == 100).unwrap().1;
        assert!(e.final_kl < at100);
    }

    #[test]
    fn deterministic_and_centered() {
        let x = gaussian_matrix(12, 3, 21);
        let cfg = TsneConfig {
            perplexity: 3.0,
            max_iter: 120,
            seed: 9,
            ..TsneConfig::default()
        };
        let a = tsne_fit(&x, &cfg).unwrap();
        let b = tsne_fit(&x, &cfg).unwrap();
        assert_eq!(a.coords, b.coords);
        for m in a.coords.mean_axis(ndarray::Axis(0)).unwrap().iter() {
            assert!(m.abs() < 1e-10);
        }
        assert_eq!(a.iterations_run, 120);
    }

    #[test]
    fn duplicate_rows_are_tolerated() {
        let mut rows: Vec<Vec<f64>> = gaussian_matrix(10, 3, 4)
            .as_array()
            .rows()
            .into_iter()
            .map(|r| r.to_vec())
            .collect();
        rows.push(rows[0].clone());
        rows.push(rows[1].clone());
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let cfg = TsneConfig {
            perplexity: 4.0,
            max_iter: 50,
            ..TsneConfig::default()
        };
        assert!(tsne_fit(&x, &cfg).is_ok());
    }
}
