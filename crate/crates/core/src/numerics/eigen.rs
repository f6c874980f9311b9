//! Dense symmetric eigensolver.
//!
//! The matrix is reduced to tridiagonal form with Householder reflections,
//! eigenvalues come from implicit-shift QL, and eigenvectors are obtained one
//! of two ways:
//!
//! * inverse iteration on the tridiagonal for the requested top `k` pairs,
//!   followed by back-transformation through the stored reflectors. This is
//!   O(n^2 k) after the O(n^3) reduction.
//! * full QL with accumulated rotations, used for small problems, for large
//!   `k`, and whenever the inverse-iteration result fails its residual or
//!   orthogonality check.

use ndarray::{Array2, ArrayView2};

use crate::{Error, Result};

/// QL iterations allowed per eigenvalue before giving up.
const QL_BUDGET: usize = 60;

/// Below this size the full QL path is always used.
const FAST_PATH_MIN_N: usize = 64;

/// Top-`k` eigenpairs of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues, non-increasing.
    pub values: Vec<f64>,
    /// `n x k`, column `j` is the unit eigenvector for `values[j]`, with its
    /// largest-magnitude entry positive.
    pub vectors: Array2<f64>,
}

/// The `k` largest eigenpairs of the symmetric matrix `a`.
pub fn sym_eigen(a: ArrayView2<f64>, k: usize) -> Result<EigenResult> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "component count {k} must be in 1..={n}"
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let anorm = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    if asym > 1e-8 * anorm.max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }

    let mut work = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            work[i * n + j] = 0.5 * (a[[i, j]] + a[[j, i]]);
        }
    }
    let tri = Tridiagonal::reduce(work, n);

    let mut values = tri.diag.clone();
    let mut off = tri.off.clone();
    ql_implicit(&mut values, &mut off, None, n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    let top: Vec<f64> = order[..k].iter().map(|&i| values[i]).collect();

    let use_fast = n >= FAST_PATH_MIN_N && 4 * k <= n;
    let vectors = if use_fast {
        match tri.inverse_iteration(&top) {
            Some(v) if accept(a, &top, &v, anorm) => Some(v),
            _ => None,
        }
    } else {
        None
    };
    let (values, mut vectors) = match vectors {
        Some(v) => (top, v),
        None => tri.full_vectors(k)?,
    };
    fix_signs(&mut vectors);
    Ok(EigenResult { values, vectors })
}

/// Residual and orthogonality gate for the inverse-iteration path.
fn accept(a: ArrayView2<f64>, values: &[f64], vectors: &Array2<f64>, anorm: f64) -> bool {
    let n = a.nrows();
    let scale = anorm.max(1.0) * (n as f64).sqrt();
    for (j, &lambda) in values.iter().enumerate() {
        let v = vectors.column(j);
        let av = a.dot(&v);
        let res: f64 = av
            .iter()
            .zip(v.iter())
            .map(|(x, y)| (x - lambda * y).powi(2))
            .sum::<f64>()
            .sqrt();
        if !res.is_finite() || res > 1e-11 * scale {
            return false;
        }
        for i in 0..j {
            if vectors.column(i).dot(&v).abs() > 1e-10 {
                return false;
            }
        }
    }
    true
}

fn fix_signs(vectors: &mut Array2<f64>) {
    for mut col in vectors.columns_mut() {
        let mut best = 0.0_f64;
        let mut sign = 1.0;
        for &v in col.iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

/// `A = Q T Q^T` with `Q = H_0 H_1 ... H_{n-3}`.
struct Tridiagonal {
    n: usize,
    diag: Vec<f64>,
    /// `off[i] = T[i+1][i]`; the final entry is 0.
    off: Vec<f64>,
    /// Row `k` holds the Householder vector of `H_k` in columns `k+1..n`.
    reflectors: Vec<f64>,
    betas: Vec<f64>,
}

impl Tridiagonal {
    fn reduce(mut a: Vec<f64>, n: usize) -> Self {
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        let mut betas = vec![0.0; n.saturating_sub(2)];
        let mut p = vec![0.0; n];
        for k in 0..n.saturating_sub(2) {
            let start = k * n + k + 1;
            let m = n - k - 1;
            let x = &mut a[start..start + m];
            let sigma: f64 = x.iter().map(|v| v * v).sum();
            let norm = sigma.sqrt();
            diag[k] = a[k * n + k];
            if norm == 0.0 {
                off[k] = 0.0;
                continue;
            }
            let x = &mut a[start..start + m];
            let alpha = if x[0] > 0.0 { -norm } else { norm };
            x[0] -= alpha;
            let vtv = sigma - 2.0 * alpha * (x[0] + alpha) + alpha * alpha;
            let vtv = if vtv > 0.0 { vtv } else { x.iter().map(|v| v * v).sum() };
            if vtv == 0.0 {
                off[k] = alpha;
                continue;
            }
            let beta = 2.0 / vtv;
            betas[k] = beta;
            off[k] = alpha;
            let v: Vec<f64> = a[start..start + m].to_vec();

            // p = beta * S v, w = p - (beta/2)(p.v) v, S -= v w^T + w v^T
            let sub = (k + 1) * n + (k + 1);
            let mut pv = 0.0;
            for i in 0..m {
                let row = &a[sub + i * n..sub + i * n + m];
                let s: f64 = row.iter().zip(&v).map(|(r, vj)| r * vj).sum();
                p[i] = beta * s;
                pv += p[i] * v[i];
            }
            let half = 0.5 * beta * pv;
            for i in 0..m {
                p[i] -= half * v[i];
            }
            let w = &p[..m];
            for i in 0..m {
                let (vi, wi) = (v[i], w[i]);
                let row = &mut a[sub + i * n..sub + i * n + m];
                for ((r, vj), wj) in row.iter_mut().zip(&v).zip(w) {
                    *r -= vi * wj + wi * vj;
                }
            }
        }
        if n >= 2 {
            diag[n - 2] = a[(n - 2) * n + n - 2];
            off[n - 2] = a[(n - 1) * n + n - 2];
        }
        diag[n - 1] = a[(n - 1) * n + n - 1];
        off[n - 1] = 0.0;
        Self {
            n,
            diag,
            off,
            reflectors: a,
            betas,
        }
    }

    /// `x <- Q x` for a vector expressed in the tridiagonal basis.
    fn back_transform(&self, x: &mut [f64]) {
        let n = self.n;
        for k in (0..n.saturating_sub(2)).rev() {
            let beta = self.betas[k];
            if beta == 0.0 {
                continue;
            }
            let v = &self.reflectors[k * n + k + 1..(k + 1) * n];
            let tail = &mut x[k + 1..];
            let s: f64 = beta * v.iter().zip(tail.iter()).map(|(a, b)| a * b).sum::<f64>();
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
    }

    fn full_vectors(&self, k: usize) -> Result<(Vec<f64>, Array2<f64>)> {
        let n = self.n;
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        // Row i of `zt` is the i-th eigenvector of T.
        let mut zt = vec![0.0; n * n];
        for i in 0..n {
            zt[i * n + i] = 1.0;
        }
        ql_implicit(&mut d, &mut e, Some(&mut zt), n)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| d[y].total_cmp(&d[x]).then(x.cmp(&y)));
        let mut vectors = Array2::zeros((n, k));
        let mut values = Vec::with_capacity(k);
        for (j, &idx) in order[..k].iter().enumerate() {
            let mut z = zt[idx * n..(idx + 1) * n].to_vec();
            self.back_transform(&mut z);
            vectors.column_mut(j).assign(&ndarray::ArrayView1::from(&z[..]));
            values.push(d[idx]);
        }
        Ok((values, vectors))
    }

    /// Eigenvectors for the given (already computed) eigenvalues of T.
    /// Returns `None` if the iteration breaks down.
    fn inverse_iteration(&self, values: &[f64]) -> Option<Array2<f64>> {
        let n = self.n;
        let tnorm = self
            .diag
            .iter()
            .zip(&self.off)
            .fold(0.0_f64, |m, (d, e)| m.max(d.abs() + 2.0 * e.abs()))
            .max(f64::MIN_POSITIVE);
        let cluster_tol = 1e-7 * tnorm;
        let mut found: Vec<(f64, Vec<f64>)> = Vec::with_capacity(values.len());
        let mut vectors = Array2::zeros((n, values.len()));
        for (j, &lambda) in values.iter().enumerate() {
            let lu = TriLu::factor(&self.diag, &self.off, lambda, tnorm);
            // Deterministic start vector with no special structure.
            let mut z: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_75).fract())
                .collect();
            let mut converged = false;
            for _ in 0..6 {
                lu.solve(&mut z);
                for (mu, prev) in &found {
                    if (mu - lambda).abs() <= cluster_tol {
                        let s: f64 = prev.iter().zip(&z).map(|(a, b)| a * b).sum();
                        for (zi, pi) in z.iter_mut().zip(prev) {
                            *zi -= s * pi;
                        }
                    }
                }
                let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
                if !norm.is_finite() || norm == 0.0 {
                    return None;
                }
                z.iter_mut().for_each(|v| *v /= norm);
                if self.tri_residual(&z, lambda) <= 1e-13 * tnorm * (n as f64).sqrt() {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return None;
            }
            found.push((lambda, z.clone()));
            self.back_transform(&mut z);
            vectors
                .column_mut(j)
                .assign(&ndarray::ArrayView1::from(&z[..]));
        }
        Some(vectors)
    }

    fn tri_residual(&self, z: &[f64], lambda: f64) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let mut r = (self.diag[i] - lambda) * z[i];
            if i > 0 {
                r += self.off[i - 1] * z[i - 1];
            }
            if i + 1 < n {
                r += self.off[i] * z[i + 1];
            }
            acc += r * r;
        }
        acc.sqrt()
    }
}

/// LU factorisation with partial pivoting of `T - shift I`.
struct TriLu {
    d: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl TriLu {
    fn factor(diag: &[f64], off: &[f64], shift: f64, tnorm: f64) -> Self {
        let n = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
        let mut u1: Vec<f64> = off.to_vec();
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];
        let tiny = f64::EPSILON * tnorm;
        for i in 0..n.saturating_sub(1) {
            let sub = off[i];
            if d[i].abs() >= sub.abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let m = sub / d[i];
                l[i] = m;
                d[i + 1] -= m * u1[i];
            } else {
                let m = d[i] / sub;
                l[i] = m;
                swapped[i] = true;
                let (di1, ui1) = (d[i + 1], u1[i + 1]);
                let new_d1 = u1[i] - m * di1;
                let new_u1 = -m * ui1;
                d[i] = sub;
                u1[i] = di1;
                u2[i] = ui1;
                d[i + 1] = new_d1;
                u1[i + 1] = new_u1;
            }
        }
        if n > 0 && d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for v in d.iter_mut() {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            d,
            u1,
            u2,
            l,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.d[i];
        }
        // Rescale to keep the next solve away from overflow.
        let big = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if big > 0.0 && big.is_finite() {
            b.iter_mut().for_each(|v| *v /= big);
        }
    }
}

/// Implicit-shift QL on a symmetric tridiagonal (`d` diagonal, `e[i]`
/// coupling `i` and `i+1`, `e[n-1] = 0`). On return `d` holds the
/// eigenvalues in no particular order. When `zt` is given, its rows are
/// rotated alongside, so starting from the identity row `i` ends up as the
/// eigenvector for `d[i]`.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut [f64]>, n: usize) -> Result<()> {
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    e[n - 1] = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_BUDGET {
                    return Err(Error::NoConvergence { budget: QL_BUDGET });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let ri = &mut lo[i * n..];
                        let ri1 = &mut hi[..n];
                        for (a, b) in ri.iter_mut().zip(ri1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::gaussian_matrix;
    use ndarray::array;

    fn random_symmetric(n: usize, seed: u64) -> Array2<f64> {
        let g = gaussian_matrix(n, n, seed).into_array();
        (&g + &g.t()) * 0.5
    }

    fn check_pairs(a: &Array2<f64>, r: &EigenResult) {
        let k = r.values.len();
        for j in 0..k {
            let v = r.vectors.column(j);
            let res = (&a.dot(&v) - &(&v * r.values[j]))
                .iter()
                .map(|x| x * x)
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-6 * r.values[j].abs().max(1.0), "residual {res}");
            assert!((v.dot(&v).sqrt() - 1.0).abs() <= 1e-10);
            for i in 0..j {
                assert!(r.vectors.column(i).dot(&v).abs() <= 1e-8);
            }
            if j > 0 {
                assert!(r.values[j - 1] >= r.values[j]);
            }
        }
    }

    #[test]
    fn diagonal() {
        let a = array![[2.0, 0.0], [0.0, 1.0]];
        let r = sym_eigen(a.view(), 2).unwrap();
        assert_eq!(r.values, vec![2.0, 1.0]);
        assert_eq!(r.vectors, array![[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn swap_matrix() {
        let a = array![[0.0, 1.0], [1.0, 0.0]];
        let r = sym_eigen(a.view(), 2).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-14);
        assert!((r.values[1] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = r.vectors.column(0);
        let v1 = r.vectors.column(1);
        assert!((v0[0] - h).abs() < 1e-14 && (v0[1] - h).abs() < 1e-14);
        assert!((v1[0].abs() - h).abs() < 1e-14 && (v1[0] + v1[1]).abs() < 1e-14);
    }

    #[test]
    fn spectral_reconstruction_and_trace() {
        let a = random_symmetric(8, 3);
        let r = sym_eigen(a.view(), 8).unwrap();
        check_pairs(&a, &r);
        let mut rebuilt = Array2::<f64>::zeros((8, 8));
        for j in 0..8 {
            let v = r.vectors.column(j).to_owned().insert_axis(ndarray::Axis(1));
            rebuilt = rebuilt + v.dot(&v.t()) * r.values[j];
        }
        for (x, y) in rebuilt.iter().zip(a.iter()) {
            assert!((x - y).abs() <= 1e-8);
        }
        let trace: f64 = a.diag().sum();
        let sum: f64 = r.values.iter().sum();
        assert!((trace - sum).abs() <= 1e-8 * trace.abs().max(1.0));
    }

    #[test]
    fn fast_path_agrees_with_full_path() {
        let a = random_symmetric(120, 9);
        let fast = sym_eigen(a.view(), 5).unwrap();
        let full = sym_eigen(a.view(), 120).unwrap();
        check_pairs(&a, &fast);
        for j in 0..5 {
            assert!((fast.values[j] - full.values[j]).abs() <= 1e-10 * full.values[0].abs());
            for (x, y) in fast.vectors.column(j).iter().zip(full.vectors.column(j)) {
                assert!((x - y).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        let n = 80;
        let a = Array2::<f64>::eye(n) * 3.0;
        let r = sym_eigen(a.view(), 4).unwrap();
        assert!(r.values.iter().all(|&v| (v - 3.0).abs() < 1e-14));
        check_pairs(&a, &r);

        // Rank-2 Gram matrix: many zero eigenvalues plus two positive ones.
        let g = gaussian_matrix(n, 2, 4).into_array();
        let k = g.dot(&g.t());
        let r = sym_eigen(k.view(), 6).unwrap();
        check_pairs(&k, &r);
        assert!(r.values[2].abs() < 1e-10 * r.values[0]);
    }

    #[test]
    fn rejects_bad_input() {
        let a = array![[1.0, 2.0], [0.0, 1.0]];
        assert!(matches!(sym_eigen(a.view(), 1), Err(Error::NotSymmetric(_))));
        let a = array![[1.0, 0.0], [0.0, 1.0]];
        assert!(sym_eigen(a.view(), 0).is_err());
        assert!(sym_eigen(a.view(), 3).is_err());
        let r = array![[1.0, 0.0, 0.0]];
        assert!(sym_eigen(r.view(), 1).is_err());
    }

    #[test]
    fn one_by_one() {
        let a = array![[-4.5]];
        let r = sym_eigen(a.view(), 1).unwrap();
        assert_eq!(r.values, vec![-4.5]);
        assert_eq!(r.vectors, array![[1.0]]);
    }
}
