//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines are always printed.

use std::alloc::{GlobalAlloc, Layout, System};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sensormap::detect::{fit_baseline, BaselineModel, ClusterSpec};
use sensormap::kpca::{
    kpca_fit_exact, kpca_fit_nystrom, kpca_fit_nystrom_with_landmarks, KernelChoice, KpcaConfig,
    KpcaModel,
};
use sensormap::metrics::davies_bouldin_by;
use sensormap::numerics::pairwise_sq_dists;
use sensormap::spectral::{frame_count, segment_curve, stft_frames};
use sensormap::synthetic::{blobs, drift_ramp, gaussian_matrix, tone_trace, BlobSpec};
use sensormap::tsne::{
    calibrate_sigmas, kl_divergence, kl_gradient, low_dim_affinities, row_perplexities,
    symmetrize, tsne_fit, TsneConfig,
};
use sensormap::FeatureMatrix;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);
static LARGEST: AtomicUsize = AtomicUsize::new(0);

fn track(grow: usize) {
    let now = CURRENT.fetch_add(grow, Ordering::Relaxed) + grow;
    PEAK.fetch_max(now, Ordering::Relaxed);
    LARGEST.fetch_max(grow, Ordering::Relaxed);
}

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, l: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(l) };
        if !p.is_null() {
            track(l.size());
        }
        p
    }

    unsafe fn dealloc(&self, p: *mut u8, l: Layout) {
        unsafe { System.dealloc(p, l) };
        CURRENT.fetch_sub(l.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, p: *mut u8, l: Layout, new: usize) -> *mut u8 {
        let q = unsafe { System.realloc(p, l, new) };
        if !q.is_null() {
            CURRENT.fetch_sub(l.size(), Ordering::Relaxed);
            track(new);
        }
        q
    }
}

#[global_allocator]
static ALLOC: Counting = Counting;

/// Bytes allocated on top of the current live set while `f` runs, and the
/// largest single allocation.
fn measure<T>(f: impl FnOnce() -> T) -> (T, usize, usize) {
    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    LARGEST.store(0, Ordering::Relaxed);
    let out = f();
    (
        out,
        PEAK.load(Ordering::Relaxed) - base,
        LARGEST.load(Ordering::Relaxed),
    )
}

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

/// Share of points whose nearest label centroid is their own label's.
fn purity(y: ArrayView2<f64>, labels: &[usize]) -> f64 {
    let k = labels.iter().max().unwrap() + 1;
    let mut cent = Array2::<f64>::zeros((k, y.ncols()));
    let mut count = vec![0.0; k];
    for (row, &l) in y.rows().into_iter().zip(labels) {
        let mut c = cent.row_mut(l);
        c += &row;
        count[l] += 1.0;
    }
    for l in 0..k {
        cent.row_mut(l).mapv_inplace(|v| v / count[l]);
    }
    let hits = y
        .rows()
        .into_iter()
        .zip(labels)
        .filter(|(row, &l)| {
            let d = |c: usize| (&cent.row(c) - row).mapv(|v| v * v).sum();
            (0..k).min_by(|&a, &b| d(a).total_cmp(&d(b))).unwrap() == l
        })
        .count();
    hits as f64 / labels.len() as f64
}

fn c1_perplexity() -> Outcome {
    let x = gaussian_matrix(200, 10, 1);
    let d = pairwise_sq_dists(&x);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for perp in [5.0, 50.0] {
        match calibrate_sigmas(d.view(), perp) {
            Ok(cal) => {
                for p in row_perplexities(&cal.affinities) {
                    worst = worst.max((p - perp).abs());
                }
            }
            Err(e) => return Outcome::Fail(e.to_string()),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-3 && secs < 5.0,
        format!("max |perplexity error| {worst:.2e}, {secs:.3} s"),
    )
}

fn c2_gradient() -> Outcome {
    let h = 1e-5;
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let x = gaussian_matrix(8, 4, 100 + seed);
        let cal = calibrate_sigmas(pairwise_sq_dists(&x).view(), 3.0).unwrap();
        let p = symmetrize(&cal.affinities);
        let y = gaussian_matrix(8, 2, 200 + seed).into_array();
        let (g, _) = kl_gradient(&p, y.view());
        let kl = |y: &Array2<f64>| kl_divergence(&p, &low_dim_affinities(y.view()).0);
        let mut num = Array2::zeros(y.raw_dim());
        for i in 0..8 {
            for k in 0..2 {
                let (mut up, mut dn) = (y.clone(), y.clone());
                up[[i, k]] += h;
                dn[[i, k]] -= h;
                num[[i, k]] = (kl(&up) - kl(&dn)) / (2.0 * h);
            }
        }
        let diff = (&g - &num).mapv(|v| v * v).sum().sqrt();
        let norm = g.mapv(|v| v * v).sum().sqrt();
        worst = worst.max(diff / norm);
    }
    check(worst <= 1e-4, format!("max relative gradient error {worst:.2e} over 20 instances"))
}

fn c3_descent() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in 0..5 {
        let (x, _) = blobs(&BlobSpec::rpm_like(50, 13), seed);
        let cfg = TsneConfig { seed, ..TsneConfig::default() };
        let e = match tsne_fit(&x, &cfg) {
            Ok(e) => e,
            Err(err) => return Outcome::Fail(err.to_string()),
        };
        let at100 = e.kl_trace.iter().find(|(it, _)| *it == 100).unwrap().1;
        ok &= e.final_kl < at100;
        lines.push(format!("{at100:.3}->{:.3}", e.final_kl));
    }
    check(ok, format!("KL at 100 -> final: {}", lines.join(", ")))
}

fn c4_recovery() -> Outcome {
    let (x, labels) = blobs(&BlobSpec::rpm_like(100, 13), 7);
    let t = tsne_fit(
        &x,
        &TsneConfig { perplexity: 50.0, learning_rate: 100.0, seed: 7, ..TsneConfig::default() },
    )
    .unwrap();
    let k = kpca_fit_exact(&x, &KpcaConfig::default()).unwrap();
    let pt = purity(t.coords.view(), &labels);
    let pk = purity(k.scores.view(), &labels);
    let dt = davies_bouldin_by(t.coords.view(), &labels).unwrap();
    let dk = davies_bouldin_by(k.scores.view(), &labels).unwrap();
    check(
        pt >= 0.95 && pk >= 0.95 && dt <= 0.5 && dk <= 0.5,
        format!("t-SNE purity {pt:.3} DB {dt:.4}; KPCA purity {pk:.3} DB {dk:.4}"),
    )
}

fn c5_linear_pca() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let x = gaussian_matrix(100, 6, 300 + seed);
        let cfg = KpcaConfig { components: 3, kernel: KernelChoice::Linear, standardize: false };
        let fit = kpca_fit_exact(&x, &cfg).unwrap();
        let a = x.as_array();
        let xc = a - &a.mean_axis(ndarray::Axis(0)).unwrap();
        let cov = xc.t().dot(&xc) / 100.0;
        let eig = DMatrix::from_fn(6, 6, |i, j| cov[[i, j]]).symmetric_eigen();
        let mut order: Vec<usize> = (0..6).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        for (c, &o) in order.iter().take(3).enumerate() {
            let v = ndarray::Array1::from_iter(eig.eigenvectors.column(o).iter().copied());
            let pc = xc.dot(&v);
            let sign = if pc.dot(&fit.scores.column(c)) < 0.0 { -1.0 } else { 1.0 };
            for i in 0..100 {
                worst = worst.max((sign * pc[i] - fit.scores[[i, c]]).abs());
            }
        }
    }
    check(worst <= 1e-8, format!("max score difference {worst:.2e} over 10 instances"))
}

fn c6_nystrom_exact() -> Outcome {
    let (x, _) = blobs(&BlobSpec::rpm_like(100, 13), 11);
    let cfg = KpcaConfig::default();
    let exact = kpca_fit_exact(&x, &cfg).unwrap();
    let ny = kpca_fit_nystrom_with_landmarks(&x, &x, &cfg).unwrap();
    let mut worst = 0.0f64;
    for j in 0..2 {
        let scale = exact.scores.column(j).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let a = exact.scores.column(j);
        let b = ny.scores.column(j);
        let sign = if a.dot(&b) < 0.0 { -1.0 } else { 1.0 };
        for i in 0..300 {
            worst = worst.max((a[i] - sign * b[i]).abs() / scale);
        }
    }
    check(
        worst <= 1e-6,
        format!("max relative score difference {worst:.2e}, ridge {:.1e}", ny.model.ridge),
    )
}

fn c7_nystrom_speed() -> Outcome {
    let spec = BlobSpec { sizes: vec![667, 667, 666], ..BlobSpec::rpm_like(1, 13) };
    let (x, _) = blobs(&spec, 5);
    let n = x.n_rows();
    let cfg = KpcaConfig::default();
    let t = Instant::now();
    let exact = kpca_fit_exact(&x, &cfg).unwrap();
    let te = t.elapsed().as_secs_f64();
    drop(exact);
    let t = Instant::now();
    let (ny, peak, largest) = measure(|| kpca_fit_nystrom(&x, 100, &cfg, 5).unwrap());
    let tn = t.elapsed().as_secs_f64();
    let nn_bytes = n * n * std::mem::size_of::<f64>();
    let speedup = te / tn;
    check(
        speedup >= 5.0 && largest < nn_bytes / 4 && peak < nn_bytes && ny.largest_matrix_elems == n * 100,
        format!(
            "n={n}: exact {te:.2} s, Nystrom {tn:.3} s ({speedup:.1}x); peak extra {:.1} MB, largest block {:.1} MB vs n x n {:.1} MB",
            peak as f64 / 1e6,
            largest as f64 / 1e6,
            nn_bytes as f64 / 1e6
        ),
    )
}

fn brute_db(a: &Array2<f64>, labels: &[usize], k: usize) -> f64 {
    let d = a.ncols();
    let mut cent = vec![vec![0.0; d]; k];
    let mut count = vec![0.0; k];
    for (i, &l) in labels.iter().enumerate() {
        count[l] += 1.0;
        for t in 0..d {
            cent[l][t] += a[[i, t]];
        }
    }
    for l in 0..k {
        for t in 0..d {
            cent[l][t] /= count[l];
        }
    }
    let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let mut sc = vec![0.0; k];
    for (i, &l) in labels.iter().enumerate() {
        sc[l] += dist(&a.row(i).to_vec(), &cent[l]) / count[l];
    }
    let mut total = 0.0;
    for i in 0..k {
        let mut worst = 0.0f64;
        for j in 0..k {
            if i != j {
                worst = worst.max((sc[i] + sc[j]) / dist(&cent[i], &cent[j]));
            }
        }
        total += worst;
    }
    total / k as f64
}

fn c8_davies_bouldin() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for set in 0..50 {
        let k = 2 + set % 4;
        let n = rng.random_range(k..60);
        let d = rng.random_range(1..5);
        let a = Array2::from_shape_simple_fn((n, d), || rng.random_range(-10.0..10.0));
        let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
        labels.rotate_left(n / 3);
        let ours = davies_bouldin_by(a.view(), &labels).unwrap();
        worst = worst.max((ours - brute_db(&a, &labels, k)).abs());
    }
    let hand = ndarray::array![[0.0, 0.0], [0.0, 2.0], [10.0, 0.0], [10.0, 2.0]];
    let h = davies_bouldin_by(hand.view(), &[0, 0, 1, 1]).unwrap();
    check(
        worst <= 1e-12 && (h - 0.2).abs() <= 1e-12,
        format!("max oracle difference {worst:.2e} over 50 sets; hand case {h}"),
    )
}

fn c9_stft() -> Outcome {
    let len = 12_800 * 3 + 777;
    let trace = tone_trace(&[(1000.0, 1.0)], 12_800.0, len, 0.0, 0);
    let frames = stft_frames(&trace, 4096, 2048).unwrap();
    let expected = (len - 4096) / 2048 + 1;
    let peaks_ok = frames.iter().all(|f| f.peak_bin() == 320);
    check(
        peaks_ok && frames.len() == expected && frame_count(len, 4096, 2048) == expected,
        format!("{} frames (expected {expected}), peak bin 320 in every frame: {peaks_ok}", frames.len()),
    )
}

fn c10_segmentation() -> Outcome {
    let (mut worst_sse, mut worst_off) = (0.0f64, 0usize);
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let n = 2049;
        let mut knots: Vec<usize> = vec![0, n];
        while knots.len() < 14 {
            let k = rng.random_range(20..n - 20);
            if knots.iter().all(|&b| b.abs_diff(k) >= 40) {
                knots.push(k);
            }
        }
        knots.sort_unstable();
        let mut curve = Vec::with_capacity(n);
        let mut level = 0.0;
        for w in knots.windows(2) {
            let slope = rng.random_range(0.5..300.0);
            for _ in w[0]..w[1] {
                level += slope;
                curve.push(level);
            }
        }
        let seg = segment_curve(&curve, 13).unwrap();
        let found = seg.scheme.breakpoints();
        let off = found.iter().zip(&knots).map(|(a, b)| a.abs_diff(*b)).max().unwrap();
        worst_sse = worst_sse.max(seg.sse);
        worst_off = worst_off.max(off);
    }
    // A knot's last point lies on both neighbouring lines, so the
    // breakpoint may land one bin early at zero cost.
    check(
        worst_sse <= 1e-8 && worst_off <= 1,
        format!("max SSE {worst_sse:.2e} over 10 curves; breakpoints within {worst_off} bin(s) of the true knots"),
    )
}

fn c11_drift() -> Outcome {
    let d = 13;
    let spec = BlobSpec { centers: vec![vec![0.0; d]], std_devs: vec![1.0], sizes: vec![1000] };
    let (train, _) = blobs(&spec, 1);
    let (held, _) = blobs(&spec, 2);
    let fit = kpca_fit_exact(&train, &KpcaConfig::default()).unwrap();
    let base = fit_baseline(fit.scores.view(), ClusterSpec::KMeans { k: 1, seed: 0 }).unwrap();
    let held_scores = fit.model.project(held.view()).unwrap();
    let rate = base.drift_score(held_scores.view()).unwrap().alarm_rate();

    let mut direction = vec![0.0; d];
    direction[0] = 1.0;
    direction[1] = 0.5;
    let ramp = drift_ramp(&vec![0.0; d], &direction, 30, 0.1);
    let ramp_scores = fit.model.project(ramp.view()).unwrap();
    let drift = base.drift_score(ramp_scores.view()).unwrap().scores;
    let increasing = drift.windows(2).all(|w| w[1] > w[0]);
    check(
        increasing && (0.02..=0.08).contains(&rate),
        format!(
            "ramp scores {:.3} -> {:.3}, strictly increasing: {increasing}; held-out alarm rate {:.1}%",
            drift[0],
            drift[drift.len() - 1],
            100.0 * rate
        ),
    )
}

fn c12_round_trip() -> Outcome {
    let (x, labels) = blobs(&BlobSpec::rpm_like(40, 13), 12);
    let probe = gaussian_matrix(50, 13, 13).into_array() * 3.0;
    let mut worst = 0.0f64;
    for fit in [
        kpca_fit_exact(&x, &KpcaConfig::default()).unwrap(),
        kpca_fit_nystrom(&x, 30, &KpcaConfig::default(), 1).unwrap(),
    ] {
        let back = KpcaModel::from_json(&fit.model.to_json().unwrap()).unwrap();
        let a = fit.model.project(probe.view()).unwrap();
        let b = back.project(probe.view()).unwrap();
        worst = worst.max((&a - &b).iter().fold(0.0, |m, v| m.max(v.abs())));

        let names: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        let base = fit_baseline(fit.scores.view(), ClusterSpec::Labels(&names)).unwrap();
        let base2 = BaselineModel::from_json(&base.to_json().unwrap()).unwrap();
        let r1 = base.drift_score(a.view()).unwrap();
        let r2 = base2.drift_score(b.view()).unwrap();
        for (s1, s2) in r1.scores.iter().zip(&r2.scores) {
            worst = worst.max((s1 - s2).abs());
        }
    }
    check(worst <= 1e-12, format!("max difference after reload {worst:.2e}"))
}

fn c13_turbofan() -> Outcome {
    let path = std::env::var_os("SENSORMAP_TURBOFAN")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::path::PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/turbofan/train_FD002.txt")));
    let Ok(text) = std::fs::read_to_string(&path) else {
        return Outcome::Skip(format!("dataset not found at {} (set SENSORMAP_TURBOFAN)", path.display()));
    };
    let records = match sensormap_cli::turbofan::parse(&text) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let summary = sensormap_cli::turbofan::summarize(&records);
    let normal: Vec<_> = records.iter().filter(|r| r.cycle <= 60).collect();
    let labels: Vec<String> = normal.iter().map(|r| sensormap_cli::turbofan::condition_label(&r.settings)).collect();
    let rows: Vec<Vec<f64>> = normal
        .iter()
        .map(|r| r.settings.iter().chain(r.sensors.iter()).copied().collect())
        .collect();
    let x = FeatureMatrix::from_rows(&rows).unwrap();
    let mut distinct = labels.clone();
    distinct.sort();
    distinct.dedup();
    let kp = kpca_fit_nystrom(&x, 100, &KpcaConfig::default(), 0).unwrap();
    let db_k = davies_bouldin_by(kp.scores.view(), &labels).unwrap();
    let (z, _) = sensormap::numerics::standardize(&x);
    let ts = tsne_fit(&z, &TsneConfig { perplexity: 50.0, ..TsneConfig::default() }).unwrap();
    let db_t = davies_bouldin_by(ts.coords.view(), &labels).unwrap();
    check(
        distinct.len() == 6 && db_k <= 0.5 && db_t <= 1.0 && summary.shortest_life == 139,
        format!(
            "{} engines, shortest life {} cycles, {} conditions; KPCA DB {db_k:.4}, t-SNE DB {db_t:.4}",
            summary.engines,
            summary.shortest_life,
            distinct.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("perplexity calibration", c1_perplexity),
        ("KL gradient check", c2_gradient),
        ("t-SNE descent", c3_descent),
        ("cluster recovery", c4_recovery),
        ("linear KPCA equals PCA", c5_linear_pca),
        ("Nystrom with c = n is exact", c6_nystrom_exact),
        ("Nystrom speed and memory", c7_nystrom_speed),
        ("Davies-Bouldin oracle", c8_davies_bouldin),
        ("STFT pure tone", c9_stft),
        ("segmentation recovery", c10_segmentation),
        ("drift tail ordering", c11_drift),
        ("model round trip", c12_round_trip),
        ("turbofan reproduction", c13_turbofan),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} [{:>2}] {name}: {detail} ({secs:.1} s)", i + 1);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
