use ndarray::Array2;

use sensormap::detect::{fit_baseline, BaselineModel, ClusterSpec};
use sensormap::kpca::{kpca_fit_exact, kpca_fit_nystrom, KernelChoice, KpcaConfig, KpcaModel};
use sensormap::spectral::{
    average_spectra, cumulative_magnitude, mean_spectrum, segment_curve, stft_frames,
};
use sensormap::synthetic::{blobs, tone_trace, BlobSpec};
use sensormap::tsne::{TsneConfig, TsneOptimizer};
use sensormap::Result;

const FEATURES: usize = 13;
const RATE_HZ: f64 = 12_800.0;
const WINDOW: usize = 4096;
const HOP: usize = 2048;
const SPAN: usize = 5;

fn flatten(a: &Array2<f64>) -> Vec<f64> {
    a.iter().copied().collect()
}

pub struct TsneRun {
    opt: TsneOptimizer,
    labels: Vec<usize>,
}

impl TsneRun {
    pub fn new(per_cluster: usize, perplexity: f64, seed: u64) -> Result<Self> {
        let (x, labels) = blobs(&BlobSpec::rpm_like(per_cluster, FEATURES), seed);
        let cfg = TsneConfig {
            perplexity,
            seed,
            kl_every: 0,
            ..TsneConfig::default()
        };
        cfg.validate_for(x.n_rows())?;
        Ok(Self {
            opt: TsneOptimizer::new(&x, cfg)?,
            labels,
        })
    }

    pub fn step(&mut self, iters: usize) -> Result<bool> {
        for _ in 0..iters {
            if self.opt.is_done() {
                break;
            }
            self.opt.step()?;
        }
        Ok(self.opt.is_done())
    }

    pub fn coords(&self) -> Vec<f64> {
        flatten(self.opt.coords())
    }

    pub fn labels(&self) -> Vec<u32> {
        self.labels.iter().map(|&l| l as u32).collect()
    }

    pub fn iteration(&self) -> usize {
        self.opt.iteration()
    }

    pub fn kl(&self) -> f64 {
        self.opt.kl()
    }
}

pub struct DriftScene {
    model: KpcaModel,
    baseline: BaselineModel,
    scores: Array2<f64>,
    labels: Vec<usize>,
    centers: Vec<Vec<f64>>,
    std_devs: Vec<f64>,
}

impl DriftScene {
    pub fn new(per_cluster: usize, landmarks: usize, linear: bool, seed: u64) -> Result<Self> {
        let spec = BlobSpec::rpm_like(per_cluster, FEATURES);
        let (x, labels) = blobs(&spec, seed);
        let cfg = KpcaConfig {
            kernel: if linear { KernelChoice::Linear } else { KernelChoice::RbfMedian },
            ..KpcaConfig::default()
        };
        let fit = if landmarks == 0 {
            kpca_fit_exact(&x, &cfg)?
        } else {
            kpca_fit_nystrom(&x, landmarks, &cfg, seed)?
        };
        let names: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        let baseline = fit_baseline(fit.scores.view(), ClusterSpec::Labels(&names))?;
        Ok(Self {
            model: fit.model,
            baseline,
            scores: fit.scores,
            labels,
            centers: spec.centers,
            std_devs: spec.std_devs,
        })
    }

    pub fn coords(&self) -> Vec<f64> {
        flatten(&self.scores)
    }

    pub fn labels(&self) -> Vec<u32> {
        self.labels.iter().map(|&l| l as u32).collect()
    }

    pub fn threshold(&self) -> f64 {
        self.baseline.threshold
    }

    pub fn probe(&self, cluster: usize, distance: f64) -> Result<Vec<f64>> {
        let c = cluster.min(self.centers.len() - 1);
        let norm = (FEATURES as f64).sqrt();
        let point: Vec<f64> = self.centers[c]
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                m + distance * self.std_devs[c] * sign / norm
            })
            .collect();
        let y = self.model.project_row(&point)?;
        let (score, nearest) = self.baseline.score_point(&y)?;
        // The baseline relabels clusters in sorted order; map back.
        let nearest: f64 = self.baseline.cluster_labels[nearest].parse().unwrap_or(f64::NAN);
        Ok(vec![y[0], y[1], score, nearest])
    }
}

pub struct SegmentResult {
    pub spectrum: Vec<f64>,
    pub curve: Vec<f64>,
    pub breakpoints: Vec<usize>,
    pub bin_width_hz: f64,
    pub sse: f64,
}

/// Four seconds of tones at 12.8 kHz, averaged over five frames, with the
/// cumulative curve split into `bands` pieces.
pub fn segment_tones(freqs: &[f64], noise: f64, bands: usize) -> Result<SegmentResult> {
    let tones: Vec<(f64, f64)> = freqs.iter().map(|&f| (f, 1.0)).collect();
    let trace = tone_trace(&tones, RATE_HZ, 4 * RATE_HZ as usize, noise, 1);
    let frames = stft_frames(&trace, WINDOW, HOP)?;
    let mean = mean_spectrum(&average_spectra(&frames, SPAN)?)?;
    let curve = cumulative_magnitude(&mean);
    let seg = segment_curve(&curve, bands)?;
    Ok(SegmentResult {
        breakpoints: seg.scheme.breakpoints().to_vec(),
        sse: seg.sse,
        bin_width_hz: mean.bin_width_hz,
        spectrum: mean.bins,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsne_run_finishes_and_stays_finite() {
        let mut run = TsneRun::new(15, 10.0, 3).unwrap();
        assert!(!run.step(10).unwrap());
        assert_eq!(run.iteration(), 10);
        while !run.step(200).unwrap() {}
        assert_eq!(run.iteration(), 1000);
        assert_eq!(run.coords().len(), 90);
        assert!(run.coords().iter().all(|v| v.is_finite()));
        assert!(run.kl().is_finite());
    }

    #[test]
    fn probe_score_grows_with_distance() {
        let scene = DriftScene::new(40, 0, false, 2).unwrap();
        let near = scene.probe(1, 0.0).unwrap();
        let far = scene.probe(1, 8.0).unwrap();
        assert_eq!(near[3], 1.0);
        assert!(near[2] < scene.threshold());
        assert!(far[2] > near[2]);
        assert_eq!(scene.coords().len(), 240);
    }

    #[test]
    fn linear_probe_eventually_alarms() {
        let scene = DriftScene::new(40, 0, true, 2).unwrap();
        assert!(scene.probe(0, 0.0).unwrap()[2] < scene.threshold());
        assert!(scene.probe(0, 12.0).unwrap()[2] > scene.threshold());
    }

    #[test]
    fn nystrom_scene_builds() {
        let scene = DriftScene::new(40, 20, false, 2).unwrap();
        assert_eq!(scene.labels().len(), 120);
        assert!(scene.probe(0, 1.0).unwrap().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn tones_land_in_their_bins() {
        let r = segment_tones(&[1000.0, 3000.0], 0.01, 13).unwrap();
        assert_eq!(r.spectrum.len(), WINDOW / 2 + 1);
        assert_eq!(r.breakpoints.len(), 14);
        assert_eq!(*r.breakpoints.last().unwrap(), WINDOW / 2 + 1);
        let peak = r
            .spectrum
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!(peak == 320 || peak == 960);
        assert!(r.curve.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn bad_band_count_is_an_error() {
        assert!(segment_tones(&[1000.0], 0.0, 0).is_err());
    }
}
