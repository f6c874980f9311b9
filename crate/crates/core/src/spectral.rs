//! Vibration trace to band features.
//!
//! A trace is cut into Hann-windowed frames, each frame becomes a dB
//! magnitude spectrum, spectra are smoothed with a trailing moving average,
//! and each smoothed spectrum is summarised by summing its dB values over a
//! fixed set of contiguous frequency bands. The bands themselves come from a
//! least-squares piecewise-linear fit of the cumulative magnitude curve of a
//! reference ("normal") spectrum and are then frozen for every other trace.

use std::f64::consts::PI;

use ndarray::Array2;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, FeatureMatrix, Result};

pub const DEFAULT_WINDOW: usize = 4096;
pub const DEFAULT_HOP: usize = 2048;
pub const DEFAULT_BANDS: usize = 13;
pub const DEFAULT_AVERAGE_SECONDS: f64 = 20.0;

/// Magnitudes are clamped to this before taking logs.
pub const MAGNITUDE_EPSILON: f64 = 1e-12;

/// dB value of a bin at the magnitude floor (-240 dB).
pub fn db_floor() -> f64 {
    20.0 * MAGNITUDE_EPSILON.log10()
}

/// Name of feature column `j`: `band_00`, `band_01`, ...
pub fn band_column_name(j: usize) -> String {
    format!("band_{j:02}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalTrace {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl SignalTrace {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at {i}")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// One dB magnitude spectrum (`window / 2 + 1` bins).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<f64>,
    pub bin_width_hz: f64,
    pub frame_index: usize,
}

impl Spectrum {
    pub fn peak_bin(&self) -> usize {
        self.bins
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            })
            .0
    }
}

/// Framing and smoothing parameters for [`featurize_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameConfig {
    pub window: usize,
    pub hop: usize,
    /// Moving-average length in frames.
    pub span_frames: usize,
}

impl FrameConfig {
    /// Window and hop with the averaging span derived from a duration.
    pub fn with_average_seconds(
        window: usize,
        hop: usize,
        seconds: f64,
        sample_rate_hz: f64,
    ) -> Result<Self> {
        Ok(Self {
            window,
            hop,
            span_frames: span_frames(seconds, sample_rate_hz, hop)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        validate_framing(self.window, self.hop)?;
        if self.span_frames == 0 {
            return Err(Error::InvalidInput("averaging span must be >= 1 frame".into()));
        }
        Ok(())
    }
}

/// Number of frames covering `seconds` at the given rate and hop, rounded
/// (20 s at 12,800 Hz with hop 2048 is 125 frames).
pub fn span_frames(seconds: f64, sample_rate_hz: f64, hop: usize) -> Result<usize> {
    if !(seconds.is_finite() && seconds > 0.0) || !(sample_rate_hz > 0.0) || hop == 0 {
        return Err(Error::InvalidInput(format!(
            "cannot derive averaging span from {seconds} s, {sample_rate_hz} Hz, hop {hop}"
        )));
    }
    Ok(((seconds * sample_rate_hz / hop as f64).round() as usize).max(1))
}

/// `floor((len - window) / hop) + 1`, or 0 when the trace is too short.
pub fn frame_count(len: usize, window: usize, hop: usize) -> usize {
    if len < window || hop == 0 {
        0
    } else {
        (len - window) / hop + 1
    }
}

fn validate_framing(window: usize, hop: usize) -> Result<()> {
    if window < 2 || !window.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "window must be a power of two >= 2, got {window}"
        )));
    }
    if hop == 0 || hop > window {
        return Err(Error::InvalidInput(format!(
            "hop must be in 1..={window}, got {hop}"
        )));
    }
    Ok(())
}

/// Periodic Hann window.
fn hann(window: usize) -> Vec<f64> {
    (0..window)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / window as f64).cos())
        .collect()
}

/// Short-time Fourier transform magnitudes in dB, one spectrum per frame.
pub fn stft_frames(trace: &SignalTrace, window: usize, hop: usize) -> Result<Vec<Spectrum>> {
    validate_framing(window, hop)?;
    if trace.len() < window {
        return Err(Error::InvalidInput(format!(
            "trace has {} samples; at least {window} are needed for one frame",
            trace.len()
        )));
    }
    let taper = hann(window);
    let fft = FftPlanner::new().plan_fft_forward(window);
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex::new(0.0, 0.0); window];
    let bin_width_hz = trace.sample_rate_hz() / window as f64;
    let n_frames = frame_count(trace.len(), window, hop);
    let mut out = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let frame = &trace.samples()[f * hop..f * hop + window];
        for ((b, &s), &w) in buf.iter_mut().zip(frame).zip(&taper) {
            *b = Complex::new(s * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        let bins = buf[..window / 2 + 1]
            .iter()
            .map(|c| 20.0 * c.norm().max(MAGNITUDE_EPSILON).log10())
            .collect();
        out.push(Spectrum {
            bins,
            bin_width_hz,
            frame_index: f,
        });
    }
    Ok(out)
}

/// Trailing moving average over `span` frames: output `i` is the bin-wise
/// mean of inputs `max(0, i - span + 1) ..= i`.
pub fn average_spectra(spectra: &[Spectrum], span: usize) -> Result<Vec<Spectrum>> {
    if spectra.is_empty() {
        return Err(Error::InvalidInput("no spectra to average".into()));
    }
    if span == 0 {
        return Err(Error::InvalidInput("averaging span must be >= 1".into()));
    }
    let n_bins = spectra[0].bins.len();
    if let Some(s) = spectra.iter().find(|s| s.bins.len() != n_bins) {
        return Err(Error::DimensionMismatch {
            expected: n_bins,
            actual: s.bins.len(),
        });
    }
    let mut out = Vec::with_capacity(spectra.len());
    let mut acc = vec![0.0; n_bins];
    for i in 0..spectra.len() {
        let lo = (i + 1).saturating_sub(span);
        acc.iter_mut().for_each(|a| *a = 0.0);
        for s in &spectra[lo..=i] {
            for (a, v) in acc.iter_mut().zip(&s.bins) {
                *a += v;
            }
        }
        let count = (i - lo + 1) as f64;
        out.push(Spectrum {
            bins: acc.iter().map(|a| a / count).collect(),
            bin_width_hz: spectra[i].bin_width_hz,
            frame_index: spectra[i].frame_index,
        });
    }
    Ok(out)
}

/// Running sum of magnitudes measured from the dB floor, so every increment
/// is non-negative and the curve is non-decreasing.
pub fn cumulative_magnitude(spectrum: &Spectrum) -> Vec<f64> {
    let floor = db_floor();
    let mut acc = 0.0;
    spectrum
        .bins
        .iter()
        .map(|&b| {
            acc += (b - floor).max(0.0);
            acc
        })
        .collect()
}

/// Contiguous frequency bands given as bin-index breakpoints
/// `0 = b_0 < b_1 < ... < b_k = n_bins`; band `j` is `b_j .. b_{j+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentationScheme {
    breakpoints: Vec<usize>,
}

impl SegmentationScheme {
    pub fn new(breakpoints: Vec<usize>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidInput(
                "a segmentation needs at least two breakpoints".into(),
            ));
        }
        if breakpoints[0] != 0 {
            return Err(Error::InvalidInput("first breakpoint must be 0".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self { breakpoints })
    }

    /// `k` bands of (nearly) equal width over `n_bins` bins.
    pub fn uniform(n_bins: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n_bins {
            return Err(Error::InvalidInput(format!(
                "cannot split {n_bins} bins into {k} bands"
            )));
        }
        Self::new((0..=k).map(|j| j * n_bins / k).collect())
    }

    pub fn breakpoints(&self) -> &[usize] {
        &self.breakpoints
    }

    pub fn n_bands(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn n_bins(&self) -> usize {
        *self.breakpoints.last().expect("non-empty")
    }

    pub fn bands(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.breakpoints.windows(2).map(|w| w[0]..w[1])
    }
}

/// A fitted segmentation and its total squared error.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub scheme: SegmentationScheme,
    pub sse: f64,
}

/// Streaming least-squares line fit over `(x, y)` pairs.
#[derive(Clone, Copy, Default)]
struct LineFit {
    n: f64,
    mx: f64,
    my: f64,
    sxx: f64,
    sxy: f64,
    syy: f64,
}

impl LineFit {
    #[inline]
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        let dx = x - self.mx;
        let dy = y - self.my;
        self.mx += dx / self.n;
        self.my += dy / self.n;
        self.sxx += dx * (x - self.mx);
        self.sxy += dx * (y - self.my);
        self.syy += dy * (y - self.my);
    }

    #[inline]
    fn sse(&self) -> f64 {
        if self.sxx <= 0.0 {
            return self.syy.max(0.0);
        }
        (self.syy - self.sxy * self.sxy / self.sxx).max(0.0)
    }
}

/// Residual sum of squares of the least-squares line through
/// `curve[range]`, computed in two passes.
fn segment_sse(curve: &[f64], range: std::ops::Range<usize>) -> f64 {
    let m = range.len() as f64;
    if range.len() < 3 {
        return 0.0;
    }
    let xs = range.clone().map(|i| i as f64);
    let mx = xs.clone().sum::<f64>() / m;
    let my = curve[range.clone()].iter().sum::<f64>() / m;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, &y) in xs.zip(&curve[range.clone()]) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    range
        .map(|i| {
            let r = curve[i] - (my + slope * (i as f64 - mx));
            r * r
        })
        .sum()
}

/// Optimal split of `curve` into `k` contiguous pieces, each fitted by its
/// own least-squares line, minimising the total squared error.
///
/// Exact dynamic programming over all breakpoint placements
/// (O(k n^2) with O(1) incremental line fits). Among placements whose error
/// is equal up to rounding, the one with the most even piece lengths
/// (smallest sum of squared lengths) wins.
pub fn segment_curve(curve: &[f64], k: usize) -> Result<Segmentation> {
    let n = curve.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "cannot fit {k} segments to a curve of length {n}; need 1 <= k < length"
        )));
    }
    if curve.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("curve has non-finite values".into()));
    }
    let mean = curve.iter().sum::<f64>() / n as f64;
    let total_ss: f64 = curve.iter().map(|v| (v - mean) * (v - mean)).sum();
    // Rounding in the streaming fits is of order eps times the variance.
    let tol = 16.0 * f64::EPSILON * total_ss + f64::MIN_POSITIVE;

    // cost[j], even[j]: best (error, sum of squared lengths) for the prefix
    // curve[..j] split into `s` pieces.
    let mut cost = vec![f64::INFINITY; n + 1];
    let mut even = vec![f64::INFINITY; n + 1];
    cost[0] = 0.0;
    even[0] = 0.0;
    let mut back = vec![vec![0usize; n + 1]; k + 1];
    for s in 1..=k {
        let mut next_cost = vec![f64::INFINITY; n + 1];
        let mut next_even = vec![f64::INFINITY; n + 1];
        // Leave at least one point for each remaining piece.
        let last_end = n - (k - s);
        for i in (s - 1)..last_end {
            if !cost[i].is_finite() {
                continue;
            }
            let mut fit = LineFit::default();
            for j in (i + 1)..=last_end {
                fit.push(j as f64 - 1.0, curve[j - 1]);
                let len = (j - i) as f64;
                let c = cost[i] + fit.sse();
                let e = even[i] + len * len;
                let better = c < next_cost[j] - tol
                    || ((c - next_cost[j]).abs() <= tol && e < next_even[j]);
                if better {
                    next_cost[j] = c;
                    next_even[j] = e;
                    back[s][j] = i;
                }
            }
        }
        cost = next_cost;
        even = next_even;
    }

    let mut breakpoints = vec![n];
    let mut j = n;
    for s in (1..=k).rev() {
        j = back[s][j];
        breakpoints.push(j);
    }
    breakpoints.reverse();
    let scheme = SegmentationScheme::new(breakpoints)?;
    let sse = scheme.bands().map(|r| segment_sse(curve, r)).sum();
    Ok(Segmentation { scheme, sse })
}

/// Sum of dB magnitudes within each band.
pub fn band_features(spectrum: &Spectrum, scheme: &SegmentationScheme) -> Result<Vec<f64>> {
    if scheme.n_bins() != spectrum.bins.len() {
        return Err(Error::DimensionMismatch {
            expected: scheme.n_bins(),
            actual: spectrum.bins.len(),
        });
    }
    Ok(scheme
        .bands()
        .map(|r| spectrum.bins[r].iter().sum())
        .collect())
}

/// Mean of a set of spectra, bin by bin.
pub fn mean_spectrum(spectra: &[Spectrum]) -> Result<Spectrum> {
    let first = spectra
        .first()
        .ok_or_else(|| Error::InvalidInput("no spectra".into()))?;
    let mut bins = vec![0.0; first.bins.len()];
    for s in spectra {
        if s.bins.len() != bins.len() {
            return Err(Error::DimensionMismatch {
                expected: bins.len(),
                actual: s.bins.len(),
            });
        }
        for (b, v) in bins.iter_mut().zip(&s.bins) {
            *b += v;
        }
    }
    let n = spectra.len() as f64;
    bins.iter_mut().for_each(|b| *b /= n);
    Ok(Spectrum {
        bins,
        bin_width_hz: first.bin_width_hz,
        frame_index: 0,
    })
}

/// Fit the band layout on a reference trace: average its smoothed spectra,
/// build the cumulative magnitude curve and segment it into `bands` pieces.
pub fn fit_scheme(reference: &SignalTrace, cfg: &FrameConfig, bands: usize) -> Result<Segmentation> {
    cfg.validate()?;
    let frames = stft_frames(reference, cfg.window, cfg.hop)?;
    let smoothed = average_spectra(&frames, cfg.span_frames)?;
    let curve = cumulative_magnitude(&mean_spectrum(&smoothed)?);
    segment_curve(&curve, bands)
}

/// One row of band features per smoothed spectrum, in time order. Row `i`
/// corresponds to STFT frame `i`.
pub fn featurize_trace(
    trace: &SignalTrace,
    scheme: &SegmentationScheme,
    cfg: &FrameConfig,
) -> Result<FeatureMatrix> {
    cfg.validate()?;
    let n_bins = cfg.window / 2 + 1;
    if scheme.n_bins() != n_bins {
        return Err(Error::DimensionMismatch {
            expected: n_bins,
            actual: scheme.n_bins(),
        });
    }
    let frames = stft_frames(trace, cfg.window, cfg.hop)?;
    let smoothed = average_spectra(&frames, cfg.span_frames)?;
    let k = scheme.n_bands();
    let mut data = Array2::zeros((smoothed.len(), k));
    for (mut row, s) in data.rows_mut().into_iter().zip(&smoothed) {
        for (dst, v) in row.iter_mut().zip(band_features(s, scheme)?) {
            *dst = v;
        }
    }
    FeatureMatrix::new(data)?.with_column_names((0..k).map(band_column_name).collect())
}
