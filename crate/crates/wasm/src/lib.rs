//! WebAssembly bindings for the demo page in `www/`.
//!
//! The `demo` module holds plain Rust that the tests exercise natively; the
//! exported types here only translate errors and flatten arrays.

mod demo;

use wasm_bindgen::prelude::*;

pub use demo::{DriftScene, SegmentResult, TsneRun};

fn js_err(e: sensormap::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// t-SNE on three synthetic blobs, advanced a few iterations per frame.
#[wasm_bindgen]
pub struct TsneDemo(TsneRun);

#[wasm_bindgen]
impl TsneDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(per_cluster: usize, perplexity: f64, seed: u32) -> Result<TsneDemo, JsError> {
        TsneRun::new(per_cluster, perplexity, seed as u64)
            .map(TsneDemo)
            .map_err(js_err)
    }

    /// Run up to `iters` iterations; returns true once the schedule is done.
    pub fn step(&mut self, iters: usize) -> Result<bool, JsError> {
        self.0.step(iters).map_err(js_err)
    }

    /// Row-major `(x, y)` pairs.
    pub fn coords(&self) -> Vec<f64> {
        self.0.coords()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.0.labels()
    }

    pub fn iteration(&self) -> usize {
        self.0.iteration()
    }

    pub fn kl(&self) -> f64 {
        self.0.kl()
    }
}

/// KPCA map of three operating regimes plus a drift baseline.
#[wasm_bindgen]
pub struct DriftDemo(DriftScene);

#[wasm_bindgen]
impl DriftDemo {
    /// `landmarks == 0` selects the exact fit.
    #[wasm_bindgen(constructor)]
    pub fn new(
        per_cluster: usize,
        landmarks: usize,
        linear: bool,
        seed: u32,
    ) -> Result<DriftDemo, JsError> {
        DriftScene::new(per_cluster, landmarks, linear, seed as u64)
            .map(DriftDemo)
            .map_err(js_err)
    }

    pub fn coords(&self) -> Vec<f64> {
        self.0.coords()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.0.labels()
    }

    /// `[x, y, score, nearest]` for a point pushed `distance` (in feature
    /// standard deviations) from regime `cluster` along a fixed direction.
    pub fn probe(&self, cluster: usize, distance: f64) -> Result<Vec<f64>, JsError> {
        self.0.probe(cluster, distance).map_err(js_err)
    }

    pub fn threshold(&self) -> f64 {
        self.0.threshold()
    }
}

/// Band layout for a synthetic trace with the given tones.
#[wasm_bindgen]
pub fn segment_tones(
    freqs: Vec<f64>,
    noise: f64,
    bands: usize,
) -> Result<SegmentView, JsError> {
    demo::segment_tones(&freqs, noise, bands)
        .map(SegmentView)
        .map_err(js_err)
}

#[wasm_bindgen]
pub struct SegmentView(SegmentResult);

#[wasm_bindgen]
impl SegmentView {
    pub fn curve(&self) -> Vec<f64> {
        self.0.curve.clone()
    }

    pub fn spectrum(&self) -> Vec<f64> {
        self.0.spectrum.clone()
    }

    pub fn breakpoints(&self) -> Vec<u32> {
        self.0.breakpoints.iter().map(|&b| b as u32).collect()
    }

    pub fn bin_width_hz(&self) -> f64 {
        self.0.bin_width_hz
    }

    pub fn sse(&self) -> f64 {
        self.0.sse
    }
}
