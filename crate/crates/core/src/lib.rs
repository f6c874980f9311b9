//! Low-dimensional views of multivariate sensor data for fault detection.
//!
//! The crate is organised around a dense [`FeatureMatrix`] that flows
//! between the stages:
//!
//! * [`spectral`] turns raw vibration traces into banded spectral features.
//! * [`tsne`] and [`kpca`] embed feature rows in two dimensions.
//! * [`metrics`] checks how well labelled groups separate in an embedding.
//! * [`detect`] learns where normal operation lives in an embedding and
//!   scores how far new points have drifted from it.
//!
//! [`numerics`] holds the shared dense linear-algebra and clustering
//! primitives, and [`synthetic`] generates seeded demo and test data.

pub mod detect;
mod dense;
mod error;
pub mod kpca;
pub mod metrics;
pub mod numerics;
pub mod spectral;
pub mod synthetic;
pub mod tsne;

pub use error::{Error, Result};
pub use numerics::FeatureMatrix;
