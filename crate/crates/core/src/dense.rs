//! `{rows, cols, data}` row-major JSON encoding of dense matrices.

use ndarray::Array2;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

pub fn serialize<S: Serializer>(m: &Array2<f64>, s: S) -> Result<S::Ok, S::Error> {
    Dense {
        rows: m.nrows(),
        cols: m.ncols(),
        data: m.iter().copied().collect(),
    }
    .serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Array2<f64>, D::Error> {
    let m = Dense::deserialize(d)?;
    Array2::from_shape_vec((m.rows, m.cols), m.data).map_err(serde::de::Error::custom)
}
