//! Common representation of extracted features.

use std::fmt;

use crate::dcc::{dcc_features, DccGrid};
use crate::error::{Error, Result};
use crate::imaging::BinaryImage;
use crate::rlc::{rlc_features, RLC_LEN};

/// Fixed-length real-valued feature vector.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector(pub Vec<f64>);

impl FeatureVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Scales to unit Euclidean norm; the zero vector is left unchanged.
    pub fn l2_normalized(mut self) -> Self {
        let norm = self.0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            self.0.iter_mut().for_each(|v| *v /= norm);
        }
        self
    }
}

impl From<Vec<f64>> for FeatureVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Which feature extractor produced a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extractor {
    Dcc(DccGrid),
    Rlc,
}

impl Extractor {
    pub fn dim(self) -> usize {
        match self {
            Extractor::Dcc(grid) => grid.feature_len(),
            Extractor::Rlc => RLC_LEN,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Extractor::Dcc(_) => "dcc",
            Extractor::Rlc => "rlc",
        }
    }

    /// Runs the extractor's full pipeline (crop, resize, features) on a binarized glyph.
    pub fn extract(self, img: &BinaryImage) -> Result<FeatureVector> {
        let values = match self {
            Extractor::Dcc(grid) => dcc_features(img, grid)?
                .histogram
                .into_iter()
                .map(f64::from)
                .collect(),
            Extractor::Rlc => rlc_features(img)?.values.iter().map(|&v| f64::from(v)).collect(),
        };
        Ok(FeatureVector(values))
    }

    pub(crate) fn check_dim(self, got: usize) -> Result<()> {
        if got == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            })
        }
    }
}

impl fmt::Display for Extractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extractor::Dcc(grid) => write!(f, "dcc[{grid}]"),
            Extractor::Rlc => f.write_str("rlc"),
        }
    }
}
