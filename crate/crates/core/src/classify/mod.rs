//! The two base classifiers: k-nearest-neighbor over stored prototypes and a
//! one-vs-rest linear classifier fitted by ridge-regularized least squares.

mod knn;
mod linear;

pub use knn::{knn_train, KnnModel, KnnPrediction};
pub use linear::{linear_train, LinearModel, LinearPrediction};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Digit class id.
pub type Label = u8;

pub const NUM_CLASSES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub features: FeatureVector,
    pub label: Label,
}

impl LabeledSample {
    pub fn new(features: impl Into<FeatureVector>, label: Label) -> Self {
        Self {
            features: features.into(),
            label,
        }
    }
}

/// Checks labels and a shared feature dimension; returns the dimension.
fn validate_samples(samples: &[LabeledSample]) -> Result<usize> {
    let first = samples
        .first()
        .ok_or_else(|| Error::Config("no training samples".into()))?;
    let dim = first.features.dim();
    for s in samples {
        if s.label as usize >= NUM_CLASSES {
            return Err(Error::Config(format!("label {} outside 0..=9", s.label)));
        }
        if s.features.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: s.features.dim(),
            });
        }
    }
    Ok(dim)
}
