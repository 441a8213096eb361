use std::cmp::Ordering;

use super::{validate_samples, Label, LabeledSample, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Lazy learner: every training sample is kept as a prototype.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    k: usize,
    dim: usize,
    prototypes: Vec<LabeledSample>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnnPrediction {
    pub label: Label,
    /// Votes per class among the k nearest prototypes.
    pub votes: [u32; NUM_CLASSES],
}

pub fn knn_train(samples: Vec<LabeledSample>, k: usize) -> Result<KnnModel> {
    let dim = validate_samples(&samples)?;
    if k == 0 || k > samples.len() {
        return Err(Error::Config(format!(
            "k = {k} must be in 1..={}",
            samples.len()
        )));
    }
    Ok(KnnModel {
        k,
        dim,
        prototypes: samples,
    })
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn prototypes(&self) -> &[LabeledSample] {
        &self.prototypes
    }

    /// Plurality vote of the k nearest prototypes under Euclidean distance.
    ///
    /// Equal distances favor the earlier prototype; equal vote counts favor
    /// the smaller class id.
    pub fn predict(&self, x: &FeatureVector) -> Result<KnnPrediction> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        // sorted (squared distance, index) of the best k so far
        let mut nearest: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for (i, p) in self.prototypes.iter().enumerate() {
            let d = squared_distance(x.as_slice(), p.features.as_slice());
            if nearest.len() == self.k && d.total_cmp(&nearest[self.k - 1].0) != Ordering::Less {
                continue;
            }
            let at = nearest.partition_point(|&(nd, _)| nd.total_cmp(&d) != Ordering::Greater);
            nearest.insert(at, (d, i));
            nearest.truncate(self.k);
        }

        let mut votes = [0u32; NUM_CLASSES];
        for &(_, i) in &nearest {
            votes[self.prototypes[i].label as usize] += 1;
        }
        let label = argmax_first(&votes) as Label;
        Ok(KnnPrediction { label, votes })
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn argmax_first(votes: &[u32]) -> usize {
    let mut best = 0;
    for (i, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64], label: Label) -> LabeledSample {
        LabeledSample::new(v.to_vec(), label)
    }

    #[test]
    fn stores_all_samples() {
        let samples: Vec<_> = (0..10).map(|i| sample(&[i as f64], i as u8)).collect();
        let model = knn_train(samples.clone(), 1).unwrap();
        assert_eq!(model.prototypes(), &samples[..]);
        assert!(knn_train(samples, 11).is_err());
    }

    #[test]
    fn duplicates_are_kept() {
        let s = sample(&[1.0, 2.0], 3);
        let model = knn_train(vec![s.clone(), s], 2).unwrap();
        assert_eq!(model.prototypes().len(), 2);
    }

    #[test]
    fn rejects_bad_training_input() {
        assert!(knn_train(vec![], 1).is_err());
        assert!(knn_train(vec![sample(&[0.0], 0)], 0).is_err());
        assert!(knn_train(vec![sample(&[0.0], 12)], 1).is_err());
        assert!(knn_train(vec![sample(&[0.0], 0), sample(&[0.0, 1.0], 1)], 1).is_err());
    }

    #[test]
    fn exact_match_wins_with_k1() {
        let model = knn_train(
            vec![sample(&[0.0, 0.0], 4), sample(&[3.0, 1.0], 7), sample(&[5.0, 5.0], 2)],
            1,
        )
        .unwrap();
        assert_eq!(model.predict(&vec![3.0, 1.0].into()).unwrap().label, 7);
    }

    #[test]
    fn full_neighborhood_plurality() {
        let model = knn_train(
            vec![sample(&[0.0], 5), sample(&[10.0], 5), sample(&[1.0], 2)],
            3,
        )
        .unwrap();
        for x in [-4.0, 0.9, 1.0, 100.0] {
            let p = model.predict(&vec![x].into()).unwrap();
            assert_eq!(p.label, 5);
            assert_eq!(p.votes[5], 2);
            assert_eq!(p.votes[2], 1);
        }
    }

    #[test]
    fn ties_are_deterministic() {
        // equidistant prototypes: the earlier one is nearer
        let model = knn_train(vec![sample(&[-1.0], 8), sample(&[1.0], 3)], 1).unwrap();
        assert_eq!(model.predict(&vec![0.0].into()).unwrap().label, 8);
        // a 1-1 vote goes to the smaller class
        let model = knn_train(vec![sample(&[-1.0], 8), sample(&[1.0], 3)], 2).unwrap();
        assert_eq!(model.predict(&vec![0.0].into()).unwrap().label, 3);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let model = knn_train(vec![sample(&[0.0, 0.0], 1)], 1).unwrap();
        assert!(matches!(
            model.predict(&vec![0.0].into()),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }
}
