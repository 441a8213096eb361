//! Four-voter ensemble: {chain code, run length} x {KNN, linear}, merged by
//! majority vote with a fixed voter-priority tie-break.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::classify::{knn_train, linear_train, KnnModel, Label, LabeledSample, LinearModel, NUM_CLASSES};
use crate::config::RunConfig;
use crate::dcc::DccGrid;
use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureVector};
use crate::imaging::{binarize_otsu, BinaryImage, GrayImage};

/// A (feature extractor, classifier) pair. Slot order is the declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VoterId {
    DccKnn,
    DccLinear,
    RlcKnn,
    RlcLinear,
}

impl VoterId {
    pub const ALL: [VoterId; 4] = [
        VoterId::DccKnn,
        VoterId::DccLinear,
        VoterId::RlcKnn,
        VoterId::RlcLinear,
    ];

    pub fn slot(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            VoterId::DccKnn => "dcc-knn",
            VoterId::DccLinear => "dcc-lc",
            VoterId::RlcKnn => "rlc-knn",
            VoterId::RlcLinear => "rlc-lc",
        }
    }

    pub fn is_dcc(self) -> bool {
        matches!(self, VoterId::DccKnn | VoterId::DccLinear)
    }

    pub fn is_knn(self) -> bool {
        matches!(self, VoterId::DccKnn | VoterId::RlcKnn)
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VoterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VoterId::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown voter {s:?}; expected one of dcc-knn, dcc-lc, rlc-knn, rlc-lc"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Knn(KnnModel),
    Linear(LinearModel),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Knn(m) => m.dim(),
            Model::Linear(m) => m.dim(),
        }
    }
}

/// Diagnostic detail behind a vote. Never used for the fused decision.
#[derive(Clone, Debug, PartialEq)]
pub enum VoteDetail {
    Knn { votes: [u32; NUM_CLASSES] },
    Linear { scores: Vec<(Label, f64)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoterOutput {
    pub voter: VoterId,
    pub label: Label,
    pub detail: VoteDetail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Voter {
    pub id: VoterId,
    pub extractor: Extractor,
    pub normalize: bool,
    pub model: Model,
}

impl Voter {
    /// Classifies raw extractor output, applying this voter's normalization.
    pub fn predict_raw(&self, raw: &FeatureVector) -> Result<VoterOutput> {
        self.extractor.check_dim(raw.dim())?;
        let x = prepare(raw.clone(), self.normalize);
        let (label, detail) = match &self.model {
            Model::Knn(m) => {
                let p = m.predict(&x)?;
                (p.label, VoteDetail::Knn { votes: p.votes })
            }
            Model::Linear(m) => {
                let p = m.predict(&x)?;
                (p.label, VoteDetail::Linear { scores: p.scores })
            }
        };
        Ok(VoterOutput {
            voter: self.id,
            label,
            detail,
        })
    }
}

fn prepare(raw: FeatureVector, normalize: bool) -> FeatureVector {
    if normalize {
        raw.l2_normalized()
    } else {
        raw
    }
}

/// Raw features of one glyph under both extractors.
#[derive(Clone, Debug, PartialEq)]
pub struct GlyphFeatures {
    pub dcc: FeatureVector,
    pub rlc: FeatureVector,
}

impl GlyphFeatures {
    pub fn extract(img: &BinaryImage, grid: DccGrid) -> Result<Self> {
        Ok(Self {
            dcc: Extractor::Dcc(grid).extract(img)?,
            rlc: Extractor::Rlc.extract(img)?,
        })
    }

    fn for_voter(&self, id: VoterId) -> &FeatureVector {
        if id.is_dcc() {
            &self.dcc
        } else {
            &self.rlc
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionPrediction {
    pub label: Label,
    /// Per-voter outputs in slot order.
    pub outputs: [VoterOutput; 4],
    /// The voter whose vote decided a tie, when one occurred.
    pub tie_break: Option<VoterId>,
}

impl FusionPrediction {
    pub fn votes(&self) -> [Label; 4] {
        [0, 1, 2, 3].map(|i| self.outputs[i].label)
    }
}

/// Majority of four votes given in slot order.
///
/// A class with strictly more votes than any other wins. Otherwise (2-2 or
/// all different) the vote of the first voter in `priority` whose class is
/// among the tied leaders wins, and that voter is returned.
pub fn majority_vote(votes: [Label; 4], priority: &[VoterId; 4]) -> (Label, Option<VoterId>) {
    let mut counts = [0u8; 256];
    for &v in &votes {
        counts[v as usize] += 1;
    }
    let top = votes.iter().map(|&v| counts[v as usize]).max().unwrap_or(0);
    let mut leaders: Vec<Label> = votes
        .iter()
        .copied()
        .filter(|&v| counts[v as usize] == top)
        .collect();
    leaders.sort_unstable();
    leaders.dedup();
    if leaders.len() == 1 {
        return (leaders[0], None);
    }
    let winner = priority
        .iter()
        .copied()
        .find(|v| leaders.contains(&votes[v.slot()]))
        .expect("some voter backs each leading class");
    (votes[winner.slot()], Some(winner))
}

/// The trained four-voter ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionEnsemble {
    config: RunConfig,
    voters: [Voter; 4],
}

impl FusionEnsemble {
    /// Assembles an ensemble from voters in slot order, checking dimensions.
    pub fn from_parts(config: RunConfig, voters: [Voter; 4]) -> Result<Self> {
        config.validate()?;
        for (slot, v) in voters.iter().enumerate() {
            if v.id.slot() != slot {
                return Err(Error::Config(format!("voter {} in slot {slot}", v.id)));
            }
            let expected = if v.id.is_dcc() {
                Extractor::Dcc(config.dcc_grid)
            } else {
                Extractor::Rlc
            };
            if v.extractor != expected {
                return Err(Error::Config(format!(
                    "voter {} uses {} but the configuration implies {expected}",
                    v.id, v.extractor
                )));
            }
            if v.id.is_knn() != matches!(v.model, Model::Knn(_)) {
                return Err(Error::Config(format!("voter {} holds the wrong classifier", v.id)));
            }
            v.extractor.check_dim(v.model.dim())?;
        }
        Ok(Self { config, voters })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn voters(&self) -> &[Voter; 4] {
        &self.voters
    }

    pub fn voter(&self, id: VoterId) -> &Voter {
        &self.voters[id.slot()]
    }

    pub fn extract(&self, img: &BinaryImage) -> Result<GlyphFeatures> {
        GlyphFeatures::extract(img, self.config.dcc_grid)
    }

    /// Fuses the four votes for already-extracted features.
    pub fn predict_features(&self, features: &GlyphFeatures) -> Result<FusionPrediction> {
        let outputs = [0, 1, 2, 3].map(|slot| {
            let voter = &self.voters[slot];
            voter.predict_raw(features.for_voter(voter.id))
        });
        let [a, b, c, d] = outputs;
        let outputs = [a?, b?, c?, d?];
        let votes = [0, 1, 2, 3].map(|i| outputs[i].label);
        let (label, tie_break) = majority_vote(votes, &self.config.tie_break_order);
        Ok(FusionPrediction {
            label,
            outputs,
            tie_break,
        })
    }

    pub fn predict_gray(&self, img: &GrayImage) -> Result<FusionPrediction> {
        fuse_predict(self, &binarize_otsu(img, self.config.ink_polarity)?)
    }
}

pub fn fuse_predict(ens: &FusionEnsemble, img: &BinaryImage) -> Result<FusionPrediction> {
    ens.predict_features(&ens.extract(img)?)
}

/// Extracts both feature sets once per glyph and trains all four voters.
/// Every digit class 0-9 must have at least one sample.
pub fn train_ensemble(train: &[(BinaryImage, Label)], config: &RunConfig) -> Result<FusionEnsemble> {
    config.validate()?;
    let features = train
        .par_iter()
        .map(|(img, _)| GlyphFeatures::extract(img, config.dcc_grid))
        .collect::<Result<Vec<_>>>()?;
    let labeled: Vec<(GlyphFeatures, Label)> =
        features.into_iter().zip(train.iter().map(|(_, l)| *l)).collect();
    train_from_features(&labeled, config)
}

pub fn train_from_features(samples: &[(GlyphFeatures, Label)], config: &RunConfig) -> Result<FusionEnsemble> {
    config.validate()?;
    let mut present = [false; NUM_CLASSES];
    for (_, label) in samples {
        let slot = present
            .get_mut(*label as usize)
            .ok_or_else(|| Error::Config(format!("label {label} outside 0..=9")))?;
        *slot = true;
    }
    if let Some(missing) = present.iter().position(|p| !p) {
        return Err(Error::MissingClass(missing as Label));
    }

    let build = |id: VoterId| -> Result<Voter> {
        let (extractor, normalize) = if id.is_dcc() {
            (Extractor::Dcc(config.dcc_grid), config.normalize_dcc)
        } else {
            (Extractor::Rlc, config.normalize_rlc)
        };
        let set: Vec<LabeledSample> = samples
            .iter()
            .map(|(f, label)| LabeledSample {
                features: prepare(f.for_voter(id).clone(), normalize),
                label: *label,
            })
            .collect();
        let model = if id.is_knn() {
            Model::Knn(knn_train(set, config.knn_k)?)
        } else {
            Model::Linear(linear_train(&set, config.ridge)?)
        };
        Ok(Voter {
            id,
            extractor,
            normalize,
            model,
        })
    };
    let [a, b, c, d] = VoterId::ALL.map(build);
    FusionEnsemble::from_parts(config.clone(), [a?, b?, c?, d?])
}
