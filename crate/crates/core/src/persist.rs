//! Binary containers for trained models and ensembles.
//!
//! All integers and floats are little-endian; floats are IEEE-754 binary64
//! written bit-exactly, so a model read back predicts identically. The full
//! layout is documented in `FORMAT.md` at the crate root.

use sha2::{Digest, Sha256};

use crate::classify::{knn_train, Label, LabeledSample, LinearModel};
use crate::config::RunConfig;
use crate::dcc::DccGrid;
use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureVector};
use crate::fusion::{FusionEnsemble, Model, Voter, VoterId};
use crate::imaging::GrayImage;

pub const MODEL_MAGIC: &[u8; 8] = b"NFMODEL\0";
pub const ENSEMBLE_MAGIC: &[u8; 8] = b"NFENSEM\0";
pub const FORMAT_VERSION: u16 = 1;

const KIND_KNN: u8 = 1;
const KIND_LINEAR: u8 = 2;
const TAG_DCC: u8 = 1;
const TAG_RLC: u8 = 2;

/// What the ensemble was trained on, for train/test disjointness checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrainManifest {
    pub source: String,
    /// Sorted digests of the training images, see [`image_digest`].
    pub train_digests: Vec<u64>,
}

impl TrainManifest {
    pub fn new<'a>(source: impl Into<String>, images: impl IntoIterator<Item = &'a GrayImage>) -> Self {
        let mut train_digests: Vec<u64> = images.into_iter().map(image_digest).collect();
        train_digests.sort_unstable();
        Self {
            source: source.into(),
            train_digests,
        }
    }

    pub fn contains(&self, img: &GrayImage) -> bool {
        self.train_digests.binary_search(&image_digest(img)).is_ok()
    }
}

/// First 8 bytes (big-endian) of SHA-256 over width, height (u32 LE) and pixels.
pub fn image_digest(img: &GrayImage) -> u64 {
    let mut h = Sha256::new();
    h.update((img.width() as u32).to_le_bytes());
    h.update((img.height() as u32).to_le_bytes());
    h.update(img.pixels());
    let d = h.finalize();
    u64::from_be_bytes(d[..8].try_into().expect("8 bytes"))
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn bytes(&mut self, v: &[u8]) {
        self.0.extend_from_slice(v);
    }
    fn text(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.bytes(s.as_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Parse(format!("truncated container at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| Error::Parse("length overflow".into()))?)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
    fn text(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Parse("invalid utf-8 text".into()))
    }
    fn magic(&mut self, expected: &[u8; 8]) -> Result<()> {
        let m = self.take(8)?;
        if m != expected {
            return Err(Error::Parse(format!(
                "unexpected magic {:?} (expected {:?})",
                String::from_utf8_lossy(m),
                String::from_utf8_lossy(expected)
            )));
        }
        let version = self.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported format version {version}")));
        }
        Ok(())
    }
    fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Parse(format!(
                "{} trailing bytes after container",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// Serializes one voter's classifier with its extractor tag and normalization flag.
pub fn encode_voter(voter: &Voter) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.bytes(MODEL_MAGIC);
    w.u16(FORMAT_VERSION);
    w.u8(match voter.model {
        Model::Knn(_) => KIND_KNN,
        Model::Linear(_) => KIND_LINEAR,
    });
    match voter.extractor {
        Extractor::Dcc(grid) => {
            w.u8(TAG_DCC);
            w.u8(grid.blocks() as u8);
            w.u8(grid.blocks() as u8);
        }
        Extractor::Rlc => {
            w.u8(TAG_RLC);
            w.u8(3);
            w.u8(3);
        }
    }
    w.u8(u8::from(voter.normalize));
    w.u8(voter.id.slot() as u8);
    w.u32(voter.model.dim() as u32);
    match &voter.model {
        Model::Knn(m) => {
            w.u32(m.k() as u32);
            w.u32(m.prototypes().len() as u32);
            for p in m.prototypes() {
                w.u8(p.label);
            }
            for p in m.prototypes() {
                for &v in p.features.as_slice() {
                    w.f64(v);
                }
            }
        }
        Model::Linear(m) => {
            w.f64(m.ridge());
            w.u32(m.classes().len() as u32);
            w.bytes(m.classes());
            for &v in m.weights() {
                w.f64(v);
            }
        }
    }
    w.0
}

pub fn decode_voter(bytes: &[u8]) -> Result<Voter> {
    let mut r = Reader::new(bytes);
    let voter = read_voter(&mut r)?;
    r.finish()?;
    Ok(voter)
}

fn read_voter(r: &mut Reader<'_>) -> Result<Voter> {
    r.magic(MODEL_MAGIC)?;
    let kind = r.u8()?;
    let tag = r.u8()?;
    let (rows, cols) = (r.u8()?, r.u8()?);
    let extractor = match tag {
        TAG_DCC if rows == cols => Extractor::Dcc(
            DccGrid::from_blocks(rows as usize)
                .ok_or_else(|| Error::Parse(format!("unsupported dcc grid {rows}x{cols}")))?,
        ),
        TAG_RLC if (rows, cols) == (3, 3) => Extractor::Rlc,
        _ => return Err(Error::Parse(format!("unknown extractor tag {tag} ({rows}x{cols})"))),
    };
    let normalize = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(Error::Parse(format!("bad normalize flag {other}"))),
    };
    let slot = r.u8()? as usize;
    let id = *VoterId::ALL
        .get(slot)
        .ok_or_else(|| Error::Parse(format!("bad voter slot {slot}")))?;
    let dim = r.u32()? as usize;
    if dim != extractor.dim() {
        return Err(Error::Parse(format!(
            "dimension {dim} does not match extractor {extractor}"
        )));
    }
    let model = match kind {
        KIND_KNN => {
            let k = r.u32()? as usize;
            let n = r.u32()? as usize;
            let labels: Vec<Label> = r.take(n)?.to_vec();
            let data = r.f64s(n * dim)?;
            let samples = labels
                .into_iter()
                .zip(data.chunks_exact(dim.max(1)))
                .map(|(label, f)| LabeledSample::new(FeatureVector(f.to_vec()), label))
                .collect();
            Model::Knn(knn_train(samples, k).map_err(|e| Error::Parse(format!("knn payload: {e}")))?)
        }
        KIND_LINEAR => {
            let ridge = r.f64()?;
            let nc = r.u32()? as usize;
            let classes = r.take(nc)?.to_vec();
            let weights = r.f64s(nc * (dim + 1))?;
            Model::Linear(LinearModel::from_weights(classes, dim, ridge, weights)?)
        }
        other => return Err(Error::Parse(format!("unknown classifier kind {other}"))),
    };
    Ok(Voter {
        id,
        extractor,
        normalize,
        model,
    })
}

pub fn encode_ensemble(ens: &FusionEnsemble, manifest: &TrainManifest) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    w.bytes(ENSEMBLE_MAGIC);
    w.u16(FORMAT_VERSION);
    w.text(&ens.config().to_text());
    w.text(&manifest.source);
    w.u32(manifest.train_digests.len() as u32);
    for &d in &manifest.train_digests {
        w.u64(d);
    }
    for voter in ens.voters() {
        let payload = encode_voter(voter);
        w.u64(payload.len() as u64);
        w.bytes(&payload);
    }
    w.0
}

pub fn decode_ensemble(bytes: &[u8]) -> Result<(FusionEnsemble, TrainManifest)> {
    let mut r = Reader::new(bytes);
    r.magic(ENSEMBLE_MAGIC)?;
    let config = RunConfig::parse(&r.text()?)?;
    let source = r.text()?;
    let n = r.u32()? as usize;
    let train_digests = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    let mut voters = Vec::with_capacity(4);
    for _ in 0..4 {
        let len = r.u64()? as usize;
        voters.push(decode_voter(r.take(len)?)?);
    }
    r.finish()?;
    let voters: [Voter; 4] = voters.try_into().expect("four voters read");
    for v in &voters {
        let expected = if v.id.is_dcc() { config.normalize_dcc } else { config.normalize_rlc };
        if v.normalize != expected {
            return Err(Error::Parse(format!(
                "voter {} normalization disagrees with the stored configuration",
                v.id
            )));
        }
    }
    let ensemble = FusionEnsemble::from_parts(config, voters)?;
    Ok((
        ensemble,
        TrainManifest {
            source,
            train_digests,
        },
    ))
}
