//! Dataset ingestion (IDX archives, labeled image directories), synthetic
//! fixtures, and CSV export of feature matrices.

mod idx;
mod image_dir;
mod synthetic;

pub use idx::{encode_idx_images, encode_idx_labels, load_idx, parse_idx, write_idx, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use image_dir::{decode_gray, load_image_dir, write_image_dir};
pub use synthetic::{generate_synthetic, generate_synthetic_with, Jitter, SYNTHETIC_SIZE};

use std::io::Write;
use std::path::Path;

use crate::classify::{Label, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureVector};
use crate::imaging::GrayImage;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub image: GrayImage,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    /// Where the samples came from, for reports and manifests.
    pub source: String,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, source: impl Into<String>) -> Result<Self> {
        if let Some(s) = samples.iter().find(|s| s.label as usize >= NUM_CLASSES) {
            return Err(Error::Parse(format!("label {} outside 0..=9", s.label)));
        }
        Ok(Self {
            samples,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sorted distinct labels.
    pub fn class_set(&self) -> Vec<Label> {
        let mut seen = [false; NUM_CLASSES];
        for s in &self.samples {
            seen[s.label as usize] = true;
        }
        (0..NUM_CLASSES as Label).filter(|&l| seen[l as usize]).collect()
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0; NUM_CLASSES];
        for s in &self.samples {
            counts[s.label as usize] += 1;
        }
        counts
    }
}

/// Writes `path` through a temporary sibling file and a rename, so a failed
/// write never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(|e| Error::from(e).in_file(path))
}

/// Feature matrix as CSV: a header `label,<tag>_0,...,<tag>_{dim-1}`, then
/// one row per sample.
pub fn feature_csv(extractor: Extractor, rows: &[(Label, FeatureVector)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend((0..extractor.dim()).map(|i| format!("{}_{i}", extractor.tag())));
    w.write_record(&header)?;
    for (label, fv) in rows {
        extractor.check_dim(fv.dim())?;
        let mut record = vec![label.to_string()];
        record.extend(fv.as_slice().iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
