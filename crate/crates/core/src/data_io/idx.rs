//! IDX containers as used by public digit corpora: a big-endian magic number
//! (`0x00000803` for u8 image stacks, `0x00000801` for u8 label vectors),
//! one big-endian u32 per dimension, then the raw bytes.

use std::path::Path;

use super::{write_atomic, Dataset, Sample};
use crate::error::{Error, Result};
use crate::imaging::GrayImage;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

struct IdxArray<'a> {
    dims: Vec<usize>,
    data: &'a [u8],
}

fn parse_array(bytes: &[u8], magic: u32) -> Result<IdxArray<'_>> {
    let header = bytes
        .get(..4)
        .ok_or_else(|| Error::Parse("truncated IDX header".into()))?;
    let found = u32::from_be_bytes(header.try_into().expect("4 bytes"));
    if found != magic {
        return Err(Error::Parse(format!(
            "unexpected magic 0x{found:08x} (expected 0x{magic:08x})"
        )));
    }
    let ndims = (magic & 0xff) as usize;
    let mut dims = Vec::with_capacity(ndims);
    for i in 0..ndims {
        let at = 4 + 4 * i;
        let d = bytes
            .get(at..at + 4)
            .ok_or_else(|| Error::Parse("truncated IDX dimension header".into()))?;
        dims.push(u32::from_be_bytes(d.try_into().expect("4 bytes")) as usize);
    }
    let data = &bytes[4 + 4 * ndims..];
    let expected = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Parse("IDX dimensions overflow".into()))?;
    if data.len() != expected {
        return Err(Error::Parse(format!(
            "IDX payload holds {} bytes but the header declares {expected}",
            data.len()
        )));
    }
    Ok(IdxArray { dims, data })
}

/// Parses an image stack and its label vector held in memory.
pub fn parse_idx(images: &[u8], labels: &[u8], source: &str) -> Result<Dataset> {
    let imgs = parse_array(images, IDX_IMAGES_MAGIC)?;
    let lbls = parse_array(labels, IDX_LABELS_MAGIC)?;
    let (count, rows, cols) = (imgs.dims[0], imgs.dims[1], imgs.dims[2]);
    if count != lbls.dims[0] {
        return Err(Error::Parse(format!(
            "{count} images but {} labels",
            lbls.dims[0]
        )));
    }
    if count > 0 && (rows == 0 || cols == 0) {
        return Err(Error::Parse(format!("zero-sized IDX images {rows}x{cols}")));
    }
    let samples = (0..count)
        .map(|i| {
            let pixels = imgs.data[i * rows * cols..(i + 1) * rows * cols].to_vec();
            Ok(Sample {
                image: GrayImage::new(cols, rows, pixels)?,
                label: lbls.data[i],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(samples, source)
}

pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let images = std::fs::read(images_path).map_err(|e| Error::from(e).in_file(images_path))?;
    let labels = std::fs::read(labels_path).map_err(|e| Error::from(e).in_file(labels_path))?;
    let source = format!("idx:{}", images_path.display());
    parse_idx(&images, &labels, &source).map_err(|e| e.in_file(images_path))
}

pub fn encode_idx_images(ds: &Dataset) -> Result<Vec<u8>> {
    let (rows, cols) = match ds.samples.first() {
        Some(s) => (s.image.height(), s.image.width()),
        None => (0, 0),
    };
    if ds
        .samples
        .iter()
        .any(|s| s.image.height() != rows || s.image.width() != cols)
    {
        return Err(Error::InvalidImage(
            "IDX image stacks need images of one size".into(),
        ));
    }
    let mut out = Vec::with_capacity(16 + ds.len() * rows * cols);
    out.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    for d in [ds.len(), rows, cols] {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    for s in &ds.samples {
        out.extend_from_slice(s.image.pixels());
    }
    Ok(out)
}

pub fn encode_idx_labels(ds: &Dataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + ds.len());
    out.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(ds.len() as u32).to_be_bytes());
    out.extend(ds.samples.iter().map(|s| s.label));
    out
}

pub fn write_idx(ds: &Dataset, images_path: &Path, labels_path: &Path) -> Result<()> {
    write_atomic(images_path, &encode_idx_images(ds)?)?;
    write_atomic(labels_path, &encode_idx_labels(ds))
}
