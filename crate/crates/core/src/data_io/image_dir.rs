//! Labeled directory trees: `root/<digit>/<file>` with 8-bit grayscale
//! PNG or PGM files.

use std::path::Path;

use image::DynamicImage;
use log::warn;

use super::{Dataset, Sample};
use crate::classify::{Label, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// Loads every file under `root/0` .. `root/9` in lexicographic order.
///
/// Subdirectories with other names are skipped with a warning; hidden files
/// are ignored. Any file that fails to decode aborts the load, naming the file.
pub fn load_image_dir(root: &Path) -> Result<Dataset> {
    let mut classes = Vec::new();
    for entry in std::fs::read_dir(root).map_err(|e| Error::from(e).in_file(root))? {
        let entry = entry.map_err(|e| Error::from(e).in_file(root))?;
        if !entry.file_type()?.is_dir() {
            continue;
        }
        let name = entry.file_name();
        match name.to_str().and_then(parse_class) {
            Some(label) => classes.push((label, entry.path())),
            None => warn!("skipping {}: not a digit class directory", entry.path().display()),
        }
    }
    classes.sort();

    let mut samples = Vec::new();
    for (label, dir) in classes {
        let mut files: Vec<_> = std::fs::read_dir(&dir)
            .map_err(|e| Error::from(e).in_file(&dir))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()
            .map_err(|e| Error::from(e).in_file(&dir))?;
        files.retain(|p| {
            p.is_file()
                && !p
                    .file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with('.'))
        });
        files.sort();
        for path in files {
            let image = decode_gray(&path)?;
            samples.push(Sample { image, label });
        }
    }
    Dataset::new(samples, format!("dir:{}", root.display()))
}

fn parse_class(name: &str) -> Option<Label> {
    match name.as_bytes() {
        [d @ b'0'..=b'9'] => Some(d - b'0'),
        _ => None,
    }
}

/// Decodes a PNG or PGM file to 8-bit gray. Color images are reduced by the
/// plain average of their R, G and B channels.
pub fn decode_gray(path: &Path) -> Result<GrayImage> {
    let decoded = image::ImageReader::open(path)
        .map_err(|e| Error::from(e).in_file(path))?
        .with_guessed_format()
        .map_err(|e| Error::from(e).in_file(path))?
        .decode()
        .map_err(|e| Error::from(e).in_file(path))?;
    to_gray(decoded).map_err(|e| e.in_file(path))
}

fn to_gray(img: DynamicImage) -> Result<GrayImage> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = if img.color().has_color() {
        img.to_rgb8()
            .pixels()
            .map(|p| ((p[0] as u16 + p[1] as u16 + p[2] as u16) / 3) as u8)
            .collect()
    } else {
        img.to_luma8().into_raw()
    };
    GrayImage::new(w, h, pixels)
}

/// Writes each sample as `root/<label>/<index>.png`, index zero-padded to
/// keep lexicographic order equal to dataset order within a class.
pub fn write_image_dir(ds: &Dataset, root: &Path) -> Result<()> {
    let mut next = [0usize; NUM_CLASSES];
    for s in &ds.samples {
        let dir = root.join(s.label.to_string());
        std::fs::create_dir_all(&dir).map_err(|e| Error::from(e).in_file(&dir))?;
        let path = dir.join(format!("{:06}.png", next[s.label as usize]));
        next[s.label as usize] += 1;
        let buf = image::GrayImage::from_raw(
            s.image.width() as u32,
            s.image.height() as u32,
            s.image.pixels().to_vec(),
        )
        .expect("buffer matches dimensions");
        buf.save(&path).map_err(|e| Error::from(e).in_file(&path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_directory_names() {
        assert_eq!(parse_class("0"), Some(0));
        assert_eq!(parse_class("9"), Some(9));
        assert_eq!(parse_class("10"), None);
        assert_eq!(parse_class("a"), None);
    }

    #[test]
    fn color_is_averaged() {
        let rgb = image::RgbImage::from_raw(2, 1, vec![30, 60, 90, 255, 0, 0]).unwrap();
        let gray = to_gray(DynamicImage::ImageRgb8(rgb)).unwrap();
        assert_eq!(gray.pixels(), &[60, 85]);
    }
}
