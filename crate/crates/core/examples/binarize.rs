//! Otsu binarization and glyph normalization of a synthetic digit.
//!
//! cargo run --example binarize

use numeral_fusion::data_io::generate_synthetic;
use numeral_fusion::imaging::{binarize_otsu, normalize_glyph, otsu_threshold, Polarity};

fn main() -> anyhow::Result<()> {
    let ds = generate_synthetic(42, 1);
    let sample = &ds.samples[8];
    let t = otsu_threshold(&sample.image);
    println!("digit {} ({}x{}), Otsu threshold {t}", sample.label, sample.image.width(), sample.image.height());

    let bin = binarize_otsu(&sample.image, Polarity::InkDark)?;
    println!("binarized, {} ink pixels:\n{bin:?}", bin.ink_count());

    let glyph = normalize_glyph(&bin, 16)?;
    println!("cropped and resized to 16x16:\n{glyph:?}");
    Ok(())
}
