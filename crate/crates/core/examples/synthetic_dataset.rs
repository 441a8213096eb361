//! Generate a synthetic dataset and write it as IDX files and as a class-directory tree.
//!
//! cargo run --example synthetic_dataset -- [out-dir]

use std::path::PathBuf;

use numeral_fusion::data_io::{generate_synthetic_with, load_idx, write_idx, write_image_dir, Jitter};

fn main() -> anyhow::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("numeral-fusion-synthetic"));
    std::fs::create_dir_all(&out)?;

    let ds = generate_synthetic_with(42, 10, Jitter::Standard);
    println!("{}: {} samples, per class {:?}", ds.source, ds.len(), ds.class_counts());

    let (images, labels) = (out.join("images-idx3-ubyte"), out.join("labels-idx1-ubyte"));
    write_idx(&ds, &images, &labels)?;
    write_image_dir(&ds, &out.join("png"))?;
    let back = load_idx(&images, &labels)?;
    assert_eq!(back.samples, ds.samples);
    println!("wrote {} and {}", images.display(), out.join("png").display());
    Ok(())
}
