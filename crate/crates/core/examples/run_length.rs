//! Zoned run-length transition counts.
//!
//! cargo run --example run_length

use numeral_fusion::imaging::BinaryImage;
use numeral_fusion::rlc::{horizontal_rlc, rlc_features, vertical_rlc};

fn main() -> anyhow::Result<()> {
    let zone = BinaryImage::from_ascii(
        ".##.
         #..#
         .##.",
    )?;
    println!(
        "small zone: horizontal {}, vertical {}",
        horizontal_rlc(&zone.view()),
        vertical_rlc(&zone.view())
    );

    let plus = BinaryImage::from_fn(50, 50, |r, c| (22..28).contains(&r) || (22..28).contains(&c));
    let v = rlc_features(&plus)?;
    println!("plus glyph, (horizontal, vertical) per zone:");
    for zr in 0..3 {
        let row: Vec<String> = (0..3)
            .map(|zc| format!("({:3}, {:3})", v.horizontal(zr, zc), v.vertical(zr, zc)))
            .collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
