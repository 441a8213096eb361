//! Contour points, Moore boundary traces and the directional chain-code histogram.
//!
//! cargo run --example chain_code

use numeral_fusion::dcc::{dcc_features, find_contour_points, trace_contours, DccGrid};
use numeral_fusion::imaging::BinaryImage;

fn main() -> anyhow::Result<()> {
    let ring = BinaryImage::from_ascii(
        ".##.
         #..#
         #..#
         #.#.
         .#..",
    )?;
    let contour = find_contour_points(&ring);
    println!("{} contour points: {:?}", contour.len(), contour.points());
    for chain in trace_contours(&ring, &contour) {
        println!("trace from {:?}: {}", chain.start, chain.code_string());
    }

    let zero = BinaryImage::from_fn(40, 40, |r, c| {
        let (y, x) = (r as f64 - 19.5, c as f64 - 19.5);
        let d = (x * x / 1.0 + y * y / 1.6).sqrt();
        (11.0..16.0).contains(&d)
    });
    for grid in [DccGrid::Fine, DccGrid::Compact] {
        let f = dcc_features(&zero, grid)?;
        println!("{grid} grid: {} features, {} chain-code steps", f.len(), f.total());
    }
    let f = dcc_features(&zero, DccGrid::Compact)?;
    for zr in 0..3 {
        let row: Vec<String> = (0..3).map(|zc| format!("{:?}", f.block(zr, zc))).collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
