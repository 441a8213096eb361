//! Run-length-count features: the glyph is normalized to 72x72, split into a
//! 3x3 zone grid, and each zone contributes its horizontal and vertical count
//! of 0/1 transitions between adjacent pixels.

use crate::error::{Error, Result};
use crate::imaging::{make_zone_grid, normalize_glyph, BinaryImage, BinaryView};

pub const RLC_SIZE: usize = 72;
pub const RLC_ZONES: usize = 3;
pub const RLC_LEN: usize = RLC_ZONES * RLC_ZONES * 2;

/// Zone-major `(horizontal, vertical)` pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RlcFeatureVector {
    pub values: [u32; RLC_LEN],
}

impl RlcFeatureVector {
    pub fn horizontal(&self, zone_row: usize, zone_col: usize) -> u32 {
        self.values[(zone_row * RLC_ZONES + zone_col) * 2]
    }

    pub fn vertical(&self, zone_row: usize, zone_col: usize) -> u32 {
        self.values[(zone_row * RLC_ZONES + zone_col) * 2 + 1]
    }
}

/// Value changes between horizontally adjacent pixels, summed over rows.
/// Only pairs inside the zone count; there is no implied border pixel.
pub fn horizontal_rlc(zone: &BinaryView<'_>) -> u32 {
    (0..zone.height())
        .map(|r| {
            let row = zone.row(r);
            row.windows(2).filter(|p| p[0] != p[1]).count() as u32
        })
        .sum()
}

pub fn vertical_rlc(zone: &BinaryView<'_>) -> u32 {
    (1..zone.height())
        .map(|r| {
            let (above, below) = (zone.row(r - 1), zone.row(r));
            above.iter().zip(below).filter(|(a, b)| a != b).count() as u32
        })
        .sum()
}

pub fn extract_rlc(img: &BinaryImage) -> Result<RlcFeatureVector> {
    if img.width() != RLC_SIZE || img.height() != RLC_SIZE {
        return Err(Error::WrongDimensions {
            expected_w: RLC_SIZE,
            expected_h: RLC_SIZE,
            width: img.width(),
            height: img.height(),
        });
    }
    let grid = make_zone_grid(RLC_SIZE, RLC_SIZE, RLC_ZONES, RLC_ZONES)?;
    let mut values = [0u32; RLC_LEN];
    for zr in 0..RLC_ZONES {
        for zc in 0..RLC_ZONES {
            let zone = img.zone(&grid, zr, zc);
            let i = (zr * RLC_ZONES + zc) * 2;
            values[i] = horizontal_rlc(&zone);
            values[i + 1] = vertical_rlc(&zone);
        }
    }
    Ok(RlcFeatureVector { values })
}

/// Run-length pipeline on a binarized glyph: crop, resize to 72x72, count.
pub fn rlc_features(img: &BinaryImage) -> Result<RlcFeatureVector> {
    extract_rlc(&normalize_glyph(img, RLC_SIZE)?)
}
