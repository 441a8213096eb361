//! Raster types and the preprocessing steps shared by both feature extractors:
//! Otsu thresholding, binarization, bounding-box cropping, nearest-neighbor
//! resizing and exact zone partitioning.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero-sized image {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0);
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0);
        let pixels = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &p in &self.pixels {
            hist[p as usize] += 1;
        }
        hist
    }

    /// Returns the intensity shared by every pixel, if the image is constant.
    pub fn constant_value(&self) -> Option<u8> {
        let first = self.pixels[0];
        self.pixels.iter().all(|&p| p == first).then_some(first)
    }
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

/// Bilevel raster, row-major; 1 is ink, 0 is background.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero-sized image {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().find(|&&p| p > 1) {
            return Err(Error::InvalidImage(format!("non-binary pixel value {bad}")));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn blank(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0);
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        assert!(width > 0 && height > 0);
        let pixels = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .map(|(r, c)| u8::from(f(r, c)))
            .collect();
        Self {
            width,
            height,
            pixels,
        }
    }

    /// Parses rows of `#`/`1` (ink) and `.`/`0` (background). Whitespace is ignored.
    pub fn from_ascii(art: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = art
            .lines()
            .map(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<Vec<_>>())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.into_iter()
                    .map(|c| match c {
                        '#' | '1' => Ok(1),
                        '.' | '0' => Ok(0),
                        other => Err(Error::InvalidImage(format!("unexpected glyph char {other:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidImage("ragged ascii image".into()));
        }
        Self::new(width, height, rows.concat())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn is_ink(&self, row: usize, col: usize) -> bool {
        self.get(row, col) == 1
    }

    /// Ink test with out-of-bounds coordinates reading as background.
    pub fn is_ink_at(&self, row: isize, col: isize) -> bool {
        row >= 0
            && col >= 0
            && (row as usize) < self.height
            && (col as usize) < self.width
            && self.is_ink(row as usize, col as usize)
    }

    pub fn set(&mut self, row: usize, col: usize, ink: bool) {
        self.pixels[row * self.width + col] = u8::from(ink);
    }

    pub fn ink_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == 1).count()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.height, self.width, |r, c| self.is_ink(c, r))
    }

    pub fn view(&self) -> BinaryView<'_> {
        BinaryView {
            image: self,
            row0: 0,
            col0: 0,
            height: self.height,
            width: self.width,
        }
    }

    /// Rectangular window; panics if it leaves the image.
    pub fn window(&self, row0: usize, col0: usize, height: usize, width: usize) -> BinaryView<'_> {
        assert!(height > 0 && width > 0);
        assert!(row0 + height <= self.height && col0 + width <= self.width);
        BinaryView {
            image: self,
            row0,
            col0,
            height,
            width,
        }
    }

    pub fn zone(&self, grid: &ZoneGrid, zone_row: usize, zone_col: usize) -> BinaryView<'_> {
        self.window(
            zone_row * grid.cell_height,
            zone_col * grid.cell_width,
            grid.cell_height,
            grid.cell_width,
        )
    }
}

impl fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryImage({}x{})", self.width, self.height)?;
        for r in 0..self.height {
            let row: String = (0..self.width)
                .map(|c| if self.is_ink(r, c) { '#' } else { '.' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Borrowed rectangular window into a [`BinaryImage`].
#[derive(Clone, Copy, Debug)]
pub struct BinaryView<'a> {
    image: &'a BinaryImage,
    row0: usize,
    col0: usize,
    height: usize,
    width: usize,
}

impl BinaryView<'_> {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        debug_assert!(row < self.height && col < self.width);
        self.image.get(self.row0 + row, self.col0 + col)
    }

    pub fn row(&self, row: usize) -> &[u8] {
        let start = (self.row0 + row) * self.image.width + self.col0;
        &self.image.pixels[start..start + self.width]
    }

    pub fn to_image(&self) -> BinaryImage {
        BinaryImage::from_fn(self.width, self.height, |r, c| self.get(r, c) == 1)
    }
}

/// Which intensity side of the threshold is ink.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Dark ink on light paper: `pixel <= threshold` is ink.
    #[default]
    InkDark,
    /// Light ink on dark background: `pixel > threshold` is ink.
    InkLight,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::InkDark => "dark",
            Polarity::InkLight => "light",
        })
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dark" | "ink_dark" => Ok(Polarity::InkDark),
            "light" | "ink_light" => Ok(Polarity::InkLight),
            other => Err(Error::Config(format!(
                "ink polarity must be dark or light, got {other:?}"
            ))),
        }
    }
}

/// Exact partition of an image into equally sized rectangular zones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZoneGrid {
    pub rows: usize,
    pub cols: usize,
    pub cell_height: usize,
    pub cell_width: usize,
}

impl ZoneGrid {
    pub fn zone_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn image_width(&self) -> usize {
        self.cols * self.cell_width
    }

    pub fn image_height(&self) -> usize {
        self.rows * self.cell_height
    }

    /// Zone-major index of the zone holding pixel `(row, col)`.
    pub fn zone_index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.image_height() && col < self.image_width());
        (row / self.cell_height) * self.cols + col / self.cell_width
    }
}

pub fn make_zone_grid(img_w: usize, img_h: usize, rows: usize, cols: usize) -> Result<ZoneGrid> {
    if rows == 0 || cols == 0 || !img_h.is_multiple_of(rows) || !img_w.is_multiple_of(cols) || img_w == 0 || img_h == 0
    {
        return Err(Error::GridMismatch {
            width: img_w,
            height: img_h,
            rows,
            cols,
        });
    }
    Ok(ZoneGrid {
        rows,
        cols,
        cell_height: img_h / rows,
        cell_width: img_w / cols,
    })
}

/// Otsu's threshold over the 256-bin histogram.
///
/// Pixels strictly above the returned level form the upper class. Among
/// levels with equal between-class variance the smallest wins; a constant
/// image returns its single intensity.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let hist = img.histogram();
    let total: u64 = hist.iter().sum();
    let total_sum: u64 = hist.iter().enumerate().map(|(v, &n)| v as u64 * n).sum();

    // The between-class variance is (N*s0 - n0*S)^2 / (N^2 * n0 * n1); the N^2
    // factor is shared by every level, so levels are compared on the rest,
    // exactly, as rationals.
    let mut best: Option<(u8, u128, u128)> = None;
    let mut n0 = 0u64;
    let mut s0 = 0u64;
    for (level, &count) in hist.iter().enumerate() {
        n0 += count;
        s0 += level as u64 * count;
        if n0 == 0 {
            continue;
        }
        if n0 == total {
            break;
        }
        let spread = (total as i128 * s0 as i128 - n0 as i128 * total_sum as i128).unsigned_abs();
        let num = spread * spread;
        let den = n0 as u128 * (total - n0) as u128;
        let better = match best {
            None => true,
            Some((_, bn, bd)) => cmp_fraction(num, den, bn, bd) == Ordering::Greater,
        };
        if better {
            best = Some((level as u8, num, den));
        }
    }
    match best {
        Some((level, _, _)) => level,
        None => img.pixels()[0],
    }
}

/// Compares `a/b` with `c/d` without overflow; `b` and `d` must be nonzero.
fn cmp_fraction(a: u128, b: u128, c: u128, d: u128) -> Ordering {
    let (q1, r1) = (a / b, a % b);
    let (q2, r2) = (c / d, c % d);
    if q1 != q2 {
        return q1.cmp(&q2);
    }
    match (r1 == 0, r2 == 0) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        // r1/b vs r2/d  <=>  d/r2 vs b/r1
        (false, false) => cmp_fraction(d, r2, b, r1),
    }
}

pub fn binarize(img: &GrayImage, threshold: u8, polarity: Polarity) -> BinaryImage {
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| match polarity {
            Polarity::InkDark => u8::from(p <= threshold),
            Polarity::InkLight => u8::from(p > threshold),
        })
        .collect();
    BinaryImage {
        width: img.width(),
        height: img.height(),
        pixels,
    }
}

/// Otsu binarization; a constant image carries no glyph and is rejected.
pub fn binarize_otsu(img: &GrayImage, polarity: Polarity) -> Result<BinaryImage> {
    if img.constant_value().is_some() {
        return Err(Error::EmptyGlyph);
    }
    let bin = binarize(img, otsu_threshold(img), polarity);
    if bin.ink_count() == 0 {
        return Err(Error::EmptyGlyph);
    }
    Ok(bin)
}

pub fn crop_to_bounding_box(img: &BinaryImage) -> Result<BinaryImage> {
    let mut bounds: Option<(usize, usize, usize, usize)> = None;
    for r in 0..img.height() {
        for c in 0..img.width() {
            if img.is_ink(r, c) {
                bounds = Some(match bounds {
                    None => (r, r, c, c),
                    Some((r0, r1, c0, c1)) => (r0.min(r), r1.max(r), c0.min(c), c1.max(c)),
                });
            }
        }
    }
    let (r0, r1, c0, c1) = bounds.ok_or(Error::EmptyGlyph)?;
    Ok(img.window(r0, c0, r1 - r0 + 1, c1 - c0 + 1).to_image())
}

/// Nearest-neighbor resampling: output pixel `(r, c)` copies source pixel
/// `(r * h / out_h, c * w / out_w)`.
pub fn resize_binary(img: &BinaryImage, out_w: usize, out_h: usize) -> BinaryImage {
    assert!(out_w > 0 && out_h > 0, "resize target must be non-empty");
    BinaryImage::from_fn(out_w, out_h, |r, c| {
        img.is_ink(r * img.height() / out_h, c * img.width() / out_w)
    })
}

/// Crop to the ink bounding box and stretch to a `size`x`size` square.
pub fn normalize_glyph(img: &BinaryImage, size: usize) -> Result<BinaryImage> {
    let cropped = crop_to_bounding_box(img)?;
    Ok(resize_binary(&cropped, size, size))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn otsu_constant_image_returns_its_value() {
        assert_eq!(otsu_threshold(&GrayImage::filled(5, 4, 0)), 0);
        assert_eq!(otsu_threshold(&GrayImage::filled(3, 3, 77)), 77);
    }

    #[test]
    fn otsu_two_level_image_separates_populations() {
        let img = GrayImage::from_fn(10, 10, |r, _| if r < 5 { 10 } else { 200 });
        let t = otsu_threshold(&img);
        assert!((10..200).contains(&t));
        // every level in [10, 199] gives the same split; the smallest is kept
        assert_eq!(t, 10);
        let bin = binarize(&img, t, Polarity::InkDark);
        assert_eq!(bin.ink_count(), 50);
        assert!((0..5).all(|r| bin.is_ink(r, 3)));
    }

    #[test]
    fn cmp_fraction_matches_cross_multiplication() {
        let cases = [(1, 2, 2, 4), (3, 7, 2, 5), (10, 3, 7, 2), (0, 5, 0, 9), (9, 9, 1, 1)];
        for (a, b, c, d) in cases {
            assert_eq!(cmp_fraction(a, b, c, d), (a * d).cmp(&(c * b)), "{a}/{b} vs {c}/{d}");
        }
    }

    #[test]
    fn binarize_examples() {
        let white = GrayImage::filled(4, 4, 255);
        assert_eq!(binarize(&white, 128, Polarity::InkDark).ink_count(), 0);

        let checker = GrayImage::from_fn(4, 4, |r, c| if (r + c) % 2 == 0 { 0 } else { 255 });
        let bin = binarize(&checker, 128, Polarity::InkDark);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(bin.is_ink(r, c), (r + c) % 2 == 0);
            }
        }
    }

    #[test]
    fn binarize_otsu_rejects_blank_pages() {
        for polarity in [Polarity::InkDark, Polarity::InkLight] {
            let err = binarize_otsu(&GrayImage::filled(8, 8, 255), polarity).unwrap_err();
            assert!(matches!(err, Error::EmptyGlyph));
        }
    }

    #[test]
    fn crop_examples() {
        let mut img = BinaryImage::blank(20, 20);
        img.set(5, 7, true);
        let cropped = crop_to_bounding_box(&img).unwrap();
        assert_eq!((cropped.width(), cropped.height()), (1, 1));
        assert_eq!(cropped.pixels(), &[1]);

        let full = BinaryImage::from_fn(6, 3, |_, _| true);
        assert_eq!(crop_to_bounding_box(&full).unwrap(), full);

        assert!(matches!(
            crop_to_bounding_box(&BinaryImage::blank(4, 4)),
            Err(Error::EmptyGlyph)
        ));
    }

    #[test]
    fn resize_two_by_two_to_four_by_four() {
        let img = BinaryImage::from_ascii("#.\n.#").unwrap();
        let big = resize_binary(&img, 4, 4);
        let expected = BinaryImage::from_ascii(
            "##..
             ##..
             ..##
             ..##",
        )
        .unwrap();
        assert_eq!(big, expected);
    }

    #[test]
    fn resize_same_size_is_identity() {
        let img = BinaryImage::from_fn(30, 30, |r, c| (r * 7 + c * 3) % 5 == 0);
        assert_eq!(resize_binary(&img, 30, 30), img);
    }

    #[test]
    fn zone_grid_examples() {
        let g = make_zone_grid(72, 72, 3, 3).unwrap();
        assert_eq!((g.cell_width, g.cell_height), (24, 24));
        let g = make_zone_grid(30, 30, 10, 10).unwrap();
        assert_eq!((g.cell_width, g.cell_height), (3, 3));
        let g = make_zone_grid(30, 30, 3, 3).unwrap();
        assert_eq!((g.cell_width, g.cell_height), (10, 10));
        assert!(matches!(
            make_zone_grid(30, 30, 4, 4),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn constructors_validate() {
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert!(BinaryImage::new(2, 1, vec![0, 2]).is_err());
        assert!(BinaryImage::new(0, 1, vec![]).is_err());
    }
}
