//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use numeral_fusion::classify::{Label, NUM_CLASSES};
use numeral_fusion::imaging::{BinaryImage, BinaryView, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tries all 256 levels and maximizes w0*w1*(mu0-mu1)^2 in exact rational
/// arithmetic, with class sums recounted from the histogram at every level.
/// The first maximum wins; a constant image returns its value.
pub fn otsu_oracle(img: &GrayImage) -> u8 {
    let px = img.pixels();
    let mut hist = [0u64; 256];
    for &p in px {
        hist[p as usize] += 1;
    }
    let n = BigInt::from(px.len());
    let mut best: Option<(u8, BigRational)> = None;
    for t in 0..=255usize {
        let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
        for (v, &h) in hist.iter().enumerate() {
            if v <= t {
                n0 += h;
                s0 += v as u64 * h;
            } else {
                n1 += h;
                s1 += v as u64 * h;
            }
        }
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let w0 = BigRational::new(BigInt::from(n0), n.clone());
        let w1 = BigRational::new(BigInt::from(n1), n.clone());
        let d = BigRational::new(BigInt::from(s0), BigInt::from(n0)) - BigRational::new(BigInt::from(s1), BigInt::from(n1));
        let var = w0 * w1 * d.clone() * d;
        if best.as_ref().is_none_or(|(_, b)| var > *b) {
            best = Some((t as u8, var));
        }
    }
    best.map_or(px[0], |(t, _)| t)
}

/// Counts `a[r][c] != a[r][c+1]` over every row.
pub fn horizontal_oracle(zone: &BinaryView<'_>) -> u32 {
    let mut n = 0;
    for r in 0..zone.height() {
        for c in 0..zone.width().saturating_sub(1) {
            n += u32::from(zone.get(r, c) != zone.get(r, c + 1));
        }
    }
    n
}

pub fn vertical_oracle(zone: &BinaryView<'_>) -> u32 {
    let mut n = 0;
    for c in 0..zone.width() {
        for r in 0..zone.height().saturating_sub(1) {
            n += u32::from(zone.get(r, c) != zone.get(r + 1, c));
        }
    }
    n
}

/// Ink pixels with an up/down/left/right neighbor that is background or outside.
pub fn contour_oracle(img: &BinaryImage) -> Vec<(usize, usize)> {
    let (w, h) = (img.width(), img.height());
    let ink = |r: isize, c: isize| {
        r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w && img.get(r as usize, c as usize) == 1
    };
    let mut out = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let (ri, ci) = (r as isize, c as isize);
            if ink(ri, ci) && !(ink(ri - 1, ci) && ink(ri + 1, ci) && ink(ri, ci - 1) && ink(ri, ci + 1)) {
                out.push((r, c));
            }
        }
    }
    out
}

/// Sorts every prototype by (squared distance, index), takes k, votes with
/// ties to the smaller class.
pub fn knn_oracle(protos: &[(Vec<f64>, Label)], x: &[f64], k: usize) -> (Label, [u32; NUM_CLASSES]) {
    let mut d: Vec<(f64, usize)> = protos
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut votes = [0u32; NUM_CLASSES];
    for &(_, i) in &d[..k] {
        votes[protos[i].1 as usize] += 1;
    }
    let top = *votes.iter().max().unwrap();
    let label = votes.iter().position(|&v| v == top).unwrap() as Label;
    (label, votes)
}

pub fn random_gray(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayImage {
    // full-range, narrow-range and occasional constant images
    let (lo, hi) = match rng.random_range(0..10) {
        0..=5 => (0u8, 255u8),
        6..=8 => {
            let a = rng.random_range(0..=250u8);
            (a, a + rng.random_range(1..=5u8))
        }
        _ => {
            let a = rng.random::<u8>();
            (a, a)
        }
    };
    let bimodal = rng.random_bool(0.5);
    let px: Vec<u8> = (0..w * h)
        .map(|_| {
            if bimodal && hi - lo > 100 {
                if rng.random_bool(0.3) {
                    rng.random_range(lo..=lo + 60)
                } else {
                    rng.random_range(hi - 60..=hi)
                }
            } else {
                rng.random_range(lo..=hi)
            }
        })
        .collect();
    GrayImage::new(w, h, px).unwrap()
}

pub fn random_binary(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> BinaryImage {
    let px = (0..w * h).map(|_| u8::from(rng.random_bool(density))).collect();
    BinaryImage::new(w, h, px).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The ring glyph whose outer boundary reads 076553221 from (0, 1).
pub const RING: &str = ".##.\n#..#\n#..#\n#.#.\n.#..";

/// True when `b` is a cyclic rotation of `a`.
pub fn is_rotation(a: &str, b: &str) -> bool {
    a.len() == b.len() && format!("{a}{a}").contains(b)
}

pub fn mnist_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mnist600")
}

pub fn arb_binary(max_w: usize, max_h: usize) -> impl proptest::strategy::Strategy<Value = BinaryImage> {
    use proptest::prelude::*;
    (1..=max_w, 1..=max_h, 0.05f64..0.95).prop_flat_map(|(w, h, p)| {
        proptest::collection::vec(proptest::bool::weighted(p), w * h)
            .prop_map(move |v| BinaryImage::new(w, h, v.into_iter().map(u8::from).collect()).unwrap())
    })
}

pub fn arb_gray(max_w: usize, max_h: usize) -> impl proptest::strategy::Strategy<Value = GrayImage> {
    use proptest::prelude::*;
    (1..=max_w, 1..=max_h, any::<u8>(), any::<u8>()).prop_flat_map(|(w, h, a, b)| {
        let (lo, hi) = (a.min(b), a.max(b));
        proptest::collection::vec(lo..=hi, w * h).prop_map(move |v| GrayImage::new(w, h, v).unwrap())
    })
}
