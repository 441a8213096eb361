//! Deterministic synthetic digit fixtures: ten stroke archetypes drawn dark
//! on a light, noisy 32x32 page.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, Sample};
use crate::classify::{Label, NUM_CLASSES};
use crate::imaging::GrayImage;

pub const SYNTHETIC_SIZE: usize = 32;

/// Glyph box side; archetype strokes use coordinates in `0..=BOX-1`.
const BOX: isize = 20;
const S: isize = BOX - 1;
const M: isize = S / 2;

type Segment = ((isize, isize), (isize, isize));

const TOP: Segment = ((0, 0), (0, S));
const BOTTOM: Segment = ((S, 0), (S, S));
const LEFT: Segment = ((0, 0), (S, 0));
const RIGHT: Segment = ((0, S), (S, S));
const MIDDLE: Segment = ((M, 0), (M, S));
const CENTER: Segment = ((0, M), (S, M));

/// Stroke sets for labels 0-9, as (row, col) endpoints.
const ARCHETYPES: [&[Segment]; NUM_CLASSES] = [
    &[TOP, RIGHT, BOTTOM, LEFT],
    &[((0, 0), (S, S)), ((0, S), (S, 0))],
    &[CENTER, MIDDLE],
    &[LEFT, BOTTOM],
    &[TOP, CENTER],
    &[LEFT, RIGHT, MIDDLE],
    &[LEFT, RIGHT, BOTTOM],
    &[TOP, ((0, S), (S, 0))],
    &[TOP, RIGHT, BOTTOM, LEFT, MIDDLE],
    &[LEFT, TOP, MIDDLE, BOTTOM],
];

/// Per-sample geometric variation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Jitter {
    /// Translation of up to 2 px each way and stroke width 1-3 px.
    Standard,
    /// Centered glyphs with 2 px strokes: all samples of a class match exactly
    /// after binarization.
    None,
}

pub fn generate_synthetic(seed: u64, count_per_class: usize) -> Dataset {
    generate_synthetic_with(seed, count_per_class, Jitter::Standard)
}

/// Samples are interleaved by class (0, 1, .., 9, 0, 1, ..).
pub fn generate_synthetic_with(seed: u64, count_per_class: usize, jitter: Jitter) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count_per_class * NUM_CLASSES);
    for _ in 0..count_per_class {
        for label in 0..NUM_CLASSES as Label {
            let (dr, dc, width) = match jitter {
                Jitter::Standard => (
                    rng.random_range(-2i32..=2) as isize,
                    rng.random_range(-2i32..=2) as isize,
                    rng.random_range(1i32..=3) as isize,
                ),
                Jitter::None => (0, 0, 2),
            };
            let image = render(label, dr, dc, width, &mut rng);
            samples.push(Sample { image, label });
        }
    }
    Dataset::new(samples, format!("synthetic:seed={seed}")).expect("labels are digits")
}

fn render(label: Label, dr: isize, dc: isize, width: isize, rng: &mut ChaCha8Rng) -> GrayImage {
    let n = SYNTHETIC_SIZE;
    let origin = (n as isize - BOX) / 2;
    let mut ink = vec![false; n * n];
    for &((r0, c0), (r1, c1)) in ARCHETYPES[label as usize] {
        let steps = (r1 - r0).abs().max((c1 - c0).abs()).max(1);
        for i in 0..=steps {
            // integer DDA with round-half-up
            let r = r0 + ((r1 - r0) * i * 2 + steps).div_euclid(2 * steps);
            let c = c0 + ((c1 - c0) * i * 2 + steps).div_euclid(2 * steps);
            stamp(&mut ink, n, origin + dr + r, origin + dc + c, width);
        }
    }
    let pixels = ink
        .into_iter()
        .map(|is_ink| {
            if is_ink {
                rng.random_range(0..=60)
            } else {
                rng.random_range(190..=255)
            }
        })
        .collect();
    GrayImage::new(n, n, pixels).expect("square canvas")
}

/// Square brush anchored at its top-left pixel.
fn stamp(ink: &mut [bool], n: usize, row: isize, col: isize, width: isize) {
    for r in row..row + width {
        for c in col..col + width {
            if (0..n as isize).contains(&r) && (0..n as isize).contains(&c) {
                ink[r as usize * n + c as usize] = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{binarize_otsu, Polarity};

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_synthetic(42, 3), generate_synthetic(42, 3));
        assert_ne!(generate_synthetic(42, 3), generate_synthetic(43, 3));
    }

    #[test]
    fn sample_count_and_labels() {
        let ds = generate_synthetic(7, 5);
        assert_eq!(ds.len(), 50);
        assert_eq!(ds.class_counts(), [5; 10]);
    }

    #[test]
    fn every_glyph_has_ink() {
        for s in generate_synthetic(1, 20).samples {
            let bin = binarize_otsu(&s.image, Polarity::InkDark).unwrap();
            assert!(bin.ink_count() > 0);
        }
    }

    #[test]
    fn jitter_free_glyphs_binarize_identically() {
        let ds = generate_synthetic_with(9, 3, Jitter::None);
        for label in 0..10 {
            let bins: Vec<_> = ds
                .samples
                .iter()
                .filter(|s| s.label == label)
                .map(|s| binarize_otsu(&s.image, Polarity::InkDark).unwrap())
                .collect();
            assert!(bins.windows(2).all(|w| w[0] == w[1]));
        }
    }
}
