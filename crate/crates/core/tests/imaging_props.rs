mod common;

use common::{arb_binary, arb_gray, otsu_oracle};
use numeral_fusion::imaging::{
    binarize, crop_to_bounding_box, make_zone_grid, resize_binary, BinaryImage, GrayImage, Polarity,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn otsu_matches_exhaustive_search(img in arb_gray(9, 9)) {
        prop_assert_eq!(numeral_fusion::imaging::otsu_threshold(&img), otsu_oracle(&img));
    }

    #[test]
    fn binarize_partitions_pixels(img in arb_gray(12, 12), t in any::<u8>()) {
        let dark = binarize(&img, t, Polarity::InkDark);
        let light = binarize(&img, t, Polarity::InkLight);
        prop_assert_eq!(dark.ink_count() + light.ink_count(), img.width() * img.height());
        prop_assert!(dark.pixels().iter().all(|&p| p <= 1));
    }

    #[test]
    fn crop_is_idempotent(img in arb_binary(14, 14)) {
        prop_assume!(img.ink_count() > 0);
        let once = crop_to_bounding_box(&img).unwrap();
        prop_assert_eq!(crop_to_bounding_box(&once).unwrap(), once.clone());
        prop_assert_eq!(once.ink_count(), img.ink_count());
    }

    #[test]
    fn resize_keeps_binarity_and_dimensions(img in arb_binary(20, 20), w in 1usize..40, h in 1usize..40) {
        let out = resize_binary(&img, w, h);
        prop_assert_eq!((out.width(), out.height()), (w, h));
        prop_assert!(out.pixels().iter().all(|&p| p <= 1));
    }

    #[test]
    fn zones_tile_the_image(rows in 1usize..6, cols in 1usize..6, ch in 1usize..6, cw in 1usize..6) {
        let grid = make_zone_grid(cols * cw, rows * ch, rows, cols).unwrap();
        let mut hits = vec![0u32; grid.zone_count()];
        for r in 0..rows * ch {
            for c in 0..cols * cw {
                hits[grid.zone_index(r, c)] += 1;
            }
        }
        prop_assert!(hits.iter().all(|&n| n as usize == ch * cw));
    }
}

#[test]
fn zone_grid_rejects_uneven_partition() {
    assert!(make_zone_grid(30, 30, 7, 7).is_err());
    assert!(make_zone_grid(30, 30, 0, 3).is_err());
}

#[test]
fn resize_uses_nearest_source_pixel() {
    let img = BinaryImage::from_ascii("#.\n.#").unwrap();
    let big = resize_binary(&img, 4, 4);
    let expected = BinaryImage::from_ascii("##..\n##..\n..##\n..##").unwrap();
    assert_eq!(big, expected);
}

#[test]
fn otsu_two_level_image_splits_between_levels() {
    let img = GrayImage::from_fn(4, 4, |r, _| if r < 2 { 30 } else { 200 });
    let t = numeral_fusion::imaging::otsu_threshold(&img);
    assert_eq!(t, otsu_oracle(&img));
    assert!((30..200).contains(&t));
}
