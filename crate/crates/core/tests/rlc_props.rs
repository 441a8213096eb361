mod common;

use common::{arb_binary, horizontal_oracle, vertical_oracle};
use numeral_fusion::imaging::BinaryImage;
use numeral_fusion::rlc::{extract_rlc, horizontal_rlc, rlc_features, vertical_rlc, RLC_LEN};
use proptest::prelude::*;

proptest! {
    #[test]
    fn counts_match_pairwise_oracle(z in arb_binary(24, 24)) {
        prop_assert_eq!(horizontal_rlc(&z.view()), horizontal_oracle(&z.view()));
        prop_assert_eq!(vertical_rlc(&z.view()), vertical_oracle(&z.view()));
    }

    #[test]
    fn vertical_is_horizontal_of_transpose(z in arb_binary(24, 24)) {
        prop_assert_eq!(vertical_rlc(&z.view()), horizontal_rlc(&z.transpose().view()));
    }

    #[test]
    fn horizontal_ignores_mirroring(z in arb_binary(24, 24)) {
        let w = z.width();
        let mirrored = BinaryImage::from_fn(w, z.height(), |r, c| z.is_ink(r, w - 1 - c));
        prop_assert_eq!(horizontal_rlc(&z.view()), horizontal_rlc(&mirrored.view()));
    }

    #[test]
    fn counts_are_bounded(z in arb_binary(24, 24)) {
        let (w, h) = (z.width() as u32, z.height() as u32);
        prop_assert!(horizontal_rlc(&z.view()) <= h * (w - 1));
        prop_assert!(vertical_rlc(&z.view()) <= w * (h - 1));
    }

    #[test]
    fn pipeline_yields_eighteen_bounded_values(img in arb_binary(40, 40)) {
        prop_assume!(img.ink_count() > 0);
        let v = rlc_features(&img).unwrap();
        prop_assert_eq!(v.values.len(), RLC_LEN);
        prop_assert!(v.values.iter().all(|&x| x <= 24 * 23));
    }
}

#[test]
fn checkerboard_zone_is_maximal() {
    let img = BinaryImage::from_fn(72, 72, |r, c| (r + c) % 2 == 0);
    let v = extract_rlc(&img).unwrap();
    assert!(v.values.iter().all(|&x| x == 24 * 23));
}
