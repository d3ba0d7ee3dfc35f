//! Brute-force 2-D erosion and dilation.
//!
//! Every output pixel is the extremum of all `w_h * w_v` taps, each sampled
//! through the border policy. No shortcuts: this is the oracle the fast paths
//! are checked against.

use crate::image::{BorderPolicy, Image, OpKind, StructuringElement};

pub fn morph_reference(
    src: &Image,
    se: StructuringElement,
    op: OpKind,
    border: BorderPolicy,
) -> Image {
    let wing_h = se.wing_h() as isize;
    let wing_v = se.wing_v() as isize;
    let mut out = Image::new(src.width(), src.height()).expect("source dims are valid");
    for y in 0..src.height() {
        for x in 0..src.width() {
            let (cx, cy) = (x as isize, y as isize);
            let mut acc = src.sample(cx - wing_h, cy - wing_v, border);
            for dy in -wing_v..=wing_v {
                for dx in -wing_h..=wing_h {
                    acc = op.pick(acc, src.sample(cx + dx, cy + dy, border));
                }
            }
            out.set(x, y, acc);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::make_se;
    use proptest::prelude::*;

    fn img(w: usize, h: usize, pixels: Vec<u8>) -> Image {
        Image::from_pixels(w, h, &pixels).unwrap()
    }

    fn fixture() -> Image {
        Image::from_rows(&[[9u8, 8, 7], [6, 5, 4], [3, 2, 1]]).unwrap()
    }

    #[test]
    fn erode_fixture_3x3() {
        let out = morph_reference(
            &fixture(),
            make_se(3, 3).unwrap(),
            OpKind::Erode,
            BorderPolicy::Replicate,
        );
        let expected = Image::from_rows(&[[5u8, 4, 4], [2, 1, 1], [2, 1, 1]]).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn unit_element_is_identity() {
        let src = fixture();
        for op in [OpKind::Erode, OpKind::Dilate] {
            let out = morph_reference(&src, make_se(1, 1).unwrap(), op, BorderPolicy::Constant(3));
            assert_eq!(out, src);
        }
    }

    #[test]
    fn constant_image_is_fixed_point() {
        let src = Image::filled(7, 5, 42).unwrap();
        for op in [OpKind::Erode, OpKind::Dilate] {
            let out = morph_reference(&src, make_se(5, 3).unwrap(), op, BorderPolicy::Replicate);
            assert_eq!(out, src);
        }
    }

    fn arb_image() -> impl Strategy<Value = Image> {
        (1usize..10, 1usize..10).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), w * h).prop_map(move |p| img(w, h, p))
        })
    }

    fn arb_border() -> impl Strategy<Value = BorderPolicy> {
        prop_oneof![
            Just(BorderPolicy::Replicate),
            any::<u8>().prop_map(BorderPolicy::Constant)
        ]
    }

    proptest! {
        #[test]
        fn duality(src in arb_image(), wh in 0usize..4, wv in 0usize..4, border in arb_border()) {
            let se = StructuringElement::from_wings(wh, wv);
            let dil = morph_reference(&src, se, OpKind::Dilate, border);
            let via_erode = morph_reference(&src.complement(), se, OpKind::Erode, border.complement()).complement();
            prop_assert_eq!(dil, via_erode);
        }

        #[test]
        fn erosion_below_dilation_above(src in arb_image(), wh in 0usize..4, wv in 0usize..4) {
            let se = StructuringElement::from_wings(wh, wv);
            let ero = morph_reference(&src, se, OpKind::Erode, BorderPolicy::Replicate);
            let dil = morph_reference(&src, se, OpKind::Dilate, BorderPolicy::Replicate);
            for y in 0..src.height() {
                for x in 0..src.width() {
                    prop_assert!(ero.get(x, y) <= src.get(x, y));
                    prop_assert!(src.get(x, y) <= dil.get(x, y));
                }
            }
        }

        #[test]
        fn monotone_in_input(src in arb_image(), bump in any::<u64>(), wh in 0usize..3, wv in 0usize..3) {
            let upper = src.map(|v| v.saturating_add((bump % 40) as u8));
            let se = StructuringElement::from_wings(wh, wv);
            for op in [OpKind::Erode, OpKind::Dilate] {
                let a = morph_reference(&src, se, op, BorderPolicy::Replicate);
                let b = morph_reference(&upper, se, op, BorderPolicy::Replicate);
                prop_assert!(a.to_pixels().iter().zip(b.to_pixels()).all(|(x, y)| *x <= y));
            }
        }

        #[test]
        fn interior_ignores_border(src in arb_image(), c in any::<u8>()) {
            let se = make_se(3, 3).unwrap();
            let a = morph_reference(&src, se, OpKind::Erode, BorderPolicy::Replicate);
            let b = morph_reference(&src, se, OpKind::Erode, BorderPolicy::Constant(c));
            for y in 1..src.height().saturating_sub(1) {
                for x in 1..src.width().saturating_sub(1) {
                    prop_assert_eq!(a.get(x, y), b.get(x, y));
                }
            }
        }
    }
}
