//! 2-D erosion and dilation as a vertical pass followed by a horizontal pass.
//!
//! Flat rectangular min/max filters are separable: the `w_h x w_v` window
//! extremum equals the `w_h` extremum along the row of the `w_v` extrema
//! along each column. Out-of-range samples compose the same way. For
//! Replicate, clamping each axis separately is clamping the point. For a
//! constant `c`, a 2-D window touching the outside contributes `c`, and so
//! does either 1-D pass whose window leaves the image.

use crate::dispatch::{resolve, Axis, DispatchConfig, PassKind};
use crate::error::{check_window, Result};
use crate::extrema1d::{reduce_into, reduce_pair, MaxReducer, MinReducer, Reducer, RowScratch};
use crate::image::{clamp_index, BorderPolicy, Image, OpKind, StructuringElement};
use crate::transpose::transpose_image;

/// Algorithm requested for one 1-D pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PassAlgorithm {
    Linear,
    VanHerk,
    /// Chosen per window size from the dispatch thresholds.
    Auto,
}

impl From<PassKind> for PassAlgorithm {
    fn from(kind: PassKind) -> Self {
        match kind {
            PassKind::Linear => PassAlgorithm::Linear,
            PassKind::VanHerk => PassAlgorithm::VanHerk,
        }
    }
}

/// How the vertical pass walks the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerticalStrategy {
    /// Whole-row elementwise reductions down the columns.
    Direct,
    /// Transpose, run the horizontal pass, transpose back.
    ViaTranspose,
}

pub const ALL_ALGORITHMS: [PassAlgorithm; 3] = [
    PassAlgorithm::Linear,
    PassAlgorithm::VanHerk,
    PassAlgorithm::Auto,
];

pub const ALL_STRATEGIES: [VerticalStrategy; 2] =
    [VerticalStrategy::Direct, VerticalStrategy::ViaTranspose];

/// Window extremum along each row.
pub fn horizontal_pass(
    src: &Image,
    w_h: usize,
    op: OpKind,
    border: BorderPolicy,
    alg: PassAlgorithm,
) -> Result<Image> {
    check_window(w_h)?;
    let kind = resolve(alg, w_h, Axis::Horizontal, &DispatchConfig::default());
    Ok(horizontal_with(src, w_h, op, border, kind))
}

/// Window extremum down each column, processing output rows in pairs.
///
/// Output rows `y` and `y + 1` share the `w_v - 1` input rows
/// `y - wing + 1 ..= y + wing`. Those are reduced once; each output row then
/// takes one more row, `y - wing` or `y + wing + 1` respectively.
pub fn vertical_pass_direct(
    src: &Image,
    w_v: usize,
    op: OpKind,
    border: BorderPolicy,
) -> Result<Image> {
    check_window(w_v)?;
    Ok(vertical_with(
        src,
        w_v,
        op,
        border,
        PassKind::Linear,
        VerticalStrategy::Direct,
    ))
}

/// van Herk/Gil-Werman down each column with whole-row elementwise
/// forward and backward running extrema. Scratch is two image-sized
/// buffers.
pub fn vertical_van_herk_direct(
    src: &Image,
    w_v: usize,
    op: OpKind,
    border: BorderPolicy,
) -> Result<Image> {
    check_window(w_v)?;
    Ok(vertical_with(
        src,
        w_v,
        op,
        border,
        PassKind::VanHerk,
        VerticalStrategy::Direct,
    ))
}

/// Vertical pass computed as `transpose(horizontal_pass(transpose(src)))`.
pub fn vertical_pass_via_transpose(
    src: &Image,
    w_v: usize,
    op: OpKind,
    border: BorderPolicy,
    alg: PassAlgorithm,
) -> Result<Image> {
    check_window(w_v)?;
    let kind = resolve(alg, w_v, Axis::Vertical, &DispatchConfig::default());
    Ok(vertical_with(
        src,
        w_v,
        op,
        border,
        kind,
        VerticalStrategy::ViaTranspose,
    ))
}

/// Separable erosion or dilation: vertical pass, then horizontal pass.
///
/// `Auto` passes resolve against the default dispatch thresholds.
pub fn morph_separable(
    src: &Image,
    se: StructuringElement,
    op: OpKind,
    border: BorderPolicy,
    h_alg: PassAlgorithm,
    v_alg: PassAlgorithm,
    v_strategy: VerticalStrategy,
) -> Image {
    let cfg = DispatchConfig::default();
    let h_kind = resolve(h_alg, se.w_h(), Axis::Horizontal, &cfg);
    let v_kind = resolve(v_alg, se.w_v(), Axis::Vertical, &cfg);
    morph_resolved(src, se, op, border, h_kind, v_kind, v_strategy)
}

pub(crate) fn morph_resolved(
    src: &Image,
    se: StructuringElement,
    op: OpKind,
    border: BorderPolicy,
    h_kind: PassKind,
    v_kind: PassKind,
    v_strategy: VerticalStrategy,
) -> Image {
    let mid = vertical_with(src, se.w_v(), op, border, v_kind, v_strategy);
    horizontal_with(&mid, se.w_h(), op, border, h_kind)
}

pub(crate) fn horizontal_with(
    src: &Image,
    w: usize,
    op: OpKind,
    border: BorderPolicy,
    kind: PassKind,
) -> Image {
    if w == 1 {
        return src.clone();
    }
    let mut out = src.blank_like();
    let mut scratch = RowScratch::default();
    for y in 0..src.height() {
        let row = src.row(y);
        let dst = out.row_mut(y);
        match kind {
            PassKind::Linear => scratch.linear(row, w, op, border, dst, &mut ()),
            PassKind::VanHerk => scratch.van_herk(row, w, op, border, dst, &mut ()),
        }
    }
    out
}

pub(crate) fn vertical_with(
    src: &Image,
    w: usize,
    op: OpKind,
    border: BorderPolicy,
    kind: PassKind,
    strategy: VerticalStrategy,
) -> Image {
    if w == 1 {
        return src.clone();
    }
    match (strategy, kind, op) {
        (VerticalStrategy::ViaTranspose, _, _) => {
            let t = transpose_image(src);
            transpose_image(&horizontal_with(&t, w, op, border, kind))
        }
        (VerticalStrategy::Direct, PassKind::Linear, OpKind::Erode) => {
            vertical_linear::<MinReducer>(src, w, border)
        }
        (VerticalStrategy::Direct, PassKind::Linear, OpKind::Dilate) => {
            vertical_linear::<MaxReducer>(src, w, border)
        }
        (VerticalStrategy::Direct, PassKind::VanHerk, OpKind::Erode) => {
            vertical_van_herk::<MinReducer>(src, w, border)
        }
        (VerticalStrategy::Direct, PassKind::VanHerk, OpKind::Dilate) => {
            vertical_van_herk::<MaxReducer>(src, w, border)
        }
    }
}

/// Full-stride rows of an image, extended vertically by a border policy.
struct BorderedRows<'a> {
    img: &'a Image,
    constant_row: Option<Vec<u8>>,
}

impl<'a> BorderedRows<'a> {
    fn new(img: &'a Image, border: BorderPolicy) -> Self {
        let constant_row = match border {
            BorderPolicy::Replicate => None,
            BorderPolicy::Constant(c) => Some(vec![c; img.stride()]),
        };
        Self { img, constant_row }
    }

    #[inline]
    fn get(&self, y: isize) -> &[u8] {
        let h = self.img.height();
        if y >= 0 && (y as usize) < h {
            return self.img.full_row(y as usize);
        }
        match &self.constant_row {
            Some(row) => row,
            None => self.img.full_row(clamp_index(y, h)),
        }
    }
}

fn vertical_linear<R: Reducer>(src: &Image, w: usize, border: BorderPolicy) -> Image {
    let rows = BorderedRows::new(src, border);
    let wing = (w / 2) as isize;
    let h = src.height();
    let mut out = src.blank_like();
    let mut shared = vec![0u8; src.stride()];

    let mut y = 0;
    while y + 1 < h {
        let yi = y as isize;
        shared.copy_from_slice(rows.get(yi - wing + 1));
        for r in yi - wing + 2..=yi + wing {
            reduce_into::<R>(&mut shared, rows.get(r));
        }
        reduce_pair::<R>(out.full_row_mut(y), &shared, rows.get(yi - wing));
        reduce_pair::<R>(out.full_row_mut(y + 1), &shared, rows.get(yi + wing + 1));
        y += 2;
    }
    if y < h {
        let yi = y as isize;
        shared.copy_from_slice(rows.get(yi - wing));
        for r in yi - wing + 1..=yi + wing {
            reduce_into::<R>(&mut shared, rows.get(r));
        }
        out.full_row_mut(y).copy_from_slice(&shared);
    }
    out
}

fn vertical_van_herk<R: Reducer>(src: &Image, w: usize, border: BorderPolicy) -> Image {
    let rows = BorderedRows::new(src, border);
    let wing = (w / 2) as isize;
    let h = src.height();
    let s = src.stride();
    // Padded column length; padded row j is source row j - wing.
    let len = h + w - 1;
    let mut forward = vec![0u8; len * s];
    let mut backward = vec![0u8; len * s];

    for start in (0..len).step_by(w) {
        let end = (start + w).min(len);
        forward[start * s..(start + 1) * s].copy_from_slice(rows.get(start as isize - wing));
        for j in start + 1..end {
            let (prev, cur) = forward.split_at_mut(j * s);
            reduce_pair::<R>(
                &mut cur[..s],
                &prev[(j - 1) * s..],
                rows.get(j as isize - wing),
            );
        }
        backward[(end - 1) * s..end * s].copy_from_slice(rows.get(end as isize - 1 - wing));
        for j in (start..end - 1).rev() {
            let (cur, next) = backward.split_at_mut((j + 1) * s);
            reduce_pair::<R>(&mut cur[j * s..], &next[..s], rows.get(j as isize - wing));
        }
    }

    let mut out = src.blank_like();
    for y in 0..h {
        let bwd = &backward[y * s..(y + 1) * s];
        if y % w == 0 {
            out.full_row_mut(y).copy_from_slice(bwd);
        } else {
            let end = y + w - 1;
            reduce_pair::<R>(out.full_row_mut(y), bwd, &forward[end * s..(end + 1) * s]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::make_se;
    use crate::reference::morph_reference;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_image(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = StdRng::seed_from_u64(seed);
        let pixels: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
        Image::from_pixels(w, h, &pixels).unwrap()
    }

    fn column(values: &[u8]) -> Image {
        Image::from_pixels(1, values.len(), values).unwrap()
    }

    const SEQ: [u8; 8] = [4, 2, 6, 1, 3, 5, 0, 7];
    const SEQ_ERODE3: [u8; 8] = [2, 2, 1, 1, 1, 0, 0, 0];

    #[test]
    fn unit_windows_are_identity() {
        let src = random_image(7, 5, 1);
        let b = BorderPolicy::Replicate;
        assert_eq!(
            horizontal_pass(&src, 1, OpKind::Erode, b, PassAlgorithm::VanHerk).unwrap(),
            src
        );
        assert_eq!(
            vertical_pass_direct(&src, 1, OpKind::Erode, b).unwrap(),
            src
        );
        assert_eq!(
            vertical_pass_via_transpose(&src, 1, OpKind::Dilate, b, PassAlgorithm::Linear).unwrap(),
            src
        );
        let out = morph_separable(
            &src,
            make_se(1, 1).unwrap(),
            OpKind::Dilate,
            b,
            PassAlgorithm::Auto,
            PassAlgorithm::Auto,
            VerticalStrategy::Direct,
        );
        assert_eq!(out, src);
    }

    #[test]
    fn one_row_and_one_column_examples() {
        let b = BorderPolicy::Replicate;
        let row = Image::from_pixels(8, 1, &SEQ).unwrap();
        let out = horizontal_pass(&row, 3, OpKind::Erode, b, PassAlgorithm::Linear).unwrap();
        assert_eq!(out.to_pixels(), SEQ_ERODE3);
        let out = vertical_pass_direct(&column(&SEQ), 3, OpKind::Erode, b).unwrap();
        assert_eq!(out.to_pixels(), SEQ_ERODE3);
        let out = vertical_van_herk_direct(&column(&SEQ), 3, OpKind::Erode, b).unwrap();
        assert_eq!(out.to_pixels(), SEQ_ERODE3);
    }

    #[test]
    fn fixture_3x3() {
        let src = Image::from_rows(&[[9u8, 8, 7], [6, 5, 4], [3, 2, 1]]).unwrap();
        let expected = Image::from_rows(&[[5u8, 4, 4], [2, 1, 1], [2, 1, 1]]).unwrap();
        for strategy in ALL_STRATEGIES {
            let out = morph_separable(
                &src,
                make_se(3, 3).unwrap(),
                OpKind::Erode,
                BorderPolicy::Replicate,
                PassAlgorithm::Linear,
                PassAlgorithm::VanHerk,
                strategy,
            );
            assert_eq!(out, expected);
        }
    }

    #[test]
    fn passes_match_reference() {
        let src = random_image(17, 9, 2);
        let h = horizontal_pass(
            &src,
            5,
            OpKind::Dilate,
            BorderPolicy::Replicate,
            PassAlgorithm::VanHerk,
        )
        .unwrap();
        assert_eq!(
            h,
            morph_reference(
                &src,
                make_se(5, 1).unwrap(),
                OpKind::Dilate,
                BorderPolicy::Replicate
            )
        );

        let src = random_image(9, 17, 3);
        let b = BorderPolicy::Constant(255);
        let v = vertical_pass_direct(&src, 7, OpKind::Erode, b).unwrap();
        assert_eq!(
            v,
            morph_reference(&src, make_se(1, 7).unwrap(), OpKind::Erode, b)
        );

        let src = random_image(16, 16, 4);
        let v = vertical_pass_via_transpose(
            &src,
            3,
            OpKind::Dilate,
            BorderPolicy::Replicate,
            PassAlgorithm::VanHerk,
        )
        .unwrap();
        assert_eq!(
            v,
            morph_reference(
                &src,
                make_se(1, 3).unwrap(),
                OpKind::Dilate,
                BorderPolicy::Replicate
            )
        );
    }

    #[test]
    fn full_strategy_matrix_33x21() {
        let src = random_image(33, 21, 5);
        let se = make_se(7, 5).unwrap();
        let b = BorderPolicy::Constant(0);
        let expected = morph_reference(&src, se, OpKind::Dilate, b);
        for h_alg in ALL_ALGORITHMS {
            for v_alg in ALL_ALGORITHMS {
                for strategy in ALL_STRATEGIES {
                    let out = morph_separable(&src, se, OpKind::Dilate, b, h_alg, v_alg, strategy);
                    assert_eq!(out, expected, "{h_alg:?} {v_alg:?} {strategy:?}");
                }
            }
        }
    }

    #[test]
    fn non_identity_constant_border_is_still_separable() {
        let src = random_image(11, 13, 6);
        let se = make_se(5, 7).unwrap();
        for c in [0u8, 17, 128, 255] {
            for op in [OpKind::Erode, OpKind::Dilate] {
                let b = BorderPolicy::Constant(c);
                let out = morph_separable(
                    &src,
                    se,
                    op,
                    b,
                    PassAlgorithm::VanHerk,
                    PassAlgorithm::Linear,
                    VerticalStrategy::Direct,
                );
                assert_eq!(out, morph_reference(&src, se, op, b));
            }
        }
    }

    #[test]
    fn padding_never_leaks() {
        // Same pixels, different garbage in the padding columns.
        let pixels: Vec<u8> = (0..5 * 6).map(|i| (i * 41 % 256) as u8).collect();
        let mut a = vec![0u8; 16 * 6];
        let mut b = vec![255u8; 16 * 6];
        for y in 0..6 {
            a[y * 16..y * 16 + 5].copy_from_slice(&pixels[y * 5..y * 5 + 5]);
            b[y * 16..y * 16 + 5].copy_from_slice(&pixels[y * 5..y * 5 + 5]);
        }
        let a = Image::with_stride(5, 6, 16, a).unwrap();
        let b = Image::with_stride(5, 6, 16, b).unwrap();
        let se = make_se(3, 5).unwrap();
        for op in [OpKind::Erode, OpKind::Dilate] {
            for strategy in ALL_STRATEGIES {
                for alg in [PassAlgorithm::Linear, PassAlgorithm::VanHerk] {
                    let x =
                        morph_separable(&a, se, op, BorderPolicy::Replicate, alg, alg, strategy);
                    let y =
                        morph_separable(&b, se, op, BorderPolicy::Replicate, alg, alg, strategy);
                    assert_eq!(x, y);
                }
            }
        }
    }

    #[test]
    fn even_windows_rejected() {
        let src = random_image(4, 4, 7);
        let b = BorderPolicy::Replicate;
        assert!(horizontal_pass(&src, 2, OpKind::Erode, b, PassAlgorithm::Linear).is_err());
        assert!(vertical_pass_direct(&src, 4, OpKind::Erode, b).is_err());
        assert!(
            vertical_pass_via_transpose(&src, 0, OpKind::Erode, b, PassAlgorithm::Auto).is_err()
        );
    }

    fn arb_case() -> impl Strategy<Value = (Image, usize, usize, OpKind, BorderPolicy)> {
        (
            1usize..20,
            1usize..20,
            any::<u64>(),
            0usize..8,
            0usize..8,
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(|(w, h, seed, wh, wv, dilate, replicate)| {
                let op = if dilate {
                    OpKind::Dilate
                } else {
                    OpKind::Erode
                };
                let border = if replicate {
                    BorderPolicy::Replicate
                } else {
                    BorderPolicy::Constant(op.identity())
                };
                (random_image(w, h, seed), 2 * wh + 1, 2 * wv + 1, op, border)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn separable_matches_reference((src, w_h, w_v, op, border) in arb_case()) {
            let se = make_se(w_h, w_v).unwrap();
            let expected = morph_reference(&src, se, op, border);
            for strategy in ALL_STRATEGIES {
                for alg in [PassAlgorithm::Linear, PassAlgorithm::VanHerk] {
                    let out = morph_separable(&src, se, op, border, alg, alg, strategy);
                    prop_assert_eq!(&out, &expected);
                }
            }
        }

        #[test]
        fn passes_commute((src, w_h, w_v, op, border) in arb_case()) {
            let hv = vertical_pass_direct(
                &horizontal_pass(&src, w_h, op, border, PassAlgorithm::Linear).unwrap(), w_v, op, border,
            ).unwrap();
            let vh = horizontal_pass(
                &vertical_pass_direct(&src, w_v, op, border).unwrap(), w_h, op, border, PassAlgorithm::VanHerk,
            ).unwrap();
            prop_assert_eq!(hv, vh);
        }

        #[test]
        fn vertical_strategies_agree((src, _w_h, w_v, op, border) in arb_case()) {
            let direct = vertical_pass_direct(&src, w_v, op, border).unwrap();
            for alg in ALL_ALGORITHMS {
                prop_assert_eq!(&vertical_pass_via_transpose(&src, w_v, op, border, alg).unwrap(), &direct);
            }
            prop_assert_eq!(&vertical_van_herk_direct(&src, w_v, op, border).unwrap(), &direct);
        }

        #[test]
        fn horizontal_rows_are_independent((src, w_h, _w_v, op, border) in arb_case(), shift in 0usize..20) {
            let h = src.height();
            let perm: Vec<usize> = (0..h).map(|y| (y + shift) % h).collect();
            let rows: Vec<&[u8]> = perm.iter().map(|&y| src.row(y)).collect();
            let permuted = Image::from_rows(&rows).unwrap();
            let a = horizontal_pass(&src, w_h, op, border, PassAlgorithm::VanHerk).unwrap();
            let b = horizontal_pass(&permuted, w_h, op, border, PassAlgorithm::VanHerk).unwrap();
            for (y, &p) in perm.iter().enumerate() {
                prop_assert_eq!(b.row(y), a.row(p));
            }
        }
    }
}
