//! Square tile transpose kernels and a blocked whole-image transpose.
//!
//! A side-`n` tile (`n` a power of two) is transposed in `log2(n)` rounds.
//! Round `k` pairs every row `r` having bit `k` clear with row `r + 2^k` and
//! exchanges the `2^k`-element blocks where the row bit and the column-block
//! parity disagree, i.e. it swaps bit `k` between row and column index. After
//! all rounds every element `(r, c)` has moved to `(c, r)`. With one tile row
//! per 128-bit register each round is a handful of whole-register shifts and
//! masked blends per row pair: round 0 is the classic 2x2 transpose of
//! adjacent elements, later rounds repeat it on wider element groups.
//!
//! On x86_64 the 128-bit tiles (4x4 of 32-bit, 8x8 of 16-bit, 16x16 of
//! 8-bit) run on SSE2; elsewhere the same round structure runs in scalar code.

use std::fmt::Debug;

use crate::error::{MorphError, Result};
use crate::image::Image;

/// Element types a tile kernel can carry.
pub trait TileElement: Copy + Default + PartialEq + Debug + 'static {
    const BITS: usize;
}

impl TileElement for u8 {
    const BITS: usize = 8;
}

impl TileElement for u16 {
    const BITS: usize = 16;
}

impl TileElement for u32 {
    const BITS: usize = 32;
}

/// Shape of a square tile: side length and element width in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tile {
    n: usize,
    elem_bits: usize,
}

impl Tile {
    pub const T4X4_32: Tile = Tile {
        n: 4,
        elem_bits: 32,
    };
    pub const T8X8_16: Tile = Tile {
        n: 8,
        elem_bits: 16,
    };
    pub const T16X16_8: Tile = Tile {
        n: 16,
        elem_bits: 8,
    };

    pub fn new(n: usize, elem_bits: usize) -> Result<Self> {
        if !matches!(n, 4 | 8 | 16) {
            return Err(MorphError::UnsupportedTile(format!(
                "side {n} is not one of 4, 8, 16"
            )));
        }
        if !matches!(elem_bits, 8 | 16 | 32) {
            return Err(MorphError::UnsupportedTile(format!(
                "element width {elem_bits} is not one of 8, 16, 32 bits"
            )));
        }
        Ok(Self { n, elem_bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elem_bits(&self) -> usize {
        self.elem_bits
    }

    /// True when one tile row fills exactly one 128-bit register.
    pub fn is_vector_shape(&self) -> bool {
        self.n * self.elem_bits == 128
    }
}

impl std::fmt::Display for Tile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}.{}", self.n, self.n, self.elem_bits)
    }
}

/// One interleave round on a row-major `n x n` block: exchanges bit `k` of
/// the row and column index of every element.
pub fn interleave_round<T: Copy>(block: &mut [T], n: usize, k: u32) {
    let b = 1usize << k;
    assert!(
        n.is_power_of_two() && b < n,
        "round {k} is out of range for side {n}"
    );
    assert_eq!(block.len(), n * n);
    for r in (0..n).filter(|r| r & b == 0) {
        for c in (0..n).filter(|c| c & b != 0) {
            block.swap(r * n + c, (r + b) * n + (c - b));
        }
    }
}

/// Scalar transpose of a row-major `n x n` block using the round structure.
pub fn transpose_rounds_in_place<T: Copy>(block: &mut [T], n: usize) {
    for k in 0..n.trailing_zeros() {
        interleave_round(block, n, k);
    }
}

/// Plain index-swap transpose of a row-major `n x n` block.
pub fn transpose_naive<T: Copy + Default>(block: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::default(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = block[i * n + j];
        }
    }
    out
}

/// Transposes a row-major tile.
///
/// 128-bit tiles use the vector kernel where available; any other legal
/// shape runs the scalar rounds.
pub fn transpose_tile<T: TileElement>(block: &[T], tile: Tile) -> Result<Vec<T>> {
    if T::BITS != tile.elem_bits {
        return Err(MorphError::UnsupportedTile(format!(
            "{tile} tile given {}-bit elements",
            T::BITS
        )));
    }
    let n = tile.n;
    if block.len() != n * n {
        return Err(MorphError::UnsupportedTile(format!(
            "{tile} tile needs {} elements, got {}",
            n * n,
            block.len()
        )));
    }
    let mut out = vec![T::default(); n * n];
    transpose_tile_into(block, &mut out, tile);
    Ok(out)
}

/// Allocation-free [`transpose_tile`]. Panics when the buffers or element
/// type do not match `tile`.
#[inline]
pub fn transpose_tile_into<T: TileElement>(block: &[T], out: &mut [T], tile: Tile) {
    let n = tile.n;
    assert_eq!(T::BITS, tile.elem_bits);
    assert!(block.len() >= n * n && out.len() >= n * n);
    #[cfg(target_arch = "x86_64")]
    if tile.is_vector_shape() {
        let row_bytes = 16;
        // SAFETY: both buffers hold n rows of exactly 16 bytes each.
        unsafe {
            sse::transpose_128(
                block.as_ptr().cast(),
                row_bytes,
                out.as_mut_ptr().cast(),
                row_bytes,
                n,
                T::BITS / 8,
            );
        }
        return;
    }
    out[..n * n].copy_from_slice(&block[..n * n]);
    transpose_rounds_in_place(&mut out[..n * n], n);
}

/// Whole-image transpose: `out(y, x) = src(x, y)`.
///
/// The interior is covered by 16x16 tiles; rows and columns left over when
/// a side is not a multiple of 16 are finished by index swap.
pub fn transpose_image(src: &Image) -> Image {
    const T: usize = 16;
    let (w, h) = (src.width(), src.height());
    let mut dst = Image::new(h, w).expect("transposed dims are valid");
    let (w_tiled, h_tiled) = (w - w % T, h - h % T);
    let src_stride = src.stride();
    let dst_stride = dst.stride();

    for ty in (0..h_tiled).step_by(T) {
        for tx in (0..w_tiled).step_by(T) {
            transpose_16x16_u8(src, tx, ty, &mut dst);
        }
    }

    let s = src.data();
    let d = dst.data_mut();
    for y in 0..h {
        for x in w_tiled..w {
            d[x * dst_stride + y] = s[y * src_stride + x];
        }
    }
    for y in h_tiled..h {
        for x in 0..w_tiled {
            d[x * dst_stride + y] = s[y * src_stride + x];
        }
    }
    dst
}

/// Index-swap transpose of a whole image, the scalar baseline.
pub fn transpose_image_naive(src: &Image) -> Image {
    let mut dst = Image::new(src.height(), src.width()).expect("transposed dims are valid");
    for y in 0..src.height() {
        for (x, &v) in src.row(y).iter().enumerate() {
            dst.set(y, x, v);
        }
    }
    dst
}

#[inline]
fn transpose_16x16_u8(src: &Image, tx: usize, ty: usize, dst: &mut Image) {
    let src_stride = src.stride();
    let dst_stride = dst.stride();
    #[cfg(target_arch = "x86_64")]
    {
        let s = src.data()[ty * src_stride + tx..].as_ptr();
        let d = dst.data_mut()[tx * dst_stride + ty..].as_mut_ptr();
        // SAFETY: rows ty..ty+16 and columns tx..tx+16 lie inside `src`;
        // rows tx..tx+16 and columns ty..ty+16 lie inside `dst`.
        unsafe { sse::transpose_128(s, src_stride, d, dst_stride, 16, 1) };
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        let mut block = [0u8; 256];
        for r in 0..16 {
            block[r * 16..r * 16 + 16].copy_from_slice(&src.row(ty + r)[tx..tx + 16]);
        }
        transpose_rounds_in_place(&mut block, 16);
        let d = dst.data_mut();
        for r in 0..16 {
            let start = (tx + r) * dst_stride + ty;
            d[start..start + 16].copy_from_slice(&block[r * 16..r * 16 + 16]);
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod sse {
    use std::arch::x86_64::*;

    #[rustfmt::skip]
    static EVEN_BLOCKS: [[u8; 16]; 4] = [
        [0xff, 0, 0xff, 0, 0xff, 0, 0xff, 0, 0xff, 0, 0xff, 0, 0xff, 0, 0xff, 0],
        [0xff, 0xff, 0, 0, 0xff, 0xff, 0, 0, 0xff, 0xff, 0, 0, 0xff, 0xff, 0, 0],
        [0xff, 0xff, 0xff, 0xff, 0, 0, 0, 0, 0xff, 0xff, 0xff, 0xff, 0, 0, 0, 0],
        [0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0, 0, 0, 0, 0, 0, 0, 0],
    ];

    /// Exchanges odd `G`-byte blocks of `a` with even blocks of `b`.
    #[inline(always)]
    unsafe fn trn<const G: i32>(a: __m128i, b: __m128i, keep: __m128i) -> (__m128i, __m128i) {
        let lo = _mm_or_si128(
            _mm_and_si128(keep, a),
            _mm_andnot_si128(keep, _mm_slli_si128::<G>(b)),
        );
        let hi = _mm_or_si128(
            _mm_and_si128(keep, _mm_srli_si128::<G>(a)),
            _mm_andnot_si128(keep, b),
        );
        (lo, hi)
    }

    /// Transposes an `n x n` tile whose rows are 16 bytes each.
    ///
    /// # Safety
    /// `src` and `dst` must address `n` readable/writable rows of 16 bytes
    /// at the given byte strides.
    #[inline(always)]
    pub(super) unsafe fn transpose_128(
        src: *const u8,
        src_stride: usize,
        dst: *mut u8,
        dst_stride: usize,
        n: usize,
        elem_bytes: usize,
    ) {
        let mut rows = [_mm_setzero_si128(); 16];
        for (r, row) in rows.iter_mut().enumerate().take(n) {
            *row = _mm_loadu_si128(src.add(r * src_stride).cast());
        }
        let mut b = 1;
        while b < n {
            let g = b * elem_bytes;
            let keep = _mm_loadu_si128(EVEN_BLOCKS[g.trailing_zeros() as usize].as_ptr().cast());
            for r in (0..n).filter(|r| r & b == 0) {
                let (x, y) = match g {
                    1 => trn::<1>(rows[r], rows[r + b], keep),
                    2 => trn::<2>(rows[r], rows[r + b], keep),
                    4 => trn::<4>(rows[r], rows[r + b], keep),
                    _ => trn::<8>(rows[r], rows[r + b], keep),
                };
                rows[r] = x;
                rows[r + b] = y;
            }
            b <<= 1;
        }
        for (r, row) in rows.iter().enumerate().take(n) {
            _mm_storeu_si128(dst.add(r * dst_stride).cast(), *row);
        }
    }
}
