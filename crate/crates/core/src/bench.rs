//! Timing harness behind the benchmark sweep and threshold calibration.
//!
//! Each measurement runs one warmup iteration and reports the median of
//! `reps` timed iterations on the monotonic clock. The process must not run
//! other work concurrently while measuring.

use std::hint::black_box;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dispatch::{Axis, PassKind};
use crate::error::{check_window, Result};
use crate::image::{BorderPolicy, Image, OpKind};
use crate::separable::{horizontal_with, vertical_with};
use crate::transpose::{
    transpose_image, transpose_image_naive, transpose_naive, transpose_tile_into, Tile,
};

pub const DEFAULT_SEED: u64 = 0x6d6f_7270_6800;
pub const DEFAULT_REPS: usize = 21;
/// Default sweep image size.
pub const DEFAULT_WIDTH: usize = 800;
pub const DEFAULT_HEIGHT: usize = 600;

/// Column names of the benchmark CSV, in order.
pub const CSV_HEADER: [&str; 7] = [
    "axis",
    "algorithm",
    "window",
    "image_w",
    "image_h",
    "reps",
    "median_ns",
];

/// Uniformly random pixels from a fixed seed.
pub fn random_image(width: usize, height: usize, seed: u64) -> Result<Image> {
    let mut rng = StdRng::seed_from_u64(seed);
    let pixels: Vec<u8> = (0..width * height).map(|_| rng.gen()).collect();
    Image::from_pixels(width, height, &pixels)
}

/// Median wall time of `reps` calls to `f` after one warmup call, in
/// nanoseconds. Never returns 0.
pub fn median_ns(reps: usize, mut f: impl FnMut()) -> u64 {
    f();
    let mut samples: Vec<u64> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_nanos() as u64
        })
        .collect();
    samples.sort_unstable();
    samples[samples.len() / 2].max(1)
}

/// Runs one 1-D pass on `img` exactly as the dispatcher would execute it.
pub fn run_pass(img: &Image, axis: Axis, kind: PassKind, window: usize, op: OpKind) -> Image {
    let border = BorderPolicy::Replicate;
    match axis {
        Axis::Horizontal => horizontal_with(img, window, op, border, kind),
        Axis::Vertical => vertical_with(img, window, op, border, kind, kind.vertical_strategy()),
    }
}

/// Median time of [`run_pass`].
pub fn time_pass(
    img: &Image,
    axis: Axis,
    kind: PassKind,
    window: usize,
    op: OpKind,
    reps: usize,
) -> u64 {
    median_ns(reps, || {
        black_box(run_pass(black_box(img), axis, kind, window, op));
    })
}

/// One timed 1-D pass configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub axis: Axis,
    pub algorithm: PassKind,
    pub window: usize,
    pub image_w: usize,
    pub image_h: usize,
    pub reps: usize,
    pub median_ns: u64,
}

impl BenchRecord {
    pub fn csv_fields(&self) -> [String; 7] {
        [
            self.axis.as_str().to_string(),
            self.algorithm.as_str().to_string(),
            self.window.to_string(),
            self.image_w.to_string(),
            self.image_h.to_string(),
            self.reps.to_string(),
            self.median_ns.to_string(),
        ]
    }
}

/// Erosion time for every axis, algorithm and window, in that nesting order.
pub fn sweep_passes(
    width: usize,
    height: usize,
    windows: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    for &w in windows {
        check_window(w)?;
    }
    let img = random_image(width, height, seed)?;
    let mut records = Vec::with_capacity(4 * windows.len());
    for axis in [Axis::Horizontal, Axis::Vertical] {
        for algorithm in [PassKind::Linear, PassKind::VanHerk] {
            for &window in windows {
                records.push(BenchRecord {
                    axis,
                    algorithm,
                    window,
                    image_w: width,
                    image_h: height,
                    reps,
                    median_ns: time_pass(&img, axis, algorithm, window, OpKind::Erode, reps),
                });
            }
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransposeMethod {
    /// Round-structured tile kernels.
    Tiled,
    /// Plain index swap.
    Scalar,
}

impl TransposeMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            TransposeMethod::Tiled => "tiled",
            TransposeMethod::Scalar => "scalar",
        }
    }
}

/// One timed transpose. `subject` is a tile label such as `16x16.8` or the
/// image size `WxH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransposeRecord {
    pub method: TransposeMethod,
    pub subject: String,
    pub image_w: usize,
    pub image_h: usize,
    pub reps: usize,
    pub median_ns: u64,
}

impl TransposeRecord {
    pub fn csv_fields(&self) -> [String; 7] {
        [
            "transpose".to_string(),
            self.method.as_str().to_string(),
            self.subject.clone(),
            self.image_w.to_string(),
            self.image_h.to_string(),
            self.reps.to_string(),
            self.median_ns.to_string(),
        ]
    }
}

/// Tiles are too fast to time one at a time; each sample covers this many.
const TILE_BATCH: usize = 1024;

fn time_tile<T: crate::transpose::TileElement>(tile: Tile, block: &[T], reps: usize) -> [u64; 2] {
    let n = tile.n();
    let mut out = vec![T::default(); n * n];
    let tiled = median_ns(reps, || {
        for _ in 0..TILE_BATCH {
            transpose_tile_into(black_box(block), &mut out, tile);
            black_box(&mut out);
        }
    });
    let scalar = median_ns(reps, || {
        for _ in 0..TILE_BATCH {
            black_box(transpose_naive(black_box(block), n));
        }
    });
    [tiled, scalar].map(|t| t.div_ceil(TILE_BATCH as u64).max(1))
}

/// Tiled against scalar transpose for the 8x8.16 and 16x16.8 tiles and for
/// a whole `width x height` image.
pub fn sweep_transpose(
    width: usize,
    height: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<TransposeRecord>> {
    let mut rng = StdRng::seed_from_u64(seed);
    let b16: Vec<u16> = (0..64).map(|_| rng.gen()).collect();
    let b8: Vec<u8> = (0..256).map(|_| rng.gen()).collect();
    let mut records = Vec::new();
    let mut push = |method, subject: String, w, h, median_ns| {
        records.push(TransposeRecord {
            method,
            subject,
            image_w: w,
            image_h: h,
            reps,
            median_ns,
        })
    };

    let [tiled, scalar] = time_tile(Tile::T8X8_16, &b16, reps);
    push(
        TransposeMethod::Tiled,
        Tile::T8X8_16.to_string(),
        8,
        8,
        tiled,
    );
    push(
        TransposeMethod::Scalar,
        Tile::T8X8_16.to_string(),
        8,
        8,
        scalar,
    );
    let [tiled, scalar] = time_tile(Tile::T16X16_8, &b8, reps);
    push(
        TransposeMethod::Tiled,
        Tile::T16X16_8.to_string(),
        16,
        16,
        tiled,
    );
    push(
        TransposeMethod::Scalar,
        Tile::T16X16_8.to_string(),
        16,
        16,
        scalar,
    );

    let img = random_image(width, height, seed)?;
    let label = format!("{width}x{height}");
    let tiled = median_ns(reps, || {
        black_box(transpose_image(black_box(&img)));
    });
    let scalar = median_ns(reps, || {
        black_box(transpose_image_naive(black_box(&img)));
    });
    push(TransposeMethod::Tiled, label.clone(), width, height, tiled);
    push(TransposeMethod::Scalar, label, width, height, scalar);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_has_one_row_per_axis_algorithm_window() {
        let windows = [1, 3, 5];
        let records = sweep_passes(20, 10, &windows, 3, 1).unwrap();
        assert_eq!(records.len(), 2 * 2 * windows.len());
        assert!(records.iter().all(|r| r.median_ns > 0 && r.reps == 3));
        assert_eq!(records[0].csv_fields()[..3], ["horizontal", "linear", "1"]);
        assert_eq!(
            records.last().unwrap().csv_fields()[..3],
            ["vertical", "vanherk", "5"]
        );
    }

    #[test]
    fn sweep_rejects_even_windows() {
        assert!(sweep_passes(20, 10, &[3, 4], 3, 1).is_err());
    }

    #[test]
    fn transpose_sweep_rows() {
        let records = sweep_transpose(40, 20, 3, 1).unwrap();
        let subjects: Vec<&str> = records.iter().map(|r| r.subject.as_str()).collect();
        assert_eq!(
            subjects,
            ["8x8.16", "8x8.16", "16x16.8", "16x16.8", "40x20", "40x20"]
        );
        assert_eq!(records[0].csv_fields()[..2], ["transpose", "tiled"]);
        assert_eq!(records[1].csv_fields()[..2], ["transpose", "scalar"]);
    }

    #[test]
    fn random_image_is_seeded() {
        assert_eq!(
            random_image(9, 4, 5).unwrap(),
            random_image(9, 4, 5).unwrap()
        );
        assert_ne!(
            random_image(9, 4, 5).unwrap(),
            random_image(9, 4, 6).unwrap()
        );
    }
}
