//! Fast grayscale erosion and dilation with flat rectangular structuring
//! elements.
//!
//! Both operations are separable: a vertical 1-D pass followed by a
//! horizontal one. Each pass runs either a direct linear-window reduction
//! (cheap for small windows, vectorizes well) or the van Herk/Gil-Werman
//! algorithm (constant work per pixel). [`dispatch`] picks between them per
//! window size; [`reference`] is the brute-force oracle everything is
//! checked against.
//!
//! ```
//! use fastmorph::{erode, make_se, BorderPolicy, DispatchConfig, Image};
//!
//! let img = Image::from_rows(&[[9u8, 8, 7], [6, 5, 4], [3, 2, 1]]).unwrap();
//! let out = erode(&img, make_se(3, 3).unwrap(), BorderPolicy::Replicate, &DispatchConfig::default());
//! assert_eq!(out.to_pixels(), [5, 4, 4, 2, 1, 1, 2, 1, 1]);
//! ```

pub mod bench;
pub mod dispatch;
pub mod error;
pub mod extrema1d;
pub mod image;
pub mod pgm;
pub mod reference;
pub mod separable;
pub mod transpose;

pub use dispatch::{
    calibrate, closing, dilate, erode, gradient, morph, opening, resolve, Axis, ConfigError,
    ConfigSource, DispatchConfig, PassKind,
};
pub use error::{MorphError, Result};
pub use extrema1d::{linear_window_1d, van_herk_1d, OpCounter};
pub use image::{make_se, BorderPolicy, Image, OpKind, StructuringElement};
pub use pgm::{read_pgm, write_pgm, PgmError, PgmVariant};
pub use reference::morph_reference;
pub use separable::{
    horizontal_pass, morph_separable, vertical_pass_direct, vertical_pass_via_transpose,
    vertical_van_herk_direct, PassAlgorithm, VerticalStrategy,
};
pub use transpose::{transpose_image, transpose_tile, Tile};
