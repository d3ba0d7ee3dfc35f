//! Shared data model: images, structuring elements, border policies and
//! border-aware sampling.

use std::fmt;

use crate::error::{check_window, MorphError, Result};

/// Row strides of internally allocated images are rounded up to this many
/// pixels so whole-row reductions can run over full 128-bit vectors.
pub const STRIDE_ALIGN: usize = 16;

/// Smallest padded stride able to hold `width` pixels.
pub fn padded_stride(width: usize) -> usize {
    width.div_ceil(STRIDE_ALIGN) * STRIDE_ALIGN
}

/// An owned 8-bit grayscale image stored row-major with an explicit stride.
///
/// Pixel `(x, y)` lives at `y * stride + x`. Bytes past `width` in each row
/// are padding: they may hold anything and never influence visible output.
/// Equality compares visible pixels only.
#[derive(Clone)]
pub struct Image {
    width: usize,
    height: usize,
    stride: usize,
    data: Vec<u8>,
}

impl Image {
    /// A zero-filled image with a padded stride.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        check_dims(width, height)?;
        let stride = padded_stride(width);
        Ok(Self {
            width,
            height,
            stride,
            data: vec![value; stride * height],
        })
    }

    /// Builds an image from tightly packed row-major pixels.
    pub fn from_pixels(width: usize, height: usize, pixels: &[u8]) -> Result<Self> {
        check_dims(width, height)?;
        if pixels.len() != width * height {
            return Err(MorphError::InvalidDimensions(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        let mut img = Self::new(width, height)?;
        for (y, src) in pixels.chunks_exact(width).enumerate() {
            img.row_mut(y).copy_from_slice(src);
        }
        Ok(img)
    }

    /// Builds an image from equally long rows.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        check_dims(width, height)?;
        let mut img = Self::new(width, height)?;
        for (y, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != width {
                return Err(MorphError::InvalidDimensions(format!(
                    "row {y} has {} pixels, expected {width}",
                    row.len()
                )));
            }
            img.row_mut(y).copy_from_slice(row);
        }
        Ok(img)
    }

    /// Wraps an existing buffer with a caller-chosen stride.
    pub fn with_stride(width: usize, height: usize, stride: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if stride < width {
            return Err(MorphError::InvalidDimensions(format!(
                "stride {stride} is smaller than width {width}"
            )));
        }
        if data.len() != stride * height {
            return Err(MorphError::InvalidDimensions(format!(
                "buffer holds {} bytes, stride {stride} x height {height} needs {}",
                data.len(),
                stride * height
            )));
        }
        Ok(Self {
            width,
            height,
            stride,
            data,
        })
    }

    /// Zero-filled image with the same geometry and stride as `self`.
    pub(crate) fn blank_like(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            stride: self.stride,
            data: vec![0; self.data.len()],
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    /// Raw buffer including padding.
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Visible pixels of row `y`.
    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        let start = y * self.stride;
        &self.data[start..start + self.width]
    }

    #[inline]
    pub fn row_mut(&mut self, y: usize) -> &mut [u8] {
        let start = y * self.stride;
        &mut self.data[start..start + self.width]
    }

    /// Row `y` including its padding bytes.
    #[inline]
    pub(crate) fn full_row(&self, y: usize) -> &[u8] {
        let start = y * self.stride;
        &self.data[start..start + self.stride]
    }

    #[inline]
    pub(crate) fn full_row_mut(&mut self, y: usize) -> &mut [u8] {
        let start = y * self.stride;
        &mut self.data[start..start + self.stride]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        (0..self.height).map(move |y| self.row(y))
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of range"
        );
        self.data[y * self.stride + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of range"
        );
        self.data[y * self.stride + x] = value;
    }

    /// Visible pixels, tightly packed row-major.
    pub fn to_pixels(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height);
        for row in self.rows() {
            out.extend_from_slice(row);
        }
        out
    }

    /// Applies `f` to every visible pixel.
    pub fn map(&self, f: impl Fn(u8) -> u8) -> Image {
        let mut out = self.blank_like();
        for y in 0..self.height {
            for (o, &v) in out.row_mut(y).iter_mut().zip(self.row(y)) {
                *o = f(v);
            }
        }
        out
    }

    /// Intensity complement `v -> 255 - v`.
    pub fn complement(&self) -> Image {
        self.map(|v| 255 - v)
    }

    /// Pixel value at signed coordinates, falling back to `border` outside
    /// the image.
    #[inline]
    pub fn sample(&self, x: isize, y: isize, border: BorderPolicy) -> u8 {
        let in_x = x >= 0 && (x as usize) < self.width;
        let in_y = y >= 0 && (y as usize) < self.height;
        if in_x && in_y {
            return self.data[y as usize * self.stride + x as usize];
        }
        match border {
            BorderPolicy::Replicate => {
                let cx = clamp_index(x, self.width);
                let cy = clamp_index(y, self.height);
                self.data[cy * self.stride + cx]
            }
            BorderPolicy::Constant(c) => c,
        }
    }
}

impl PartialEq for Image {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.rows().zip(other.rows()).all(|(a, b)| a == b)
    }
}

impl Eq for Image {}

impl fmt::Debug for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Image {}x{} (stride {}) [",
            self.width, self.height, self.stride
        )?;
        for row in self.rows() {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(MorphError::InvalidDimensions(format!(
            "width and height must be at least 1, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Clamps a signed coordinate into `0..len`.
#[inline]
pub fn clamp_index(i: isize, len: usize) -> usize {
    i.clamp(0, len as isize - 1) as usize
}

/// Rule for values outside the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BorderPolicy {
    /// Clamp to the nearest edge pixel.
    #[default]
    Replicate,
    /// Substitute a fixed value.
    Constant(u8),
}

impl BorderPolicy {
    /// The policy seen through the intensity complement.
    pub fn complement(self) -> Self {
        match self {
            BorderPolicy::Replicate => BorderPolicy::Replicate,
            BorderPolicy::Constant(c) => BorderPolicy::Constant(255 - c),
        }
    }
}

/// Erosion takes the window minimum, dilation the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Erode,
    Dilate,
}

impl OpKind {
    #[inline]
    pub fn pick(self, a: u8, b: u8) -> u8 {
        match self {
            OpKind::Erode => a.min(b),
            OpKind::Dilate => a.max(b),
        }
    }

    /// Neutral element of the reduction: a constant border with this value
    /// behaves as if out-of-range samples were ignored.
    pub fn identity(self) -> u8 {
        match self {
            OpKind::Erode => u8::MAX,
            OpKind::Dilate => u8::MIN,
        }
    }

    pub fn dual(self) -> Self {
        match self {
            OpKind::Erode => OpKind::Dilate,
            OpKind::Dilate => OpKind::Erode,
        }
    }
}

/// Flat rectangular structuring element with a centered anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StructuringElement {
    w_h: usize,
    w_v: usize,
}

impl StructuringElement {
    /// `w_h` spans along a row, `w_v` along a column. Both must be odd.
    pub fn new(w_h: usize, w_v: usize) -> Result<Self> {
        check_window(w_h)?;
        check_window(w_v)?;
        Ok(Self { w_h, w_v })
    }

    /// Element built from half-extents, `w = 2 * wing + 1`.
    pub fn from_wings(wing_h: usize, wing_v: usize) -> Self {
        Self {
            w_h: 2 * wing_h + 1,
            w_v: 2 * wing_v + 1,
        }
    }

    #[inline]
    pub fn w_h(&self) -> usize {
        self.w_h
    }

    #[inline]
    pub fn w_v(&self) -> usize {
        self.w_v
    }

    #[inline]
    pub fn wing_h(&self) -> usize {
        (self.w_h - 1) / 2
    }

    #[inline]
    pub fn wing_v(&self) -> usize {
        (self.w_v - 1) / 2
    }
}

/// Shorthand for [`StructuringElement::new`].
pub fn make_se(w_h: usize, w_v: usize) -> Result<StructuringElement> {
    StructuringElement::new(w_h, w_v)
}
