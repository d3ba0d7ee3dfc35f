//! PGM (portable graymap) reading and writing, 8-bit only.
//!
//! The reader accepts binary `P5` and ASCII `P2` files with `#` comments in
//! the header. The writer emits a canonical byte stream with no comments.

use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmVariant {
    /// Binary pixels.
    P5,
    /// Decimal ASCII pixels.
    P2,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("bad magic number: expected P5 or P2")]
    BadMagic,
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("unsupported maxval {0}: only 255 is supported")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel data: expected {expected} pixels, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("bad pixel value {0:?}")]
    BadPixel(String),
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self
                    .bytes
                    .get(self.pos)
                    .is_some_and(|&c| c != b'\n' && c != b'\r')
                {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u32, PgmError> {
        let tok = self
            .token()
            .ok_or_else(|| PgmError::BadHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                PgmError::BadHeader(format!(
                    "{what} is not a number: {:?}",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

/// Parses a P5 or P2 graymap.
pub fn read_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let variant = match bytes.get(..2) {
        Some(b"P5") => PgmVariant::P5,
        Some(b"P2") => PgmVariant::P2,
        _ => return Err(PgmError::BadMagic),
    };
    if bytes
        .get(2)
        .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
    {
        return Err(PgmError::BadMagic);
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(PgmError::BadHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    let maxval = cur.header_number("maxval")?;
    if maxval != 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let expected = width * height;

    let pixels = match variant {
        PgmVariant::P5 => {
            // Exactly one whitespace byte separates maxval from the raster.
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                Some(_) => {
                    return Err(PgmError::BadHeader(
                        "maxval not followed by whitespace".into(),
                    ))
                }
                None => return Err(PgmError::TruncatedData { expected, found: 0 }),
            }
            let data = &bytes[cur.pos..];
            if data.len() < expected {
                return Err(PgmError::TruncatedData {
                    expected,
                    found: data.len(),
                });
            }
            data[..expected].to_vec()
        }
        PgmVariant::P2 => {
            let mut pixels = Vec::with_capacity(expected);
            while pixels.len() < expected {
                let Some(tok) = cur.token() else {
                    return Err(PgmError::TruncatedData {
                        expected,
                        found: pixels.len(),
                    });
                };
                let value = std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse::<u8>().ok())
                    .ok_or_else(|| PgmError::BadPixel(String::from_utf8_lossy(tok).into_owned()))?;
                pixels.push(value);
            }
            pixels
        }
    };
    Ok(Image::from_pixels(width, height, &pixels).expect("dimensions checked above"))
}

/// Canonical encoding: `P5\n<w> <h>\n255\n` plus raw rows, or the `P2`
/// analog with one space-separated row per line.
pub fn write_pgm(img: &Image, variant: PgmVariant) -> Vec<u8> {
    let (w, h) = (img.width(), img.height());
    match variant {
        PgmVariant::P5 => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.reserve(w * h);
            for row in img.rows() {
                out.extend_from_slice(row);
            }
            out
        }
        PgmVariant::P2 => {
            let mut out = format!("P2\n{w} {h}\n255\n");
            for row in img.rows() {
                let line: Vec<String> = row.iter().map(u8::to_string).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}
