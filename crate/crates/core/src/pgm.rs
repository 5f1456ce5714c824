//! Netpbm graymap reader and writer (binary `P5` and plain `P2`).
//!
//! Only maxval 255 (8-bit) and 65535 (16-bit) are accepted. Other maxvals
//! are rejected instead of rescaled. 16-bit binary samples are big-endian.

use std::fmt::Write as _;

use thiserror::Error;

use crate::image::{BitDepth, GrayImage};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("byte {offset}: not a PGM stream (expected magic P5 or P2)")]
    BadMagic { offset: usize },
    #[error("byte {offset}: expected {what}")]
    BadHeader { offset: usize, what: &'static str },
    #[error("byte {offset}: unsupported maxval {maxval} (only 255 and 65535 are accepted)")]
    UnsupportedMaxval { offset: usize, maxval: u32 },
    #[error("byte {offset}: pixel data truncated, {found} of {expected} samples present")]
    Truncated { offset: usize, expected: usize, found: usize },
    #[error("byte {offset}: sample {value} exceeds maxval {maxval}")]
    SampleRange { offset: usize, value: u32, maxval: u32 },
    #[error("byte {offset}: image dimensions {width}x{height} are not supported")]
    Dimensions { offset: usize, width: usize, height: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Binary,
    Plain,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    /// Skips whitespace and `#` comments that run to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Parses an unsigned decimal token, returning it with its start offset.
    fn number(&mut self, what: &'static str) -> Result<(u32, usize), PgmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or(PgmError::BadHeader { offset: start, what })?;
            self.pos += 1;
        }
        let terminated = self.bytes.get(self.pos).is_none_or(|b| b.is_ascii_whitespace() || *b == b'#');
        if self.pos == start || !terminated {
            return Err(PgmError::BadHeader { offset: self.pos, what });
        }
        Ok((value, start))
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let flavor = match bytes.get(..2) {
        Some(b"P5") => Flavor::Binary,
        Some(b"P2") => Flavor::Plain,
        _ => return Err(PgmError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadMagic { offset: 2 });
    }
    let (width, width_at) = cur.number("image width")?;
    let (height, _) = cur.number("image height")?;
    let (maxval, maxval_at) = cur.number("maxval")?;
    let (width, height) = (width as usize, height as usize);
    if width == 0 || height == 0 || width.checked_mul(height).is_none() {
        return Err(PgmError::Dimensions { offset: width_at, width, height });
    }
    let depth = match maxval {
        255 => BitDepth::Eight,
        65535 => BitDepth::Sixteen,
        _ => return Err(PgmError::UnsupportedMaxval { offset: maxval_at, maxval }),
    };
    let count = width * height;

    let pixels = match flavor {
        Flavor::Binary => {
            // exactly one whitespace byte separates maxval from the raster
            match cur.bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(PgmError::BadHeader { offset: cur.pos, what: "single whitespace before raster" }),
            }
            let raster = &bytes[cur.pos..];
            let sample_bytes = if depth == BitDepth::Eight { 1 } else { 2 };
            let available = raster.len() / sample_bytes;
            if available < count {
                return Err(PgmError::Truncated { offset: bytes.len(), expected: count, found: available });
            }
            match depth {
                BitDepth::Eight => raster[..count].iter().map(|&b| u16::from(b)).collect(),
                BitDepth::Sixteen => {
                    raster[..2 * count].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
                }
            }
        }
        Flavor::Plain => {
            let mut pixels = Vec::with_capacity(count);
            for found in 0..count {
                cur.skip_separators();
                if cur.pos >= bytes.len() {
                    return Err(PgmError::Truncated { offset: cur.pos, expected: count, found });
                }
                let (value, at) = cur.number("decimal sample")?;
                if value > maxval {
                    return Err(PgmError::SampleRange { offset: at, value, maxval });
                }
                pixels.push(value as u16);
            }
            pixels
        }
    };

    // Samples were range-checked above so construction cannot fail.
    Ok(GrayImage::new(width, height, depth, pixels).expect("validated PGM raster"))
}

pub fn save_pgm(img: &GrayImage, ascii: bool) -> Vec<u8> {
    let maxval = img.bit_depth().max_value();
    let magic = if ascii { "P2" } else { "P5" };
    let header = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height());
    let mut out = header.into_bytes();
    if ascii {
        let mut text = String::new();
        for row in img.pixels().chunks(img.width()) {
            let mut line_len = 0;
            for (i, v) in row.iter().enumerate() {
                let token = v.to_string();
                // plain PGM lines should stay under 70 characters
                if i > 0 {
                    if line_len + 1 + token.len() > 69 {
                        text.push('\n');
                        line_len = 0;
                    } else {
                        text.push(' ');
                        line_len += 1;
                    }
                }
                let _ = write!(text, "{token}");
                line_len += token.len();
            }
            text.push('\n');
        }
        out.extend_from_slice(text.as_bytes());
    } else {
        match img.bit_depth() {
            BitDepth::Eight => out.extend(img.pixels().iter().map(|&v| v as u8)),
            BitDepth::Sixteen => {
                out.reserve(img.pixels().len() * 2);
                for v in img.pixels() {
                    out.extend_from_slice(&v.to_be_bytes());
                }
            }
        }
    }
    out
}
