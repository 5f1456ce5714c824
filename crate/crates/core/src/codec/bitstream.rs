//! `.wbc` container.
//!
//! All multi-byte fields are little-endian.
//!
//! | offset      | size      | field                                            |
//! |-------------|-----------|--------------------------------------------------|
//! | 0           | 4         | magic `MWBC`                                     |
//! | 4           | 1         | format version, currently 1                      |
//! | 5           | 4         | image width (u32)                                |
//! | 9           | 4         | image height (u32)                               |
//! | 13          | 1         | bits per sample, 8 or 16                         |
//! | 14          | 1         | decomposition levels `L` (≥ 1)                   |
//! | 15          | 1         | flags; bit 0 = mid-bin reconstruction, others 0  |
//! | 16          | 4·(3L+1)  | quantizer step per band (u32), stream order      |
//! | 16+4(3L+1)  | 64        | Huffman code length per symbol (u8, 0 = unused)  |
//! | 80+4(3L+1)  | 8         | payload length in bits (u64)                     |
//! | 88+4(3L+1)  | ⌈bits/8⌉  | payload, MSB-first                               |
//!
//! Band stream order is LL, then HL, LH, HH of level `L` down to level 1.
//! The payload is the run-length/Huffman coding of the quantized
//! coefficients of every band in that order, row-major within a band.

use thiserror::Error;

use crate::codec::entropy::ALPHABET_SIZE;
use crate::image::BitDepth;

pub const MAGIC: [u8; 4] = *b"MWBC";
pub const VERSION: u8 = 1;
const FLAG_MID_BIN: u8 = 1;
/// Largest pixel count a decoder will allocate for.
pub const MAX_PIXELS: u64 = 1 << 28;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BitstreamError {
    #[error("byte 0: not a .wbc stream")]
    BadMagic,
    #[error("byte 4: unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("byte {offset}: stream truncated while reading {what}")]
    Truncated { offset: usize, what: &'static str },
    #[error("byte {offset}: invalid {what}")]
    InvalidField { offset: usize, what: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub width: u32,
    pub height: u32,
    pub depth: BitDepth,
    pub levels: u8,
    pub dead_zone: bool,
    pub steps: Vec<u32>,
    pub code_lengths: [u8; ALPHABET_SIZE],
    pub payload_bits: u64,
}

impl Header {
    pub fn encoded_len(levels: u8) -> usize {
        4 + 1 + 4 + 4 + 1 + 1 + 1 + 4 * (3 * usize::from(levels) + 1) + ALPHABET_SIZE + 8
    }

    pub fn byte_len(&self) -> usize {
        Header::encoded_len(self.levels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBitstream {
    pub header: Header,
    pub payload: Vec<u8>,
}

impl CompressedBitstream {
    /// `R_c`: header bits plus meaningful payload bits.
    pub fn compressed_bits(&self) -> u64 {
        self.header.byte_len() as u64 * 8 + self.header.payload_bits
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(h.byte_len() + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&h.width.to_le_bytes());
        out.extend_from_slice(&h.height.to_le_bytes());
        out.push(h.depth.bits() as u8);
        out.push(h.levels);
        out.push(if h.dead_zone { FLAG_MID_BIN } else { 0 });
        for s in &h.steps {
            out.extend_from_slice(&s.to_le_bytes());
        }
        out.extend_from_slice(&h.code_lengths);
        out.extend_from_slice(&h.payload_bits.to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BitstreamError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4, "magic").ok() != Some(&MAGIC[..]) {
            return Err(BitstreamError::BadMagic);
        }
        let version = r.u8("version")?;
        if version != VERSION {
            return Err(BitstreamError::UnsupportedVersion(version));
        }
        let width_at = r.pos;
        let width = r.u32("width")?;
        let height = r.u32("height")?;
        if width == 0 || height == 0 || u64::from(width) * u64::from(height) > MAX_PIXELS {
            return Err(BitstreamError::InvalidField { offset: width_at, what: "image dimensions" });
        }
        let depth_at = r.pos;
        let depth = BitDepth::from_bits(u32::from(r.u8("bit depth")?))
            .ok_or(BitstreamError::InvalidField { offset: depth_at, what: "bit depth" })?;
        let levels_at = r.pos;
        let levels = r.u8("levels")?;
        let min = width.min(height);
        if levels == 0 || levels >= 32 || (1u32 << levels) > min {
            return Err(BitstreamError::InvalidField { offset: levels_at, what: "decomposition levels" });
        }
        let flags_at = r.pos;
        let flags = r.u8("flags")?;
        if flags & !FLAG_MID_BIN != 0 {
            return Err(BitstreamError::InvalidField { offset: flags_at, what: "flags" });
        }
        let mut steps = Vec::with_capacity(3 * usize::from(levels) + 1);
        for _ in 0..3 * usize::from(levels) + 1 {
            let at = r.pos;
            let s = r.u32("quantizer steps")?;
            if s == 0 {
                return Err(BitstreamError::InvalidField { offset: at, what: "quantizer step" });
            }
            steps.push(s);
        }
        let mut code_lengths = [0u8; ALPHABET_SIZE];
        code_lengths.copy_from_slice(r.take(ALPHABET_SIZE, "code lengths")?);
        let bits_at = r.pos;
        let payload_bits = u64::from_le_bytes(r.take(8, "payload length")?.try_into().expect("8 bytes"));
        let payload_len = payload_bits.div_ceil(8);
        let available = (bytes.len() - r.pos) as u64;
        if payload_len > available {
            return Err(BitstreamError::Truncated { offset: bytes.len(), what: "payload" });
        }
        if payload_len < available {
            return Err(BitstreamError::InvalidField { offset: bits_at, what: "payload length (trailing bytes)" });
        }
        Ok(CompressedBitstream {
            header: Header {
                width,
                height,
                depth,
                levels,
                dead_zone: flags & FLAG_MID_BIN != 0,
                steps,
                code_lengths,
                payload_bits,
            },
            payload: bytes[r.pos..].to_vec(),
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &'static str) -> Result<&'a [u8], BitstreamError> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(BitstreamError::Truncated { offset: self.bytes.len(), what });
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &'static str) -> Result<u8, BitstreamError> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &'static str) -> Result<u32, BitstreamError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }
}
