//! Subband image codec: 5/3 wavelet pyramid, dead-zone scalar
//! quantization, zero-run coding and canonical Huffman coding, wrapped in a
//! rate controller that hits a requested compression ratio.

pub mod bitio;
pub mod bitstream;
pub mod dwt;
pub mod entropy;
pub mod huffman;
pub mod quant;
pub mod rate;
pub mod rle;

use thiserror::Error;

pub use bitstream::{BitstreamError, CompressedBitstream, Header};
pub use dwt::{dwt_forward, dwt_inverse, BandId, Orientation, Plane, SubbandPyramid};
pub use huffman::{huffman_build, HuffmanCode, HuffmanError};
pub use quant::{dequantize, quantize, QuantizerConfig};
pub use rate::steps_for_scale;
pub use rle::{rle_decode, rle_encode, Run};

use crate::image::GrayImage;
use bitio::{BitReader, BitWriter};
use entropy::{TokenStats, ALPHABET_SIZE};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CodecError {
    #[error("{levels} decomposition levels do not fit a {width}x{height} image")]
    LevelsTooDeep { levels: u8, width: usize, height: usize },
    #[error("subband planes do not tile the recorded image dimensions")]
    PyramidMismatch,
    #[error("quantizer step for band {band} is zero")]
    ZeroStep { band: usize },
    #[error("quantizer has {actual} steps, pyramid has {expected} bands")]
    StepCount { expected: usize, actual: usize },
    #[error("target compression ratio must be a finite value >= 1, got {0}")]
    InvalidTarget(f64),
    #[error("compression ratio {target} unreachable; best achievable is {best:.3}")]
    Unreachable { target: f64, best: f64 },
    #[error(transparent)]
    Huffman(#[from] HuffmanError),
    #[error(transparent)]
    Bitstream(#[from] BitstreamError),
    #[error("payload bit {bit_offset}: {reason}")]
    CorruptPayload { bit_offset: u64, reason: &'static str },
}

pub const DEFAULT_TARGET_CR: f64 = 20.0;
pub const DEFAULT_LEVELS: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CompressOptions {
    pub target_cr: f64,
    pub levels: u8,
    /// Mid-bin reconstruction of nonzero indices.
    pub dead_zone: bool,
    pub max_iterations: u32,
}

impl Default for CompressOptions {
    fn default() -> Self {
        CompressOptions {
            target_cr: DEFAULT_TARGET_CR,
            levels: DEFAULT_LEVELS,
            dead_zone: true,
            max_iterations: rate::MAX_ITERATIONS,
        }
    }
}

impl CompressOptions {
    pub fn with_target(target_cr: f64) -> Self {
        CompressOptions { target_cr, ..CompressOptions::default() }
    }

    pub fn levels(mut self, levels: u8) -> Self {
        self.levels = levels;
        self
    }
}

/// Compresses `img` to at least `opts.target_cr`.
///
/// The rate controller picks the smallest global quantizer scale whose
/// stream fits the bit budget `R0 / target_cr`. If lossless coding already
/// fits, the result is lossless.
pub fn compress(img: &GrayImage, opts: &CompressOptions) -> Result<CompressedBitstream, CodecError> {
    if !opts.target_cr.is_finite() || opts.target_cr < 1.0 {
        return Err(CodecError::InvalidTarget(opts.target_cr));
    }
    let pyr = dwt_forward(img, opts.levels)?;
    let steps = rate::select_steps(&pyr, img.raw_bits(), opts)?;
    encode_pyramid(&pyr, &QuantizerConfig::new(steps, opts.dead_zone)?)
}

/// Lossless (all steps 1) compression.
pub fn compress_lossless(img: &GrayImage, levels: u8) -> Result<CompressedBitstream, CodecError> {
    let pyr = dwt_forward(img, levels)?;
    encode_pyramid(&pyr, &QuantizerConfig::lossless(pyr.band_count()))
}

/// Compression at a fixed global quantizer scale, bypassing rate control.
pub fn compress_at_scale(
    img: &GrayImage,
    levels: u8,
    scale: f64,
    dead_zone: bool,
) -> Result<CompressedBitstream, CodecError> {
    let pyr = dwt_forward(img, levels)?;
    encode_pyramid(&pyr, &QuantizerConfig::new(steps_for_scale(&pyr, scale), dead_zone)?)
}

pub fn encode_pyramid(pyr: &SubbandPyramid, q: &QuantizerConfig) -> Result<CompressedBitstream, CodecError> {
    let quantized = quantize(pyr, q)?;
    let stream = quantized.coefficient_stream();
    let runs = rle_encode(&stream);
    let mut stats = TokenStats::new();
    runs.iter().for_each(|&r| stats.push(r));
    let code = huffman_build(&stats.histogram)?;

    let mut w = BitWriter::new();
    entropy::encode_runs(&runs, &code, &mut w)?;
    let (payload, payload_bits) = w.finish();

    let mut code_lengths = [0u8; ALPHABET_SIZE];
    code_lengths.copy_from_slice(code.lengths());
    Ok(CompressedBitstream {
        header: Header {
            width: pyr.width as u32,
            height: pyr.height as u32,
            depth: pyr.depth,
            levels: pyr.levels(),
            dead_zone: q.dead_zone,
            steps: q.steps.clone(),
            code_lengths,
            payload_bits,
        },
        payload,
    })
}

/// Parses and decodes a `.wbc` byte stream.
pub fn decompress_bytes(bytes: &[u8]) -> Result<GrayImage, CodecError> {
    decompress(&CompressedBitstream::from_bytes(bytes)?)
}

pub fn decompress(bs: &CompressedBitstream) -> Result<GrayImage, CodecError> {
    let h = &bs.header;
    let (width, height) = (h.width as usize, h.height as usize);
    let mut pyr = SubbandPyramid::zeros(width, height, h.depth, h.levels)?;
    let q = QuantizerConfig::new(h.steps.clone(), h.dead_zone)?;
    if q.steps.len() != pyr.band_count() {
        return Err(CodecError::StepCount { expected: pyr.band_count(), actual: q.steps.len() });
    }
    if (bs.payload.len() as u64) < h.payload_bits.div_ceil(8) {
        return Err(CodecError::CorruptPayload {
            bit_offset: bs.payload.len() as u64 * 8,
            reason: "payload shorter than its recorded length",
        });
    }
    let code = HuffmanCode::from_lengths(&h.code_lengths)?;
    let mut r = BitReader::new(&bs.payload, h.payload_bits);
    let coefs = entropy::decode_coefficients(&mut r, &code, width * height)?;
    if r.remaining() != 0 {
        return Err(CodecError::CorruptPayload {
            bit_offset: r.position(),
            reason: "payload continues after the last coefficient",
        });
    }
    let mut at = 0;
    for (_, plane) in pyr.bands_mut() {
        let n = plane.data.len();
        plane.data.copy_from_slice(&coefs[at..at + n]);
        at += n;
    }
    dwt_inverse(&dequantize(&pyr, &q)?)
}
