use std::fmt;

use thiserror::Error;

/// Bits per sample of a grayscale raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    /// Largest representable sample, `2^R - 1`.
    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => u8::MAX as u16,
            BitDepth::Sixteen => u16::MAX,
        }
    }

    pub fn from_bits(bits: u32) -> Option<Self> {
        match bits {
            8 => Some(BitDepth::Eight),
            16 => Some(BitDepth::Sixteen),
            _ => None,
        }
    }
}

impl fmt::Display for BitDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-bit", self.bits())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("expected {expected} samples for the given dimensions, got {actual}")]
    SampleCount { expected: usize, actual: usize },
    #[error("sample {value} at index {index} exceeds {depth} maximum {max}")]
    SampleRange { index: usize, value: u16, depth: BitDepth, max: u16 },
}

/// Row-major grayscale raster.
///
/// Construction validates every invariant, so any `GrayImage` in hand has
/// `width * height` samples, all within the bit depth's range.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    depth: BitDepth,
    pixels: Vec<u16>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, depth: BitDepth, pixels: Vec<u16>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width.checked_mul(height).ok_or(ImageError::EmptyDimensions { width, height })?;
        if pixels.len() != expected {
            return Err(ImageError::SampleCount { expected, actual: pixels.len() });
        }
        let max = depth.max_value();
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, &v)| v > max) {
            return Err(ImageError::SampleRange { index, value, depth, max });
        }
        Ok(GrayImage { width, height, depth, pixels })
    }

    /// A `width × height` image filled with `value` (clamped to the depth's range).
    pub fn filled(width: usize, height: usize, depth: BitDepth, value: u16) -> Result<Self, ImageError> {
        let value = value.min(depth.max_value());
        GrayImage::new(width, height, depth, vec![value; width * height])
    }

    /// Builds an image from per-pixel values computed by `f(x, y)`, clamping
    /// each to the depth's range.
    pub fn from_fn(
        width: usize,
        height: usize,
        depth: BitDepth,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Result<Self, ImageError> {
        let max = u32::from(depth.max_value());
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y).min(max) as u16);
            }
        }
        GrayImage::new(width, height, depth, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.depth
    }

    pub fn pixels(&self) -> &[u16] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u16> {
        self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> u16 {
        self.pixels[y * self.width + x]
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    /// Uncompressed size in bits, `M · N · R`.
    pub fn raw_bits(&self) -> u64 {
        self.pixels.len() as u64 * u64::from(self.depth.bits())
    }
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("depth", &self.depth)
            .finish_non_exhaustive()
    }
}
