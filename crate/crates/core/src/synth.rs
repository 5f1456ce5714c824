//! Deterministic synthetic test images.
//!
//! Inputs can be requested by name wherever a PGM path is accepted, using
//! `synth:<kind>:<W>x<H>[:<bits>[:<seed>]]`, for example
//! `synth:phantom:512x512:16:7`. Kinds are `phantom`, `blobs`, `ramp` and
//! `noise`. Bits default to 16 and the seed to 0.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::image::{BitDepth, GrayImage, ImageError};

pub const PREFIX: &str = "synth:";

/// Ellipses of the modified Shepp-Logan head phantom:
/// `(intensity, semi-axis a, semi-axis b, x0, y0, angle in degrees)`.
const SHEPP_LOGAN: [(f64, f64, f64, f64, f64, f64); 10] = [
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn to_sample(v: f64, max: f64) -> u32 {
    v.round().clamp(0.0, max) as u32
}

fn add_noise(base: Vec<f64>, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if sigma <= 0.0 || !sigma.is_finite() {
        return base;
    }
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    base.into_iter().map(|v| v + normal.sample(rng)).collect()
}

fn raster(width: usize, height: usize, depth: BitDepth, values: &[f64]) -> Result<GrayImage, ImageError> {
    let max = f64::from(depth.max_value());
    GrayImage::from_fn(width, height, depth, |x, y| to_sample(values[y * width + x], max))
}

/// Shepp-Logan head phantom spanning about 80% of the depth's range, on a
/// faint smooth background, plus Gaussian noise of standard deviation
/// `noise_sigma` gray levels.
pub fn phantom(
    width: usize,
    height: usize,
    depth: BitDepth,
    noise_sigma: f64,
    seed: u64,
) -> Result<GrayImage, ImageError> {
    let max = f64::from(depth.max_value());
    let ellipses: Vec<_> = SHEPP_LOGAN
        .iter()
        .map(|&(v, a, b, x0, y0, deg)| {
            let (s, c) = deg.to_radians().sin_cos();
            (v, a * a, b * b, x0, y0, s, c)
        })
        .collect();
    let mut base = Vec::with_capacity(width * height);
    for y in 0..height {
        let v = 1.0 - 2.0 * (y as f64 + 0.5) / height as f64;
        for x in 0..width {
            let u = 2.0 * (x as f64 + 0.5) / width as f64 - 1.0;
            let mut level = 0.0;
            for &(val, a2, b2, x0, y0, s, c) in &ellipses {
                let (dx, dy) = (u - x0, v - y0);
                let (px, py) = (dx * c + dy * s, -dx * s + dy * c);
                if px * px / a2 + py * py / b2 <= 1.0 {
                    level += val;
                }
            }
            let background = 0.03 * (1.0 - 0.25 * (u * u + v * v));
            base.push((0.8 * level + background) * max);
        }
    }
    let base = add_noise(base, noise_sigma, &mut rng(seed));
    raster(width, height, depth, &base)
}

/// Sum of `count` random Gaussian blobs, with mild noise.
pub fn blobs(width: usize, height: usize, depth: BitDepth, count: usize, seed: u64) -> Result<GrayImage, ImageError> {
    let max = f64::from(depth.max_value());
    let mut r = rng(seed);
    let scale = width.max(height) as f64;
    let specs: Vec<(f64, f64, f64, f64)> = (0..count)
        .map(|_| {
            (
                r.random_range(0.0..width as f64),
                r.random_range(0.0..height as f64),
                r.random_range(0.03..0.2) * scale,
                r.random_range(0.1..0.5) * max,
            )
        })
        .collect();
    let mut base = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let v: f64 = specs
                .iter()
                .map(|&(cx, cy, s, amp)| {
                    let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                    amp * (-d2 / (2.0 * s * s)).exp()
                })
                .sum();
            base.push(v);
        }
    }
    let base = add_noise(base, max * 0.002, &mut r);
    raster(width, height, depth, &base)
}

/// Diagonal ramp from 0 at the top-left to the maximum at the bottom-right.
pub fn ramp(width: usize, height: usize, depth: BitDepth) -> Result<GrayImage, ImageError> {
    let max = u64::from(depth.max_value());
    let span = (width + height).saturating_sub(2).max(1) as u64;
    GrayImage::from_fn(width, height, depth, |x, y| ((x + y) as u64 * max / span) as u32)
}

/// Uniform white noise over the full sample range.
pub fn noise(width: usize, height: usize, depth: BitDepth, seed: u64) -> Result<GrayImage, ImageError> {
    let max = depth.max_value();
    let mut r = rng(seed);
    GrayImage::from_fn(width, height, depth, |_, _| u32::from(r.random_range(0..=max)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Phantom,
    Blobs,
    Ramp,
    Noise,
}

impl FromStr for SynthKind {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "phantom" => Ok(SynthKind::Phantom),
            "blobs" => Ok(SynthKind::Blobs),
            "ramp" => Ok(SynthKind::Ramp),
            "noise" => Ok(SynthKind::Noise),
            other => Err(SynthError::UnknownKind(other.to_string())),
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthKind::Phantom => "phantom",
            SynthKind::Blobs => "blobs",
            SynthKind::Ramp => "ramp",
            SynthKind::Noise => "noise",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("synthetic spec must look like synth:<kind>:<W>x<H>[:<bits>[:<seed>]], got {0:?}")]
    Malformed(String),
    #[error("unknown synthetic image kind {0:?}")]
    UnknownKind(String),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Parsed `synth:` input description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub width: usize,
    pub height: usize,
    pub depth: BitDepth,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(kind: SynthKind, width: usize, height: usize, depth: BitDepth, seed: u64) -> Self {
        SynthSpec { kind, width, height, depth, seed }
    }

    /// Phantom noise used for `synth:phantom`: 0.5% of full scale.
    pub fn phantom_sigma(depth: BitDepth) -> f64 {
        f64::from(depth.max_value()) * 0.005
    }

    pub fn generate(&self) -> Result<GrayImage, SynthError> {
        let (w, h, d) = (self.width, self.height, self.depth);
        let img = match self.kind {
            SynthKind::Phantom => phantom(w, h, d, SynthSpec::phantom_sigma(d), self.seed)?,
            SynthKind::Blobs => blobs(w, h, d, 12, self.seed)?,
            SynthKind::Ramp => ramp(w, h, d)?,
            SynthKind::Noise => noise(w, h, d, self.seed)?,
        };
        Ok(img)
    }
}

impl FromStr for SynthSpec {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, SynthError> {
        let malformed = || SynthError::Malformed(s.to_string());
        let body = s.strip_prefix(PREFIX).ok_or_else(malformed)?;
        let mut parts = body.split(':');
        let kind: SynthKind = parts.next().ok_or_else(malformed)?.parse()?;
        let (w, h) = parts.next().and_then(|d| d.split_once('x')).ok_or_else(malformed)?;
        let width: usize = w.parse().map_err(|_| malformed())?;
        let height: usize = h.parse().map_err(|_| malformed())?;
        let depth = match parts.next() {
            None => BitDepth::Sixteen,
            Some(b) => b.parse().ok().and_then(BitDepth::from_bits).ok_or_else(malformed)?,
        };
        let seed = match parts.next() {
            None => 0,
            Some(v) => v.parse().map_err(|_| malformed())?,
        };
        if parts.next().is_some() || width == 0 || height == 0 {
            return Err(malformed());
        }
        Ok(SynthSpec::new(kind, width, height, depth, seed))
    }
}

impl fmt::Display for SynthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{PREFIX}{}:{}x{}:{}:{}", self.kind, self.width, self.height, self.depth.bits(), self.seed)
    }
}
