//! Compression ratio, zero-order entropy, MSE, PSNR and rate-distortion sweeps.

use std::fmt::Write as _;

use thiserror::Error;

use crate::codec::{self, CodecError, CompressOptions};
use crate::image::GrayImage;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("compressed size is zero")]
    ZeroCompressed,
    #[error("original size is zero")]
    ZeroOriginal,
    #[error("images differ in shape: {0}x{1} {2} vs {3}x{4} {5}")]
    Mismatch(usize, usize, String, usize, usize, String),
    #[error("sweep points must be ascending and >= 1")]
    BadSweep,
}

/// `R0 / Rc`.
pub fn compression_ratio(bits_original: u64, bits_compressed: u64) -> Result<f64, MetricsError> {
    if bits_compressed == 0 {
        return Err(MetricsError::ZeroCompressed);
    }
    if bits_original == 0 {
        return Err(MetricsError::ZeroOriginal);
    }
    Ok(bits_original as f64 / bits_compressed as f64)
}

/// Gray-level histogram over `0..=2^R-1`.
pub fn histogram(img: &GrayImage) -> Vec<u64> {
    let mut h = vec![0u64; usize::from(img.bit_depth().max_value()) + 1];
    for &v in img.pixels() {
        h[usize::from(v)] += 1;
    }
    h
}

/// `H0 = -Σ p(k) log2 p(k)` in bits per pixel, from empirical frequencies.
pub fn entropy_h0(img: &GrayImage) -> f64 {
    codec::huffman::entropy_bits(&histogram(img))
}

fn check_shapes(a: &GrayImage, b: &GrayImage) -> Result<(), MetricsError> {
    if a.width() != b.width() || a.height() != b.height() || a.bit_depth() != b.bit_depth() {
        return Err(MetricsError::Mismatch(
            a.width(),
            a.height(),
            a.bit_depth().to_string(),
            b.width(),
            b.height(),
            b.bit_depth().to_string(),
        ));
    }
    Ok(())
}

/// Mean squared error, accumulated in integers and divided once.
pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64, MetricsError> {
    check_shapes(a, b)?;
    let sum: u128 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = u64::from(x.abs_diff(y));
            u128::from(d * d)
        })
        .sum();
    Ok(sum as f64 / a.pixel_count() as f64)
}

fn snr_db(peak: f64, mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// `10 log10((2^R - 1)^2 / MSE)`; `+inf` when the images are identical.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64, MetricsError> {
    let m = mse(a, b)?;
    Ok(psnr_from_mse(m, a))
}

pub fn psnr_from_mse(mse: f64, reference: &GrayImage) -> f64 {
    snr_db(f64::from(reference.bit_depth().max_value()), mse)
}

/// Peak-to-peak SNR: like PSNR but with the original's actual dynamic range
/// `max - min` as the peak. `None` for a flat original.
pub fn ppsnr(original: &GrayImage, reconstructed: &GrayImage) -> Result<Option<f64>, MetricsError> {
    let m = mse(original, reconstructed)?;
    let max = original.pixels().iter().copied().max().unwrap_or(0);
    let min = original.pixels().iter().copied().min().unwrap_or(0);
    if max == min {
        return Ok(None);
    }
    Ok(Some(snr_db(f64::from(max - min), m)))
}

/// Formats a decibel value, writing `inf` for a perfect reconstruction.
pub fn format_db(db: f64) -> String {
    if db.is_infinite() && db > 0.0 {
        "inf".to_string()
    } else {
        format!("{db:.4}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub cr: f64,
    pub entropy_h0: f64,
    pub mse: f64,
    pub psnr_db: f64,
    pub ppsnr_db: Option<f64>,
    pub bits_original: u64,
    pub bits_compressed: u64,
}

impl QualityReport {
    pub const CSV_HEADER: &'static str = "cr,entropy_h0,mse,psnr_db";

    pub fn measure(
        original: &GrayImage,
        reconstructed: &GrayImage,
        bits_compressed: u64,
    ) -> Result<Self, MetricsError> {
        let m = mse(original, reconstructed)?;
        Ok(QualityReport {
            cr: compression_ratio(original.raw_bits(), bits_compressed)?,
            entropy_h0: entropy_h0(original),
            mse: m,
            psnr_db: psnr_from_mse(m, original),
            ppsnr_db: ppsnr(original, reconstructed)?,
            bits_original: original.raw_bits(),
            bits_compressed,
        })
    }

    pub fn csv_row(&self) -> String {
        format!("{:.4},{:.4},{:.4},{}", self.cr, self.entropy_h0, self.mse, format_db(self.psnr_db))
    }
}

/// One point of a rate-distortion sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub target_cr: f64,
    pub outcome: Result<QualityReport, CodecError>,
}

/// Compresses and decompresses `img` once per requested ratio.
///
/// Codec failures are recorded per point rather than aborting the sweep.
pub fn rate_distortion_sweep(
    img: &GrayImage,
    cr_points: &[f64],
    base: &CompressOptions,
) -> Result<Vec<SweepPoint>, MetricsError> {
    if cr_points.iter().any(|&c| c.is_nan() || c < 1.0) || cr_points.windows(2).any(|w| w[0] > w[1]) {
        return Err(MetricsError::BadSweep);
    }
    let points = cr_points
        .iter()
        .map(|&target| {
            let opts = CompressOptions { target_cr: target, ..base.clone() };
            let outcome = codec::compress(img, &opts).and_then(|bs| {
                let rec = codec::decompress(&bs)?;
                Ok(QualityReport::measure(img, &rec, bs.compressed_bits()).expect("same shape"))
            });
            SweepPoint { target_cr: target, outcome }
        })
        .collect();
    Ok(points)
}

/// CSV with columns `target_cr,cr,mse,psnr_db,status`.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("target_cr,cr,mse,psnr_db,status\n");
    for p in points {
        match &p.outcome {
            Ok(r) => {
                let _ = writeln!(out, "{},{:.4},{:.4},{},ok", p.target_cr, r.cr, r.mse, format_db(r.psnr_db));
            }
            Err(e) => {
                let _ = writeln!(out, "{},,,,\"error: {}\"", p.target_cr, e);
            }
        }
    }
    out
}
