//! Rate control: bisection over one global quantizer scale.
//!
//! Each band's step is `max(1, floor(scale / w))`, where `w` is the square
//! root of the band's approximate L2 synthesis gain. Bands whose errors are
//! amplified more on reconstruction get finer steps.

use crate::codec::bitstream::Header;
use crate::codec::dwt::{BandId, Orientation, SubbandPyramid};
use crate::codec::entropy::TokenStats;
use crate::codec::huffman::huffman_build;
use crate::codec::quant::quantize_coefficient;
use crate::codec::{CodecError, CompressOptions};

pub const MAX_ITERATIONS: u32 = 32;

// Squared norms of the 5/3 synthesis filters.
const LOW_GAIN: f64 = 1.5;
const HIGH_GAIN: f64 = 0.71875;

pub fn band_weight(id: BandId) -> f64 {
    let coarse = LOW_GAIN.powi(2 * (i32::from(id.level) - 1));
    let (h, v) = match id.orientation {
        Orientation::LL => (LOW_GAIN, LOW_GAIN),
        Orientation::HL => (HIGH_GAIN, LOW_GAIN),
        Orientation::LH => (LOW_GAIN, HIGH_GAIN),
        Orientation::HH => (HIGH_GAIN, HIGH_GAIN),
    };
    (coarse * h * v).sqrt()
}

/// Steps for every band, in stream order. Any `scale <= 1` yields all ones.
pub fn steps_for_scale(pyr: &SubbandPyramid, scale: f64) -> Vec<u32> {
    pyr.bands()
        .iter()
        .map(|(id, _)| {
            let s = (scale / band_weight(*id)).floor();
            if s.is_nan() || s < 1.0 {
                1
            } else {
                s.min(f64::from(u32::MAX)) as u32
            }
        })
        .collect()
}

/// Total compressed size, header included, for a set of steps.
pub fn compressed_bits(pyr: &SubbandPyramid, steps: &[u32]) -> Result<u64, CodecError> {
    let bands = pyr.bands();
    let stats = TokenStats::of_stream(
        bands
            .iter()
            .zip(steps)
            .flat_map(|((_, plane), &step)| plane.data.iter().map(move |&c| quantize_coefficient(c, step))),
    );
    let code = huffman_build(&stats.histogram)?;
    Ok(Header::encoded_len(pyr.levels()) as u64 * 8 + stats.payload_bits(&code))
}

/// Smallest scale at which every coefficient quantizes to zero.
fn zeroing_scale(pyr: &SubbandPyramid) -> f64 {
    pyr.bands()
        .iter()
        .map(|(id, plane)| {
            let max = plane.data.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
            (f64::from(max) + 1.0) * band_weight(*id)
        })
        .fold(1.0, f64::max)
        + 1.0
}

/// Picks quantizer steps meeting `raw_bits / target_cr`.
///
/// Lossless steps are returned whenever they already fit. Otherwise the
/// search keeps a failing lower scale and a passing upper scale and bisects
/// in the log domain, returning the upper (finer-step) end.
pub fn select_steps(pyr: &SubbandPyramid, raw_bits: u64, opts: &CompressOptions) -> Result<Vec<u32>, CodecError> {
    let fits = |bits: u64| bits as f64 * opts.target_cr <= raw_bits as f64;

    let mut lo_steps = steps_for_scale(pyr, 1.0);
    let lossless_bits = compressed_bits(pyr, &lo_steps)?;
    if fits(lossless_bits) {
        return Ok(lo_steps);
    }
    let mut hi = zeroing_scale(pyr);
    let mut hi_steps = steps_for_scale(pyr, hi);
    let floor_bits = compressed_bits(pyr, &hi_steps)?;
    if !fits(floor_bits) {
        return Err(CodecError::Unreachable { target: opts.target_cr, best: raw_bits as f64 / floor_bits as f64 });
    }

    let mut lo = 1.0f64;
    for _ in 0..opts.max_iterations {
        let mid = (lo * hi).sqrt();
        let mid_steps = steps_for_scale(pyr, mid);
        if mid_steps == hi_steps {
            hi = mid;
            continue;
        }
        if mid_steps == lo_steps {
            lo = mid;
            continue;
        }
        if fits(compressed_bits(pyr, &mid_steps)?) {
            hi = mid;
            hi_steps = mid_steps;
        } else {
            lo = mid;
            lo_steps = mid_steps;
        }
    }
    Ok(hi_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{dwt_forward, encode_pyramid, QuantizerConfig};
    use crate::image::BitDepth;
    use crate::synth;

    #[test]
    fn unit_scale_is_lossless() {
        let pyr = SubbandPyramid::zeros(64, 64, BitDepth::Eight, 5).unwrap();
        assert!(steps_for_scale(&pyr, 1.0).iter().all(|&s| s == 1));
        assert!(steps_for_scale(&pyr, 0.1).iter().all(|&s| s == 1));
    }

    #[test]
    fn finer_steps_for_coarser_bands() {
        let pyr = SubbandPyramid::zeros(64, 64, BitDepth::Eight, 3).unwrap();
        let steps = steps_for_scale(&pyr, 100.0);
        // LL first, finest HH last
        assert!(steps[0] < *steps.last().unwrap());
    }

    #[test]
    fn predicted_size_matches_encoder() {
        let img = synth::phantom(40, 36, BitDepth::Sixteen, 150.0, 3).unwrap();
        let pyr = dwt_forward(&img, 3).unwrap();
        for scale in [1.0, 7.0, 90.0, 4000.0] {
            let steps = steps_for_scale(&pyr, scale);
            let predicted = compressed_bits(&pyr, &steps).unwrap();
            let bs = encode_pyramid(&pyr, &QuantizerConfig::new(steps, true).unwrap()).unwrap();
            assert_eq!(predicted, bs.compressed_bits());
        }
    }

    #[test]
    fn size_does_not_grow_with_scale() {
        let img = synth::phantom(128, 128, BitDepth::Sixteen, 250.0, 11).unwrap();
        let pyr = dwt_forward(&img, 3).unwrap();
        let mut last = u64::MAX;
        for i in 0..40 {
            let scale = 1.35f64.powi(i);
            let bits = compressed_bits(&pyr, &steps_for_scale(&pyr, scale)).unwrap();
            assert!(bits <= last, "scale {scale}: {bits} > {last}");
            last = bits;
        }
    }
}
