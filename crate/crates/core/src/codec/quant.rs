//! Scalar quantization of subband coefficients.

use crate::codec::dwt::SubbandPyramid;
use crate::codec::CodecError;

/// Per-band quantizer steps, in the pyramid's stream order.
///
/// Indices are `sign(c) * floor(|c| / step)`, a dead-zone quantizer whose
/// zero bin is twice as wide as the others. `dead_zone` selects the decoder
/// rule: when set, a nonzero index is reconstructed at the centre of its bin
/// (`step / 2` away from the lower edge); otherwise at the lower edge
/// (`index * step`). With every step at 1 both rules are lossless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizerConfig {
    pub steps: Vec<u32>,
    pub dead_zone: bool,
}

impl QuantizerConfig {
    pub fn new(steps: Vec<u32>, dead_zone: bool) -> Result<Self, CodecError> {
        if let Some(band) = steps.iter().position(|&s| s == 0) {
            return Err(CodecError::ZeroStep { band });
        }
        Ok(QuantizerConfig { steps, dead_zone })
    }

    pub fn lossless(band_count: usize) -> Self {
        QuantizerConfig { steps: vec![1; band_count], dead_zone: false }
    }

    pub fn uniform(step: u32, band_count: usize, dead_zone: bool) -> Result<Self, CodecError> {
        QuantizerConfig::new(vec![step; band_count], dead_zone)
    }

    pub fn is_lossless(&self) -> bool {
        self.steps.iter().all(|&s| s == 1)
    }

    fn check(&self, pyr: &SubbandPyramid) -> Result<(), CodecError> {
        if self.steps.len() != pyr.band_count() {
            return Err(CodecError::StepCount { expected: pyr.band_count(), actual: self.steps.len() });
        }
        if let Some(band) = self.steps.iter().position(|&s| s == 0) {
            return Err(CodecError::ZeroStep { band });
        }
        Ok(())
    }
}

#[inline]
pub fn quantize_coefficient(c: i32, step: u32) -> i32 {
    if step == 1 {
        return c;
    }
    let q = (c.unsigned_abs() / step) as i32;
    if c < 0 {
        -q
    } else {
        q
    }
}

#[inline]
pub fn dequantize_index(q: i32, step: u32, dead_zone: bool) -> i32 {
    if q == 0 || step == 1 {
        return q;
    }
    let offset = if dead_zone { i64::from(step / 2) } else { 0 };
    let magnitude = i64::from(q.unsigned_abs()) * i64::from(step) + offset;
    let magnitude = magnitude.min(i64::from(i32::MAX)) as i32;
    if q < 0 {
        -magnitude
    } else {
        magnitude
    }
}

pub fn quantize(pyr: &SubbandPyramid, q: &QuantizerConfig) -> Result<SubbandPyramid, CodecError> {
    q.check(pyr)?;
    let mut out = pyr.clone();
    for ((_, plane), &step) in out.bands_mut().into_iter().zip(&q.steps) {
        plane.data.iter_mut().for_each(|c| *c = quantize_coefficient(*c, step));
    }
    Ok(out)
}

pub fn dequantize(pyr: &SubbandPyramid, q: &QuantizerConfig) -> Result<SubbandPyramid, CodecError> {
    q.check(pyr)?;
    let mut out = pyr.clone();
    for ((_, plane), &step) in out.bands_mut().into_iter().zip(&q.steps) {
        plane.data.iter_mut().for_each(|c| *c = dequantize_index(*c, step, q.dead_zone));
    }
    Ok(out)
}
