//! Reversible LeGall 5/3 lifting, applied separably over a dyadic pyramid.
//!
//! Odd lengths split into `ceil(n/2)` low-pass and `floor(n/2)` high-pass
//! samples, with whole-sample symmetric extension at both borders.

use crate::codec::CodecError;
use crate::image::{BitDepth, GrayImage};

/// One rectangular plane of integer coefficients, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<i32>,
}

impl Plane {
    pub fn zeros(width: usize, height: usize) -> Self {
        Plane { width, height, data: vec![0; width * height] }
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    fn put_column(&mut self, x: usize, src: &[i32]) {
        for (y, &v) in src.iter().enumerate() {
            self.data[y * self.width + x] = v;
        }
    }

    fn get_column(&self, x: usize, dst: &mut [i32]) {
        for (y, v) in dst.iter_mut().enumerate() {
            *v = self.data[y * self.width + x];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Low-pass in both directions; only kept at the deepest level.
    LL,
    /// High-pass horizontally, low-pass vertically.
    HL,
    /// Low-pass horizontally, high-pass vertically.
    LH,
    HH,
}

/// Identifies one subband. Level 1 is the finest decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandId {
    pub level: u8,
    pub orientation: Orientation,
}

/// Detail planes produced by one decomposition step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetailLevel {
    pub hl: Plane,
    pub lh: Plane,
    pub hh: Plane,
}

/// Multi-level subband decomposition of a grayscale image.
///
/// `details[0]` holds the finest level. Bands are enumerated in stream order:
/// the LL plane first, then HL, LH, HH of each level from the deepest to the
/// finest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubbandPyramid {
    pub width: usize,
    pub height: usize,
    pub depth: BitDepth,
    pub ll: Plane,
    pub details: Vec<DetailLevel>,
}

impl SubbandPyramid {
    pub fn levels(&self) -> u8 {
        self.details.len() as u8
    }

    pub fn band_count(&self) -> usize {
        3 * self.details.len() + 1
    }

    pub fn bands(&self) -> Vec<(BandId, &Plane)> {
        let levels = self.levels();
        let mut out = Vec::with_capacity(self.band_count());
        out.push((band(levels, Orientation::LL), &self.ll));
        for (i, d) in self.details.iter().enumerate().rev() {
            let level = i as u8 + 1;
            out.push((band(level, Orientation::HL), &d.hl));
            out.push((band(level, Orientation::LH), &d.lh));
            out.push((band(level, Orientation::HH), &d.hh));
        }
        out
    }

    pub fn bands_mut(&mut self) -> Vec<(BandId, &mut Plane)> {
        let levels = self.levels();
        let mut out = Vec::with_capacity(self.band_count());
        out.push((band(levels, Orientation::LL), &mut self.ll));
        for (i, d) in self.details.iter_mut().enumerate().rev() {
            let level = i as u8 + 1;
            out.push((band(level, Orientation::HL), &mut d.hl));
            out.push((band(level, Orientation::LH), &mut d.lh));
            out.push((band(level, Orientation::HH), &mut d.hh));
        }
        out
    }

    /// A pyramid of the right geometry with every coefficient zero.
    pub fn zeros(width: usize, height: usize, depth: BitDepth, levels: u8) -> Result<Self, CodecError> {
        check_levels(width, height, levels)?;
        let mut details = Vec::with_capacity(levels as usize);
        let (mut w, mut h) = (width, height);
        for _ in 0..levels {
            let (lw, hw) = split(w);
            let (lh, hh) = split(h);
            details.push(DetailLevel { hl: Plane::zeros(hw, lh), lh: Plane::zeros(lw, hh), hh: Plane::zeros(hw, hh) });
            w = lw;
            h = lh;
        }
        Ok(SubbandPyramid { width, height, depth, ll: Plane::zeros(w, h), details })
    }

    /// Concatenation of all bands in stream order.
    pub fn coefficient_stream(&self) -> Vec<i32> {
        let mut out = Vec::with_capacity(self.width * self.height);
        for (_, p) in self.bands() {
            out.extend_from_slice(&p.data);
        }
        out
    }

    /// Checks that the bands tile the original image exactly.
    pub fn validate(&self) -> Result<(), CodecError> {
        let expected = SubbandPyramid::zeros(self.width, self.height, self.depth, self.levels())?;
        let same = expected
            .bands()
            .iter()
            .zip(self.bands())
            .all(|((_, a), (_, b))| a.width == b.width && a.height == b.height && b.data.len() == b.area());
        if !same {
            return Err(CodecError::PyramidMismatch);
        }
        Ok(())
    }
}

fn band(level: u8, orientation: Orientation) -> BandId {
    BandId { level, orientation }
}

/// Low/high split of a length: `(ceil(n/2), floor(n/2))`.
pub fn split(n: usize) -> (usize, usize) {
    (n - n / 2, n / 2)
}

pub fn check_levels(width: usize, height: usize, levels: u8) -> Result<(), CodecError> {
    let min = width.min(height);
    if levels == 0 || levels >= usize::BITS as u8 || (1usize << levels) > min {
        return Err(CodecError::LevelsTooDeep { levels, width, height });
    }
    Ok(())
}

/// Forward 5/3 lifting of `x` into `low` (`ceil(n/2)`) and `high` (`floor(n/2)`).
pub fn lift_forward(x: &[i32], low: &mut [i32], high: &mut [i32]) {
    let n = x.len();
    if n == 1 {
        low[0] = x[0];
        return;
    }
    let nh = n / 2;
    for i in 0..nh {
        let right = if 2 * i + 2 < n { x[2 * i + 2] } else { x[2 * i] };
        high[i] = x[2 * i + 1] - ((x[2 * i] + right) >> 1);
    }
    for i in 0..n - nh {
        let dl = high[i.saturating_sub(1)];
        let dr = high[i.min(nh - 1)];
        low[i] = x[2 * i] + ((dl + dr + 2) >> 2);
    }
}

/// Exact inverse of [`lift_forward`].
pub fn lift_inverse(low: &[i32], high: &[i32], x: &mut [i32]) {
    let n = x.len();
    if n == 1 {
        x[0] = low[0];
        return;
    }
    let nh = n / 2;
    // Coefficients may come from an untrusted stream; wrap instead of trapping.
    for i in 0..n - nh {
        let dl = high[i.saturating_sub(1)];
        let dr = high[i.min(nh - 1)];
        x[2 * i] = low[i].wrapping_sub(dl.wrapping_add(dr).wrapping_add(2) >> 2);
    }
    for i in 0..nh {
        let right = if 2 * i + 2 < n { x[2 * i + 2] } else { x[2 * i] };
        x[2 * i + 1] = high[i].wrapping_add(x[2 * i].wrapping_add(right) >> 1);
    }
}

/// One 2-D analysis step: rows first, then columns.
fn analyze(src: &Plane) -> (Plane, DetailLevel) {
    let (w, h) = (src.width, src.height);
    let (lw, hw) = split(w);
    let (lh, hh) = split(h);

    // Row pass: each row becomes [low | high].
    let mut rows = vec![0i32; w * h];
    let mut lo = vec![0i32; lw.max(lh)];
    let mut hi = vec![0i32; hw.max(hh).max(1)];
    for y in 0..h {
        let line = &src.data[y * w..(y + 1) * w];
        lift_forward(line, &mut lo[..lw], &mut hi[..hw]);
        rows[y * w..y * w + lw].copy_from_slice(&lo[..lw]);
        rows[y * w + lw..(y + 1) * w].copy_from_slice(&hi[..hw]);
    }

    // Column pass straight into the four quadrants.
    let mut ll = Plane::zeros(lw, lh);
    let mut hl = Plane::zeros(hw, lh);
    let mut lhp = Plane::zeros(lw, hh);
    let mut hhp = Plane::zeros(hw, hh);
    let mut col = vec![0i32; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = rows[y * w + x];
        }
        lift_forward(&col, &mut lo[..lh], &mut hi[..hh]);
        if x < lw {
            ll.put_column(x, &lo[..lh]);
            lhp.put_column(x, &hi[..hh]);
        } else {
            hl.put_column(x - lw, &lo[..lh]);
            hhp.put_column(x - lw, &hi[..hh]);
        }
    }
    (ll, DetailLevel { hl, lh: lhp, hh: hhp })
}

/// One 2-D synthesis step, inverse of [`analyze`].
fn synthesize(ll: &Plane, d: &DetailLevel, w: usize, h: usize) -> Plane {
    let (lw, _) = split(w);
    let (lh, hh) = split(h);
    let mut rows = vec![0i32; w * h];
    let mut lo = vec![0i32; lh];
    let mut hi = vec![0i32; hh.max(1)];
    let mut col = vec![0i32; h];
    for x in 0..w {
        if x < lw {
            ll.get_column(x, &mut lo);
            d.lh.get_column(x, &mut hi[..hh]);
        } else {
            d.hl.get_column(x - lw, &mut lo);
            d.hh.get_column(x - lw, &mut hi[..hh]);
        }
        lift_inverse(&lo, &hi[..hh], &mut col);
        for y in 0..h {
            rows[y * w + x] = col[y];
        }
    }
    let mut out = Plane::zeros(w, h);
    for y in 0..h {
        let row = &rows[y * w..(y + 1) * w];
        lift_inverse(&row[..lw], &row[lw..], &mut out.data[y * w..(y + 1) * w]);
    }
    out
}

pub fn dwt_forward(img: &GrayImage, levels: u8) -> Result<SubbandPyramid, CodecError> {
    check_levels(img.width(), img.height(), levels)?;
    let mut current =
        Plane { width: img.width(), height: img.height(), data: img.pixels().iter().map(|&v| i32::from(v)).collect() };
    let mut details = Vec::with_capacity(levels as usize);
    for _ in 0..levels {
        let (ll, d) = analyze(&current);
        details.push(d);
        current = ll;
    }
    Ok(SubbandPyramid { width: img.width(), height: img.height(), depth: img.bit_depth(), ll: current, details })
}

/// Rebuilds the image, clamping samples into the pyramid's bit-depth range.
pub fn dwt_inverse(pyr: &SubbandPyramid) -> Result<GrayImage, CodecError> {
    pyr.validate()?;
    // Dimensions of the LL input at each level, finest first.
    let mut dims = Vec::with_capacity(pyr.details.len());
    let (mut w, mut h) = (pyr.width, pyr.height);
    for _ in 0..pyr.details.len() {
        dims.push((w, h));
        w = split(w).0;
        h = split(h).0;
    }
    let mut current = pyr.ll.clone();
    for (d, &(w, h)) in pyr.details.iter().zip(&dims).rev() {
        current = synthesize(&current, d, w, h);
    }
    let max = i32::from(pyr.depth.max_value());
    let pixels = current.data.iter().map(|&v| v.clamp(0, max) as u16).collect();
    GrayImage::new(pyr.width, pyr.height, pyr.depth, pixels).map_err(|_| CodecError::PyramidMismatch)
}
