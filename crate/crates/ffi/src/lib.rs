//! C ABI for `medlink`.
//!
//! Every fallible function returns a [`MedlinkStatus`]. On failure a
//! human-readable message is available from [`medlink_last_error`] on the
//! same thread until the next failing call. Images and bitstreams are opaque
//! handles owned by the caller and released with their `_free` function.
//!
//! Byte-producing functions follow the two-call pattern: pass a null buffer
//! (or one that is too small) to learn the required length through
//! `written`, then call again with a buffer of that size.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use medlink::codec::{self, CodecError, CompressOptions, CompressedBitstream};
use medlink::macsim::{self, MacParameters, Scenario};
use medlink::transport::{self, BlockSize};
use medlink::{metrics, pgm, BitDepth, GrayImage};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedlinkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed PGM data or image samples.
    ImageFormat = 3,
    /// Malformed or corrupt `.wbc` data.
    CorruptBitstream = 4,
    /// The requested compression ratio cannot be reached.
    Unreachable = 5,
    CodecFailure = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedlinkScenario {
    Dcf = 0,
    DcfRts = 1,
    Pcf = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedlinkProfile {
    /// 802.11b, 11 Mb/s, 72 µs PLCP.
    Dot11b = 0,
    /// 802.11b, 11 Mb/s, 96 µs PLCP.
    Dot11bStandard = 1,
    /// 802.11g, 54 Mb/s.
    Dot11g = 2,
}

/// Outcome of one simulated image transfer.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MedlinkSimResult {
    pub total_time_ns: u64,
    pub packet_count: u64,
    /// Image bits per second of airtime.
    pub effective_throughput_bps: f64,
    pub fps_capacity: f64,
    pub meets_10fps: bool,
}

/// Opaque grayscale image.
pub struct MedlinkImage(GrayImage);

/// Opaque compressed bitstream.
pub struct MedlinkBitstream(CompressedBitstream);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: MedlinkStatus, message: impl Into<String>) -> MedlinkStatus {
    set_error(message);
    status
}

fn codec_status(e: &CodecError) -> MedlinkStatus {
    match e {
        CodecError::Unreachable { .. } => MedlinkStatus::Unreachable,
        CodecError::InvalidTarget(_) | CodecError::LevelsTooDeep { .. } => MedlinkStatus::InvalidArgument,
        CodecError::Bitstream(_) | CodecError::Huffman(_) | CodecError::CorruptPayload { .. } => {
            MedlinkStatus::CorruptBitstream
        }
        _ => MedlinkStatus::CodecFailure,
    }
}

fn codec_fail(e: CodecError) -> MedlinkStatus {
    fail(codec_status(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> MedlinkStatus) -> MedlinkStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(MedlinkStatus::Panic, "internal panic"))
}

/// Copies `bytes` out through the two-call buffer protocol.
unsafe fn copy_out(bytes: &[u8], buf: *mut u8, cap: usize, written: *mut usize) -> MedlinkStatus {
    if written.is_null() {
        return fail(MedlinkStatus::NullPointer, "written is null");
    }
    *written = bytes.len();
    if buf.is_null() || cap < bytes.len() {
        return fail(MedlinkStatus::BufferTooSmall, format!("buffer needs {} bytes", bytes.len()));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
    MedlinkStatus::Ok
}

unsafe fn input_bytes<'a>(data: *const u8, len: usize) -> Option<&'a [u8]> {
    if len == 0 {
        Some(&[])
    } else if data.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(data, len))
    }
}

/// Message describing the last failure on this thread, or null if none.
///
/// The string stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn medlink_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a NUL-terminated string with static lifetime.
#[no_mangle]
pub extern "C" fn medlink_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an image from `width * height` row-major samples.
///
/// # Safety
/// `pixels` must point to `width * height` readable `uint16_t` values and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_new(
    width: usize,
    height: usize,
    bits: u32,
    pixels: *const u16,
    out: *mut *mut MedlinkImage,
) -> MedlinkStatus {
    guard(|| {
        if out.is_null() || pixels.is_null() {
            return fail(MedlinkStatus::NullPointer, "pixels or out is null");
        }
        let Some(depth) = BitDepth::from_bits(bits) else {
            return fail(MedlinkStatus::InvalidArgument, format!("bit depth {bits} is not 8 or 16"));
        };
        let Some(n) = width.checked_mul(height) else {
            return fail(MedlinkStatus::InvalidArgument, "image dimensions overflow");
        };
        let data = slice::from_raw_parts(pixels, n).to_vec();
        match GrayImage::new(width, height, depth, data) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(MedlinkImage(img)));
                MedlinkStatus::Ok
            }
            Err(e) => fail(MedlinkStatus::ImageFormat, e.to_string()),
        }
    })
}

/// Parses a P5 or P2 PGM stream.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_load_pgm(
    data: *const u8,
    len: usize,
    out: *mut *mut MedlinkImage,
) -> MedlinkStatus {
    guard(|| {
        let (Some(bytes), false) = (input_bytes(data, len), out.is_null()) else {
            return fail(MedlinkStatus::NullPointer, "data or out is null");
        };
        match pgm::load_pgm(bytes) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(MedlinkImage(img)));
                MedlinkStatus::Ok
            }
            Err(e) => fail(MedlinkStatus::ImageFormat, e.to_string()),
        }
    })
}

/// Serializes an image as binary (P5) or ASCII (P2) PGM.
///
/// # Safety
/// `img` must be a live handle, `buf` null or writable for `cap` bytes, and
/// `written` valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_save_pgm(
    img: *const MedlinkImage,
    ascii: bool,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> MedlinkStatus {
    guard(|| match img.as_ref() {
        Some(img) => copy_out(&pgm::save_pgm(&img.0, ascii), buf, cap, written),
        None => fail(MedlinkStatus::NullPointer, "img is null"),
    })
}

/// # Safety
/// `img` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_width(img: *const MedlinkImage) -> usize {
    img.as_ref().map_or(0, |i| i.0.width())
}

/// # Safety
/// `img` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_height(img: *const MedlinkImage) -> usize {
    img.as_ref().map_or(0, |i| i.0.height())
}

/// Bits per sample, or 0 for a null handle.
///
/// # Safety
/// `img` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_bit_depth(img: *const MedlinkImage) -> u32 {
    img.as_ref().map_or(0, |i| i.0.bit_depth().bits())
}

/// Borrows the row-major samples; valid while `img` lives. Null for a null handle.
///
/// # Safety
/// `img` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_pixels(img: *const MedlinkImage) -> *const u16 {
    img.as_ref().map_or(ptr::null(), |i| i.0.pixels().as_ptr())
}

/// # Safety
/// `img` must be a handle from this library, or null, and not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn medlink_image_free(img: *mut MedlinkImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Compresses to at least `target_cr` with `levels` wavelet levels.
///
/// # Safety
/// `img` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_compress(
    img: *const MedlinkImage,
    target_cr: f64,
    levels: u8,
    out: *mut *mut MedlinkBitstream,
) -> MedlinkStatus {
    guard(|| {
        let (Some(img), false) = (img.as_ref(), out.is_null()) else {
            return fail(MedlinkStatus::NullPointer, "img or out is null");
        };
        match codec::compress(&img.0, &CompressOptions::with_target(target_cr).levels(levels)) {
            Ok(bs) => {
                *out = Box::into_raw(Box::new(MedlinkBitstream(bs)));
                MedlinkStatus::Ok
            }
            Err(e) => codec_fail(e),
        }
    })
}

/// Compresses with every quantizer step set to 1.
///
/// # Safety
/// `img` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_compress_lossless(
    img: *const MedlinkImage,
    levels: u8,
    out: *mut *mut MedlinkBitstream,
) -> MedlinkStatus {
    guard(|| {
        let (Some(img), false) = (img.as_ref(), out.is_null()) else {
            return fail(MedlinkStatus::NullPointer, "img or out is null");
        };
        match codec::compress_lossless(&img.0, levels) {
            Ok(bs) => {
                *out = Box::into_raw(Box::new(MedlinkBitstream(bs)));
                MedlinkStatus::Ok
            }
            Err(e) => codec_fail(e),
        }
    })
}

/// Parses a `.wbc` byte stream.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_bitstream_from_bytes(
    data: *const u8,
    len: usize,
    out: *mut *mut MedlinkBitstream,
) -> MedlinkStatus {
    guard(|| {
        let (Some(bytes), false) = (input_bytes(data, len), out.is_null()) else {
            return fail(MedlinkStatus::NullPointer, "data or out is null");
        };
        match CompressedBitstream::from_bytes(bytes) {
            Ok(bs) => {
                *out = Box::into_raw(Box::new(MedlinkBitstream(bs)));
                MedlinkStatus::Ok
            }
            Err(e) => fail(MedlinkStatus::CorruptBitstream, e.to_string()),
        }
    })
}

/// Serializes a bitstream to `.wbc` bytes.
///
/// # Safety
/// `bs` must be a live handle, `buf` null or writable for `cap` bytes, and
/// `written` valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_bitstream_bytes(
    bs: *const MedlinkBitstream,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> MedlinkStatus {
    guard(|| match bs.as_ref() {
        Some(bs) => copy_out(&bs.0.to_bytes(), buf, cap, written),
        None => fail(MedlinkStatus::NullPointer, "bs is null"),
    })
}

/// Header plus payload bits, or 0 for a null handle.
///
/// # Safety
/// `bs` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn medlink_bitstream_compressed_bits(bs: *const MedlinkBitstream) -> u64 {
    bs.as_ref().map_or(0, |b| b.0.compressed_bits())
}

/// # Safety
/// `bs` must be a handle from this library, or null, and not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn medlink_bitstream_free(bs: *mut MedlinkBitstream) {
    if !bs.is_null() {
        drop(Box::from_raw(bs));
    }
}

/// Decodes a bitstream into a new image.
///
/// # Safety
/// `bs` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_decompress(bs: *const MedlinkBitstream, out: *mut *mut MedlinkImage) -> MedlinkStatus {
    guard(|| {
        let (Some(bs), false) = (bs.as_ref(), out.is_null()) else {
            return fail(MedlinkStatus::NullPointer, "bs or out is null");
        };
        match codec::decompress(&bs.0) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(MedlinkImage(img)));
                MedlinkStatus::Ok
            }
            Err(e) => codec_fail(e),
        }
    })
}

unsafe fn compare(
    a: *const MedlinkImage,
    b: *const MedlinkImage,
    out: *mut f64,
    f: fn(&GrayImage, &GrayImage) -> Result<f64, metrics::MetricsError>,
) -> MedlinkStatus {
    guard(|| {
        let (Some(a), Some(b), false) = (a.as_ref(), b.as_ref(), out.is_null()) else {
            return fail(MedlinkStatus::NullPointer, "a, b or out is null");
        };
        match f(&a.0, &b.0) {
            Ok(v) => {
                *out = v;
                MedlinkStatus::Ok
            }
            Err(e) => fail(MedlinkStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Mean squared error between two images of the same shape.
///
/// # Safety
/// `a` and `b` must be live handles and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_mse(a: *const MedlinkImage, b: *const MedlinkImage, out: *mut f64) -> MedlinkStatus {
    compare(a, b, out, metrics::mse)
}

/// PSNR in dB; `+INFINITY` for identical images.
///
/// # Safety
/// `a` and `b` must be live handles and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_psnr(a: *const MedlinkImage, b: *const MedlinkImage, out: *mut f64) -> MedlinkStatus {
    compare(a, b, out, metrics::psnr)
}

/// `compressed_bits * fps`, in bit/s.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_required_throughput(compressed_bits: f64, fps: f64, out: *mut f64) -> MedlinkStatus {
    guard(|| {
        if out.is_null() {
            return fail(MedlinkStatus::NullPointer, "out is null");
        }
        match transport::required_throughput(compressed_bits, fps) {
            Ok(v) => {
                *out = v;
                MedlinkStatus::Ok
            }
            Err(e) => fail(MedlinkStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Simulates sending `image_bytes` over TFTP with `blocksize` byte blocks.
/// `profile` is a [`MedlinkProfile`] and `scenario` a [`MedlinkScenario`] value.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn medlink_simulate(
    image_bytes: u64,
    blocksize: u32,
    profile: u32,
    scenario: u32,
    out: *mut MedlinkSimResult,
) -> MedlinkStatus {
    guard(|| {
        if out.is_null() {
            return fail(MedlinkStatus::NullPointer, "out is null");
        }
        let plan = match BlockSize::try_from(blocksize).and_then(|b| transport::fragment(image_bytes, b)) {
            Ok(p) => p,
            Err(e) => return fail(MedlinkStatus::InvalidArgument, e.to_string()),
        };
        let params = match profile {
            p if p == MedlinkProfile::Dot11b as u32 => MacParameters::dot11b(),
            p if p == MedlinkProfile::Dot11bStandard as u32 => MacParameters::dot11b_standard(),
            p if p == MedlinkProfile::Dot11g as u32 => MacParameters::dot11g(),
            other => return fail(MedlinkStatus::InvalidArgument, format!("unknown profile {other}")),
        };
        let scenario = match scenario {
            s if s == MedlinkScenario::Dcf as u32 => Scenario::Dcf,
            s if s == MedlinkScenario::DcfRts as u32 => Scenario::DcfRts,
            s if s == MedlinkScenario::Pcf as u32 => Scenario::Pcf,
            other => return fail(MedlinkStatus::InvalidArgument, format!("unknown scenario {other}")),
        };
        let r = macsim::simulate(scenario, &plan, &params);
        *out = MedlinkSimResult {
            total_time_ns: r.total_time.0,
            packet_count: plan.data_packet_count as u64,
            effective_throughput_bps: r.effective_throughput,
            fps_capacity: r.fps_capacity,
            meets_10fps: r.meets_10fps,
        };
        MedlinkStatus::Ok
    })
}
