#ifndef MEDLINK_H
#define MEDLINK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Result of every fallible call.
 */
typedef enum MedlinkStatus {
  MEDLINK_STATUS_OK = 0,
  MEDLINK_STATUS_NULL_POINTER = 1,
  MEDLINK_STATUS_INVALID_ARGUMENT = 2,
  /*
   Malformed PGM data or image samples.
   */
  MEDLINK_STATUS_IMAGE_FORMAT = 3,
  /*
   Malformed or corrupt `.wbc` data.
   */
  MEDLINK_STATUS_CORRUPT_BITSTREAM = 4,
  /*
   The requested compression ratio cannot be reached.
   */
  MEDLINK_STATUS_UNREACHABLE = 5,
  MEDLINK_STATUS_CODEC_FAILURE = 6,
  MEDLINK_STATUS_BUFFER_TOO_SMALL = 7,
  MEDLINK_STATUS_PANIC = 8,
} MedlinkStatus;

typedef enum MedlinkProfile {
  /*
   802.11b, 11 Mb/s, 72 µs PLCP.
   */
  MEDLINK_PROFILE_DOT11B = 0,
  /*
   802.11b, 11 Mb/s, 96 µs PLCP.
   */
  MEDLINK_PROFILE_DOT11B_STANDARD = 1,
  /*
   802.11g, 54 Mb/s.
   */
  MEDLINK_PROFILE_DOT11G = 2,
} MedlinkProfile;

typedef enum MedlinkScenario {
  MEDLINK_SCENARIO_DCF = 0,
  MEDLINK_SCENARIO_DCF_RTS = 1,
  MEDLINK_SCENARIO_PCF = 2,
} MedlinkScenario;

/*
 Opaque compressed bitstream.
 */
typedef struct MedlinkBitstream MedlinkBitstream;

/*
 Opaque grayscale image.
 */
typedef struct MedlinkImage MedlinkImage;

/*
 Outcome of one simulated image transfer.
 */
typedef struct MedlinkSimResult {
  uint64_t total_time_ns;
  uint64_t packet_count;
  /*
   Image bits per second of airtime.
   */
  double effective_throughput_bps;
  double fps_capacity;
  bool meets_10fps;
} MedlinkSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or null if none.

 The string stays valid until the next failing call on the same thread.
 */
const char *medlink_last_error(void);

/*
 Library version as a NUL-terminated string with static lifetime.
 */
const char *medlink_version(void);

/*
 Creates an image from `width * height` row-major samples.

 # Safety
 `pixels` must point to `width * height` readable `uint16_t` values and
 `out` must be a valid pointer.
 */
enum MedlinkStatus medlink_image_new(size_t width,
                                     size_t height,
                                     uint32_t bits,
                                     const uint16_t *pixels,
                                     struct MedlinkImage **out);

/*
 Parses a P5 or P2 PGM stream.

 # Safety
 `data` must point to `len` readable bytes and `out` must be valid.
 */
enum MedlinkStatus medlink_image_load_pgm(const uint8_t *data,
                                          size_t len,
                                          struct MedlinkImage **out);

/*
 Serializes an image as binary (P5) or ASCII (P2) PGM.

 # Safety
 `img` must be a live handle, `buf` null or writable for `cap` bytes, and
 `written` valid.
 */
enum MedlinkStatus medlink_image_save_pgm(const struct MedlinkImage *img,
                                          bool ascii,
                                          uint8_t *buf,
                                          size_t cap,
                                          size_t *written);

/*
 # Safety
 `img` must be a live handle or null.
 */
size_t medlink_image_width(const struct MedlinkImage *img);

/*
 # Safety
 `img` must be a live handle or null.
 */
size_t medlink_image_height(const struct MedlinkImage *img);

/*
 Bits per sample, or 0 for a null handle.

 # Safety
 `img` must be a live handle or null.
 */
uint32_t medlink_image_bit_depth(const struct MedlinkImage *img);

/*
 Borrows the row-major samples; valid while `img` lives. Null for a null handle.

 # Safety
 `img` must be a live handle or null.
 */
const uint16_t *medlink_image_pixels(const struct MedlinkImage *img);

/*
 # Safety
 `img` must be a handle from this library, or null, and not used afterwards.
 */
void medlink_image_free(struct MedlinkImage *img);

/*
 Compresses to at least `target_cr` with `levels` wavelet levels.

 # Safety
 `img` must be a live handle and `out` valid.
 */
enum MedlinkStatus medlink_compress(const struct MedlinkImage *img,
                                    double target_cr,
                                    uint8_t levels,
                                    struct MedlinkBitstream **out);

/*
 Compresses with every quantizer step set to 1.

 # Safety
 `img` must be a live handle and `out` valid.
 */
enum MedlinkStatus medlink_compress_lossless(const struct MedlinkImage *img,
                                             uint8_t levels,
                                             struct MedlinkBitstream **out);

/*
 Parses a `.wbc` byte stream.

 # Safety
 `data` must point to `len` readable bytes and `out` must be valid.
 */
enum MedlinkStatus medlink_bitstream_from_bytes(const uint8_t *data,
                                                size_t len,
                                                struct MedlinkBitstream **out);

/*
 Serializes a bitstream to `.wbc` bytes.

 # Safety
 `bs` must be a live handle, `buf` null or writable for `cap` bytes, and
 `written` valid.
 */
enum MedlinkStatus medlink_bitstream_bytes(const struct MedlinkBitstream *bs,
                                           uint8_t *buf,
                                           size_t cap,
                                           size_t *written);

/*
 Header plus payload bits, or 0 for a null handle.

 # Safety
 `bs` must be a live handle or null.
 */
uint64_t medlink_bitstream_compressed_bits(const struct MedlinkBitstream *bs);

/*
 # Safety
 `bs` must be a handle from this library, or null, and not used afterwards.
 */
void medlink_bitstream_free(struct MedlinkBitstream *bs);

/*
 Decodes a bitstream into a new image.

 # Safety
 `bs` must be a live handle and `out` valid.
 */
enum MedlinkStatus medlink_decompress(const struct MedlinkBitstream *bs, struct MedlinkImage **out);

/*
 Mean squared error between two images of the same shape.

 # Safety
 `a` and `b` must be live handles and `out` valid.
 */
enum MedlinkStatus medlink_mse(const struct MedlinkImage *a,
                               const struct MedlinkImage *b,
                               double *out);

/*
 PSNR in dB; `+INFINITY` for identical images.

 # Safety
 `a` and `b` must be live handles and `out` valid.
 */
enum MedlinkStatus medlink_psnr(const struct MedlinkImage *a,
                                const struct MedlinkImage *b,
                                double *out);

/*
 `compressed_bits * fps`, in bit/s.

 # Safety
 `out` must be valid.
 */
enum MedlinkStatus medlink_required_throughput(double compressed_bits, double fps, double *out);

/*
 Simulates sending `image_bytes` over TFTP with `blocksize` byte blocks.
 `profile` is a [`MedlinkProfile`] and `scenario` a [`MedlinkScenario`] value.

 # Safety
 `out` must be valid.
 */
enum MedlinkStatus medlink_simulate(uint64_t image_bytes,
                                    uint32_t blocksize,
                                    uint32_t profile,
                                    uint32_t scenario,
                                    struct MedlinkSimResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MEDLINK_H */
