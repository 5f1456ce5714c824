//! Wavelet subband compression of grayscale medical images, quality metrics,
//! and an analytic 802.11 timing model for shipping the compressed images
//! over TFTP/UDP at a fixed frame cadence.
//!
//! The pipeline is `pgm` → [`codec::compress`] → [`transport::fragment`] →
//! [`macsim`] scenarios, with [`metrics`] measuring what the codec lost.

pub mod cli;
pub mod codec;
pub mod image;
pub mod macsim;
pub mod metrics;
pub mod pgm;
pub mod synth;
pub mod transport;
pub mod units;

pub use codec::{compress, decompress, CodecError, CompressOptions, CompressedBitstream};
pub use image::{BitDepth, GrayImage, ImageError};
pub use macsim::{MacParameters, Scenario, ScenarioResult, SuperframeBudget};
pub use metrics::QualityReport;
pub use transport::{BlockSize, FragmentationPlan};
