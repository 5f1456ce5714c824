//! TFTP/UDP/IPv4 packetization of a compressed image and the throughput a
//! frame cadence demands.
//!
//! Each TFTP DATA packet reaches the MAC layer as one MSDU of
//! `block + 4 (TFTP) + 8 (UDP) + 20 (IPv4) + 8 (LLC/SNAP)` bytes. A transfer
//! whose length is an exact multiple of the blocksize ends with an empty
//! DATA block.

use std::fmt::{self, Write as _};

use thiserror::Error;

pub const TFTP_HEADER_BYTES: u32 = 4;
pub const UDP_HEADER_BYTES: u32 = 8;
pub const IPV4_HEADER_BYTES: u32 = 20;
pub const LLC_SNAP_BYTES: u32 = 8;
/// Protocol bytes added to every TFTP packet, DATA or ACK.
pub const PACKET_OVERHEAD_BYTES: u32 = TFTP_HEADER_BYTES + UDP_HEADER_BYTES + IPV4_HEADER_BYTES + LLC_SNAP_BYTES;
/// MSDU of a TFTP ACK, which carries no data.
pub const TFTP_ACK_MSDU_BYTES: u32 = PACKET_OVERHEAD_BYTES;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("unsupported TFTP blocksize {0}; expected 512, 1024 or 2048")]
    UnsupportedBlockSize(u32),
    #[error("cannot fragment an empty bitstream")]
    EmptyBitstream,
    #[error("frame rate must be positive and finite, got {0}")]
    InvalidFps(f64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockSize {
    #[default]
    B512,
    B1024,
    B2048,
}

impl BlockSize {
    pub const ALL: [BlockSize; 3] = [BlockSize::B512, BlockSize::B1024, BlockSize::B2048];

    pub fn bytes(self) -> u32 {
        match self {
            BlockSize::B512 => 512,
            BlockSize::B1024 => 1024,
            BlockSize::B2048 => 2048,
        }
    }
}

impl TryFrom<u32> for BlockSize {
    type Error = TransportError;

    fn try_from(v: u32) -> Result<Self, TransportError> {
        match v {
            512 => Ok(BlockSize::B512),
            1024 => Ok(BlockSize::B1024),
            2048 => Ok(BlockSize::B2048),
            other => Err(TransportError::UnsupportedBlockSize(other)),
        }
    }
}

impl fmt::Display for BlockSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bytes())
    }
}

/// Packetization of one image transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentationPlan {
    pub blocksize: BlockSize,
    /// Data bytes carried by each DATA packet, in order.
    pub blocks: Vec<u32>,
    /// MSDU size of each DATA packet, in order.
    pub packet_payloads: Vec<u32>,
    /// Whether every DATA packet is answered by a TFTP ACK packet.
    pub tftp_acks: bool,
    pub data_packet_count: usize,
    pub total_overhead_bytes: u64,
    pub total_payload_bytes: u64,
}

impl FragmentationPlan {
    /// MSDU of the TFTP ACK answering each DATA packet, if modeled.
    pub fn ack_msdu(&self) -> Option<u32> {
        self.tftp_acks.then_some(TFTP_ACK_MSDU_BYTES)
    }

    /// Bits of image data the plan delivers.
    pub fn payload_bits(&self) -> u64 {
        self.total_payload_bytes * 8
    }

    /// Total bytes handed to the MAC layer, overhead included.
    pub fn total_msdu_bytes(&self) -> u64 {
        self.total_payload_bytes + self.total_overhead_bytes
    }

    /// CSV with columns `packet_index,block_bytes,msdu_bytes`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("packet_index,block_bytes,msdu_bytes\n");
        for (i, (b, m)) in self.blocks.iter().zip(&self.packet_payloads).enumerate() {
            let _ = writeln!(out, "{i},{b},{m}");
        }
        out
    }
}

pub fn fragment(bitstream_bytes: u64, blocksize: BlockSize) -> Result<FragmentationPlan, TransportError> {
    fragment_with(bitstream_bytes, blocksize, false)
}

/// Like [`fragment`], optionally modeling one TFTP ACK per DATA packet.
pub fn fragment_with(
    bitstream_bytes: u64,
    blocksize: BlockSize,
    tftp_acks: bool,
) -> Result<FragmentationPlan, TransportError> {
    if bitstream_bytes == 0 {
        return Err(TransportError::EmptyBitstream);
    }
    let bs = u64::from(blocksize.bytes());
    let full = bitstream_bytes / bs;
    let tail = (bitstream_bytes % bs) as u32;
    let mut blocks = vec![blocksize.bytes(); full as usize];
    // A short final block ends the transfer; if there is none, send an empty one.
    blocks.push(tail);
    let packet_payloads: Vec<u32> = blocks.iter().map(|b| b + PACKET_OVERHEAD_BYTES).collect();
    let n = blocks.len() as u64;
    let per_packet = u64::from(PACKET_OVERHEAD_BYTES) + if tftp_acks { u64::from(TFTP_ACK_MSDU_BYTES) } else { 0 };
    Ok(FragmentationPlan {
        blocksize,
        data_packet_count: blocks.len(),
        blocks,
        packet_payloads,
        tftp_acks,
        total_overhead_bytes: n * per_packet,
        total_payload_bytes: bitstream_bytes,
    })
}

/// Application throughput needed to ship one image of `compressed_bits` at
/// `fps` images per second, in bit/s.
pub fn required_throughput(compressed_bits: f64, fps: f64) -> Result<f64, TransportError> {
    if fps.is_nan() || fps <= 0.0 || !fps.is_finite() {
        return Err(TransportError::InvalidFps(fps));
    }
    Ok(compressed_bits * fps)
}
