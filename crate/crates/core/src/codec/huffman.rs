//! Canonical Huffman codes over a dense alphabet `0..n`.
//!
//! A code is fully described by its per-symbol code lengths; codewords are
//! assigned canonically (shorter codes first, ties by symbol value), which
//! is what lets the bitstream header store only the lengths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::codec::bitio::{BitReader, BitWriter};

pub const MAX_CODE_LEN: u8 = 64;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HuffmanError {
    #[error("no symbol has a nonzero frequency")]
    EmptyAlphabet,
    #[error("code lengths exceed {MAX_CODE_LEN} bits")]
    CodeTooLong,
    #[error("code lengths violate the Kraft inequality")]
    Oversubscribed,
    #[error("symbol {symbol} has no codeword")]
    Uncoded { symbol: u32 },
    #[error("bit {bit_offset}: no codeword matches")]
    InvalidCode { bit_offset: u64 },
    #[error("bit {bit_offset}: stream ended inside a codeword")]
    Truncated { bit_offset: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanCode {
    lengths: Vec<u8>,
    codes: Vec<u64>,
    // decoding tables, indexed by code length
    first_code: Vec<u64>,
    first_index: Vec<usize>,
    count: Vec<usize>,
    sorted: Vec<u32>,
}

/// Builds an optimal prefix code for `frequencies[symbol]`.
///
/// Symbols with zero frequency get no codeword. A lone symbol gets a 1-bit
/// code.
pub fn huffman_build(frequencies: &[u64]) -> Result<HuffmanCode, HuffmanError> {
    let used: Vec<usize> = (0..frequencies.len()).filter(|&s| frequencies[s] > 0).collect();
    let mut lengths = vec![0u8; frequencies.len()];
    match used.len() {
        0 => return Err(HuffmanError::EmptyAlphabet),
        1 => {
            lengths[used[0]] = 1;
            return HuffmanCode::from_lengths(&lengths);
        }
        _ => {}
    }

    // Node ids: leaves in symbol order, then internal nodes in creation order.
    // The heap orders by (weight, id) so ties break deterministically.
    let mut parent: Vec<usize> = vec![usize::MAX; used.len()];
    let mut heap: BinaryHeap<Reverse<(u128, usize)>> =
        used.iter().enumerate().map(|(id, &s)| Reverse((u128::from(frequencies[s]), id))).collect();
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().expect("two nodes");
        let Reverse((wb, b)) = heap.pop().expect("two nodes");
        let id = parent.len();
        parent.push(usize::MAX);
        parent[a] = id;
        parent[b] = id;
        heap.push(Reverse((wa + wb, id)));
    }

    // Depths: parents always have larger ids than children.
    let mut depth = vec![0u32; parent.len()];
    for id in (0..parent.len()).rev() {
        if parent[id] != usize::MAX {
            depth[id] = depth[parent[id]] + 1;
        }
    }
    for (leaf, &s) in used.iter().enumerate() {
        if depth[leaf] > u32::from(MAX_CODE_LEN) {
            return Err(HuffmanError::CodeTooLong);
        }
        lengths[s] = depth[leaf] as u8;
    }
    HuffmanCode::from_lengths(&lengths)
}

impl HuffmanCode {
    /// Rebuilds the canonical code from per-symbol lengths (0 = unused).
    pub fn from_lengths(lengths: &[u8]) -> Result<Self, HuffmanError> {
        let max = lengths.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return Err(HuffmanError::EmptyAlphabet);
        }
        if max > MAX_CODE_LEN {
            return Err(HuffmanError::CodeTooLong);
        }
        let max = max as usize;
        let mut count = vec![0usize; max + 1];
        for &l in lengths.iter().filter(|&&l| l > 0) {
            count[l as usize] += 1;
        }
        // Kraft sum scaled by 2^max
        let kraft: u128 = (1..=max).map(|l| (count[l] as u128) << (max - l)).sum();
        if kraft > 1u128 << max {
            return Err(HuffmanError::Oversubscribed);
        }

        let mut sorted: Vec<u32> = (0..lengths.len() as u32).filter(|&s| lengths[s as usize] > 0).collect();
        sorted.sort_by_key(|&s| (lengths[s as usize], s));

        let mut first_code = vec![0u64; max + 1];
        let mut first_index = vec![0usize; max + 1];
        let mut code = 0u64;
        let mut index = 0usize;
        for l in 1..=max {
            first_code[l] = code;
            first_index[l] = index;
            index += count[l];
            code = (code + count[l] as u64).checked_shl(1).unwrap_or(0);
        }

        let mut codes = vec![0u64; lengths.len()];
        for l in 1..=max {
            for (k, &s) in sorted[first_index[l]..first_index[l] + count[l]].iter().enumerate() {
                codes[s as usize] = first_code[l] + k as u64;
            }
        }
        Ok(HuffmanCode { lengths: lengths.to_vec(), codes, first_code, first_index, count, sorted })
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn length(&self, symbol: u32) -> u8 {
        self.lengths.get(symbol as usize).copied().unwrap_or(0)
    }

    pub fn codeword(&self, symbol: u32) -> Option<(u64, u8)> {
        match self.length(symbol) {
            0 => None,
            l => Some((self.codes[symbol as usize], l)),
        }
    }

    /// Total coded length in bits of a stream with the given histogram.
    pub fn coded_bits(&self, frequencies: &[u64]) -> u64 {
        frequencies.iter().zip(&self.lengths).map(|(&f, &l)| f * u64::from(l)).sum()
    }

    /// Frequency-weighted mean codeword length.
    pub fn average_length(&self, frequencies: &[u64]) -> f64 {
        let total: u64 = frequencies.iter().sum();
        self.coded_bits(frequencies) as f64 / total as f64
    }

    pub fn encode_symbol(&self, symbol: u32, out: &mut BitWriter) -> Result<(), HuffmanError> {
        let (code, len) = self.codeword(symbol).ok_or(HuffmanError::Uncoded { symbol })?;
        out.write_bits(code, u32::from(len));
        Ok(())
    }

    pub fn decode_symbol(&self, input: &mut BitReader<'_>) -> Result<u32, HuffmanError> {
        let start = input.position();
        let mut code = 0u64;
        for l in 1..self.count.len() {
            let bit = input.read_bit().ok_or(HuffmanError::Truncated { bit_offset: start })?;
            code = (code << 1) | u64::from(bit);
            let offset = code.wrapping_sub(self.first_code[l]);
            if code >= self.first_code[l] && (offset as usize) < self.count[l] {
                return Ok(self.sorted[self.first_index[l] + offset as usize]);
            }
        }
        Err(HuffmanError::InvalidCode { bit_offset: start })
    }
}

pub fn huffman_encode(code: &HuffmanCode, symbols: &[u32]) -> Result<(Vec<u8>, u64), HuffmanError> {
    let mut w = BitWriter::new();
    for &s in symbols {
        code.encode_symbol(s, &mut w)?;
    }
    Ok(w.finish())
}

pub fn huffman_decode(code: &HuffmanCode, bytes: &[u8], bit_len: u64, count: usize) -> Result<Vec<u32>, HuffmanError> {
    let mut r = BitReader::new(bytes, bit_len);
    (0..count).map(|_| code.decode_symbol(&mut r)).collect()
}

/// Zero-order entropy, in bits per symbol, of a histogram.
pub fn entropy_bits(frequencies: &[u64]) -> f64 {
    let total: u64 = frequencies.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    frequencies
        .iter()
        .filter(|&&f| f > 0)
        .map(|&f| {
            let p = f as f64 / n;
            -p * p.log2()
        })
        .sum()
}
