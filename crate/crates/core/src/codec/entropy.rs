//! Mapping between run-length tokens and the 64-symbol Huffman alphabet.
//!
//! | symbol  | meaning                                   | raw bits after the codeword |
//! |---------|-------------------------------------------|-----------------------------|
//! | `k-1`   | literal with `|v|` in `[2^(k-1), 2^k)`     | sign, then `k-1` low bits of `|v|` |
//! | `32+j`  | zero run with length in `[2^j, 2^(j+1))`  | `j` low bits of the length  |

use crate::codec::bitio::{BitReader, BitWriter};
use crate::codec::huffman::{HuffmanCode, HuffmanError};
use crate::codec::rle::Run;
use crate::codec::CodecError;

pub const ALPHABET_SIZE: usize = 64;
const RUN_BASE: u32 = 32;

/// Symbol plus its raw suffix: `(symbol, suffix value, suffix bit count)`.
#[inline]
pub fn symbolize(run: Run) -> (u32, u64, u32) {
    if run.value == 0 {
        let n = run.run;
        let j = 31 - n.leading_zeros();
        (RUN_BASE + j, u64::from(n - (1 << j)), j)
    } else {
        debug_assert_eq!(run.run, 1, "nonzero literals are never repeated");
        let m = run.value.unsigned_abs();
        let k = 32 - m.leading_zeros();
        let sign = u64::from(run.value < 0);
        let low = u64::from(m) & ((1u64 << (k - 1)) - 1);
        (k - 1, (sign << (k - 1)) | low, k)
    }
}

/// Per-symbol histogram plus the total raw-suffix bits of a token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStats {
    pub histogram: [u64; ALPHABET_SIZE],
    pub suffix_bits: u64,
}

impl TokenStats {
    pub fn new() -> Self {
        TokenStats { histogram: [0; ALPHABET_SIZE], suffix_bits: 0 }
    }

    #[inline]
    pub fn push(&mut self, run: Run) {
        let (sym, _, bits) = symbolize(run);
        self.histogram[sym as usize] += 1;
        self.suffix_bits += u64::from(bits);
    }

    /// Counts the tokens of a coefficient stream without materializing the runs.
    pub fn of_stream(coefs: impl IntoIterator<Item = i32>) -> Self {
        let mut stats = TokenStats::new();
        let mut zeros = 0u32;
        for c in coefs {
            if c == 0 {
                zeros += 1;
                if zeros == u32::MAX {
                    stats.push(Run { run: zeros, value: 0 });
                    zeros = 0;
                }
                continue;
            }
            if zeros > 0 {
                stats.push(Run { run: zeros, value: 0 });
                zeros = 0;
            }
            stats.push(Run { run: 1, value: c });
        }
        if zeros > 0 {
            stats.push(Run { run: zeros, value: 0 });
        }
        stats
    }

    /// Payload size when coded with `code`.
    pub fn payload_bits(&self, code: &HuffmanCode) -> u64 {
        code.coded_bits(&self.histogram) + self.suffix_bits
    }
}

impl Default for TokenStats {
    fn default() -> Self {
        TokenStats::new()
    }
}

pub fn encode_runs(runs: &[Run], code: &HuffmanCode, out: &mut BitWriter) -> Result<(), HuffmanError> {
    for &r in runs {
        let (sym, suffix, bits) = symbolize(r);
        code.encode_symbol(sym, out)?;
        out.write_bits(suffix, bits);
    }
    Ok(())
}

/// Decodes exactly `count` coefficients.
pub fn decode_coefficients(
    input: &mut BitReader<'_>,
    code: &HuffmanCode,
    count: usize,
) -> Result<Vec<i32>, CodecError> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let at = input.position();
        let sym = code.decode_symbol(input)?;
        let truncated = CodecError::Huffman(HuffmanError::Truncated { bit_offset: at });
        if sym >= RUN_BASE {
            let j = sym - RUN_BASE;
            let low = input.read_bits(j).ok_or(truncated)?;
            let n = (1u64 << j) + low;
            if out.len() as u64 + n > count as u64 {
                return Err(CodecError::CorruptPayload {
                    bit_offset: at,
                    reason: "zero run past the end of the coefficient stream",
                });
            }
            out.resize(out.len() + n as usize, 0);
        } else {
            let k = sym + 1;
            let suffix = input.read_bits(k).ok_or(truncated)?;
            let negative = suffix >> (k - 1) == 1;
            let low = suffix & ((1u64 << (k - 1)) - 1);
            let magnitude = (1u64 << (k - 1)) | low;
            let value = if negative { -(magnitude as i64) } else { magnitude as i64 };
            let value = i32::try_from(value).map_err(|_| CodecError::CorruptPayload {
                bit_offset: at,
                reason: "literal outside the coefficient range",
            })?;
            out.push(value);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::huffman::huffman_build;
    use crate::codec::rle::rle_encode;
    use proptest::prelude::*;

    #[test]
    fn symbol_classes() {
        assert_eq!(symbolize(Run { run: 1, value: 1 }), (0, 0, 1));
        assert_eq!(symbolize(Run { run: 1, value: -1 }), (0, 1, 1));
        assert_eq!(symbolize(Run { run: 1, value: 5 }), (2, 0b001, 3));
        assert_eq!(symbolize(Run { run: 1, value: -5 }), (2, 0b101, 3));
        assert_eq!(symbolize(Run { run: 1, value: 0 }), (32, 0, 0));
        assert_eq!(symbolize(Run { run: 5, value: 0 }), (34, 1, 2));
        assert_eq!(symbolize(Run { run: u32::MAX, value: 0 }).0, 63);
        assert_eq!(symbolize(Run { run: 1, value: i32::MIN }).0, 31);
    }

    proptest! {
        #[test]
        fn tokens_round_trip(s in proptest::collection::vec(prop_oneof![4 => Just(0i32), 1 => any::<i32>()], 1..500)) {
            let runs = rle_encode(&s);
            let stats = TokenStats::of_stream(s.iter().copied());
            let mut direct = TokenStats::new();
            runs.iter().for_each(|&r| direct.push(r));
            prop_assert_eq!(&stats, &direct);

            let code = huffman_build(&stats.histogram).unwrap();
            let mut w = BitWriter::new();
            encode_runs(&runs, &code, &mut w).unwrap();
            let (bytes, bits) = w.finish();
            prop_assert_eq!(bits, stats.payload_bits(&code));
            let mut r = BitReader::new(&bytes, bits);
            prop_assert_eq!(decode_coefficients(&mut r, &code, s.len()).unwrap(), s);
        }
    }
}
