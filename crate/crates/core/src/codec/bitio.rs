//! MSB-first bit packing.

#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    pending: u32,
    total: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        BitWriter::default()
    }

    /// Appends the low `count` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        let mut remaining = count;
        while remaining > 0 {
            let take = remaining.min(32);
            remaining -= take;
            let chunk = (value >> remaining) & ((1u64 << take) - 1);
            self.acc = (self.acc << take) | chunk;
            self.pending += take;
            self.total += u64::from(take);
            while self.pending >= 8 {
                self.pending -= 8;
                self.bytes.push((self.acc >> self.pending) as u8);
            }
            self.acc &= (1u64 << self.pending) - 1;
        }
    }

    pub fn write_bit(&mut self, bit: bool) {
        self.write_bits(u64::from(bit), 1);
    }

    pub fn bit_len(&self) -> u64 {
        self.total
    }

    /// Flushes the final partial byte (zero padded) and returns the buffer
    /// together with the number of meaningful bits.
    pub fn finish(mut self) -> (Vec<u8>, u64) {
        if self.pending > 0 {
            self.bytes.push((self.acc << (8 - self.pending)) as u8);
        }
        (self.bytes, self.total)
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    len: u64,
    pos: u64,
}

impl<'a> BitReader<'a> {
    /// Reads at most `bit_len` bits from `bytes`.
    pub fn new(bytes: &'a [u8], bit_len: u64) -> Self {
        BitReader { bytes, len: bit_len.min(bytes.len() as u64 * 8), pos: 0 }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn remaining(&self) -> u64 {
        self.len - self.pos
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        if self.pos >= self.len {
            return None;
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = (byte >> (7 - (self.pos % 8))) & 1 == 1;
        self.pos += 1;
        Some(bit)
    }

    pub fn read_bits(&mut self, count: u32) -> Option<u64> {
        if u64::from(count) > self.remaining() {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn packs_msb_first() {
        let mut w = BitWriter::new();
        w.write_bits(0b101, 3);
        w.write_bits(0b1_1110_0001, 9);
        let (bytes, bits) = w.finish();
        assert_eq!(bits, 12);
        assert_eq!(bytes, vec![0b1011_1110, 0b0001_0000]);
    }

    #[test]
    fn reader_stops_at_bit_len() {
        let mut r = BitReader::new(&[0xff], 3);
        assert_eq!(r.read_bits(3), Some(7));
        assert_eq!(r.read_bit(), None);
    }

    proptest! {
        #[test]
        fn round_trip(fields in proptest::collection::vec((any::<u64>(), 0u32..=64), 0..40)) {
            let mut w = BitWriter::new();
            for &(v, n) in &fields {
                w.write_bits(v, n);
            }
            let (bytes, len) = w.finish();
            prop_assert_eq!(len, fields.iter().map(|f| u64::from(f.1)).sum::<u64>());
            let mut r = BitReader::new(&bytes, len);
            for &(v, n) in &fields {
                let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
                prop_assert_eq!(r.read_bits(n), Some(v & mask));
            }
            prop_assert_eq!(r.remaining(), 0);
        }
    }
}
