//! Bit-count prefixes.
//!
//! Sizes and rates use binary prefixes throughout: 1 kbit = 1024 bit and
//! 1 Mbit = 1024 kbit. Under this convention a 512×512 16-bit image at
//! CR 20 is exactly 204.8 kbit and ten of them per second are exactly
//! 2 Mbit/s. Rates handed to the 802.11 model (`phy_rate`, `control_rate`)
//! are radio rates and stay decimal (11 Mb/s = 11 000 000 bit/s).

pub const BITS_PER_KBIT: f64 = 1024.0;
pub const BITS_PER_MBIT: f64 = 1024.0 * 1024.0;

pub fn kbit(bits: f64) -> f64 {
    bits / BITS_PER_KBIT
}

pub fn mbit(bits: f64) -> f64 {
    bits / BITS_PER_MBIT
}

pub fn from_kbit(kbit: f64) -> f64 {
    kbit * BITS_PER_KBIT
}
