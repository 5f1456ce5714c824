//! Zero-run coding of the coefficient stream.

use thiserror::Error;

/// `run` consecutive copies of `value`. The encoder only emits runs longer
/// than one for zeros; nonzero literals always have `run == 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub run: u32,
    pub value: i32,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RleError {
    #[error("run {index} has length 0")]
    ZeroLength { index: usize },
}

pub fn rle_encode(symbols: &[i32]) -> Vec<Run> {
    let mut out = Vec::new();
    let mut zeros: u32 = 0;
    for &s in symbols {
        if s == 0 && zeros < u32::MAX {
            zeros += 1;
            continue;
        }
        if zeros > 0 {
            out.push(Run { run: zeros, value: 0 });
            zeros = 0;
        }
        if s == 0 {
            zeros = 1;
        } else {
            out.push(Run { run: 1, value: s });
        }
    }
    if zeros > 0 {
        out.push(Run { run: zeros, value: 0 });
    }
    out
}

pub fn rle_decode(runs: &[Run]) -> Result<Vec<i32>, RleError> {
    let mut out = Vec::new();
    for (index, r) in runs.iter().enumerate() {
        if r.run == 0 {
            return Err(RleError::ZeroLength { index });
        }
        out.extend(std::iter::repeat_n(r.value, r.run as usize));
    }
    Ok(out)
}
