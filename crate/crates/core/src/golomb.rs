//! Golomb codes with a truncated-binary remainder.
//!
//! A value `delta` is written as the unary code of `delta / m` (that many
//! ones, then a zero) followed by the remainder `r = delta % m`. With
//! `k = ceil(log2 m)` and `c = 2^k - m`, remainders below `c` take `k - 1`
//! bits; the others are written as `r + c` in `k` bits.

use crate::bits::{BitReader, BitWriter};
use crate::error::{Error, Result};
use crate::image::ceil_log2;

/// Largest divisor considered by [`select_m`].
pub const MAX_M: u32 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GolombParameter {
    m: u32,
    k: u32,
    c: u32,
}

impl GolombParameter {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("Golomb divisor must be positive"));
        }
        let k = ceil_log2(m);
        let c = ((1u64 << k) - u64::from(m)) as u32;
        Ok(GolombParameter { m, k, c })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    #[inline]
    pub fn encoded_len(&self, delta: u64) -> u64 {
        let q = delta / u64::from(self.m);
        let r = (delta % u64::from(self.m)) as u32;
        let rem_bits = if r < self.c { self.k - 1 } else { self.k };
        q + 1 + u64::from(rem_bits)
    }

    pub fn encode(&self, delta: u64, out: &mut BitWriter) {
        let m = u64::from(self.m);
        out.write_unary(delta / m);
        let r = (delta % m) as u32;
        if r < self.c {
            out.write_bits(u64::from(r), self.k - 1);
        } else {
            out.write_bits(u64::from(r + self.c), self.k);
        }
    }

    pub fn decode(&self, src: &mut BitReader<'_>) -> Result<u64> {
        let mut q: u64 = 0;
        while src.read_bit()? {
            q += 1;
        }
        let r = if self.k == 0 {
            0
        } else {
            let head = src.read_bits(self.k - 1)? as u32;
            if head < self.c {
                head
            } else {
                let full = (head << 1) | u32::from(src.read_bit()?);
                full - self.c
            }
        };
        q.checked_mul(u64::from(self.m))
            .and_then(|v| v.checked_add(u64::from(r)))
            .ok_or_else(|| Error::corrupt("Golomb value overflows"))
    }

    /// Total bits needed for all `deltas`.
    pub fn total_len(&self, deltas: &[u64]) -> u64 {
        deltas.iter().map(|&d| self.encoded_len(d)).sum()
    }
}

/// The divisor minimizing the total encoded length of `deltas`, searched over
/// powers of two up to [`MAX_M`] plus the geometric-source optimum for the
/// sample mean. Ties go to the smaller divisor. An empty list yields `m = 1`.
pub fn select_m(deltas: &[u64]) -> GolombParameter {
    let mut candidates: Vec<u32> = (0..=16).map(|i| 1u32 << i).collect();
    if !deltas.is_empty() {
        let mean = deltas.iter().map(|&d| d as f64).sum::<f64>() / deltas.len() as f64;
        candidates.push(geometric_optimal_m(mean));
    }
    candidates.sort_unstable();
    candidates.dedup();
    candidates
        .into_iter()
        .map(|m| GolombParameter::new(m).expect("candidates are positive"))
        .min_by_key(|p| (p.total_len(deltas), p.m()))
        .expect("candidate set is never empty")
}

/// `ceil(-1 / log2(mean / (mean + 1)))`, clamped to `[1, MAX_M]`.
pub fn geometric_optimal_m(mean: f64) -> u32 {
    if mean.is_nan() || mean <= 0.0 {
        return 1;
    }
    let theta = mean / (mean + 1.0);
    let m = (-1.0 / theta.log2()).ceil();
    if m.is_finite() {
        m.clamp(1.0, f64::from(MAX_M)) as u32
    } else {
        MAX_M
    }
}
