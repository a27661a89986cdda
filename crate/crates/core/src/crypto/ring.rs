//! Prime-modulus ring arithmetic, additive fragmentation and output pads.

use std::fmt;

use rand::Rng;

use super::channel::Endpoint;
use crate::error::{Error, Result};

/// 2^61 - 1, a Mersenne prime.
pub const DEFAULT_MODULUS: u64 = (1 << 61) - 1;

/// Small prime used to make uniformity of shares testable by chi-square.
pub const SMALL_MODULUS: u64 = 251;

/// Largest modulus accepted; keeps `a + b` for reduced operands inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 63;

/// An element of `[0, M)` for the ring it was produced by.
///
/// The modulus is not stored in the value; all arithmetic goes through a
/// [`Ring`], which checks range at the boundary.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingValue(u64);

impl RingValue {
    pub const ZERO: RingValue = RingValue(0);

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The additive fragments of one value. Never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector {
    shares: Vec<RingValue>,
}

impl ShareVector {
    pub fn new(shares: Vec<RingValue>) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::EmptyShareVector);
        }
        Ok(Self { shares })
    }

    pub fn len(&self) -> usize {
        self.shares.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[RingValue] {
        &self.shares
    }

    pub fn iter(&self) -> impl Iterator<Item = RingValue> + '_ {
        self.shares.iter().copied()
    }

    pub fn into_vec(self) -> Vec<RingValue> {
        self.shares
    }
}

/// One decision maker's slice of the output mask, and who may remove it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputPad {
    pub pad: RingValue,
    pub opener: Endpoint,
}

/// Integers modulo a prime `M`, `2 <= M <= 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring {
    modulus: u64,
}

impl Default for Ring {
    fn default() -> Self {
        Self {
            modulus: DEFAULT_MODULUS,
        }
    }
}

impl Ring {
    pub fn new(modulus: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&modulus) || !primal_check::miller_rabin(modulus) {
            return Err(Error::InvalidModulus(modulus));
        }
        Ok(Self { modulus })
    }

    pub fn small() -> Self {
        Self {
            modulus: SMALL_MODULUS,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Checked conversion; rejects values `>= M`.
    pub fn elem(&self, value: u64) -> Result<RingValue> {
        if value >= self.modulus {
            return Err(Error::OutOfRange {
                value,
                modulus: self.modulus,
            });
        }
        Ok(RingValue(value))
    }

    pub fn reduce(&self, value: u64) -> RingValue {
        RingValue(value % self.modulus)
    }

    pub fn reduce_signed(&self, value: i128) -> RingValue {
        RingValue(value.rem_euclid(self.modulus as i128) as u64)
    }

    pub fn add(&self, a: RingValue, b: RingValue) -> RingValue {
        let (s, overflow) = a.0.overflowing_add(b.0);
        // operands are < M <= 2^63, so the true sum is < 2^64 unless M = 2^63
        if overflow || s >= self.modulus {
            RingValue(s.wrapping_sub(self.modulus))
        } else {
            RingValue(s)
        }
    }

    pub fn neg(&self, a: RingValue) -> RingValue {
        if a.0 == 0 {
            a
        } else {
            RingValue(self.modulus - a.0)
        }
    }

    pub fn sub(&self, a: RingValue, b: RingValue) -> RingValue {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: RingValue, b: RingValue) -> RingValue {
        RingValue(((a.0 as u128 * b.0 as u128) % self.modulus as u128) as u64)
    }

    pub fn sum<I: IntoIterator<Item = RingValue>>(&self, values: I) -> RingValue {
        values
            .into_iter()
            .fold(RingValue::ZERO, |acc, v| self.add(acc, v))
    }

    /// Uniform draw from `[0, M)`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> RingValue {
        RingValue(rng.gen_range(0..self.modulus))
    }

    /// Uniform draw from `[1, M)`.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> RingValue {
        RingValue(rng.gen_range(1..self.modulus))
    }

    /// Splits `value` into `r` additive fragments. The first `r - 1` are
    /// uniform; the last closes the sum.
    pub fn split_into_shares<R: Rng + ?Sized>(
        &self,
        value: RingValue,
        r: usize,
        rng: &mut R,
    ) -> Result<ShareVector> {
        if r == 0 {
            return Err(Error::InvalidFragmentCount);
        }
        let mut shares: Vec<RingValue> = (0..r - 1).map(|_| self.random(rng)).collect();
        let last = self.sub(value, self.sum(shares.iter().copied()));
        shares.push(last);
        ShareVector::new(shares)
    }

    pub fn recombine_shares(&self, shares: &[RingValue]) -> Result<RingValue> {
        if shares.is_empty() {
            return Err(Error::EmptyShareVector);
        }
        Ok(self.sum(shares.iter().copied()))
    }

    pub fn recombine(&self, shares: &ShareVector) -> RingValue {
        self.sum(shares.iter())
    }

    pub fn apply_pad(&self, value: RingValue, pad: &OutputPad) -> RingValue {
        self.add(value, pad.pad)
    }

    pub fn remove_pad(&self, value: RingValue, pad: &OutputPad) -> RingValue {
        self.sub(value, pad.pad)
    }

    /// Splits a master pad into `count` per-holder pads summing to it.
    pub fn split_pad<R: Rng + ?Sized>(
        &self,
        master: RingValue,
        count: usize,
        opener: Endpoint,
        rng: &mut R,
    ) -> Result<Vec<OutputPad>> {
        Ok(self
            .split_into_shares(master, count, rng)?
            .iter()
            .map(|pad| OutputPad { pad, opener })
            .collect())
    }
}
