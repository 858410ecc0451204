//! Arithmetic in F_p for a single 62-bit prime.
//!
//! Elements are plain `u64` residues wrapped in [`FieldElement`]; every
//! operation goes through a [`PrimeContext`] which owns the modulus. There is
//! no global state, so contexts for different primes can be used side by side
//! from several threads.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bit size of every modulus drawn by this crate.
pub const PRIME_BITS: u32 = 62;

/// A residue in `[0, p)`. Only meaningful together with its [`PrimeContext`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Modulus of the field together with the seed it was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeContext {
    p: u64,
    seed: u64,
}

impl PrimeContext {
    /// Wraps an explicit modulus. The modulus must be an odd prime below 2^63.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 63 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeContext { p, seed: 0 })
    }

    /// Draws a uniformly random prime in `[2^(bits-1), 2^bits)`.
    ///
    /// Only `bits = 62` is supported; the rest of the crate relies on
    /// `2p < 2^63` so that sums of two residues never overflow.
    pub fn random<R: Rng + ?Sized>(bits: u32, seed: u64, rng: &mut R) -> Result<Self> {
        if bits != PRIME_BITS {
            return Err(Error::UnsupportedPrimeBits(bits));
        }
        let lo = 1u64 << (bits - 1);
        let hi = 1u64 << bits;
        loop {
            let candidate = rng.gen_range(lo..hi) | 1;
            if is_prime(candidate) {
                return Ok(PrimeContext { p: candidate, seed });
            }
        }
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    #[inline]
    pub fn from_u64(&self, v: u64) -> FieldElement {
        FieldElement(v % self.p)
    }

    pub fn from_i128(&self, v: i128) -> FieldElement {
        let r = v.rem_euclid(self.p as i128);
        FieldElement(r as u64)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 + b.0;
        FieldElement(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.p - a.0)
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(mul_mod(a.0, b.0, self.p))
    }

    /// `acc + a * b`
    #[inline]
    pub fn mul_add(&self, acc: FieldElement, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((acc.0 as u128 + a.0 as u128 * b.0 as u128) % self.p as u128) as u64)
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        FieldElement(pow_mod(a.0, e, self.p))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return None;
        }
        // extended Euclid on signed 128-bit values
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.from_i128(t0))
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.p))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.p))
    }

    pub fn random_vec<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<FieldElement> {
        (0..len).map(|_| self.random_element(rng)).collect()
    }

    /// Dot product of two equal-length slices.
    pub fn dot(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        debug_assert_eq!(a.len(), b.len());
        let p = self.p as u128;
        let mut acc: u128 = 0;
        for (x, y) in a.iter().zip(b) {
            acc += x.0 as u128 * y.0 as u128;
            // two products of values below 2^62 stay below 2^125; reduce before overflow
            if acc >= 1 << 126 {
                acc %= p;
            }
        }
        FieldElement((acc % p) as u64)
    }

    /// Signed representative in `(-p/2, p/2]`, used for printing.
    pub fn to_signed(&self, a: FieldElement) -> i128 {
        if a.0 > self.p / 2 {
            a.0 as i128 - self.p as i128
        } else {
            a.0 as i128
        }
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `n < 2^64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
