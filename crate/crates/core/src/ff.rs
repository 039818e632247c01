//! Arithmetic in F_q for a prime q chosen at runtime.
//!
//! Kernels work on raw `u64` residues through a [`PrimeField`] handle;
//! [`FieldElement`] bundles a residue with its field for the public API.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::numth::is_prime_u64;

/// Largest admissible modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 62;

/// A prime field F_q with q ≥ 5, gcd(q, 6) = 1 and q < 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q < 5 || q.is_multiple_of(2) || q.is_multiple_of(3) {
            return Err(Error::InvalidParameters(format!(
                "modulus {q} must be a prime coprime to 6"
            )));
        }
        if q >= MAX_MODULUS {
            return Err(Error::InvalidParameters(format!("modulus {q} exceeds 2^62")));
        }
        if !is_prime_u64(q) {
            return Err(Error::InvalidParameters(format!("modulus {q} is not prime")));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Bit length of q.
    pub fn bit_len(&self) -> u32 {
        64 - self.q.leading_zeros()
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.q
    }

    #[inline]
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.q as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Square-and-multiply for arbitrarily large exponents (e.g. up to q⁴).
    pub fn pow_big(&self, base: u64, exp: &BigUint) -> u64 {
        let mut acc = 1;
        for i in (0..exp.bits()).rev() {
            acc = self.mul(acc, acc);
            if exp.bit(i) {
                acc = self.mul(acc, base);
            }
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        // extended Euclid on signed 128-bit values
        let (mut r0, mut r1) = (self.q as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let k = r0 / r1;
            (r0, r1) = (r1, r0 - k * r1);
            (t0, t1) = (t1, t0 - k * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.q as i128) as u64)
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn elem(&self, v: u64) -> FieldElement {
        FieldElement { value: v % self.q, field: *self }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// Signed representative in (−q/2, q/2], handy for printing.
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.q / 2 {
            a as i64 - self.q as i64
        } else {
            a as i64
        }
    }
}

/// A residue together with its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<PrimeField> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        Ok(self.field)
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        let f = self.same_field(&rhs)?;
        Ok(f.elem(f.add(self.value, rhs.value)))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        let f = self.same_field(&rhs)?;
        Ok(f.elem(f.sub(self.value, rhs.value)))
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        let f = self.same_field(&rhs)?;
        Ok(f.elem(f.mul(self.value, rhs.value)))
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        let f = self.same_field(&rhs)?;
        Ok(f.elem(f.div(self.value, rhs.value)?))
    }

    pub fn inv(self) -> Result<Self> {
        Ok(self.field.elem(self.field.inv(self.value)?))
    }

    pub fn pow(self, exp: &BigUint) -> Self {
        self.field.elem(self.field.pow_big(self.value, exp))
    }

    pub fn pow_u64(self, exp: u64) -> Self {
        self.field.elem(self.field.pow(self.value, exp))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

// Operator forms panic on mismatched moduli; use the `checked_*` methods
// when the operands come from untrusted input.
impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("modulus mismatch")
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("modulus mismatch")
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("modulus mismatch")
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.field.elem(self.field.neg(self.value))
    }
}
