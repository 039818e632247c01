//! Dense univariate polynomials over F_q and their factorization
//! (squarefree decomposition, distinct-degree, Cantor–Zassenhaus).

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::rng::Stream;

/// Coefficients in ascending degree; no trailing zeros (zero = empty).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UnivariatePoly {
    coeffs: Vec<u64>,
    field: PrimeField,
}

impl fmt::Debug for UnivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?} mod {}", self.coeffs, self.field.modulus())
    }
}

impl UnivariatePoly {
    pub fn new(field: PrimeField, coeffs: Vec<u64>) -> Self {
        let mut p = Self {
            coeffs: coeffs.into_iter().map(|c| field.reduce(c)).collect(),
            field,
        };
        p.trim();
        p
    }

    pub fn from_i64(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: PrimeField) -> Self {
        Self { coeffs: Vec::new(), field }
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    /// The polynomial `x`.
    pub fn x(field: PrimeField) -> Self {
        Self::new(field, vec![0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(f, (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, s: u64) -> Self {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|&c| f.mul(c, s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let f = self.field;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(self.field, 1), |acc, _| acc.mul(self))
    }

    /// Euclidean division.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let Some(dd) = d.degree() else {
            return Err(Error::DivisionByZero);
        };
        let f = self.field;
        let inv_lead = f.inv(d.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(f), self.clone()));
        }
        let mut quo = vec![0u64; rem.len() - dd];
        for k in (0..quo.len()).rev() {
            let c = f.mul(rem[k + dd], inv_lead);
            quo[k] = c;
            if c != 0 {
                for (j, &dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = f.sub(rem[k + j], f.mul(c, dc));
                }
            }
        }
        rem.truncate(dd);
        Ok((Self::new(f, quo), Self::new(f, rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()).expect("nonzero"))
    }

    /// Monic gcd (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·other = g` and g monic.
    pub fn ext_gcd(&self, other: &Self) -> (Self, Self, Self) {
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::constant(f, 1), Self::zero(f));
        let (mut t0, mut t1) = (Self::zero(f), Self::constant(f, 1));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(r0.leading()).expect("nonzero");
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    /// Inverse of `self` modulo `m` when coprime.
    pub fn inv_mod(&self, m: &Self) -> Option<Self> {
        let (g, s, _) = self.ext_gcd(m);
        g.is_one().then(|| s.rem(m).expect("nonzero modulus"))
    }

    pub fn derivative(&self) -> Self {
        let f = self.field;
        Self::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul(c, f.reduce(i as u64)))
                .collect(),
        )
    }

    pub fn mul_mod(&self, other: &Self, m: &Self) -> Self {
        self.mul(other).rem(m).expect("nonzero modulus")
    }

    pub fn pow_mod(&self, exp: &BigUint, m: &Self) -> Self {
        let mut acc = Self::constant(self.field, 1).rem(m).expect("nonzero modulus");
        let base = self.rem(m).expect("nonzero modulus");
        for i in (0..exp.bits()).rev() {
            acc = acc.mul_mod(&acc, m);
            if exp.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }

    /// Companion matrix entries (row-major, size d×d) of a monic polynomial:
    /// ones on the subdiagonal, last column = −(c₀, …, c_{d−1}).
    pub fn companion(&self) -> Vec<u64> {
        let f = self.field;
        let d = self.degree().expect("nonzero");
        let mut m = vec![0u64; d * d];
        for i in 1..d {
            m[i * d + (i - 1)] = 1;
        }
        for i in 0..d {
            m[i * d + (d - 1)] = f.neg(self.coeff(i));
        }
        m
    }
}

/// Result of [`univ_factor`]: `scalar · Π fᵢ^{eᵢ}` with monic irreducible fᵢ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariateFactorization {
    pub scalar: u64,
    pub factors: Vec<(UnivariatePoly, u32)>,
}

impl UnivariateFactorization {
    pub fn expand(&self, field: PrimeField) -> UnivariatePoly {
        self.factors
            .iter()
            .fold(UnivariatePoly::constant(field, self.scalar), |acc, (p, e)| acc.mul(&p.pow(*e)))
    }
}

// p-th root of a polynomial whose exponents are all multiples of p; over a
// prime field every coefficient is its own p-th root.
fn pth_root(f: &UnivariatePoly) -> UnivariatePoly {
    let p = f.field.modulus() as usize;
    UnivariatePoly::new(f.field, f.coeffs.iter().step_by(p).copied().collect())
}

/// Squarefree decomposition of a monic polynomial: `(gᵢ, i)` with
/// f = Π gᵢ^i and each gᵢ squarefree.
pub fn squarefree_decomposition(f: &UnivariatePoly) -> Vec<(UnivariatePoly, u32)> {
    let field = f.field;
    let p = field.modulus() as u32;
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    if df.is_zero() {
        for (g, e) in squarefree_decomposition(&pth_root(f)) {
            out.push((g, e * p));
        }
        return out;
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_rem(&c).expect("nonzero").0;
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).expect("nonzero").0;
        if z.degree().unwrap_or(0) > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).expect("nonzero").0;
    }
    if c.degree().unwrap_or(0) > 0 {
        for (g, e) in squarefree_decomposition(&pth_root(&c)) {
            out.push((g, e * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// `(product of all irreducible factors of degree d, d)`.
pub fn distinct_degree(f: &UnivariatePoly) -> Vec<(UnivariatePoly, usize)> {
    let field = f.field;
    let q = BigUint::from(field.modulus());
    let x = UnivariatePoly::x(field);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest).expect("nonzero");
    let mut d = 0;
    while let Some(deg) = rest.degree() {
        if deg < 2 * (d + 1) {
            break;
        }
        d += 1;
        h = h.pow_mod(&q, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.div_rem(&g).expect("nonzero").0;
            h = h.rem(&rest).expect("nonzero");
            out.push((g, d));
        }
    }
    if let Some(deg) = rest.degree() {
        if deg > 0 {
            out.push((rest.monic(), deg));
        }
    }
    out
}

/// Cantor–Zassenhaus splitting of a monic squarefree product of
/// irreducibles all of degree `d` (q odd).
pub fn equal_degree(f: &UnivariatePoly, d: usize, rng: &mut Stream) -> Vec<UnivariatePoly> {
    let field = f.field;
    let n = f.degree().expect("nonzero");
    if n == d {
        return vec![f.clone()];
    }
    let q = BigUint::from(field.modulus());
    let exp = (q.pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = UnivariatePoly::new(field, (0..n).map(|_| rng.element(&field)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = f.gcd(&a);
        let split = if !g.is_one() {
            g
        } else {
            let b = a.pow_mod(&exp, f).sub(&UnivariatePoly::constant(field, 1));
            f.gcd(&b)
        };
        let k = split.degree().unwrap_or(0);
        if k > 0 && k < n {
            let other = f.div_rem(&split).expect("nonzero").0.monic();
            let mut out = equal_degree(&split, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

/// Complete factorization over F_q into monic irreducibles.
pub fn univ_factor(f: &UnivariatePoly, rng: &mut Stream) -> Result<UnivariateFactorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let scalar = f.leading();
    let monic = f.monic();
    let mut factors = Vec::new();
    for (g, mult) in squarefree_decomposition(&monic) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|a, b| (a.0.degree(), &a.0.coeffs).cmp(&(b.0.degree(), &b.0.coeffs)));
    Ok(UnivariateFactorization { scalar, factors })
}

/// Rabin's test specialised to degree 4: x^{q⁴} ≡ x and
/// gcd(x^{q²} − x, f) = 1.
pub fn is_irreducible_quartic(f: &UnivariatePoly) -> bool {
    if f.degree() != Some(4) {
        return false;
    }
    let field = f.field;
    let q = BigUint::from(field.modulus());
    let x = UnivariatePoly::x(field);
    let xq2 = x.pow_mod(&q.pow(2), f);
    if !f.gcd(&xq2.sub(&x)).is_one() {
        return false;
    }
    let xq4 = xq2.pow_mod(&q.pow(2), f);
    xq4 == x.rem(f).expect("nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    fn brute_roots(f: &UnivariatePoly) -> Vec<u64> {
        (0..f.field().modulus()).filter(|&x| f.eval(x) == 0).collect()
    }

    #[test]
    fn small_examples_over_f5() {
        let mut rng = Stream::new(1, "uf");
        let x2m1 = UnivariatePoly::from_i64(f5(), &[-1, 0, 1]);
        let fac = univ_factor(&x2m1, &mut rng).unwrap();
        assert_eq!(
            fac.factors,
            vec![
                (UnivariatePoly::from_i64(f5(), &[1, 1]), 1),
                (UnivariatePoly::from_i64(f5(), &[-1, 1]), 1)
            ]
        );
        let x2p1 = UnivariatePoly::from_i64(f5(), &[1, 0, 1]);
        assert_eq!(brute_roots(&x2p1), vec![2, 3]);
        let fac = univ_factor(&x2p1, &mut rng).unwrap();
        assert_eq!(
            fac.factors,
            vec![
                (UnivariatePoly::from_i64(f5(), &[2, 1]), 1),
                (UnivariatePoly::from_i64(f5(), &[-2, 1]), 1)
            ]
        );
        let x2x1 = UnivariatePoly::from_i64(f5(), &[1, 1, 1]);
        assert!(brute_roots(&x2x1).is_empty());
        let fac = univ_factor(&x2x1, &mut rng).unwrap();
        assert_eq!(fac.factors, vec![(x2x1.clone(), 1)]);
        assert_eq!(univ_factor(&UnivariatePoly::zero(f5()), &mut rng), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn repeated_and_pth_power_factors() {
        let f = f5();
        let mut rng = Stream::new(2, "uf");
        // (x-1)^7 (x^2+x+1)^2 · 3 over F_5 includes a p-th power
        let p = UnivariatePoly::from_i64(f, &[-1, 1])
            .pow(7)
            .mul(&UnivariatePoly::from_i64(f, &[1, 1, 1]).pow(2))
            .scale(3);
        let fac = univ_factor(&p, &mut rng).unwrap();
        assert_eq!(fac.expand(f), p);
        assert_eq!(fac.scalar, 3);
        let mults: Vec<u32> = fac.factors.iter().map(|(_, e)| *e).collect();
        assert_eq!(mults, vec![7, 2]);
    }

    #[test]
    fn quartic_irreducibility_matches_root_and_quadratic_scan() {
        // x^4 + 2 over F_5: irreducible since -2 = 3 is not a 4th power and
        // no quadratic factorization exists (checked by univ_factor)
        let f = f5();
        let mut rng = Stream::new(3, "q");
        for c in 0..5u64 {
            for d in 1..5u64 {
                let p = UnivariatePoly::new(f, vec![d, c, 0, 1, 1]);
                let fac = univ_factor(&p, &mut rng).unwrap();
                let irreducible = fac.factors.len() == 1 && fac.factors[0].1 == 1;
                assert_eq!(is_irreducible_quartic(&p), irreducible, "{p:?}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn factorization_reconstructs(seed in any::<u64>(), deg in 1usize..12, q in prop::sample::select(vec![5u64, 7, 11, 101, 1_000_003])) {
            let field = PrimeField::new(q).unwrap();
            let mut rng = Stream::new(seed, "prop");
            let mut c: Vec<u64> = (0..=deg).map(|_| rng.element(&field)).collect();
            c[deg] = rng.nonzero(&field);
            let p = UnivariatePoly::new(field, c);
            let fac = univ_factor(&p, &mut rng).unwrap();
            prop_assert_eq!(fac.expand(field), p.clone());
            let total: usize = fac.factors.iter().map(|(g, e)| g.degree().unwrap() * *e as usize).sum();
            prop_assert_eq!(total, deg);
            for (g, _) in &fac.factors {
                prop_assert_eq!(g.leading(), 1);
                // irreducible: no roots unless linear
                if g.degree().unwrap() > 1 && q < 200 {
                    prop_assert!(brute_roots(g).is_empty());
                }
            }
        }

        #[test]
        fn ext_gcd_bezout(seed in any::<u64>()) {
            let field = PrimeField::new(101).unwrap();
            let mut rng = Stream::new(seed, "eg");
            let a = UnivariatePoly::new(field, (0..6).map(|_| rng.element(&field)).collect());
            let b = UnivariatePoly::new(field, (0..4).map(|_| rng.element(&field)).collect());
            let (g, s, t) = a.ext_gcd(&b);
            prop_assert_eq!(s.mul(&a).add(&t.mul(&b)), g.clone());
            if !g.is_zero() {
                prop_assert!(a.rem(&g).unwrap().is_zero());
                prop_assert!(b.rem(&g).unwrap().is_zero());
            }
        }
    }
}
