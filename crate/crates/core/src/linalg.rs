//! Dense linear algebra over F_q, plus a sparse representation for
//! generalized permutation matrices.

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::rng::Stream;

/// Dense row-major matrix over F_q.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
    field: PrimeField,
}

impl fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixFq {}x{} over F_{}", self.rows, self.cols, self.field.modulus())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Accumulates products in `u128` and only reduces when the next product
/// could overflow.
struct LazyDot {
    budget: u64,
}

impl LazyDot {
    fn new(field: &PrimeField) -> Self {
        let qm1 = (field.modulus() - 1) as u128;
        let per = (qm1 * qm1).max(1);
        let budget = (u128::MAX / per).saturating_sub(1).min(u64::MAX as u128) as u64;
        Self { budget: budget.max(1) }
    }

    #[inline]
    fn dot(&self, field: &PrimeField, a: impl Iterator<Item = (u64, u64)>) -> u64 {
        let q = field.modulus() as u128;
        let mut acc = 0u128;
        let mut n = 0u64;
        for (x, y) in a {
            acc += x as u128 * y as u128;
            n += 1;
            if n == self.budget {
                acc %= q;
                n = 1;
            }
        }
        (acc % q) as u64
    }
}

impl MatrixFq {
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let data = data.into_iter().map(|v| field.reduce(v)).collect();
        Ok(Self { rows, cols, data, field })
    }

    pub fn from_i64_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| field.from_i64(v)).collect();
        Self::new(field, rows.len(), cols, data)
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols], field }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn random(field: PrimeField, rows: usize, cols: usize, rng: &mut Stream) -> Self {
        let data = (0..rows * cols).map(|_| rng.element(&field)).collect();
        Self { rows, cols, data, field }
    }

    /// Uniformly random invertible matrix by rejection.
    pub fn random_invertible(field: PrimeField, n: usize, rng: &mut Stream) -> Result<Self> {
        const ATTEMPTS: u32 = 64;
        for _ in 0..ATTEMPTS {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return Ok(m);
            }
        }
        Err(Error::RandomnessExhausted(ATTEMPTS))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.field.reduce(v);
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.modulus(), other.field.modulus()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let q = f.modulus() as u128;
        let lazy = LazyDot::new(&f);
        let mut out = vec![0u64; self.rows * other.cols];
        let mut acc = vec![0u128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            let mut n = 0u64;
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                for (slot, &b) in acc.iter_mut().zip(brow) {
                    *slot += a as u128 * b as u128;
                }
                n += 1;
                if n == lazy.budget {
                    acc.iter_mut().for_each(|a| *a %= q);
                    n = 1;
                }
            }
            for (o, a) in out[i * other.cols..(i + 1) * other.cols].iter_mut().zip(&acc) {
                *o = (a % q) as u64;
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, data: out, field: f })
    }

    /// Row vector times matrix: `h · self`.
    pub fn left_apply(&self, h: &[u64]) -> Result<Vec<u64>> {
        if h.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "row vector of length {} against {} rows",
                h.len(),
                self.rows
            )));
        }
        let lazy = LazyDot::new(&self.field);
        Ok((0..self.cols)
            .map(|c| {
                lazy.dot(&self.field, h.iter().enumerate().map(|(r, &x)| (x, self.get(r, c))))
            })
            .collect())
    }

    /// Matrix times column vector.
    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "column vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let lazy = LazyDot::new(&self.field);
        Ok((0..self.rows)
            .map(|r| lazy.dot(&self.field, self.row(r).iter().copied().zip(v.iter().copied())))
            .collect())
    }

    pub fn scale(&self, s: u64) -> Self {
        let f = self.field;
        let data = self.data.iter().map(|&v| f.mul(v, s)).collect();
        Self { rows: self.rows, cols: self.cols, data, field: f }
    }

    /// Square-and-multiply; `a⁰ = I`.
    pub fn pow(&self, exp: &BigUint) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "power of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut acc = Self::identity(self.field, self.rows);
        for i in (0..exp.bits()).rev() {
            acc = acc.mul(&acc)?;
            if exp.bit(i) {
                acc = acc.mul(self)?;
            }
        }
        Ok(acc)
    }

    pub fn pow_u64(&self, exp: u64) -> Result<Self> {
        self.pow(&BigUint::from(exp))
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if p != r {
                for k in 0..self.cols {
                    self.data.swap(p * self.cols + k, r * self.cols + k);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for k in c..self.cols {
                let v = self.get(r, k);
                self.data[r * self.cols + k] = f.mul(v, inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                for k in c..self.cols {
                    let v = f.sub(self.get(i, k), f.mul(factor, self.get(r, k)));
                    self.data[i * self.cols + k] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.data[r * 2 * n + c] = self.get(r, c);
            }
            aug.data[r * 2 * n + n + r] = 1;
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::SingularMatrix);
        }
        let mut inv = Self::zeros(self.field, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&aug.data[r * 2 * n + n..(r + 1) * 2 * n]);
        }
        Ok(inv)
    }

    /// Canonical basis of the right nullspace `{v : self·v = 0}`: one vector
    /// per free column of the RREF, with a 1 in that column.
    pub fn right_nullspace(&self) -> Vec<Vec<u64>> {
        let f = self.field;
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u64; self.cols];
                v[free] = 1;
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = f.neg(m.get(r, free));
                }
                v
            })
            .collect()
    }

    /// Canonical basis of `{h : h·self = 0}` (the cokernel), each vector of
    /// length `rows`. Deterministic for a given matrix.
    pub fn left_nullspace(&self) -> Vec<Vec<u64>> {
        self.transpose().right_nullspace()
    }

    pub fn is_generalized_permutation(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| self.row(r).iter().filter(|&&v| v != 0).count() == 1)
            && (0..self.cols).all(|c| (0..self.rows).filter(|&r| self.get(r, c) != 0).count() == 1)
    }
}

/// Uniform nonzero F_q-combination of a basis; the coefficient vector is
/// redrawn while it is all zero.
pub fn random_combination(field: PrimeField, basis: &[Vec<u64>], rng: &mut Stream) -> Result<Vec<u64>> {
    let Some(len) = basis.first().map(Vec::len) else {
        return Err(Error::DegenerateChoice("empty cokernel"));
    };
    let coeffs = loop {
        let c: Vec<u64> = basis.iter().map(|_| rng.element(&field)).collect();
        if c.iter().any(|&x| x != 0) {
            break c;
        }
    };
    let mut out = vec![0u64; len];
    for (c, b) in coeffs.iter().zip(basis) {
        for (o, &x) in out.iter_mut().zip(b) {
            *o = field.add(*o, field.mul(*c, x));
        }
    }
    Ok(out)
}

/// Generalized permutation matrix: row `i` has the single nonzero entry
/// `scale[i]` in column `perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenPerm {
    perm: Vec<usize>,
    scale: Vec<u64>,
    field: PrimeField,
}

impl GenPerm {
    pub fn new(field: PrimeField, perm: Vec<usize>, scale: Vec<u64>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameters("not a permutation".into()));
            }
        }
        if scale.len() != n || scale.iter().any(|&s| field.reduce(s) == 0) {
            return Err(Error::InvalidParameters("scales must be nonzero".into()));
        }
        let scale = scale.into_iter().map(|s| field.reduce(s)).collect();
        Ok(Self { perm, scale, field })
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self { perm: (0..n).collect(), scale: vec![1; n], field }
    }

    pub fn random(field: PrimeField, n: usize, rng: &mut Stream) -> Self {
        let perm = rng.permutation(n);
        let scale = (0..n).map(|_| rng.nonzero(&field)).collect();
        Self { perm, scale, field }
    }

    pub fn from_dense(m: &MatrixFq) -> Option<Self> {
        if !m.is_generalized_permutation() {
            return None;
        }
        let (perm, scale) = (0..m.rows())
            .map(|r| {
                let c = m.row(r).iter().position(|&v| v != 0).unwrap();
                (c, m.get(r, c))
            })
            .unzip();
        Some(Self { perm, scale, field: m.field() })
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn scales(&self) -> &[u64] {
        &self.scale
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.modulus(), other.field.modulus()));
        }
        if self.size() != other.size() {
            return Err(Error::DimensionMismatch("generalized permutation sizes differ".into()));
        }
        let f = self.field;
        let perm = self.perm.iter().map(|&p| other.perm[p]).collect();
        let scale = self
            .perm
            .iter()
            .zip(&self.scale)
            .map(|(&p, &s)| f.mul(s, other.scale[p]))
            .collect();
        Ok(Self { perm, scale, field: f })
    }

    pub fn inverse(&self) -> Self {
        let f = self.field;
        let n = self.size();
        let mut perm = vec![0; n];
        let mut scale = vec![0; n];
        for (i, (&p, &s)) in self.perm.iter().zip(&self.scale).enumerate() {
            perm[p] = i;
            scale[p] = f.inv(s).expect("nonzero scale");
        }
        Self { perm, scale, field: f }
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        let mut acc = Self::identity(self.field, self.size());
        for i in (0..exp.bits()).rev() {
            acc = acc.mul(&acc).expect("same shape");
            if exp.bit(i) {
                acc = acc.mul(self).expect("same shape");
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.scale.iter().all(|&s| s == 1)
    }

    /// `self · m` without densifying `self`.
    pub fn mul_dense(&self, m: &MatrixFq) -> Result<MatrixFq> {
        if m.rows() != self.size() {
            return Err(Error::DimensionMismatch("generalized permutation times matrix".into()));
        }
        let f = self.field;
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for (&p, &s) in self.perm.iter().zip(&self.scale) {
            data.extend(m.row(p).iter().map(|&v| f.mul(s, v)));
        }
        MatrixFq::new(f, m.rows(), m.cols(), data)
    }

    pub fn to_dense(&self) -> MatrixFq {
        let n = self.size();
        let mut m = MatrixFq::zeros(self.field, n, n);
        for (i, (&p, &s)) in self.perm.iter().zip(&self.scale).enumerate() {
            m.set(i, p, s);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f67() -> PrimeField {
        PrimeField::new(67).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let mut rng = Stream::new(1, "t");
        let m = MatrixFq::random(f67(), 5, 5, &mut rng);
        let i = MatrixFq::identity(f67(), 5);
        assert_eq!(i.mul(&m).unwrap(), m);
        assert_eq!(m.mul(&i).unwrap(), m);
    }

    #[test]
    fn dimension_and_modulus_errors() {
        let a = MatrixFq::zeros(f67(), 2, 3);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch(_))));
        let b = MatrixFq::zeros(PrimeField::new(5).unwrap(), 3, 2);
        assert_eq!(a.mul(&b), Err(Error::ModulusMismatch(67, 5)));
        assert!(matches!(a.pow_u64(2), Err(Error::DimensionMismatch(_))));
        assert!(MatrixFq::new(f67(), 2, 2, vec![1, 2, 3]).is_err());
    }

    #[test]
    fn pow_edge_cases_and_naive_oracle() {
        let mut rng = Stream::new(2, "t");
        let a = MatrixFq::random(f67(), 4, 4, &mut rng);
        assert_eq!(a.pow_u64(0).unwrap(), MatrixFq::identity(f67(), 4));
        assert_eq!(a.pow_u64(1).unwrap(), a);
        let mut naive = MatrixFq::identity(f67(), 4);
        for _ in 0..70 {
            naive = naive.mul(&a).unwrap();
        }
        assert_eq!(a.pow_u64(70).unwrap(), naive);
    }

    #[test]
    fn inverse_examples() {
        let f5 = PrimeField::new(5).unwrap();
        let d = MatrixFq::from_i64_rows(f5, &[vec![2, 0], vec![0, 3]]).unwrap();
        let expected = MatrixFq::from_i64_rows(f5, &[vec![3, 0], vec![0, 2]]).unwrap();
        assert_eq!(d.inverse().unwrap(), expected);
        assert_eq!(MatrixFq::identity(f67(), 6).inverse().unwrap(), MatrixFq::identity(f67(), 6));
        let s = MatrixFq::from_i64_rows(f5, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(s.inverse(), Err(Error::SingularMatrix));
        let mut rng = Stream::new(3, "t");
        for _ in 0..10 {
            let a = MatrixFq::random_invertible(f67(), 7, &mut rng).unwrap();
            assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), MatrixFq::identity(f67(), 7));
        }
    }

    #[test]
    fn nullspace_edge_cases() {
        assert!(MatrixFq::identity(f67(), 4).left_nullspace().is_empty());
        assert_eq!(MatrixFq::zeros(f67(), 3, 3).left_nullspace().len(), 3);
        let b = random_combination(f67(), &[], &mut Stream::new(0, "x"));
        assert!(matches!(b, Err(Error::DegenerateChoice(_))));
    }

    #[test]
    fn large_modulus_products_stay_exact() {
        let f = PrimeField::new((1 << 61) - 1).unwrap();
        let mut rng = Stream::new(4, "t");
        let a = MatrixFq::random(f, 30, 30, &mut rng);
        let b = MatrixFq::random(f, 30, 30, &mut rng);
        let c = a.mul(&b).unwrap();
        for (i, j) in [(0, 0), (7, 29), (29, 3)] {
            let mut s = 0u64;
            for k in 0..30 {
                s = f.add(s, f.mul(a.get(i, k), b.get(k, j)));
            }
            assert_eq!(c.get(i, j), s);
        }
    }

    #[test]
    fn genperm_matches_dense() {
        let mut rng = Stream::new(5, "t");
        for _ in 0..20 {
            let a = GenPerm::random(f67(), 9, &mut rng);
            let b = GenPerm::random(f67(), 9, &mut rng);
            let ab = a.mul(&b).unwrap();
            assert_eq!(ab.to_dense(), a.to_dense().mul(&b.to_dense()).unwrap());
            // permutation part of the product composes
            let composed: Vec<usize> = a.perm().iter().map(|&p| b.perm()[p]).collect();
            assert_eq!(ab.perm(), &composed[..]);
            assert!(a.mul(&a.inverse()).unwrap().is_identity());
            assert_eq!(GenPerm::from_dense(&a.to_dense()).unwrap(), a);
            let m = MatrixFq::random(f67(), 9, 4, &mut rng);
            assert_eq!(a.mul_dense(&m).unwrap(), a.to_dense().mul(&m).unwrap());
            let e = BigUint::from(rng.below(500));
            assert_eq!(a.pow(&e).to_dense(), a.to_dense().pow(&e).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rank_nullity(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9, rank_cap in 0usize..9) {
            let f = f67();
            let mut rng = Stream::new(seed, "rank");
            // product of random rows×k and k×cols matrices has rank ≤ k
            let k = rank_cap.max(1);
            let m = MatrixFq::random(f, rows, k, &mut rng).mul(&MatrixFq::random(f, k, cols, &mut rng)).unwrap();
            let basis = m.left_nullspace();
            prop_assert_eq!(m.rank() + basis.len(), rows);
            for h in &basis {
                prop_assert!(m.left_apply(h).unwrap().iter().all(|&v| v == 0));
            }
            prop_assert_eq!(basis, m.left_nullspace());
        }

        #[test]
        fn associativity_and_pow_additivity(seed in any::<u64>(), e1 in 0u64..300, e2 in 0u64..300) {
            let f = f67();
            let mut rng = Stream::new(seed, "assoc");
            let a = MatrixFq::random(f, 3, 4, &mut rng);
            let b = MatrixFq::random(f, 4, 5, &mut rng);
            let c = MatrixFq::random(f, 5, 2, &mut rng);
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            let s = MatrixFq::random(f, 4, 4, &mut rng);
            prop_assert_eq!(
                s.pow_u64(e1 + e2).unwrap(),
                s.pow_u64(e1).unwrap().mul(&s.pow_u64(e2).unwrap()).unwrap()
            );
        }
    }
}
