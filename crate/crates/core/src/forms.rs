//! Monomial indexing, bihomogeneous forms on P¹×P¹, and the expansion map
//! from degree-m forms on P³ (in the Segre coordinates Z₀₀, Z₀₁, Z₁₀, Z₁₁)
//! to bidegree-(m,m) forms.
//!
//! Monomial order everywhere is descending lexicographic on exponent
//! vectors: X₀^m first, X_n^m last. A bidegree-(d₁,d₂) form stores the
//! coefficient of X₀^{d₁−i}X₁^{i}Y₀^{d₂−j}Y₁^{j} at index `i·(d₂+1) + j`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::ff::{FieldElement, PrimeField};
use crate::linalg::MatrixFq;

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Exponent vectors of all degree-`degree` monomials in `n_vars` variables,
/// in descending lexicographic order.
pub fn monomials(n_vars: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(n_vars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n_vars == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            rec(n_vars - 1, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n_vars > 0 {
        rec(n_vars, degree, &mut Vec::with_capacity(n_vars), &mut out);
    }
    out
}

/// Index ↔ exponent-vector bijection for homogeneous monomials.
#[derive(Clone, Debug)]
pub struct HomMonomialBasis {
    n_vars: usize,
    degree: u32,
    exps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl HomMonomialBasis {
    pub fn new(n_vars: usize, degree: u32) -> Self {
        let exps = monomials(n_vars, degree);
        let index = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        Self { n_vars, degree, exps, index }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, idx: usize) -> &[u32] {
        &self.exps[idx]
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.exps.iter().map(Vec::as_slice)
    }

    /// Evaluates every monomial at `point`.
    pub fn evaluate(&self, field: &PrimeField, point: &[u64]) -> Vec<u64> {
        assert_eq!(point.len(), self.n_vars);
        self.exps
            .iter()
            .map(|e| {
                e.iter()
                    .zip(point)
                    .fold(1, |acc, (&k, &x)| field.mul(acc, field.pow(x, k as u64)))
            })
            .collect()
    }
}

/// N_{3,m} + 1 = C(m+3, 3): dimension of the Veronese ambient space plus one.
pub fn veronese_dim(m: u32) -> usize {
    binomial(m as u64 + 3, 3) as usize
}

/// Bihomogeneous form of bidegree (d₁, d₂) over F_q.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BiForm {
    d1: u32,
    d2: u32,
    coeffs: Vec<u64>,
    field: PrimeField,
}

impl BiForm {
    pub fn new(field: PrimeField, d1: u32, d2: u32, coeffs: Vec<u64>) -> Result<Self> {
        let len = (d1 as usize + 1) * (d2 as usize + 1);
        if coeffs.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for bidegree ({d1},{d2})",
                coeffs.len()
            )));
        }
        let coeffs = coeffs.into_iter().map(|c| field.reduce(c)).collect();
        Ok(Self { d1, d2, coeffs, field })
    }

    pub fn from_i64(field: PrimeField, d1: u32, d2: u32, coeffs: &[i64]) -> Result<Self> {
        Self::new(field, d1, d2, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: PrimeField, d1: u32, d2: u32) -> Self {
        Self { d1, d2, coeffs: vec![0; (d1 as usize + 1) * (d2 as usize + 1)], field }
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Self { d1: 0, d2: 0, coeffs: vec![field.reduce(c)], field }
    }

    /// X₀ (`which = 0`) or X₁ as a bidegree-(1,0) form.
    pub fn x_var(field: PrimeField, which: usize) -> Self {
        let mut c = vec![0, 0];
        c[which] = 1;
        Self { d1: 1, d2: 0, coeffs: c, field }
    }

    /// Y₀ or Y₁ as a bidegree-(0,1) form.
    pub fn y_var(field: PrimeField, which: usize) -> Self {
        let mut c = vec![0, 0];
        c[which] = 1;
        Self { d1: 0, d2: 1, coeffs: c, field }
    }

    pub fn bidegree(&self) -> (u32, u32) {
        (self.d1, self.d2)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of X₀^{d₁−i}X₁^{i}Y₀^{d₂−j}Y₁^{j}.
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> u64 {
        self.coeffs[i * (self.d2 as usize + 1) + j]
    }

    #[inline]
    pub fn set_coeff(&mut self, i: usize, j: usize, v: u64) {
        let idx = i * (self.d2 as usize + 1) + j;
        self.coeffs[idx] = self.field.reduce(v);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, s: u64) -> Self {
        let f = self.field;
        Self { coeffs: self.coeffs.iter().map(|&c| f.mul(c, s)).collect(), ..self.clone() }
    }

    pub fn first_nonzero(&self) -> Option<u64> {
        self.coeffs.iter().copied().find(|&c| c != 0)
    }

    /// Scaled so that the first nonzero coefficient is 1. The zero form is
    /// returned unchanged.
    pub fn normalized(&self) -> Self {
        match self.first_nonzero() {
            Some(c) => self.scale(self.field.inv(c).expect("nonzero")),
            None => self.clone(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.first_nonzero().is_none_or(|c| c == 1)
    }

    /// Same bidegree and proportional by a nonzero scalar.
    pub fn eq_up_to_scalar(&self, other: &Self) -> bool {
        self.field == other.field
            && self.bidegree() == other.bidegree()
            && !self.is_zero()
            && !other.is_zero()
            && self.normalized() == other.normalized()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.modulus(), other.field.modulus()));
        }
        let f = self.field;
        let mut out = Self::zero(f, self.d1 + other.d1, self.d2 + other.d2);
        for i in 0..=self.d1 as usize {
            for j in 0..=self.d2 as usize {
                let a = self.coeff(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..=other.d1 as usize {
                    for l in 0..=other.d2 as usize {
                        let b = other.coeff(k, l);
                        if b == 0 {
                            continue;
                        }
                        let idx = (i + k) * (out.d2 as usize + 1) + j + l;
                        out.coeffs[idx] = f.add(out.coeffs[idx], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.field, 1);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Value at the affine representatives `p = (x₀, x₁)`, `q = (y₀, y₁)`.
    pub fn eval(&self, p: [u64; 2], q: [u64; 2]) -> FieldElement {
        let f = self.field;
        let xs = power_row(&f, p, self.d1);
        let ys = power_row(&f, q, self.d2);
        let mut acc = 0;
        for (i, &xv) in xs.iter().enumerate() {
            for (j, &yv) in ys.iter().enumerate() {
                acc = f.add(acc, f.mul(self.coeff(i, j), f.mul(xv, yv)));
            }
        }
        f.elem(acc)
    }

    /// Exchanges the X and Y blocks.
    pub fn swap_blocks(&self) -> Self {
        let mut out = Self::zero(self.field, self.d2, self.d1);
        for i in 0..=self.d1 as usize {
            for j in 0..=self.d2 as usize {
                out.set_coeff(j, i, self.coeff(i, j));
            }
        }
        out
    }

    /// Human-readable form in variables x0, x1 (X block) and x2, x3 (Y block).
    pub fn pretty(&self) -> String {
        let f = self.field;
        let mut terms = Vec::new();
        let pw = |name: &str, e: u32| match e {
            0 => String::new(),
            1 => name.to_string(),
            _ => format!("{name}^{e}"),
        };
        for i in 0..=self.d1 {
            for j in 0..=self.d2 {
                let c = f.signed(self.coeff(i as usize, j as usize));
                if c == 0 {
                    continue;
                }
                let mono: String = [
                    pw("x0", self.d1 - i),
                    pw("x1", i),
                    pw("x2", self.d2 - j),
                    pw("x3", j),
                ]
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
                .join("*");
                terms.push(match (c, mono.is_empty()) {
                    (_, true) => c.to_string(),
                    (1, false) => mono,
                    (-1, false) => format!("-{mono}"),
                    _ => format!("{c}*{mono}"),
                });
            }
        }
        if terms.is_empty() {
            return "0".into();
        }
        terms.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Debug for BiForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiForm({},{})[{}]", self.d1, self.d2, self.pretty())
    }
}

/// `[p₀^d, p₀^{d−1}p₁, …, p₁^d]`.
pub fn power_row(f: &PrimeField, p: [u64; 2], d: u32) -> Vec<u64> {
    (0..=d)
        .map(|i| f.mul(f.pow(p[0], (d - i) as u64), f.pow(p[1], i as u64)))
        .collect()
}

/// Bidegree-(m,m) monomial vector at (P, Q), in the column order of a
/// σ-embedding matrix.
pub fn bidegree_monomials(f: &PrimeField, m: u32, p: [u64; 2], q: [u64; 2]) -> Vec<u64> {
    let xs = power_row(f, p, m);
    let ys = power_row(f, q, m);
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| f.mul(x, y))).collect()
}

/// The 0/1 matrix of the substitution Z_{ab} = X_a·Y_b on degree-m
/// monomials: row = Z-monomial (exponents of Z₀₀, Z₀₁, Z₁₀, Z₁₁), column =
/// bidegree-(m,m) monomial. Stored as the column index of each row's 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionMatrix {
    m: u32,
    column_of_row: Vec<usize>,
}

impl ExpansionMatrix {
    fn build(m: u32) -> Self {
        let column_of_row = monomials(4, m)
            .iter()
            .map(|e| {
                let x1 = (e[2] + e[3]) as usize;
                let y1 = (e[1] + e[3]) as usize;
                x1 * (m as usize + 1) + y1
            })
            .collect();
        Self { m, column_of_row }
    }

    /// Cached per degree.
    pub fn for_degree(m: u32) -> Arc<ExpansionMatrix> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<ExpansionMatrix>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("expansion cache poisoned");
        guard.entry(m).or_insert_with(|| Arc::new(Self::build(m))).clone()
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn rows(&self) -> usize {
        self.column_of_row.len()
    }

    pub fn cols(&self) -> usize {
        (self.m as usize + 1).pow(2)
    }

    pub fn column_of(&self, row: usize) -> usize {
        self.column_of_row[row]
    }

    pub fn to_matrix(&self, field: PrimeField) -> MatrixFq {
        let mut e = MatrixFq::zeros(field, self.rows(), self.cols());
        for (r, &c) in self.column_of_row.iter().enumerate() {
            e.set(r, c, 1);
        }
        e
    }

    /// `a · E` by gathering columns.
    pub fn right_apply(&self, a: &MatrixFq) -> Result<MatrixFq> {
        if a.cols() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times expansion matrix with {} rows",
                a.rows(),
                a.cols(),
                self.rows()
            )));
        }
        let f = a.field();
        let mut out = MatrixFq::zeros(f, a.rows(), self.cols());
        for r in 0..a.rows() {
            for (k, &c) in self.column_of_row.iter().enumerate() {
                let v = a.get(r, k);
                if v != 0 {
                    out.set(r, c, f.add(out.get(r, c), v));
                }
            }
        }
        Ok(out)
    }
}

/// Pullback of the hyperplane `h` through the σ-embedding whose matrix is
/// `sigma`: the bidegree-(m,m) form `h · sigma`.
pub fn pullback(h: &[u64], sigma: &MatrixFq) -> Result<BiForm> {
    let side = (sigma.cols() as f64).sqrt().round() as usize;
    if side * side != sigma.cols() || side < 2 {
        return Err(Error::DimensionMismatch(format!(
            "{} columns is not (m+1)^2",
            sigma.cols()
        )));
    }
    let coeffs = sigma.left_apply(h)?;
    let m = side as u32 - 1;
    BiForm::new(sigma.field(), m, m, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    fn f67() -> PrimeField {
        PrimeField::new(67).unwrap()
    }

    #[test]
    fn monomial_order_and_counts() {
        assert_eq!(monomials(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        let m3 = monomials(4, 3);
        assert_eq!(m3.len(), 20);
        assert_eq!(m3[0], vec![3, 0, 0, 0]);
        assert_eq!(m3[1], vec![2, 1, 0, 0]);
        assert_eq!(m3[19], vec![0, 0, 0, 3]);
        for m in 1..8 {
            assert_eq!(monomials(4, m).len(), veronese_dim(m));
            let b = HomMonomialBasis::new(4, m);
            for i in 0..b.len() {
                assert_eq!(b.index_of(b.exponent(i)), Some(i));
            }
        }
    }

    #[test]
    fn expansion_small_cases() {
        let e1 = ExpansionMatrix::for_degree(1);
        assert_eq!(e1.to_matrix(f67()), MatrixFq::identity(f67(), 4));
        let e2 = ExpansionMatrix::for_degree(2);
        let basis = HomMonomialBasis::new(4, 2);
        let z01z10 = basis.index_of(&[0, 1, 1, 0]).unwrap();
        let z00z11 = basis.index_of(&[1, 0, 0, 1]).unwrap();
        // X0 X1 Y0 Y1 is (i, j) = (1, 1) in a 3x3 layout
        assert_eq!(e2.column_of(z01z10), 4);
        assert_eq!(e2.column_of(z00z11), 4);
        let e3 = ExpansionMatrix::for_degree(3);
        assert_eq!((e3.rows(), e3.cols()), (20, 16));
        let dense = e3.to_matrix(f67());
        for r in 0..dense.rows() {
            assert_eq!(dense.row(r).iter().filter(|&&v| v == 1).count(), 1);
        }
    }

    #[test]
    fn expansion_commutes_with_segre() {
        // E · w(P,Q) = v(s(P,Q)) as column vectors
        let f = f67();
        let mut rng = Stream::new(11, "segre");
        for m in 1..6 {
            let e = ExpansionMatrix::for_degree(m).to_matrix(f);
            let basis = HomMonomialBasis::new(4, m);
            for _ in 0..10 {
                let p = [rng.element(&f), rng.element(&f)];
                let q = [rng.element(&f), rng.element(&f)];
                let z = [f.mul(p[0], q[0]), f.mul(p[0], q[1]), f.mul(p[1], q[0]), f.mul(p[1], q[1])];
                let lhs = e.apply(&bidegree_monomials(&f, m, p, q)).unwrap();
                assert_eq!(lhs, basis.evaluate(&f, &z));
            }
        }
    }

    #[test]
    fn right_apply_matches_dense() {
        let f = f67();
        let mut rng = Stream::new(12, "ra");
        let e = ExpansionMatrix::for_degree(3);
        let a = MatrixFq::random(f, 20, 20, &mut rng);
        assert_eq!(e.right_apply(&a).unwrap(), a.mul(&e.to_matrix(f)).unwrap());
    }

    #[test]
    fn biform_products_and_evaluation() {
        let f = f67();
        let x0y0 = BiForm::x_var(f, 0).mul(&BiForm::y_var(f, 0)).unwrap();
        let x1y1 = BiForm::x_var(f, 1).mul(&BiForm::y_var(f, 1)).unwrap();
        let prod = x0y0.mul(&x1y1).unwrap();
        assert_eq!(prod, BiForm::from_i64(f, 2, 2, &[0, 0, 0, 0, 1, 0, 0, 0, 0]).unwrap());
        assert_eq!(x0y0.mul(&BiForm::constant(f, 1)).unwrap(), x0y0);
        assert_eq!(x0y0.eval([0, 1], [1, 0]).value(), 0);
        assert_eq!(BiForm::zero(f, 3, 2).eval([4, 5], [6, 7]).value(), 0);
        assert_eq!(prod.pretty(), "x0*x1*x2*x3");
    }

    #[test]
    fn pullback_identity_frame() {
        let f = f67();
        let e = ExpansionMatrix::for_degree(1).to_matrix(f);
        let pb = pullback(&[1, 0, 0, 0], &e).unwrap();
        let x0y0 = BiForm::x_var(f, 0).mul(&BiForm::y_var(f, 0)).unwrap();
        assert_eq!(pb, x0y0);
        assert!(matches!(pullback(&[1, 0, 0], &e), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn normalization_and_swap() {
        let f = f67();
        let g = BiForm::from_i64(f, 1, 2, &[0, 3, 5, 7, 0, 1]).unwrap();
        assert!(g.normalized().is_normalized());
        assert!(g.eq_up_to_scalar(&g.scale(9)));
        assert_eq!(g.swap_blocks().swap_blocks(), g);
        assert_eq!(g.swap_blocks().coeff(2, 1), g.coeff(1, 2));
    }
}
