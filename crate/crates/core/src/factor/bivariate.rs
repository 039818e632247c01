//! Dense bivariate polynomials over F_q and factorization of squarefree
//! primitive ones by specialization, Hensel lifting and recombination.

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::rng::Stream;

use super::univariate::{univ_factor, UnivariatePoly};

/// `c[i][j]` is the coefficient of xⁱyʲ. Rows and columns are trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bivar {
    field: PrimeField,
    c: Vec<Vec<u64>>,
}

impl Bivar {
    pub fn new(field: PrimeField, mut c: Vec<Vec<u64>>) -> Self {
        for row in c.iter_mut() {
            for v in row.iter_mut() {
                *v = field.reduce(*v);
            }
            while row.last() == Some(&0) {
                row.pop();
            }
        }
        while c.last().is_some_and(|r| r.is_empty()) {
            c.pop();
        }
        Self { field, c }
    }

    pub fn zero(field: PrimeField) -> Self {
        Self { field, c: Vec::new() }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::new(field, vec![vec![1]])
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.c.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg_x(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg_y(&self) -> Option<usize> {
        self.c.iter().filter_map(|r| r.len().checked_sub(1)).max()
    }

    /// Coefficient of xⁱ as a polynomial in y.
    pub fn x_coeff(&self, i: usize) -> UnivariatePoly {
        UnivariatePoly::new(self.field, self.c.get(i).cloned().unwrap_or_default())
    }

    pub fn from_x_coeffs(field: PrimeField, cs: &[UnivariatePoly]) -> Self {
        Self::new(field, cs.iter().map(|p| p.coeffs().to_vec()).collect())
    }

    /// Coefficient of yʲ as a polynomial in x.
    pub fn y_coeff(&self, j: usize) -> UnivariatePoly {
        UnivariatePoly::new(self.field, self.c.iter().map(|r| r.get(j).copied().unwrap_or(0)).collect())
    }

    pub fn from_y_coeffs(field: PrimeField, cs: &[UnivariatePoly]) -> Self {
        let nx = cs.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
        Self::new(
            field,
            (0..nx).map(|i| cs.iter().map(|p| p.coeff(i)).collect()).collect(),
        )
    }

    /// A polynomial in x alone.
    pub fn from_x_poly(p: &UnivariatePoly) -> Self {
        Self::new(p.field(), p.coeffs().iter().map(|&c| vec![c]).collect())
    }

    /// A polynomial in y alone.
    pub fn from_y_poly(p: &UnivariatePoly) -> Self {
        Self::new(p.field(), vec![p.coeffs().to_vec()])
    }

    pub fn lc_x(&self) -> UnivariatePoly {
        self.deg_x().map_or(UnivariatePoly::zero(self.field), |d| self.x_coeff(d))
    }

    pub fn swap(&self) -> Self {
        let ny = self.deg_y().map_or(0, |d| d + 1);
        Self::new(
            self.field,
            (0..ny).map(|j| self.c.iter().map(|r| r.get(j).copied().unwrap_or(0)).collect()).collect(),
        )
    }

    pub fn scale(&self, s: u64) -> Self {
        let f = self.field;
        Self::new(f, self.c.iter().map(|r| r.iter().map(|&v| f.mul(v, s)).collect()).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, |f, a, b| f.sub(a, b))
    }

    fn combine(&self, o: &Self, op: impl Fn(&PrimeField, u64, u64) -> u64) -> Self {
        let f = self.field;
        let nx = self.c.len().max(o.c.len());
        let ny = self.deg_y().max(o.deg_y()).map_or(0, |d| d + 1);
        Self::new(
            f,
            (0..nx)
                .map(|i| (0..ny).map(|j| op(&f, self.get(i, j), o.get(i, j))).collect())
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_trunc(o, usize::MAX)
    }

    /// Product with all terms of y-degree ≥ k dropped.
    pub fn mul_trunc(&self, o: &Self, k: usize) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.field);
        }
        let f = self.field;
        let ny = (self.deg_y().unwrap() + o.deg_y().unwrap() + 1).min(k);
        let mut out = vec![vec![0u64; ny]; self.c.len() + o.c.len() - 1];
        for (i1, r1) in self.c.iter().enumerate() {
            for (j1, &a) in r1.iter().enumerate() {
                if a == 0 || j1 >= ny {
                    continue;
                }
                for (i2, r2) in o.c.iter().enumerate() {
                    let row = &mut out[i1 + i2];
                    for (j2, &b) in r2.iter().enumerate().take(ny - j1) {
                        row[j1 + j2] = f.add(row[j1 + j2], f.mul(a, b));
                    }
                }
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.field), |acc, _| acc.mul(self))
    }

    pub fn derivative_x(&self) -> Self {
        let f = self.field;
        Self::new(
            f,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, r)| r.iter().map(|&v| f.mul(v, f.reduce(i as u64))).collect())
                .collect(),
        )
    }

    pub fn eval_y(&self, a: u64) -> UnivariatePoly {
        UnivariatePoly::new(
            self.field,
            self.c.iter().map(|r| UnivariatePoly::new(self.field, r.clone()).eval(a)).collect(),
        )
    }

    /// p(x, y + a).
    pub fn shift_y(&self, a: u64) -> Self {
        let f = self.field;
        let lin = UnivariatePoly::new(f, vec![a, 1]);
        let shifted: Vec<UnivariatePoly> = self
            .c
            .iter()
            .map(|r| {
                r.iter().rev().fold(UnivariatePoly::zero(f), |acc, &c| {
                    acc.mul(&lin).add(&UnivariatePoly::constant(f, c))
                })
            })
            .collect();
        Self::from_x_coeffs(f, &shifted)
    }

    /// gcd of the x-coefficients: the largest factor depending on y alone.
    pub fn content_y(&self) -> UnivariatePoly {
        self.c
            .iter()
            .fold(UnivariatePoly::zero(self.field), |g, r| g.gcd(&UnivariatePoly::new(self.field, r.clone())))
    }

    /// gcd of the y-coefficients: the largest factor depending on x alone.
    pub fn content_x(&self) -> UnivariatePoly {
        let ny = self.deg_y().map_or(0, |d| d + 1);
        (0..ny).fold(UnivariatePoly::zero(self.field), |g, j| g.gcd(&self.y_coeff(j)))
    }

    pub fn div_y_poly(&self, p: &UnivariatePoly) -> Result<Self> {
        let mut cs = Vec::with_capacity(self.c.len());
        for i in 0..self.c.len() {
            let (q, r) = self.x_coeff(i).div_rem(p)?;
            if !r.is_zero() {
                return Err(Error::Invariant("inexact division by a y-content".into()));
            }
            cs.push(q);
        }
        Ok(Self::from_x_coeffs(self.field, &cs))
    }

    /// Primitive part with respect to x, scaled so its leading coefficient's
    /// leading coefficient is 1.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.div_y_poly(&self.content_y()).expect("content divides");
        let lead = p.lc_x().leading();
        p.scale(self.field.inv(lead).expect("nonzero"))
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let f = self.field;
        let dx = d.deg_x()?;
        let dlc = d.lc_x();
        let dy = dlc.degree().expect("nonzero");
        let inv = f.inv(dlc.leading()).expect("nonzero");
        let mut rem = self.clone();
        let mut quo: Vec<Vec<u64>> = Vec::new();
        while let Some(rx) = rem.deg_x() {
            if rx < dx {
                return None;
            }
            let rlc = rem.lc_x();
            let ry = rlc.degree().expect("nonzero");
            if ry < dy {
                return None;
            }
            let (i, j) = (rx - dx, ry - dy);
            let c = f.mul(rlc.leading(), inv);
            if quo.len() <= i {
                quo.resize(i + 1, Vec::new());
            }
            if quo[i].len() <= j {
                quo[i].resize(j + 1, 0);
            }
            quo[i][j] = f.add(quo[i][j], c);
            let mut term = vec![Vec::new(); i + 1];
            term[i] = vec![0; j + 1];
            term[i][j] = c;
            rem = rem.sub(&d.mul(&Self::new(f, term)));
        }
        Some(Self::new(f, quo))
    }

    /// Pseudo-remainder of `self` by `d` in F_q[y][x].
    fn prem(&self, d: &Self) -> Self {
        let dx = d.deg_x().expect("nonzero divisor");
        let l = Self::from_y_poly(&d.lc_x());
        let mut r = self.clone();
        while let Some(rx) = r.deg_x() {
            if rx < dx {
                break;
            }
            let mut shift = vec![Vec::new(); rx - dx + 1];
            shift[rx - dx] = vec![1];
            let lead = Self::from_y_poly(&r.lc_x()).mul(&Self::new(self.field, shift));
            r = r.mul(&l).sub(&lead.mul(d));
        }
        r
    }
}

/// gcd of two polynomials that are primitive with respect to x, by the
/// primitive pseudo-remainder sequence.
pub fn gcd_primitive(a: &Bivar, b: &Bivar) -> Bivar {
    let (mut a, mut b) = if a.deg_x() >= b.deg_x() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while !b.is_zero() {
        if b.deg_x() == Some(0) {
            return Bivar::one(a.field());
        }
        let r = a.prem(&b);
        a = b;
        b = if r.is_zero() { r } else { r.primitive_part() };
    }
    a.primitive_part()
}

// Power series in y with polynomial-in-x coefficients, truncated at y^k.
type Series = Vec<UnivariatePoly>;

fn series_of(p: &Bivar, k: usize) -> Series {
    (0..k).map(|j| p.y_coeff(j)).collect()
}

fn series_mul(a: &Series, b: &Series, k: usize) -> Series {
    let f = a[0].field();
    (0..k)
        .map(|j| {
            (0..=j).fold(UnivariatePoly::zero(f), |acc, t| match (a.get(t), b.get(j - t)) {
                (Some(x), Some(y)) => acc.add(&x.mul(y)),
                _ => acc,
            })
        })
        .collect()
}

// Inverse of a power series in y (constant term nonzero) mod y^k.
fn y_series_inverse(p: &UnivariatePoly, k: usize) -> Vec<u64> {
    let f = p.field();
    let c0 = f.inv(p.coeff(0)).expect("unit constant term");
    let mut out = vec![0u64; k];
    out[0] = c0;
    for j in 1..k {
        let s = (1..=j).fold(0, |acc, t| f.add(acc, f.mul(p.coeff(t), out[j - t])));
        out[j] = f.neg(f.mul(s, c0));
    }
    out
}

// Lifts f ≡ g0·h0 (mod y) to monic G, H with f ≡ G·H (mod y^k); f monic in x.
fn hensel_two(f: &Series, g0: &UnivariatePoly, h0: &UnivariatePoly, k: usize) -> (Series, Series) {
    let (_, s, t) = g0.ext_gcd(h0);
    let mut g = vec![g0.clone()];
    let mut h = vec![h0.clone()];
    for j in 1..k {
        let mut e = f[j].clone();
        for a in 1..j {
            e = e.sub(&g[a].mul(&h[j - a]));
        }
        g.push(t.mul(&e).rem(g0).expect("nonzero"));
        h.push(s.mul(&e).rem(h0).expect("nonzero"));
    }
    (g, h)
}

fn choose_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

const SPECIALIZATION_TRIES: usize = 64;

// A point a with lc(a) ≠ 0 and r(x, a) squarefree of full degree.
fn good_point(r: &Bivar, rng: &mut Stream) -> Option<u64> {
    let f = r.field();
    let n = r.deg_x()?;
    let lc = r.lc_x();
    let good = |a: u64| {
        if lc.eval(a) == 0 {
            return false;
        }
        let s = r.eval_y(a);
        s.degree() == Some(n) && s.gcd(&s.derivative()).is_one()
    };
    let q = f.modulus();
    if q as usize <= SPECIALIZATION_TRIES {
        let mut pts: Vec<u64> = (0..q).collect();
        let order = rng.permutation(pts.len());
        pts = order.into_iter().map(|i| pts[i]).collect();
        pts.into_iter().find(|&a| good(a))
    } else {
        (0..SPECIALIZATION_TRIES).map(|_| rng.element(&f)).find(|&a| good(a))
    }
}

/// Irreducible factors of a squarefree polynomial that is primitive in
/// both directions (no factor depends on x or y alone). Returns
/// `SpecializationFailed` when no usable specialization point exists.
pub fn factor_squarefree(r: &Bivar, rng: &mut Stream) -> Result<Vec<Bivar>> {
    let f = r.field();
    let n = match r.deg_x() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Ok(Vec::new()),
        Some(n) => n,
    };
    let a = good_point(r, rng).ok_or(Error::SpecializationFailed)?;
    let big_r = r.shift_y(a);
    let lc = big_r.lc_x();
    let k = big_r.deg_y().unwrap_or(0) + lc.degree().unwrap_or(0) + 1;

    let base = univ_factor(&big_r.eval_y(0), rng)?;
    let mut lifted: Vec<Series> = Vec::new();
    if base.factors.len() == 1 {
        return Ok(vec![r.primitive_part()]);
    }
    let lc_inv = y_series_inverse(&lc, k);
    let lc_inv_series: Series = lc_inv.iter().map(|&c| UnivariatePoly::constant(f, c)).collect();
    let mut cur = series_mul(&lc_inv_series, &series_of(&big_r, k), k);
    let g0s: Vec<UnivariatePoly> = base.factors.iter().map(|(g, _)| g.clone()).collect();
    for i in 0..g0s.len() - 1 {
        let rest0 = g0s[i + 1..]
            .iter()
            .fold(UnivariatePoly::constant(f, 1), |acc, g| acc.mul(g));
        let (g, h) = hensel_two(&cur, &g0s[i], &rest0, k);
        lifted.push(g);
        cur = h;
    }
    lifted.push(cur);
    debug_assert_eq!(lifted.iter().map(|g| g[0].degree().unwrap()).sum::<usize>(), n);

    let mut remaining = big_r.clone();
    let mut pool: Vec<Series> = lifted;
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= pool.len() {
        let mut hit = None;
        for subset in choose_subsets(pool.len(), size) {
            let lc_s: Series = remaining
                .lc_x()
                .coeffs()
                .iter()
                .take(k)
                .map(|&c| UnivariatePoly::constant(f, c))
                .collect();
            let prod = subset
                .iter()
                .fold(lc_s, |acc, &i| series_mul(&acc, &pool[i], k));
            let cand = Bivar::from_y_coeffs(f, &prod);
            if cand.is_zero() {
                continue;
            }
            let cand = cand.primitive_part();
            if let Some(q) = remaining.div_exact(&cand) {
                hit = Some((subset, cand, q));
                break;
            }
        }
        match hit {
            Some((subset, cand, q)) => {
                found.push(cand);
                remaining = q;
                pool = pool
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, s)| s)
                    .collect();
            }
            None => size += 1,
        }
    }
    if remaining.deg_x().unwrap_or(0) > 0 {
        found.push(remaining.primitive_part());
    }
    Ok(found.into_iter().map(|g| g.shift_y(f.neg(a)).primitive_part()).collect())
}
