//! Segre/Veronese σ-embeddings, the GLEmb homomorphism and automorphisms
//! of (non-standard) Veronese varieties.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::factor::UnivariatePoly;
use crate::factor::univariate::is_irreducible_quartic;
use crate::ff::PrimeField;
use crate::forms::{bidegree_monomials, veronese_dim, ExpansionMatrix, HomMonomialBasis};
use crate::linalg::{GenPerm, MatrixFq};
use crate::numth::{factorize_u128, prime_divisors_q4_minus_1};
use crate::rng::Stream;

const MAX_POLY_ATTEMPTS: u32 = 20_000;

// For each monomial of degree k and each variable j, the index of
// (monomial · X_j) in the degree-(k+1) basis.
fn shift_table(n_vars: usize, k: u32) -> Vec<Vec<usize>> {
    let lo = HomMonomialBasis::new(n_vars, k);
    let hi = HomMonomialBasis::new(n_vars, k + 1);
    lo.iter()
        .map(|e| {
            (0..n_vars)
                .map(|j| {
                    let mut up = e.to_vec();
                    up[j] += 1;
                    hi.index_of(&up).expect("monomial of next degree")
                })
                .collect()
        })
        .collect()
}

/// Matrix of the substitution Xᵢ ↦ Σⱼ aᵢⱼXⱼ on degree-m monomials in
/// `n+1` variables: row `e` holds the coefficients of L₀^{e₀}···Lₙ^{eₙ}.
/// Satisfies glemb(A)·v(z) = v(A·z) for the Veronese map v.
pub fn glemb(n: usize, m: u32, a: &MatrixFq) -> Result<MatrixFq> {
    let nv = n + 1;
    if a.rows() != nv || a.cols() != nv {
        return Err(Error::DimensionMismatch(format!(
            "glemb({n},{m}) needs a {nv}x{nv} matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rank() < nv {
        return Err(Error::SingularMatrix);
    }
    let f = a.field();
    let tables: Vec<Vec<Vec<usize>>> = (0..m).map(|k| shift_table(nv, k)).collect();
    let basis = HomMonomialBasis::new(nv, m);
    let size = basis.len();
    let mut data = Vec::with_capacity(size * size);
    for e in basis.iter() {
        let mut poly = vec![1u64];
        let mut deg = 0usize;
        for (i, &times) in e.iter().enumerate() {
            for _ in 0..times {
                let table = &tables[deg];
                let next_len = HomMonomialBasis::new(nv, deg as u32 + 1).len();
                let mut next = vec![0u64; next_len];
                for (t, &c) in poly.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    for j in 0..nv {
                        let aij = a.get(i, j);
                        if aij != 0 {
                            let k = table[t][j];
                            next[k] = f.add(next[k], f.mul(c, aij));
                        }
                    }
                }
                poly = next;
                deg += 1;
            }
        }
        data.extend(poly);
    }
    MatrixFq::new(f, size, size, data)
}

/// GLEmb of a generalized permutation, kept sparse: Xᵢ ↦ sᵢX_{π(i)} sends
/// each monomial to a scaled monomial.
pub fn glemb_genperm(n: usize, m: u32, u: &GenPerm) -> Result<GenPerm> {
    if u.size() != n + 1 {
        return Err(Error::DimensionMismatch("glemb of a generalized permutation".into()));
    }
    let basis = HomMonomialBasis::new(n + 1, m);
    let f = u.field();
    let mut perm = Vec::with_capacity(basis.len());
    let mut scale = Vec::with_capacity(basis.len());
    for e in basis.iter() {
        let mut image = vec![0u32; n + 1];
        let mut s = 1u64;
        for (i, &k) in e.iter().enumerate() {
            image[u.perm()[i]] += k;
            s = f.mul(s, f.pow(u.scales()[i], k as u64));
        }
        perm.push(basis.index_of(&image).expect("same degree"));
        scale.push(s);
    }
    GenPerm::new(f, perm, scale)
}

/// Is `w` a point of the standard Veronese variety v_{3,m}(P³)?
pub fn is_on_standard_veronese(field: &PrimeField, m: u32, w: &[u64]) -> bool {
    let basis = HomMonomialBasis::new(4, m);
    if w.len() != basis.len() || m == 0 {
        return false;
    }
    for k in 0..4 {
        let mut pure = [0u32; 4];
        pure[k] = m;
        let lam = w[basis.index_of(&pure).expect("pure power")];
        if lam == 0 {
            continue;
        }
        let inv = field.inv(lam).expect("nonzero");
        let z: Vec<u64> = (0..4)
            .map(|i| {
                let mut e = [0u32; 4];
                e[k] = m - 1;
                e[i] += 1;
                field.mul(w[basis.index_of(&e).expect("monomial")], inv)
            })
            .collect();
        let v = basis.evaluate(field, &z);
        return v.iter().zip(w).all(|(&a, &b)| field.mul(a, lam) == b);
    }
    false
}

/// The secret frame M_U of a non-standard Veronese variety M_U·V_{3,m}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VeroneseFrame {
    m: u32,
    matrix: MatrixFq,
    inverse: MatrixFq,
    sparse: Option<GenPerm>,
}

impl VeroneseFrame {
    pub fn from_matrix(m: u32, matrix: MatrixFq) -> Result<Self> {
        let n = veronese_dim(m);
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!("frame for m={m} must be {n}x{n}")));
        }
        let inverse = matrix.inverse()?;
        let sparse = GenPerm::from_dense(&matrix);
        Ok(Self { m, matrix, inverse, sparse })
    }

    pub fn identity(field: PrimeField, m: u32) -> Self {
        let id = MatrixFq::identity(field, veronese_dim(m));
        Self::from_matrix(m, id).expect("identity is invertible")
    }

    /// Uniformly random invertible frame (version 1).
    pub fn random(field: PrimeField, m: u32, rng: &mut Stream) -> Result<Self> {
        let matrix = MatrixFq::random_invertible(field, veronese_dim(m), rng)?;
        Self::from_matrix(m, matrix)
    }

    /// Random generalized permutation frame (version 2).
    pub fn random_genperm(field: PrimeField, m: u32, rng: &mut Stream) -> Self {
        let gp = GenPerm::random(field, veronese_dim(m), rng);
        Self {
            m,
            matrix: gp.to_dense(),
            inverse: gp.inverse().to_dense(),
            sparse: Some(gp),
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn matrix(&self) -> &MatrixFq {
        &self.matrix
    }

    pub fn inverse(&self) -> &MatrixFq {
        &self.inverse
    }

    pub fn as_genperm(&self) -> Option<&GenPerm> {
        self.sparse.as_ref()
    }

    fn apply(&self, a: &MatrixFq) -> Result<MatrixFq> {
        match &self.sparse {
            Some(gp) => gp.mul_dense(a),
            None => self.matrix.mul(a),
        }
    }

    /// Membership of a point of P^N in M_U·V_{3,m}.
    pub fn contains(&self, point: &[u64]) -> bool {
        match self.inverse.apply(point) {
            Ok(w) => is_on_standard_veronese(&self.field(), self.m, &w),
            Err(_) => false,
        }
    }

    /// M_U·v_{3,m}(z) for z ∈ F_q⁴.
    pub fn veronese_point(&self, z: &[u64; 4]) -> Vec<u64> {
        let v = HomMonomialBasis::new(4, self.m).evaluate(&self.field(), z);
        self.matrix.apply(&v).expect("square frame")
    }
}

/// An (N+1)×(m+1)² matrix of full column rank realizing a σ-embedding of
/// P¹×P¹ into P^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaEmbedding {
    m: u32,
    matrix: MatrixFq,
}

impl SigmaEmbedding {
    pub fn new(matrix: MatrixFq) -> Result<Self> {
        let side = (matrix.cols() as f64).sqrt().round() as usize;
        if side < 2 || side * side != matrix.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns is not (m+1)^2",
                matrix.cols()
            )));
        }
        let m = side as u32 - 1;
        if matrix.rows() != veronese_dim(m) {
            return Err(Error::DimensionMismatch(format!(
                "σ-embedding for m={m} needs {} rows, got {}",
                veronese_dim(m),
                matrix.rows()
            )));
        }
        if matrix.rank() != matrix.cols() {
            return Err(Error::Invariant("σ-embedding matrix lacks full column rank".into()));
        }
        Ok(Self { m, matrix })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn matrix(&self) -> &MatrixFq {
        &self.matrix
    }

    pub fn into_matrix(self) -> MatrixFq {
        self.matrix
    }

    /// σ(P, Q) ∈ P^N.
    pub fn eval(&self, p: [u64; 2], q: [u64; 2]) -> Vec<u64> {
        let w = bidegree_monomials(&self.field(), self.m, p, q);
        self.matrix.apply(&w).expect("shape checked at construction")
    }

    /// Canonical basis of the hyperplanes containing the image.
    pub fn cokernel(&self) -> Vec<Vec<u64>> {
        self.matrix.left_nullspace()
    }

    /// `a · σ` for an automorphism `a` (stays a σ-embedding).
    pub fn transformed(&self, a: &Automorphism) -> Result<Self> {
        Ok(Self { m: self.m, matrix: a.apply_to(&self.matrix)? })
    }
}

/// M_U · GLEmb(3,m)(B) · E.
pub fn sigma_compose(frame: &VeroneseFrame, b: &MatrixFq) -> Result<SigmaEmbedding> {
    let g = glemb(3, frame.m, b)?;
    let e = ExpansionMatrix::for_degree(frame.m);
    SigmaEmbedding::new(e.right_apply(&frame.apply(&g)?)?)
}

/// An automorphism of P^N, dense or generalized-permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automorphism {
    Dense(MatrixFq),
    Sparse(GenPerm),
}

impl Automorphism {
    pub fn identity(field: PrimeField, n: usize) -> Self {
        Automorphism::Sparse(GenPerm::identity(field, n))
    }

    pub fn size(&self) -> usize {
        match self {
            Automorphism::Dense(m) => m.rows(),
            Automorphism::Sparse(g) => g.size(),
        }
    }

    pub fn to_dense(&self) -> MatrixFq {
        match self {
            Automorphism::Dense(m) => m.clone(),
            Automorphism::Sparse(g) => g.to_dense(),
        }
    }

    pub fn is_generalized_permutation(&self) -> bool {
        match self {
            Automorphism::Dense(m) => m.is_generalized_permutation(),
            Automorphism::Sparse(_) => true,
        }
    }

    pub fn pow(&self, exp: &BigUint) -> Result<Self> {
        Ok(match self {
            Automorphism::Dense(m) => Automorphism::Dense(m.pow(exp)?),
            Automorphism::Sparse(g) => Automorphism::Sparse(g.pow(exp)),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (Automorphism::Sparse(a), Automorphism::Sparse(b)) => Automorphism::Sparse(a.mul(b)?),
            (Automorphism::Sparse(a), Automorphism::Dense(b)) => Automorphism::Dense(a.mul_dense(b)?),
            (a, b) => Automorphism::Dense(a.to_dense().mul(&b.to_dense())?),
        })
    }

    /// `self · m`.
    pub fn apply_to(&self, m: &MatrixFq) -> Result<MatrixFq> {
        match self {
            Automorphism::Dense(a) => a.mul(m),
            Automorphism::Sparse(g) => g.mul_dense(m),
        }
    }
}

/// Two automorphisms A₁, A₂ of a frame's Veronese variety.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismKey {
    pub a: [Automorphism; 2],
    /// The 4×4 matrices U′ᵢ with Aᵢ = M_U·GLEmb(U′ᵢ)·M_U⁻¹ (secret).
    pub base: [MatrixFq; 2],
    /// Order of each U′ᵢ.
    pub claimed_order: BigUint,
    /// Exponents are drawn from [0, exponent_bound).
    pub exponent_bound: BigUint,
    pub version: u8,
}

/// A₁^{e₀}·A₂^{e₁}·A₁^{e₂}·A₂^{e₃}.
pub fn word_matrix(a: &[Automorphism; 2], exps: &[BigUint; 4]) -> Result<Automorphism> {
    let n = a[0].size();
    let field = match &a[0] {
        Automorphism::Dense(m) => m.field(),
        Automorphism::Sparse(g) => g.field(),
    };
    let mut acc = Automorphism::identity(field, n);
    for (k, e) in exps.iter().enumerate() {
        if e.bits() == 0 {
            continue;
        }
        acc = acc.mul(&a[k % 2].pow(e)?)?;
    }
    Ok(acc)
}

/// `u^order = I` and `u^{order/p} ≠ I` for each prime p dividing `order`.
pub fn has_exact_order(u: &MatrixFq, order: &BigUint, primes: &[u128]) -> Result<bool> {
    let id = MatrixFq::identity(u.field(), u.rows());
    if u.pow(order)? != id {
        return Ok(false);
    }
    for &p in primes {
        let p = BigUint::from(p);
        if (order % &p).bits() == 0 && u.pow(&(order / &p))? == id {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Is the monic quartic `f` primitive (x has order q⁴−1 modulo f)?
pub fn is_primitive_quartic(f: &UnivariatePoly, primes: &[u128]) -> bool {
    if !is_irreducible_quartic(f) {
        return false;
    }
    let q = BigUint::from(f.field().modulus());
    let order = q.pow(4) - 1u32;
    let x = UnivariatePoly::x(f.field());
    primes
        .iter()
        .all(|&p| !x.pow_mod(&(&order / BigUint::from(p)), f).is_one())
}

/// Random monic primitive quartic over F_q.
pub fn random_primitive_quartic(field: PrimeField, rng: &mut Stream) -> Result<UnivariatePoly> {
    let primes = prime_divisors_q4_minus_1(field.modulus());
    for _ in 0..MAX_POLY_ATTEMPTS {
        let mut c: Vec<u64> = (0..4).map(|_| rng.element(&field)).collect();
        c.push(1);
        let f = UnivariatePoly::new(field, c);
        if f.coeff(0) != 0 && is_primitive_quartic(&f, &primes) {
            return Ok(f);
        }
    }
    Err(Error::RandomnessExhausted(MAX_POLY_ATTEMPTS))
}

/// 4×4 companion matrix of a monic quartic.
pub fn companion_matrix(f: &UnivariatePoly) -> Result<MatrixFq> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)?;
    MatrixFq::new(f.field(), d, d, f.companion())
}

fn conjugate(frame: &VeroneseFrame, u: &MatrixFq) -> Result<MatrixFq> {
    frame.apply(&glemb(3, frame.m, u)?)?.mul(&frame.inverse)
}

/// Version-1 automorphism pair: companion matrices of random primitive
/// quartics (order exactly q⁴−1), conjugated into the frame.
pub fn gen_automorphism_pair(frame: &VeroneseFrame, rng: &mut Stream) -> Result<AutomorphismKey> {
    let field = frame.field();
    let primes = prime_divisors_q4_minus_1(field.modulus());
    let order = BigUint::from(field.modulus()).pow(4) - 1u32;
    let mut pick = || -> Result<(Automorphism, MatrixFq)> {
        for _ in 0..MAX_POLY_ATTEMPTS {
            let u = companion_matrix(&random_primitive_quartic(field, rng)?)?;
            if has_exact_order(&u, &order, &primes)? {
                return Ok((Automorphism::Dense(conjugate(frame, &u)?), u));
            }
        }
        Err(Error::RandomnessExhausted(MAX_POLY_ATTEMPTS))
    };
    let (a1, u1) = pick()?;
    let (a2, u2) = pick()?;
    Ok(AutomorphismKey {
        a: [a1, a2],
        base: [u1, u2],
        exponent_bound: BigUint::from(field.modulus()).pow(4),
        claimed_order: order,
        version: 1,
    })
}

/// A random generator of F_q^*.
pub fn random_generator(field: PrimeField, rng: &mut Stream) -> Result<u64> {
    let q = field.modulus();
    let primes: Vec<u64> = factorize_u128((q - 1) as u128).iter().map(|&(p, _)| p as u64).collect();
    for _ in 0..MAX_POLY_ATTEMPTS {
        let g = rng.nonzero(&field);
        if primes.iter().all(|&p| field.pow(g, (q - 1) / p) != 1) {
            return Ok(g);
        }
    }
    Err(Error::RandomnessExhausted(MAX_POLY_ATTEMPTS))
}

/// Random 4-cycle generalized permutation whose scales multiply to a
/// generator of F_q^*: order exactly 4(q−1).
pub fn random_cycle_genperm(field: PrimeField, rng: &mut Stream) -> Result<GenPerm> {
    let order = rng.permutation(4);
    let mut perm = vec![0usize; 4];
    for k in 0..4 {
        perm[order[k]] = order[(k + 1) % 4];
    }
    let g = random_generator(field, rng)?;
    let mut scale: Vec<u64> = (0..3).map(|_| rng.nonzero(&field)).collect();
    let partial = scale.iter().fold(1, |acc, &s| field.mul(acc, s));
    scale.push(field.mul(g, field.inv(partial)?));
    GenPerm::new(field, perm, scale)
}

/// Version-2 automorphism pair of generalized permutation matrices; needs a
/// generalized permutation frame.
pub fn gen_permutation_variant(frame: &VeroneseFrame, rng: &mut Stream) -> Result<AutomorphismKey> {
    let Some(fp) = frame.as_genperm() else {
        return Err(Error::InvalidParameters(
            "permutation variant needs a generalized permutation frame".into(),
        ));
    };
    let field = frame.field();
    let fp_inv = fp.inverse();
    let mut pick = || -> Result<(Automorphism, MatrixFq)> {
        let u = random_cycle_genperm(field, rng)?;
        let a = fp.mul(&glemb_genperm(3, frame.m, &u)?)?.mul(&fp_inv)?;
        Ok((Automorphism::Sparse(a), u.to_dense()))
    };
    let (a1, u1) = pick()?;
    let (a2, u2) = pick()?;
    let bound = BigUint::from(4 * (field.modulus() - 1));
    Ok(AutomorphismKey {
        a: [a1, a2],
        base: [u1, u2],
        claimed_order: bound.clone(),
        exponent_bound: bound,
        version: 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::monomials;

    fn f67() -> PrimeField {
        PrimeField::new(67).unwrap()
    }

    fn point(rng: &mut Stream, f: &PrimeField) -> [u64; 2] {
        loop {
            let p = [rng.element(f), rng.element(f)];
            if p != [0, 0] {
                return p;
            }
        }
    }

    #[test]
    fn glemb_1_2_matches_symbolic_matrix() {
        let f = f67();
        let mut rng = Stream::new(1, "glemb");
        for _ in 0..20 {
            let a = MatrixFq::random_invertible(f, 2, &mut rng).unwrap();
            let (p, q, r, s) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
            let expect = vec![
                f.mul(p, p),
                f.mul(2, f.mul(p, q)),
                f.mul(q, q),
                f.mul(p, r),
                f.add(f.mul(p, s), f.mul(q, r)),
                f.mul(q, s),
                f.mul(r, r),
                f.mul(2, f.mul(r, s)),
                f.mul(s, s),
            ];
            assert_eq!(glemb(1, 2, &a).unwrap().data(), &expect[..]);
        }
    }

    #[test]
    fn glemb_identity_and_singular() {
        let f = f67();
        for (n, m) in [(1, 1), (1, 4), (3, 2), (3, 3)] {
            let id = MatrixFq::identity(f, n + 1);
            let size = monomials(n + 1, m).len();
            assert_eq!(glemb(n, m, &id).unwrap(), MatrixFq::identity(f, size));
        }
        let sing = MatrixFq::from_i64_rows(f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(glemb(1, 2, &sing), Err(Error::SingularMatrix));
    }

    #[test]
    fn glemb_acts_on_veronese_points() {
        // evaluation oracle: glemb(A)·v(z) = v(A·z)
        let f = f67();
        let mut rng = Stream::new(2, "glemb-eval");
        let basis = HomMonomialBasis::new(4, 3);
        for _ in 0..20 {
            let a = MatrixFq::random_invertible(f, 4, &mut rng).unwrap();
            let z: Vec<u64> = (0..4).map(|_| rng.element(&f)).collect();
            let lhs = glemb(3, 3, &a).unwrap().apply(&basis.evaluate(&f, &z)).unwrap();
            let rhs = basis.evaluate(&f, &a.apply(&z).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn glemb_is_multiplicative() {
        let f = f67();
        let mut rng = Stream::new(3, "glemb-hom");
        for (n, m) in [(1, 2), (3, 2), (3, 3)] {
            for _ in 0..10 {
                let a = MatrixFq::random_invertible(f, n + 1, &mut rng).unwrap();
                let b = MatrixFq::random_invertible(f, n + 1, &mut rng).unwrap();
                let ab = glemb(n, m, &a.mul(&b).unwrap()).unwrap();
                let prod = glemb(n, m, &a).unwrap().mul(&glemb(n, m, &b).unwrap()).unwrap();
                assert_eq!(ab, prod);
                assert_eq!(ab.rank(), ab.rows());
            }
        }
    }

    #[test]
    fn sparse_glemb_matches_dense() {
        let f = f67();
        let mut rng = Stream::new(4, "gp");
        for m in [2, 3, 5] {
            let u = GenPerm::random(f, 4, &mut rng);
            assert_eq!(
                glemb_genperm(3, m, &u).unwrap().to_dense(),
                glemb(3, m, &u.to_dense()).unwrap()
            );
        }
    }

    #[test]
    fn trivial_sigma_embeddings() {
        let f = f67();
        for m in [1, 2, 3, 5] {
            let s = sigma_compose(&VeroneseFrame::identity(f, m), &MatrixFq::identity(f, 4)).unwrap();
            assert_eq!(s.matrix(), &ExpansionMatrix::for_degree(m).to_matrix(f));
        }
        let s = sigma_compose(&VeroneseFrame::identity(f, 1), &MatrixFq::identity(f, 4)).unwrap();
        assert_eq!(s.matrix(), &MatrixFq::identity(f, 4));
    }

    #[test]
    fn sigma_points_lie_on_cokernel_hyperplanes() {
        let f = f67();
        let mut rng = Stream::new(5, "sigma");
        let frame = VeroneseFrame::random(f, 3, &mut rng).unwrap();
        let b = MatrixFq::random_invertible(f, 4, &mut rng).unwrap();
        let s = sigma_compose(&frame, &b).unwrap();
        let cok = s.cokernel();
        assert_eq!(cok.len(), 20 - 16);
        for _ in 0..50 {
            let x = s.eval(point(&mut rng, &f), point(&mut rng, &f));
            assert!(frame.contains(&x));
            for h in &cok {
                let v = h.iter().zip(&x).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                assert_eq!(v, 0);
            }
        }
    }

    #[test]
    fn veronese_membership_rejects_generic_points() {
        let f = f67();
        let mut rng = Stream::new(6, "mem");
        let frame = VeroneseFrame::random(f, 3, &mut rng).unwrap();
        let mut rejected = 0;
        for _ in 0..20 {
            let x: Vec<u64> = (0..20).map(|_| rng.element(&f)).collect();
            if !frame.contains(&x) {
                rejected += 1;
            }
        }
        assert_eq!(rejected, 20);
    }

    #[test]
    fn primitive_order_at_q5_by_brute_force() {
        let f = PrimeField::new(5).unwrap();
        let mut rng = Stream::new(7, "prim");
        let frame = VeroneseFrame::random(f, 3, &mut rng).unwrap();
        let key = gen_automorphism_pair(&frame, &mut rng).unwrap();
        assert_eq!(key.claimed_order, BigUint::from(624u32));
        for u in &key.base {
            let id = MatrixFq::identity(f, 4);
            let mut acc = id.clone();
            let mut first = None;
            for k in 1..=624u32 {
                acc = acc.mul(u).unwrap();
                if acc == id {
                    first = Some(k);
                    break;
                }
            }
            assert_eq!(first, Some(624));
            for p in [2u64, 3, 13] {
                assert_ne!(u.pow_u64(624 / p).unwrap(), id);
            }
        }
        // the identity never passes the order test
        let primes = prime_divisors_q4_minus_1(5);
        assert!(!has_exact_order(&MatrixFq::identity(f, 4), &BigUint::from(624u32), &primes).unwrap());
        let x_minus_1_4 = UnivariatePoly::from_i64(f, &[-1, 1]).pow(4);
        assert!(!is_primitive_quartic(&x_minus_1_4, &primes));
    }

    #[test]
    fn automorphisms_fix_the_variety() {
        let f = f67();
        let mut rng = Stream::new(8, "aut");
        let frame = VeroneseFrame::random(f, 3, &mut rng).unwrap();
        let key = gen_automorphism_pair(&frame, &mut rng).unwrap();
        let b = MatrixFq::random_invertible(f, 4, &mut rng).unwrap();
        let s = sigma_compose(&frame, &b).unwrap();
        let exps = [
            BigUint::from(12345u32),
            BigUint::from(7u32),
            BigUint::from(0u32),
            BigUint::from(99u32),
        ];
        let w = word_matrix(&key.a, &exps).unwrap();
        let moved = s.transformed(&w).unwrap();
        assert_eq!(moved.matrix().rank(), 16);
        for _ in 0..50 {
            let x = moved.eval(point(&mut rng, &f), point(&mut rng, &f));
            assert!(frame.contains(&x));
        }
        for a in &key.a {
            for _ in 0..10 {
                let z = [rng.element(&f), rng.element(&f), rng.element(&f), 1];
                let y = a.to_dense().apply(&frame.veronese_point(&z)).unwrap();
                assert!(frame.contains(&y));
            }
        }
    }

    #[test]
    fn permutation_variant_orders_and_products() {
        let f = PrimeField::new(7).unwrap();
        let mut rng = Stream::new(9, "v2");
        let dense_frame = VeroneseFrame::random(f, 3, &mut rng).unwrap();
        assert!(gen_permutation_variant(&dense_frame, &mut rng).is_err());
        let frame = VeroneseFrame::random_genperm(f, 3, &mut rng);
        let key = gen_permutation_variant(&frame, &mut rng).unwrap();
        assert_eq!(key.claimed_order, BigUint::from(24u32));
        for u in &key.base {
            let id = MatrixFq::identity(f, 4);
            let ord = (1..=24u64).find(|&k| u.pow_u64(k).unwrap() == id).unwrap();
            assert_eq!(ord, 24);
        }
        for a in &key.a {
            assert!(a.is_generalized_permutation());
            let d = a.to_dense();
            let id = MatrixFq::identity(f, d.rows());
            let ord = (1..=24u64).find(|&k| d.pow_u64(k).unwrap() == id).unwrap();
            assert_eq!(24 % ord, 0);
            let z = [1, 2, 3, 4];
            assert!(frame.contains(&d.apply(&frame.veronese_point(&z)).unwrap()));
        }
        let (Automorphism::Sparse(a), Automorphism::Sparse(b)) = (&key.a[0], &key.a[1]) else {
            panic!("version-2 automorphisms are sparse");
        };
        let ab = a.mul(b).unwrap();
        assert_eq!(ab.to_dense(), a.to_dense().mul(&b.to_dense()).unwrap());
        let composed: Vec<usize> = a.perm().iter().map(|&p| b.perm()[p]).collect();
        assert_eq!(ab.perm(), &composed[..]);
    }
}
