//! Desk-scale cryptanalysis: the quadric equations cutting out the hidden
//! Veronese variety, and exhaustive search for an exponent word.

use num_bigint::BigUint;

use crate::embeddings::{word_matrix, Automorphism, SigmaEmbedding, VeroneseFrame};
use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::forms::{binomial, veronese_dim};
use crate::linalg::MatrixFq;
use crate::protocol::{ExponentWord, PublicBundle, TtpParams};
use crate::rng::Stream;

/// h_m = C(N+2, 2) − C(2m+3, 3) with N + 1 = C(m+3, 3): the number of
/// independent quadrics through M_U·V_{3,m}.
pub fn quadric_count(m: u32) -> u64 {
    let n1 = binomial(m as u64 + 3, 3);
    binomial(n1 + 1, 2) - binomial(2 * m as u64 + 3, 3)
}

/// (deg V_{3,m}, deg of the (2,2) curve inside it) = (m³, 4m).
pub fn degree_report(m: u32) -> (u64, u64) {
    let m = m as u64;
    (m * m * m, 4 * m)
}

/// Where the points of the variety come from.
#[derive(Clone, Copy, Debug)]
pub enum VarietySampler<'a> {
    /// Direct images M_U·v_{3,m}(z) (needs the secret frame).
    Frame(&'a VeroneseFrame),
    /// Public data only: points W·σ(P,Q) for random automorphism words W.
    /// The translates of the embedded quadric surface sweep out the
    /// variety.
    Orbit {
        sigma: &'a SigmaEmbedding,
        automorphisms: &'a [Automorphism; 2],
        exponent_bound: &'a BigUint,
    },
}

/// Basis of the quadrics vanishing on the sampled variety. Each quadric is
/// a coefficient vector over the degree-2 monomials xₐx_b (a ≤ b) of P^N in
/// lexicographic order of (a, b).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadricSystem {
    pub field: PrimeField,
    pub m: u32,
    pub basis: Vec<Vec<u64>>,
    pub expected: u64,
    pub points_used: usize,
}

fn quadratic_monomials(field: &PrimeField, x: &[u64]) -> Vec<u64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            out.push(field.mul(x[a], x[b]));
        }
    }
    out
}

impl QuadricSystem {
    /// Value of every basis quadric at `x`.
    pub fn evaluate(&self, x: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mons = quadratic_monomials(&f, x);
        self.basis
            .iter()
            .map(|q| q.iter().zip(&mons).fold(0, |acc, (&c, &v)| f.add(acc, f.mul(c, v))))
            .collect()
    }
}

fn nonzero_pair(rng: &mut Stream, f: &PrimeField) -> [u64; 2] {
    loop {
        let p = [rng.element(f), rng.element(f)];
        if p != [0, 0] {
            return p;
        }
    }
}

fn sample_points(sampler: &VarietySampler, count: usize, rng: &mut Stream) -> Result<(PrimeField, u32, Vec<Vec<u64>>)> {
    match sampler {
        VarietySampler::Frame(frame) => {
            let f = frame.field();
            let pts = (0..count)
                .map(|_| {
                    let z = [rng.element(&f), rng.element(&f), rng.element(&f), rng.element(&f)];
                    frame.veronese_point(&z)
                })
                .collect();
            Ok((f, frame.m(), pts))
        }
        VarietySampler::Orbit { sigma, automorphisms, exponent_bound } => {
            let f = sigma.field();
            let m = sigma.m();
            // a degree-2m form on P³ vanishing on more than m quadric
            // surfaces is zero, so 2m + 2 translates suffice
            let translates = 2 * m as usize + 2;
            let mut embeddings = Vec::with_capacity(translates);
            for _ in 0..translates {
                let word = ExponentWord::random(exponent_bound, rng);
                embeddings.push(sigma.transformed(&word_matrix(automorphisms, &word.0)?)?);
            }
            let pts = (0..count)
                .map(|i| {
                    let s = &embeddings[i % translates];
                    s.eval(nonzero_pair(rng, &f), nonzero_pair(rng, &f))
                })
                .collect();
            Ok((f, m, pts))
        }
    }
}

/// Solves for the quadrics through sampled points of the variety.
/// `RankDeficient` means the points did not impose enough conditions.
pub fn quadric_system(sampler: VarietySampler, seed: u64) -> Result<QuadricSystem> {
    let mut rng = Stream::new(seed, "quadrics");
    let m = match &sampler {
        VarietySampler::Frame(fr) => fr.m(),
        VarietySampler::Orbit { sigma, .. } => sigma.m(),
    };
    let expected = quadric_count(m);
    let n1 = veronese_dim(m);
    let monomials = n1 * (n1 + 1) / 2;
    let needed = monomials - expected as usize;
    let count = needed + needed / 10 + 8;
    let (f, m, pts) = sample_points(&sampler, count, &mut rng)?;
    let mut data = Vec::with_capacity(count * monomials);
    for p in &pts {
        data.extend(quadratic_monomials(&f, p));
    }
    let eval = MatrixFq::new(f, count, monomials, data)?;
    let basis = eval.right_nullspace();
    if basis.len() as u64 != expected {
        return Err(Error::RankDeficient { found: basis.len(), expected: expected as usize });
    }
    Ok(QuadricSystem { field: f, m, basis, expected, points_used: count })
}

/// Result of an exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceOutcome {
    /// The first word (by trial index) whose image lies in the target
    /// hyperplane, with its 0-based trial index.
    pub hit: Option<(ExponentWord, u64)>,
    /// Trials evaluated up to and including the hit, or the whole budget.
    pub trials: u64,
}

const CHUNK: u64 = 1 << 14;
const TABLE_LIMIT: usize = 1 << 26;

struct Searcher {
    field: PrimeField,
    n: usize,
    bound: u64,
    tables: [Vec<u64>; 2],
    target: MatrixFq,
    h: Vec<u64>,
    lazy: bool,
}

impl Searcher {
    // v ← v · A_k^e using the power table.
    fn step(&self, v: &[u64], k: usize, e: u64, out: &mut [u64]) {
        let n = self.n;
        let f = &self.field;
        let m = &self.tables[k][e as usize * n * n..(e as usize + 1) * n * n];
        if self.lazy {
            out.iter_mut().for_each(|o| *o = 0);
            for (i, &vi) in v.iter().enumerate() {
                if vi == 0 {
                    continue;
                }
                for (o, &x) in out.iter_mut().zip(&m[i * n..(i + 1) * n]) {
                    *o += vi * x;
                }
            }
            out.iter_mut().for_each(|o| *o %= f.modulus());
        } else {
            for (j, o) in out.iter_mut().enumerate() {
                *o = (0..n).fold(0, |acc, i| f.add(acc, f.mul(v[i], m[i * n + j])));
            }
        }
    }

    fn annihilates(&self, v: &[u64]) -> bool {
        let f = &self.field;
        (0..self.target.cols()).all(|c| {
            (0..self.n).fold(0, |acc, i| f.add(acc, f.mul(v[i], self.target.get(i, c)))) == 0
        })
    }

    fn trial(&self, e: &[u64; 4], a: &mut Vec<u64>, b: &mut Vec<u64>) -> bool {
        a.copy_from_slice(&self.h);
        for (k, &x) in e.iter().enumerate() {
            self.step(a, k % 2, x, b);
            std::mem::swap(a, b);
        }
        self.annihilates(a)
    }

    fn chunk(&self, root: &Stream, c: u64, len: u64) -> Option<(ExponentWord, u64)> {
        let mut rng = root.substream(c);
        let mut a = vec![0u64; self.n];
        let mut b = vec![0u64; self.n];
        for i in 0..len {
            let e: [u64; 4] = std::array::from_fn(|_| rng.below(self.bound));
            if self.trial(&e, &mut a, &mut b) {
                return Some((ExponentWord::from_u64(e), c * CHUNK + i));
            }
        }
        None
    }
}

/// Samples random words W = A₁^a A₂^b A₁^c A₂^d and tests h·W·M = 0. Meant
/// for tiny q: the powers of both automorphisms below `exponent_bound` are
/// tabulated. Trials are split into fixed chunks with their own substreams,
/// so the outcome does not depend on the thread count.
pub fn brute_force_search(
    automorphisms: &[Automorphism; 2],
    target: &MatrixFq,
    h: &[u64],
    exponent_bound: u64,
    budget: u64,
    seed: u64,
) -> Result<BruteForceOutcome> {
    let n = target.rows();
    let field = target.field();
    if h.len() != n || automorphisms.iter().any(|a| a.size() != n) {
        return Err(Error::DimensionMismatch("brute force inputs".into()));
    }
    if budget == 0 {
        return Ok(BruteForceOutcome { hit: None, trials: 0 });
    }
    if exponent_bound == 0 || exponent_bound as usize * n * n > TABLE_LIMIT {
        return Err(Error::InvalidParameters(format!(
            "exponent bound {exponent_bound} is beyond brute-force scale"
        )));
    }
    let table = |a: &Automorphism| {
        let d = a.to_dense();
        let mut out = Vec::with_capacity(exponent_bound as usize * n * n);
        let mut acc = MatrixFq::identity(field, n);
        for _ in 0..exponent_bound {
            out.extend_from_slice(acc.data());
            acc = acc.mul(&d).expect("square");
        }
        out
    };
    let q = field.modulus() as u128;
    let searcher = Searcher {
        field,
        n,
        bound: exponent_bound,
        tables: [table(&automorphisms[0]), table(&automorphisms[1])],
        target: target.clone(),
        h: h.to_vec(),
        lazy: (q - 1) * (q - 1) * (n as u128) < u64::MAX as u128,
    };
    let root = Stream::new(seed, "brute-force");
    let chunks = budget.div_ceil(CHUNK);
    let len_of = |c: u64| if c + 1 == chunks { budget - c * CHUNK } else { CHUNK };
    let batch = 64u64;
    let mut start = 0;
    while start < chunks {
        let end = (start + batch).min(chunks);
        #[cfg(feature = "parallel")]
        let hit = {
            use rayon::prelude::*;
            (start..end)
                .into_par_iter()
                .filter_map(|c| searcher.chunk(&root, c, len_of(c)))
                .min_by_key(|(_, i)| *i)
        };
        #[cfg(not(feature = "parallel"))]
        let hit = (start..end).find_map(|c| searcher.chunk(&root, c, len_of(c)));
        if let Some((w, i)) = hit {
            return Ok(BruteForceOutcome { hit: Some((w, i)), trials: i + 1 });
        }
        start = end;
    }
    Ok(BruteForceOutcome { hit: None, trials: budget })
}

fn small_bound(b: BigUint) -> Result<u64> {
    u64::try_from(b).map_err(|_| Error::InvalidParameters("exponent bound too large".into()))
}

/// Search against a user's public bundle.
pub fn brute_force_public(pub_: &PublicBundle, h_u: &[u64], budget: u64, seed: u64) -> Result<BruteForceOutcome> {
    brute_force_search(&pub_.a, &pub_.m_public, h_u, small_bound(pub_.exponent_bound())?, budget, seed)
}

/// Search against Trent's parameters for a registered user's H_U.
pub fn brute_force_ttp(params: &TtpParams, h_u: &[u64], budget: u64, seed: u64) -> Result<BruteForceOutcome> {
    let bound = BigUint::from(params.field.modulus()).pow(4);
    brute_force_search(&params.t, &params.m_t, h_u, small_bound(bound)?, budget, seed)
}
