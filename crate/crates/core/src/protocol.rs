//! The QSI key exchange: user keys, the responder and initiator flows, the
//! generalized-permutation variant and the trusted-third-party variant.
//!
//! Every operation takes a seed and draws from a [`Stream`] labelled by the
//! operation name, so runs are reproducible.

use num_bigint::BigUint;

use crate::embeddings::{
    gen_automorphism_pair, gen_permutation_variant, sigma_compose, word_matrix, Automorphism,
    VeroneseFrame,
};
use crate::error::{Error, Result};
use crate::factor::extract_22;
use crate::ff::{FieldElement, PrimeField};
use crate::forms::{binomial, pullback, veronese_dim, BiForm};
use crate::jinv::j_invariant;
use crate::linalg::{random_combination, GenPerm, MatrixFq};
use crate::rng::Stream;
use crate::toy::ToyExample;

/// Resampling budget of the responder.
pub const RESPOND_RETRIES: u32 = 32;
const KEYGEN_RETRIES: u32 = 16;

/// Rejects degrees the protocol cannot use: m < 3 leaves no room for a
/// residual curve, and at m = 4 the residual is itself of bidegree (2,2).
pub fn check_degree(m: u32) -> Result<()> {
    match m {
        4 => Err(Error::InvalidParameters("m = 4 makes the shared component ambiguous".into())),
        0..=2 => Err(Error::InvalidParameters(format!("m = {m} is below 3"))),
        _ if m > 12 => Err(Error::InvalidParameters(format!("m = {m} is beyond desk scale"))),
        _ => Ok(()),
    }
}

pub fn check_version(version: u8) -> Result<()> {
    match version {
        1 | 2 => Ok(()),
        v => Err(Error::InvalidParameters(format!("unknown protocol version {v}"))),
    }
}

/// Exponents are drawn from [0, bound): q⁴ for version 1, 4(q−1) for
/// version 2.
pub fn exponent_bound(field: PrimeField, version: u8) -> BigUint {
    let q = BigUint::from(field.modulus());
    if version == 2 {
        (q - 1u32) * 4u32
    } else {
        q.pow(4)
    }
}

/// m₁, m₂, m₁′, m₂′ for the word A₁^{m₁}A₂^{m₂}A₁^{m₁′}A₂^{m₂′}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentWord(pub [BigUint; 4]);

impl ExponentWord {
    pub fn zero() -> Self {
        Self(Default::default())
    }

    pub fn from_u64(e: [u64; 4]) -> Self {
        Self(e.map(BigUint::from))
    }

    pub fn random(bound: &BigUint, rng: &mut Stream) -> Self {
        Self(std::array::from_fn(|_| rng.below_big(bound)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicBundle {
    pub field: PrimeField,
    pub m: u32,
    pub version: u8,
    pub a: [Automorphism; 2],
    pub m_public: MatrixFq,
    pub h: Vec<u64>,
}

impl PublicBundle {
    pub fn validate(&self) -> Result<()> {
        check_degree(self.m)?;
        check_version(self.version)?;
        let n = veronese_dim(self.m);
        let s = (self.m as usize + 1).pow(2);
        let bad = |what: &str| Err(Error::Malformed(format!("public bundle: {what}")));
        if self.a.iter().any(|a| a.size() != n) {
            return bad("automorphism size");
        }
        if (self.m_public.rows(), self.m_public.cols()) != (n, s) {
            return bad("public embedding shape");
        }
        if self.h.len() != n || self.h.iter().all(|&v| v == 0) {
            return bad("hyperplane");
        }
        if self.version == 2 && !self.a.iter().all(Automorphism::is_generalized_permutation) {
            return bad("version-2 automorphisms must be generalized permutations");
        }
        Ok(())
    }

    pub fn exponent_bound(&self) -> BigUint {
        exponent_bound(self.field, self.version)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    pub field: PrimeField,
    pub m: u32,
    pub m_secret: MatrixFq,
    /// The frame M_U; kept for diagnostics only.
    pub frame: Option<MatrixFq>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponderMessage {
    pub field: PrimeField,
    pub m: u32,
    pub h_b: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharedKey {
    pub j: FieldElement,
}

fn field_and_degree(q: u64, m: u32, version: u8) -> Result<PrimeField> {
    check_degree(m)?;
    check_version(version)?;
    PrimeField::new(q)
}

fn is_zero_vec(v: &[u64]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Keys of one user: a secret σ^(s) and a public σ^(p) with distinct images
/// on the same hidden Veronese variety, its automorphisms, and a hyperplane
/// through Im σ^(s).
pub fn keygen_user(q: u64, m: u32, version: u8, seed: u64) -> Result<(PublicBundle, SecretKey)> {
    let field = field_and_degree(q, m, version)?;
    let mut rng = Stream::new(seed, "keygen");
    let frame = match version {
        2 => VeroneseFrame::random_genperm(field, m, &mut rng),
        _ => VeroneseFrame::random(field, m, &mut rng)?,
    };
    let key = match version {
        2 => gen_permutation_variant(&frame, &mut rng)?,
        _ => gen_automorphism_pair(&frame, &mut rng)?,
    };
    let cols = (m as usize + 1).pow(2);
    for _ in 0..KEYGEN_RETRIES {
        let b_s = MatrixFq::random_invertible(field, 4, &mut rng)?;
        let b_p = MatrixFq::random_invertible(field, 4, &mut rng)?;
        let s = sigma_compose(&frame, &b_s)?;
        let p = sigma_compose(&frame, &b_p)?;
        if stacked_rank(s.matrix(), p.matrix())? == cols {
            continue;
        }
        let h = random_combination(field, &s.cokernel(), &mut rng)?;
        if !is_zero_vec(&s.matrix().left_apply(&h)?) {
            return Err(Error::Invariant("keygen hyperplane misses the secret image".into()));
        }
        let public = PublicBundle {
            field,
            m,
            version,
            a: key.a.clone(),
            m_public: p.into_matrix(),
            h,
        };
        let secret = SecretKey {
            field,
            m,
            m_secret: s.into_matrix(),
            frame: Some(frame.matrix().clone()),
        };
        return Ok((public, secret));
    }
    Err(Error::RandomnessExhausted(KEYGEN_RETRIES))
}

fn stacked_rank(a: &MatrixFq, b: &MatrixFq) -> Result<usize> {
    let (r, c) = (a.rows(), a.cols() + b.cols());
    let mut data = Vec::with_capacity(r * c);
    for i in 0..r {
        data.extend_from_slice(a.row(i));
        data.extend_from_slice(b.row(i));
    }
    Ok(MatrixFq::new(a.field(), r, c, data)?.rank())
}

/// Everything the responder computes for one exponent word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Response {
    pub message: ResponderMessage,
    pub key: SharedKey,
    pub word: ExponentWord,
    pub m_b: MatrixFq,
    pub component: BiForm,
    /// Error tokens of rejected exponent words, in order.
    pub rejected: Vec<&'static str>,
}

/// The responder's flow for a fixed exponent word.
pub fn respond_with_word(pub_: &PublicBundle, word: &ExponentWord, rng: &mut Stream) -> Result<Response> {
    let w = word_matrix(&pub_.a, &word.0)?;
    let m_b = w.apply_to(&pub_.m_public)?;
    let h_b = random_combination(pub_.field, &m_b.left_nullspace(), rng)?;
    let g = pullback(&pub_.h, &m_b)?;
    if g.is_zero() {
        return Err(Error::DegenerateChoice("hyperplane contains the responder's image"));
    }
    let component = extract_22(&g)?;
    let j = j_invariant(&component)?;
    Ok(Response {
        message: ResponderMessage { field: pub_.field, m: pub_.m, h_b },
        key: SharedKey { j },
        word: word.clone(),
        m_b,
        component,
        rejected: Vec::new(),
    })
}

/// Responder flow with resampling: degenerate exponent words are replaced
/// by fresh ones up to [`RESPOND_RETRIES`] times.
pub fn respond_detailed(pub_: &PublicBundle, seed: u64) -> Result<Response> {
    pub_.validate()?;
    let root = Stream::new(seed, "respond");
    let bound = pub_.exponent_bound();
    let mut rejected = Vec::new();
    for attempt in 0..RESPOND_RETRIES {
        let mut rng = root.substream(attempt as u64);
        let word = ExponentWord::random(&bound, &mut rng);
        match respond_with_word(pub_, &word, &mut rng) {
            Ok(mut r) => {
                r.rejected = rejected;
                return Ok(r);
            }
            Err(e) if e.is_degeneracy() => rejected.push(e.token()),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted(RESPOND_RETRIES))
}

pub fn respond(pub_: &PublicBundle, seed: u64) -> Result<(ResponderMessage, SharedKey)> {
    let r = respond_detailed(pub_, seed)?;
    Ok((r.message, r.key))
}

/// The initiator's flow, returning the recovered component as well.
pub fn accept_detailed(secret: &SecretKey, msg: &ResponderMessage) -> Result<(SharedKey, BiForm)> {
    if secret.field != msg.field {
        return Err(Error::ModulusMismatch(secret.field.modulus(), msg.field.modulus()));
    }
    if is_zero_vec(&msg.h_b) {
        return Err(Error::Malformed("zero responder hyperplane".into()));
    }
    let g = pullback(&msg.h_b, &secret.m_secret)?;
    if g.is_zero() {
        return Err(Error::NoComponent);
    }
    let c = extract_22(&g)?;
    Ok((SharedKey { j: j_invariant(&c)? }, c))
}

pub fn accept(secret: &SecretKey, msg: &ResponderMessage) -> Result<SharedKey> {
    Ok(accept_detailed(secret, msg)?.0)
}

/// The toy example as protocol objects: A₂ is the identity, and the
/// initiator's hyperplane is the recorded H_A.
pub fn toy_keys(toy: &ToyExample) -> (PublicBundle, SecretKey) {
    let f = toy.field;
    let n = toy.a1.rows();
    let public = PublicBundle {
        field: f,
        m: crate::toy::M,
        version: 1,
        a: [Automorphism::Dense(toy.a1.clone()), Automorphism::Dense(MatrixFq::identity(f, n))],
        m_public: toy.m_public.clone(),
        h: toy.h_a(),
    };
    let secret = SecretKey {
        field: f,
        m: crate::toy::M,
        m_secret: toy.m_secret.clone(),
        frame: Some(toy.frame.clone()),
    };
    (public, secret)
}

/// Trent's public parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtpParams {
    pub field: PrimeField,
    pub m: u32,
    pub m_t: MatrixFq,
    pub t: [Automorphism; 2],
}

/// A registered user: the secret word and embedding, and the public H_U.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtpUser {
    pub field: PrimeField,
    pub m: u32,
    pub word: ExponentWord,
    pub sigma: MatrixFq,
    pub h: Vec<u64>,
}

pub fn ttp_setup(q: u64, m: u32, seed: u64) -> Result<TtpParams> {
    let field = field_and_degree(q, m, 1)?;
    let mut rng = Stream::new(seed, "ttp-setup");
    let frame = VeroneseFrame::random(field, m, &mut rng)?;
    let key = gen_automorphism_pair(&frame, &mut rng)?;
    let b = MatrixFq::random_invertible(field, 4, &mut rng)?;
    let m_t = sigma_compose(&frame, &b)?.into_matrix();
    Ok(TtpParams { field, m, m_t, t: key.a })
}

/// Registers a user with a given word: σ_U = word·M_T and H_U ∈ coker σ_U.
pub fn ttp_register_with_word(params: &TtpParams, word: ExponentWord, rng: &mut Stream) -> Result<TtpUser> {
    let sigma = word_matrix(&params.t, &word.0)?.apply_to(&params.m_t)?;
    let h = random_combination(params.field, &sigma.left_nullspace(), rng)?;
    Ok(TtpUser { field: params.field, m: params.m, word, sigma, h })
}

/// Registers a user with exponents uniform in [1, q⁴ − 1].
pub fn ttp_register(params: &TtpParams, seed: u64) -> Result<TtpUser> {
    let mut rng = Stream::new(seed, "ttp-register");
    let bound = BigUint::from(params.field.modulus()).pow(4) - 1u32;
    let word = ExponentWord(std::array::from_fn(|_| rng.below_big(&bound) + 1u32));
    ttp_register_with_word(params, word, &mut rng)
}

/// j of the (2,2) component of σ_U*H for another user's hyperplane H.
pub fn ttp_shared(user: &TtpUser, h_other: &[u64]) -> Result<SharedKey> {
    if h_other.len() != user.sigma.rows() {
        return Err(Error::DimensionMismatch("hyperplane length".into()));
    }
    let g = pullback(h_other, &user.sigma)?;
    if g.is_zero() {
        return Err(Error::NoComponent);
    }
    Ok(SharedKey { j: j_invariant(&extract_22(&g)?)? })
}

/// Bits of a dense public hyperplane: C(m+3,3)·l.
pub fn public_key_bits(m: u32, l: u64) -> u64 {
    binomial(m as u64 + 3, 3) * l
}

/// Bits of a hyperplane normalized to carry C(m+3,3) − (m+1)² − 1 zeros
/// and a single one: l·(m+1)².
pub fn public_key_bits_sparse(m: u32, l: u64) -> u64 {
    (m as u64 + 1).pow(2) * l
}

/// Bits of the public embedding matrix M^(p): l·(m+1)²·C(m+3,3).
pub fn public_matrix_bits(m: u32, l: u64) -> u64 {
    (m as u64 + 1).pow(2) * binomial(m as u64 + 3, 3) * l
}

/// Outcome of a full exchange between freshly generated users.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExchangeOutcome {
    Agreed { j: u64, rejected: Vec<&'static str> },
    Disagreed { j_a: u64, j_b: u64 },
    Failed { token: &'static str, rejected: Vec<&'static str> },
}

/// keygen → respond → accept with seeds derived from `seed`.
pub fn run_exchange(q: u64, m: u32, version: u8, seed: u64) -> ExchangeOutcome {
    let stream = Stream::new(seed, "exchange");
    let (ks, rs) = (stream.substream(0).next_u64(), stream.substream(1).next_u64());
    let (public, secret) = match keygen_user(q, m, version, ks) {
        Ok(k) => k,
        Err(e) => return ExchangeOutcome::Failed { token: e.token(), rejected: Vec::new() },
    };
    let resp = match respond_detailed(&public, rs) {
        Ok(r) => r,
        Err(e) => return ExchangeOutcome::Failed { token: e.token(), rejected: Vec::new() },
    };
    match accept(&secret, &resp.message) {
        Ok(k) if k == resp.key => ExchangeOutcome::Agreed { j: k.j.value(), rejected: resp.rejected },
        Ok(k) => ExchangeOutcome::Disagreed { j_a: k.j.value(), j_b: resp.key.j.value() },
        Err(e) => ExchangeOutcome::Failed { token: e.token(), rejected: resp.rejected },
    }
}

/// Aggregate of [`run_exchange`] over many trials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimulationReport {
    pub trials: u64,
    pub agreed: u64,
    pub disagreed: u64,
    pub failed: u64,
    /// Terminal failures by error token.
    pub failures: Vec<(&'static str, u64)>,
    /// Exponent words the responder discarded, by error token.
    pub resampled: Vec<(&'static str, u64)>,
}

impl SimulationReport {
    pub fn from_outcomes(outcomes: &[ExchangeOutcome]) -> Self {
        fn bump(v: &mut Vec<(&'static str, u64)>, t: &'static str) {
            match v.iter_mut().find(|(k, _)| *k == t) {
                Some(slot) => slot.1 += 1,
                None => v.push((t, 1)),
            }
        }
        let mut r = Self { trials: outcomes.len() as u64, ..Self::default() };
        for o in outcomes {
            match o {
                ExchangeOutcome::Agreed { rejected, .. } => {
                    r.agreed += 1;
                    rejected.iter().for_each(|t| bump(&mut r.resampled, t));
                }
                ExchangeOutcome::Disagreed { .. } => r.disagreed += 1,
                ExchangeOutcome::Failed { token, rejected } => {
                    r.failed += 1;
                    bump(&mut r.failures, token);
                    rejected.iter().for_each(|t| bump(&mut r.resampled, t));
                }
            }
        }
        r.failures.sort();
        r.resampled.sort();
        r
    }

    /// Share of non-failed trials that agreed.
    pub fn agreement_rate(&self) -> f64 {
        let done = self.agreed + self.disagreed;
        if done == 0 {
            0.0
        } else {
            self.agreed as f64 / done as f64
        }
    }

    pub fn failure_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.failed as f64 / self.trials as f64
        }
    }
}

/// Runs `trials` exchanges; trial i uses the i-th substream of `seed`.
/// Outcomes are ordered by trial index.
pub fn simulate(q: u64, m: u32, version: u8, trials: u64, seed: u64) -> Vec<ExchangeOutcome> {
    let root = Stream::new(seed, "simulate");
    let run = |i: u64| run_exchange(q, m, version, root.substream(i).next_u64());
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(run).collect()
    }
}

/// Converts a dense automorphism from a key file into the representation
/// used for its protocol version.
pub fn automorphism_for_version(a: MatrixFq, version: u8) -> Result<Automorphism> {
    if version == 2 {
        GenPerm::from_dense(&a)
            .map(Automorphism::Sparse)
            .ok_or_else(|| Error::Malformed("version-2 automorphism is not a generalized permutation".into()))
    } else {
        Ok(Automorphism::Dense(a))
    }
}
