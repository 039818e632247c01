//! Acceptance run: one line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use qsi_core::analysis::{brute_force_ttp, quadric_count, quadric_system, VarietySampler};
use qsi_core::embeddings::{
    gen_automorphism_pair, gen_permutation_variant, glemb, sigma_compose, word_matrix, Automorphism,
    VeroneseFrame,
};
use qsi_core::factor::{biform_factor, extract_22, UnivariatePoly};
use qsi_core::forms::pullback;
use qsi_core::jinv::{branch_quartic, gl2_transport, j_invariant};
use qsi_core::linalg::{GenPerm, MatrixFq};
use qsi_core::protocol::{
    accept_detailed, public_key_bits_sparse, respond_with_word, simulate, toy_keys, ttp_register,
    ttp_setup, ttp_shared, ExchangeOutcome, ExponentWord, SimulationReport,
};
use qsi_core::toy::{self, ToyExample};
use qsi_core::{BiForm, Error, PrimeField, Stream};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e2s(e: Error) -> String {
    format!("{e:?}")
}

fn toy_replay() -> Outcome {
    let start = Instant::now();
    let t = ToyExample::load().map_err(e2s)?;
    let a70 = t.a1.pow_u64(toy::EXPONENT).map_err(e2s)?;
    ensure(a70.mul(&t.m_public).map_err(e2s)? == t.m_b, "A1^70 * M_A^(p) != reference M_B")?;

    let g = pullback(&t.h_a(), &t.m_b).map_err(e2s)?;
    ensure(g.eq_up_to_scalar(&t.pullback_b()), "H_A * M_B differs from the reference pullback")?;

    let c = extract_22(&g).map_err(e2s)?;
    ensure(c.eq_up_to_scalar(&t.c1()), "extract_22 did not return C1")?;
    let j_b = j_invariant(&t.c1()).map_err(e2s)?;
    ensure(j_b.value() == toy::J, format!("j(C1) = {j_b}"))?;

    let (public, secret) = toy_keys(&t);
    let word = ExponentWord::from_u64([toy::EXPONENT, 0, 0, 0]);
    let resp = respond_with_word(&public, &word, &mut Stream::new(1, "toy")).map_err(e2s)?;
    ensure(resp.m_b == t.m_b && resp.key.j.value() == toy::J, "respond on toy inputs")?;
    let (key_a, c_a) = accept_detailed(&secret, &resp.message).map_err(e2s)?;
    ensure(key_a.j.value() == toy::J, format!("accept gave j = {}", key_a.j))?;

    // the initiator-side reference data agree as well
    ensure(j_invariant(&t.c2()).map_err(e2s)?.value() == toy::J, "j(C2) != 57")?;
    ensure(biform_factor(&t.pullback_a()).map_err(e2s)?.factors.iter().any(|(h, _)| h.eq_up_to_scalar(&t.c2())),
        "reference initiator pullback lacks C2")?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!(
        "M_B matches, pullback matches, C1 recovered, j_B = j_A = 57 (accept found {}), {:.0?}",
        if c_a.eq_up_to_scalar(&t.c2()) { "C2" } else { "an equivalent (2,2) curve" },
        elapsed
    ))
}

fn agreement() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for (m, trials, seed) in [(3u32, 100u64, 2024u64), (5, 50, 2025)] {
        let outcomes = simulate(101, m, 1, trials, seed);
        let r = SimulationReport::from_outcomes(&outcomes);
        for o in &outcomes {
            if let ExchangeOutcome::Disagreed { j_a, j_b } = o {
                return Err(format!("m={m}: disagreement j_A={j_a} j_B={j_b}"));
            }
        }
        ensure(r.failure_rate() < 0.10, format!("m={m}: failure rate {:.3} {:?}", r.failure_rate(), r.failures))?;
        lines.push(format!(
            "m={m}: {}/{} agreed, {} failed {:?}, resampled {:?}",
            r.agreed, r.trials, r.failed, r.failures, r.resampled
        ));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("{}; {:.1?}", lines.join("; "), elapsed))
}

fn ttp_symmetry() -> Outcome {
    let params = ttp_setup(101, 3, 7).map_err(e2s)?;
    let mut both_ok = 0;
    for i in 0..100u64 {
        let a = ttp_register(&params, 2 * i).map_err(e2s)?;
        let b = ttp_register(&params, 2 * i + 1).map_err(e2s)?;
        let ja = ttp_shared(&a, &b.h);
        let jb = ttp_shared(&b, &a.h);
        ensure(ja == jb, format!("pair {i}: {ja:?} vs {jb:?}"))?;
        both_ok += ja.is_ok() as u32;
    }
    Ok(format!("100/100 pairs symmetric ({both_ok} with a key, the rest fail identically)"))
}

fn glemb_conformance() -> Outcome {
    let f = PrimeField::new(67).unwrap();
    let mut rng = Stream::new(1, "acceptance-glemb");
    for _ in 0..20 {
        let a = MatrixFq::random_invertible(f, 2, &mut rng).map_err(e2s)?;
        let (p, q, r, s) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
        let expect = [
            f.mul(p, p), f.mul(2, f.mul(p, q)), f.mul(q, q),
            f.mul(p, r), f.add(f.mul(p, s), f.mul(q, r)), f.mul(q, s),
            f.mul(r, r), f.mul(2, f.mul(r, s)), f.mul(s, s),
        ];
        ensure(glemb(1, 2, &a).map_err(e2s)?.data() == expect, "glemb(1,2) symbolic mismatch")?;
    }
    for (n, m) in [(1usize, 2u32), (3, 2), (3, 3)] {
        for _ in 0..50 {
            let a = MatrixFq::random_invertible(f, n + 1, &mut rng).map_err(e2s)?;
            let b = MatrixFq::random_invertible(f, n + 1, &mut rng).map_err(e2s)?;
            let lhs = glemb(n, m, &a.mul(&b).map_err(e2s)?).map_err(e2s)?;
            let rhs = glemb(n, m, &a).map_err(e2s)?.mul(&glemb(n, m, &b).map_err(e2s)?).map_err(e2s)?;
            ensure(lhs == rhs, format!("homomorphism fails at ({n},{m})"))?;
        }
    }
    Ok("20 symbolic points, 150 homomorphism pairs".into())
}

// Oracle for singularity: the branch quartic has a repeated root in P¹.
fn repeated_root(f: &BiForm) -> bool {
    let g = branch_quartic(f).unwrap();
    let p = UnivariatePoly::new(g.field, g.q.to_vec());
    match p.degree() {
        None => true,
        Some(d) if d <= 2 => true,
        Some(_) => p.gcd(&p.derivative()).degree().unwrap_or(0) > 0,
    }
}

fn j_invariance() -> Outcome {
    let f = PrimeField::new(101).unwrap();
    let mut rng = Stream::new(2, "acceptance-j");
    let random_form = |rng: &mut Stream| BiForm::new(f, 2, 2, (0..9).map(|_| rng.element(&f)).collect()).unwrap();
    let mut smooth = 0;
    let mut singular_random = 0;
    while smooth < 100 {
        let form = random_form(&mut rng);
        let delta_zero = branch_quartic(&form).map_err(e2s)?.delta() == 0;
        ensure(delta_zero == repeated_root(&form), "S^3-27T^2 disagrees with the root oracle")?;
        match j_invariant(&form) {
            Ok(j) => {
                ensure(!delta_zero, "j returned for a singular form")?;
                let g1 = MatrixFq::random_invertible(f, 2, &mut rng).map_err(e2s)?;
                let g2 = MatrixFq::random_invertible(f, 2, &mut rng).map_err(e2s)?;
                let moved = gl2_transport(&form, &g1, &g2).map_err(e2s)?;
                ensure(j_invariant(&moved).map_err(e2s)? == j, "j not transport invariant")?;
                let lam = rng.nonzero(&f);
                ensure(j_invariant(&form.scale(lam)).map_err(e2s)? == j, "j not scale invariant")?;
                smooth += 1;
            }
            Err(Error::SingularCurve) => {
                ensure(delta_zero, "SingularCurve without vanishing S^3-27T^2")?;
                singular_random += 1;
            }
            Err(e) => return Err(e2s(e)),
        }
    }
    // constructed singular forms: F0, F1, F2 share a linear factor
    let mut constructed = 0;
    while constructed < 20 {
        let a = rng.element(&f);
        let l = UnivariatePoly::new(f, vec![f.neg(a), 1]);
        let mut form = BiForm::zero(f, 2, 2);
        for j in 0..3 {
            let p = l.mul(&UnivariatePoly::new(f, vec![rng.element(&f), rng.element(&f)]));
            for i in 0..3 {
                form.set_coeff(i, j, p.coeff(i));
            }
        }
        if form.is_zero() {
            continue;
        }
        ensure(repeated_root(&form), "constructed form is not singular")?;
        ensure(j_invariant(&form) == Err(Error::SingularCurve), "constructed singular form accepted")?;
        constructed += 1;
    }
    Ok(format!(
        "100 smooth forms invariant under transport and scaling, 20/20 constructed singular forms rejected ({singular_random} random singular forms met)"
    ))
}

fn factorization_oracle() -> Outcome {
    let f = PrimeField::new(101).unwrap();
    let mut rng = Stream::new(3, "acceptance-factor");
    let mut report = Vec::new();
    for m in [3u32, 5, 6] {
        let (mut keyed, mut ambiguous, mut reducible_plant) = (0, 0, 0);
        for _ in 0..200 {
            let rand = |rng: &mut Stream, d: u32| {
                let n = ((d + 1) * (d + 1)) as usize;
                BiForm::new(f, d, d, (0..n).map(|_| rng.element(&f)).collect()).unwrap()
            };
            let c = rand(&mut rng, 2);
            let r = rand(&mut rng, m - 2);
            let g = c.mul(&r).map_err(e2s)?;
            if g.is_zero() {
                continue;
            }
            let list = biform_factor(&g).map_err(e2s)?;
            ensure(list.expand() == g, "trial multiplication failed")?;
            let c_irreducible = biform_factor(&c).map_err(e2s)?.factors.len() == 1;
            match extract_22(&g) {
                Ok(found) => {
                    ensure(!c_irreducible || found.eq_up_to_scalar(&c), format!("m={m}: mis-keyed component"))?;
                    keyed += 1;
                }
                Err(Error::Ambiguous(v)) => {
                    ensure(!c_irreducible || v.iter().any(|x| x.eq_up_to_scalar(&c)), "planted C missing from ambiguity list")?;
                    ambiguous += 1;
                }
                Err(Error::NoComponent) => ensure(!c_irreducible, "irreducible plant not found")?,
                Err(e) => return Err(e2s(e)),
            }
            reducible_plant += (!c_irreducible) as u32;
        }
        report.push(format!("m={m}: {keyed} keyed, {ambiguous} ambiguous, {reducible_plant} reducible plants"));
    }
    Ok(format!("600/600 reconstructed; {}", report.join("; ")))
}

fn quadric_dimensions() -> Outcome {
    let f = PrimeField::new(101).unwrap();
    let mut rng = Stream::new(4, "acceptance-quadrics");
    let mut sizes = Vec::new();
    for m in [2u32, 3] {
        let frame = VeroneseFrame::random(f, m, &mut rng).map_err(e2s)?;
        let direct = quadric_system(VarietySampler::Frame(&frame), 1).map_err(e2s)?;
        let key = gen_automorphism_pair(&frame, &mut rng).map_err(e2s)?;
        let b = MatrixFq::random_invertible(f, 4, &mut rng).map_err(e2s)?;
        let sigma = sigma_compose(&frame, &b).map_err(e2s)?;
        let orbit = quadric_system(
            VarietySampler::Orbit { sigma: &sigma, automorphisms: &key.a, exponent_bound: &key.exponent_bound },
            2,
        )
        .map_err(e2s)?;
        ensure(orbit.basis == direct.basis, format!("m={m}: orbit and frame systems differ"))?;
        for _ in 0..50 {
            let z = [rng.element(&f), rng.element(&f), rng.element(&f), rng.element(&f)];
            ensure(direct.evaluate(&frame.veronese_point(&z)).iter().all(|&v| v == 0), "quadric misses a fresh point")?;
        }
        sizes.push(direct.basis.len());
    }
    ensure(sizes == [20, 126], format!("basis sizes {sizes:?}"))?;
    ensure(quadric_count(8) == 12726, "h_8 formula")?;
    Ok(format!("bases of size {} and {} (frame and public-orbit sampling agree), h_8 = {}", sizes[0], sizes[1], quadric_count(8)))
}

fn brute_force() -> Outcome {
    let start = Instant::now();
    let params = ttp_setup(5, 3, 11).map_err(e2s)?;
    let user = ttp_register(&params, 12).map_err(e2s)?;
    let budget = 10 * 5u64.pow(9);
    let out = brute_force_ttp(&params, &user.h, budget, 13).map_err(e2s)?;
    let (word, idx) = out.hit.ok_or_else(|| format!("no hit within {budget} trials"))?;
    let w = word_matrix(&params.t, &word.0).map_err(e2s)?;
    let image = w.apply_to(&params.m_t).map_err(e2s)?;
    ensure(image.left_apply(&user.h).map_err(e2s)?.iter().all(|&v| v == 0), "hit does not lie in H_U")?;
    let expected = 5f64.powi(9);
    Ok(format!(
        "hit after {} trials (q^9 = {expected:.0}, ratio {:.2}), {:.1?}",
        idx + 1,
        (idx + 1) as f64 / expected,
        start.elapsed()
    ))
}

fn exact_order(u: &MatrixFq, limit: u64) -> Option<u64> {
    let id = MatrixFq::identity(u.field(), u.rows());
    let mut acc = id.clone();
    for k in 1..=limit {
        acc = acc.mul(u).ok()?;
        if acc == id {
            return Some(k);
        }
    }
    None
}

fn order_construction() -> Outcome {
    let mut notes = Vec::new();
    for q in [5u64, 7] {
        let f = PrimeField::new(q).unwrap();
        let mut rng = Stream::new(q, "acceptance-order");
        let frame = VeroneseFrame::random(f, 3, &mut rng).map_err(e2s)?;
        let key = gen_automorphism_pair(&frame, &mut rng).map_err(e2s)?;
        let full = q.pow(4) - 1;
        for u in &key.base {
            let ord = exact_order(u, full);
            ensure(ord == Some(full), format!("q={q}: U' order {ord:?}"))?;
        }
        let gp_frame = VeroneseFrame::random_genperm(f, 3, &mut rng);
        let v2 = gen_permutation_variant(&gp_frame, &mut rng).map_err(e2s)?;
        let cap = 4 * (q - 1);
        let mut orders = Vec::new();
        for a in &v2.a {
            let Automorphism::Sparse(gp) = a else { return Err("version-2 automorphism is dense".into()) };
            let id = GenPerm::identity(f, gp.size());
            let ord = (1..=cap).find(|&k| gp.pow(&BigUint::from(k)).is_identity());
            ensure(ord.is_some() && gp != &id, format!("q={q}: version-2 order exceeds {cap}"))?;
            orders.push(ord.unwrap());
        }
        notes.push(format!("q={q}: U' orders {full}, version-2 orders {orders:?} <= {cap}"));
    }
    Ok(notes.join("; "))
}

fn key_sizes() -> Outcome {
    let bits = public_key_bits_sparse(8, 64);
    ensure(bits == 5184, format!("{bits} bits"))?;
    Ok("sparse H_U for l=64, m=8 is 5184 bits".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("toy-example replay", toy_replay),
        ("end-to-end agreement", agreement),
        ("TTP symmetry", ttp_symmetry),
        ("GLEmb conformance", glemb_conformance),
        ("j-invariance suite", j_invariance),
        ("factorization oracle", factorization_oracle),
        ("quadric-system dimensions", quadric_dimensions),
        ("brute-force attack sanity", brute_force),
        ("order construction", order_construction),
        ("key-size arithmetic", key_sizes),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
