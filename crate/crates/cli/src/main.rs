use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qsi_core::analysis::{
    brute_force_public, brute_force_ttp, quadric_count, quadric_system, VarietySampler,
};
use qsi_core::codec::KeyFile;
use qsi_core::embeddings::{word_matrix, SigmaEmbedding, VeroneseFrame};
use qsi_core::factor::extract_22;
use qsi_core::forms::pullback;
use qsi_core::jinv::j_invariant;
use qsi_core::protocol::{
    accept, accept_detailed, keygen_user, respond, simulate, toy_keys, ttp_register, ttp_setup,
    ttp_shared, ExponentWord, PublicBundle, ResponderMessage, SimulationReport, SharedKey,
};
use qsi_core::toy::{self, ToyExample};
use qsi_core::{Error, PrimeField, Result, Stream};

#[derive(Parser)]
#[command(name = "qsi", version, about = "Quadric surface intersection key exchange")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct Seed {
    /// Seed for the deterministic random stream
    #[arg(long, env = "QSI_SEED")]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a key pair
    Keygen {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        version: u8,
        #[command(flatten)]
        seed: Seed,
        #[arg(long)]
        out_pub: PathBuf,
        #[arg(long)]
        out_sec: PathBuf,
    },
    /// Answer a public key: writes H_B and the responder's key
    Respond {
        #[arg(long = "pub")]
        public: PathBuf,
        #[command(flatten)]
        seed: Seed,
        #[arg(long)]
        out_msg: PathBuf,
        #[arg(long)]
        out_key: PathBuf,
    },
    /// Derive the initiator's key from a response
    Accept {
        #[arg(long)]
        sec: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        out_key: PathBuf,
    },
    /// Trusted third party: publish M_T and the two automorphisms
    TtpSetup {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        seed: Seed,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trusted third party: issue a user's word and hyperplane
    TtpRegister {
        #[arg(long)]
        ttp: PathBuf,
        #[command(flatten)]
        seed: Seed,
        /// Private file holding the word, σ_U and H_U
        #[arg(long)]
        out_user: PathBuf,
        /// H_U alone, for publication
        #[arg(long)]
        out_h: PathBuf,
    },
    /// Derive the shared key between two registered users
    TtpDerive {
        #[arg(long)]
        user: PathBuf,
        /// The peer's published hyperplane
        #[arg(long)]
        peer: PathBuf,
        #[arg(long)]
        out_key: PathBuf,
    },
    /// Replay the built-in q=67, m=3 example
    VerifyPaperExample,
    /// Agreement statistics over many seeded exchanges
    Simulate {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        version: u8,
        #[arg(long)]
        trials: u64,
        #[command(flatten)]
        seed: Seed,
    },
    /// Toy-scale attacks
    #[command(subcommand)]
    Attack(Attack),
}

#[derive(Subcommand)]
enum Attack {
    /// Solve for the quadrics through the public variety
    Quadrics {
        /// Sample the variety from a public key's orbit
        #[arg(long = "pub", conflicts_with_all = ["q", "m"])]
        public: Option<PathBuf>,
        /// Otherwise sample a fresh random frame
        #[arg(long, requires = "m")]
        q: Option<u64>,
        #[arg(long)]
        m: Option<u32>,
        #[command(flatten)]
        seed: Seed,
    },
    /// Random search for an automorphism word matching a hyperplane
    Brute {
        /// Public key plus the responder's message
        #[arg(long = "pub", requires = "msg", conflicts_with = "ttp")]
        public: Option<PathBuf>,
        #[arg(long)]
        msg: Option<PathBuf>,
        /// TTP parameters plus a user's published hyperplane
        #[arg(long, requires = "user_h")]
        ttp: Option<PathBuf>,
        #[arg(long)]
        user_h: Option<PathBuf>,
        #[arg(long)]
        budget: u64,
        #[command(flatten)]
        seed: Seed,
    },
}

fn read(path: &Path) -> Result<KeyFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    KeyFile::decode(&text)
}

fn write(path: &Path, file: &KeyFile) -> Result<()> {
    fs::write(path, file.encode()).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn wrong_role(path: &Path, want: &str, got: &KeyFile) -> Error {
    Error::Malformed(format!("{}: expected a {want} file, found {}", path.display(), got.role()))
}

fn read_public(path: &Path) -> Result<PublicBundle> {
    match read(path)? {
        KeyFile::Public(p) => Ok(p),
        other => Err(wrong_role(path, "public", &other)),
    }
}

fn read_message(path: &Path) -> Result<(u8, ResponderMessage)> {
    match read(path)? {
        KeyFile::Message { version, msg } => Ok((version, msg)),
        other => Err(wrong_role(path, "message", &other)),
    }
}

fn write_key(path: &Path, version: u8, m: u32, key: SharedKey) -> Result<()> {
    write(path, &KeyFile::Key { version, m, key })?;
    println!("j={}", key.j);
    Ok(())
}

fn verify_example() -> Result<()> {
    let t = ToyExample::load()?;
    let (public, secret) = toy_keys(&t);
    let word = ExponentWord::from_u64([toy::EXPONENT, 0, 0, 0]);
    let resp = qsi_core::protocol::respond_with_word(&public, &word, &mut Stream::new(0, "verify"))?;
    if resp.m_b != t.m_b {
        return Err(Error::Invariant("A1^70 M_A^(p) differs from the reference M_B".into()));
    }
    let g = pullback(&t.h_a(), &t.m_b)?;
    if !g.eq_up_to_scalar(&t.pullback_b()) || !extract_22(&g)?.eq_up_to_scalar(&t.c1()) {
        return Err(Error::Invariant("responder pullback differs from the reference one".into()));
    }
    let (key_a, _) = accept_detailed(&secret, &resp.message)?;
    let (ja, jb) = (key_a.j.value(), resp.key.j.value());
    if ja != toy::J || jb != toy::J {
        return Err(Error::Invariant(format!("expected j=57, got {ja} and {jb}")));
    }
    println!("j={jb} j={ja} agree");
    Ok(())
}

fn run_simulation(q: u64, m: u32, version: u8, trials: u64, seed: u64) {
    let start = Instant::now();
    let outcomes = simulate(q, m, version, trials, seed);
    let elapsed = start.elapsed();
    let r = SimulationReport::from_outcomes(&outcomes);
    let share = |n: u64| if r.trials == 0 { 0.0 } else { n as f64 / r.trials as f64 };
    let count = |v: &[(&str, u64)], t: &str| v.iter().find(|(k, _)| *k == t).map_or(0, |p| p.1);
    println!("trials {}", r.trials);
    println!("agreed {}", r.agreed);
    println!("disagreed {}", r.disagreed);
    println!("failed {}", r.failed);
    println!("agreement_rate {:.4}", r.agreement_rate());
    println!("failure_rate {:.4}", r.failure_rate());
    for token in ["SINGULAR_CURVE", "AMBIGUOUS"] {
        let resampled = count(&r.resampled, token);
        println!(
            "{}_rate {:.4} (resampled {resampled}, terminal {})",
            token.to_lowercase(),
            share(resampled + count(&r.failures, token)),
            count(&r.failures, token)
        );
    }
    for (token, n) in &r.failures {
        println!("failure {token} {n}");
    }
    for (token, n) in &r.resampled {
        println!("resampled {token} {n}");
    }
    println!("seconds {:.3}", elapsed.as_secs_f64());
    println!("ms_per_trial {:.3}", elapsed.as_secs_f64() * 1e3 / r.trials.max(1) as f64);
}

fn attack(a: Attack) -> Result<()> {
    match a {
        Attack::Quadrics { public, q, m, seed } => {
            let start = Instant::now();
            let system = match (public, q, m) {
                (Some(path), _, _) => {
                    let p = read_public(&path)?;
                    let sigma = SigmaEmbedding::new(p.m_public.clone())?;
                    let bound = p.exponent_bound();
                    quadric_system(
                        VarietySampler::Orbit { sigma: &sigma, automorphisms: &p.a, exponent_bound: &bound },
                        seed.seed,
                    )?
                }
                (None, Some(q), Some(m)) => {
                    let f = PrimeField::new(q)?;
                    let frame = VeroneseFrame::random(f, m, &mut Stream::new(seed.seed, "attack-frame"))?;
                    quadric_system(VarietySampler::Frame(&frame), seed.seed)?
                }
                _ => return Err(Error::InvalidParameters("give --pub or both --q and --m".into())),
            };
            println!("m {}", system.m);
            println!("points {}", system.points_used);
            println!("quadrics {}", system.basis.len());
            println!("expected {}", quadric_count(system.m));
            println!("seconds {:.3}", start.elapsed().as_secs_f64());
            Ok(())
        }
        Attack::Brute { public, msg, ttp, user_h, budget, seed } => {
            let start = Instant::now();
            let (out, recovered) = match (public, msg, ttp, user_h) {
                (Some(p), Some(mpath), _, _) => {
                    let p = read_public(&p)?;
                    let (_, msg) = read_message(&mpath)?;
                    let out = brute_force_public(&p, &msg.h_b, budget, seed.seed)?;
                    // a hit is as good as the responder's word: rebuild the key
                    let key = match &out.hit {
                        Some((w, _)) => {
                            let m_b = word_matrix(&p.a, &w.0)?.apply_to(&p.m_public)?;
                            extract_22(&pullback(&p.h, &m_b)?).and_then(|c| j_invariant(&c)).ok()
                        }
                        None => None,
                    };
                    (out, key)
                }
                (None, None, Some(t), Some(h)) => {
                    let params = match read(&t)? {
                        KeyFile::Ttp(params) => params,
                        other => return Err(wrong_role(&t, "ttp", &other)),
                    };
                    let (_, h) = read_message(&h)?;
                    (brute_force_ttp(&params, &h.h_b, budget, seed.seed)?, None)
                }
                _ => return Err(Error::InvalidParameters("give --pub with --msg, or --ttp with --user-h".into())),
            };
            println!("trials {}", out.trials);
            match &out.hit {
                Some((w, i)) => {
                    println!("hit {} {} {} {} at trial {i}", w.0[0], w.0[1], w.0[2], w.0[3]);
                    if let Some(j) = recovered {
                        println!("j={j}");
                    }
                }
                None => println!("no hit"),
            }
            println!("seconds {:.3}", start.elapsed().as_secs_f64());
            Ok(())
        }
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Keygen { q, m, version, seed, out_pub, out_sec } => {
            let (public, secret) = keygen_user(q, m, version, seed.seed)?;
            write(&out_pub, &KeyFile::Public(public))?;
            write(&out_sec, &KeyFile::Secret { version, key: secret })
        }
        Cmd::Respond { public, seed, out_msg, out_key } => {
            let p = read_public(&public)?;
            let (msg, key) = respond(&p, seed.seed)?;
            let (version, m) = (p.version, p.m);
            write(&out_msg, &KeyFile::Message { version, msg })?;
            write_key(&out_key, version, m, key)
        }
        Cmd::Accept { sec, msg, out_key } => {
            let (version, secret) = match read(&sec)? {
                KeyFile::Secret { version, key } => (version, key),
                other => return Err(wrong_role(&sec, "secret", &other)),
            };
            let (msg_version, msg) = read_message(&msg)?;
            if msg_version != version || msg.field != secret.field || msg.m != secret.m {
                return Err(Error::Malformed("message and secret key parameters differ".into()));
            }
            let key = accept(&secret, &msg)?;
            write_key(&out_key, version, secret.m, key)
        }
        Cmd::TtpSetup { q, m, seed, out } => write(&out, &KeyFile::Ttp(ttp_setup(q, m, seed.seed)?)),
        Cmd::TtpRegister { ttp, seed, out_user, out_h } => {
            let params = match read(&ttp)? {
                KeyFile::Ttp(p) => p,
                other => return Err(wrong_role(&ttp, "ttp", &other)),
            };
            let user = ttp_register(&params, seed.seed)?;
            let published = ResponderMessage { field: user.field, m: user.m, h_b: user.h.clone() };
            write(&out_user, &KeyFile::TtpUser(user))?;
            write(&out_h, &KeyFile::Message { version: 1, msg: published })
        }
        Cmd::TtpDerive { user, peer, out_key } => {
            let u = match read(&user)? {
                KeyFile::TtpUser(u) => u,
                other => return Err(wrong_role(&user, "ttp-user", &other)),
            };
            let (_, msg) = read_message(&peer)?;
            if msg.field != u.field || msg.m != u.m {
                return Err(Error::Malformed("peer hyperplane parameters differ".into()));
            }
            let key = ttp_shared(&u, &msg.h_b)?;
            write_key(&out_key, 1, u.m, key)
        }
        Cmd::VerifyPaperExample => verify_example(),
        Cmd::Simulate { q, m, version, trials, seed } => {
            qsi_core::protocol::check_degree(m)?;
            qsi_core::protocol::check_version(version)?;
            PrimeField::new(q)?;
            run_simulation(q, m, version, trials, seed.seed);
            Ok(())
        }
        Cmd::Attack(a) => attack(a),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Malformed(_)
        | Error::InvalidParameters(_)
        | Error::DimensionMismatch(_)
        | Error::ModulusMismatch(..) => 3,
        e if e.is_degeneracy() => 2,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error {}: {e}", e.token());
            ExitCode::from(exit_code(&e))
        }
    }
}
