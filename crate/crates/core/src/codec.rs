//! Canonical text serialization of protocol objects.
//!
//! ```text
//! QSI1
//! <role>            public | secret | message | key | ttp | ttp-user
//! q <q>
//! m <m>
//! version <v>
//! ...role-specific lines and named matrix blocks...
//! ```
//!
//! A matrix block is its name, a `rows cols` line, then one line per row of
//! space-separated residues in [0, q). Vectors are 1×n blocks.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::forms::veronese_dim;
use crate::linalg::MatrixFq;
use crate::protocol::{
    automorphism_for_version, check_degree, check_version, ExponentWord, PublicBundle,
    ResponderMessage, SecretKey, SharedKey, TtpParams, TtpUser,
};

pub const MAGIC: &str = "QSI1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeyFile {
    Public(PublicBundle),
    Secret { version: u8, key: SecretKey },
    Message { version: u8, msg: ResponderMessage },
    Key { version: u8, m: u32, key: SharedKey },
    Ttp(TtpParams),
    TtpUser(TtpUser),
}

fn malformed(s: impl Into<String>) -> Error {
    Error::Malformed(s.into())
}

fn write_matrix(out: &mut String, name: &str, m: &MatrixFq) {
    let _ = writeln!(out, "{name}\n{} {}", m.rows(), m.cols());
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u64::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

fn write_vector(out: &mut String, name: &str, v: &[u64]) {
    let row: Vec<String> = v.iter().map(u64::to_string).collect();
    let _ = writeln!(out, "{name}\n1 {}\n{}", v.len(), row.join(" "));
}

impl KeyFile {
    pub fn role(&self) -> &'static str {
        match self {
            KeyFile::Public(_) => "public",
            KeyFile::Secret { .. } => "secret",
            KeyFile::Message { .. } => "message",
            KeyFile::Key { .. } => "key",
            KeyFile::Ttp(_) => "ttp",
            KeyFile::TtpUser(_) => "ttp-user",
        }
    }

    fn header(&self) -> (PrimeField, u32, u8) {
        match self {
            KeyFile::Public(p) => (p.field, p.m, p.version),
            KeyFile::Secret { version, key } => (key.field, key.m, *version),
            KeyFile::Message { version, msg } => (msg.field, msg.m, *version),
            KeyFile::Key { version, m, key } => (key.j.field(), *m, *version),
            KeyFile::Ttp(t) => (t.field, t.m, 1),
            KeyFile::TtpUser(u) => (u.field, u.m, 1),
        }
    }

    pub fn encode(&self) -> String {
        let (field, m, version) = self.header();
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}\n{}\nq {}\nm {m}\nversion {version}", self.role(), field.modulus());
        match self {
            KeyFile::Public(p) => {
                write_matrix(&mut out, "a1", &p.a[0].to_dense());
                write_matrix(&mut out, "a2", &p.a[1].to_dense());
                write_matrix(&mut out, "m_public", &p.m_public);
                write_vector(&mut out, "h", &p.h);
            }
            KeyFile::Secret { key, .. } => {
                write_matrix(&mut out, "m_secret", &key.m_secret);
                if let Some(frame) = &key.frame {
                    write_matrix(&mut out, "frame", frame);
                }
            }
            KeyFile::Message { msg, .. } => write_vector(&mut out, "h_b", &msg.h_b),
            KeyFile::Key { key, .. } => {
                let _ = writeln!(out, "j {}", key.j.value());
            }
            KeyFile::Ttp(t) => {
                write_matrix(&mut out, "m_t", &t.m_t);
                write_matrix(&mut out, "t1", &t.t[0].to_dense());
                write_matrix(&mut out, "t2", &t.t[1].to_dense());
            }
            KeyFile::TtpUser(u) => {
                let w: Vec<String> = u.word.0.iter().map(BigUint::to_string).collect();
                let _ = writeln!(out, "word {}", w.join(" "));
                write_matrix(&mut out, "sigma", &u.sigma);
                write_vector(&mut out, "h", &u.h);
            }
        }
        out
    }

    pub fn decode(text: &str) -> Result<Self> {
        let mut r = Reader { lines: text.lines().collect(), pos: 0 };
        if r.next()? != MAGIC {
            return Err(malformed("bad magic"));
        }
        let role = r.next()?.to_string();
        let q: u64 = r.keyed("q")?;
        let field = PrimeField::new(q).map_err(|e| malformed(e.to_string()))?;
        let m: u32 = r.keyed("m")?;
        check_degree(m).map_err(|e| malformed(e.to_string()))?;
        let version: u8 = r.keyed("version")?;
        check_version(version).map_err(|e| malformed(e.to_string()))?;
        let n = veronese_dim(m);
        let s = (m as usize + 1).pow(2);
        let out = match role.as_str() {
            "public" => {
                let a1 = r.matrix(field, "a1", n, n)?;
                let a2 = r.matrix(field, "a2", n, n)?;
                let bundle = PublicBundle {
                    field,
                    m,
                    version,
                    a: [automorphism_for_version(a1, version)?, automorphism_for_version(a2, version)?],
                    m_public: r.matrix(field, "m_public", n, s)?,
                    h: r.vector(field, "h", n)?,
                };
                bundle.validate()?;
                KeyFile::Public(bundle)
            }
            "secret" => {
                let m_secret = r.matrix(field, "m_secret", n, s)?;
                let frame = if r.at_end() { None } else { Some(r.matrix(field, "frame", n, n)?) };
                KeyFile::Secret { version, key: SecretKey { field, m, m_secret, frame } }
            }
            "message" => {
                let h_b = r.vector(field, "h_b", n)?;
                if h_b.iter().all(|&v| v == 0) {
                    return Err(malformed("zero hyperplane"));
                }
                KeyFile::Message { version, msg: ResponderMessage { field, m, h_b } }
            }
            "key" => {
                let j: u64 = r.keyed("j")?;
                if j >= q {
                    return Err(malformed("j out of range"));
                }
                KeyFile::Key { version, m, key: SharedKey { j: field.elem(j) } }
            }
            "ttp" | "ttp-user" if version != 1 => return Err(malformed("ttp files are version 1")),
            "ttp" => {
                let m_t = r.matrix(field, "m_t", n, s)?;
                let t1 = r.matrix(field, "t1", n, n)?;
                let t2 = r.matrix(field, "t2", n, n)?;
                KeyFile::Ttp(TtpParams {
                    field,
                    m,
                    m_t,
                    t: [automorphism_for_version(t1, 1)?, automorphism_for_version(t2, 1)?],
                })
            }
            "ttp-user" => {
                let line = r.next()?;
                let mut it = line.split_whitespace();
                if it.next() != Some("word") {
                    return Err(malformed("expected word line"));
                }
                let exps: Vec<BigUint> = it
                    .map(|t| t.parse().map_err(|_| malformed(format!("bad exponent {t}"))))
                    .collect::<Result<_>>()?;
                let word: [BigUint; 4] =
                    exps.try_into().map_err(|_| malformed("word needs four exponents"))?;
                KeyFile::TtpUser(TtpUser {
                    field,
                    m,
                    word: ExponentWord(word),
                    sigma: r.matrix(field, "sigma", n, s)?,
                    h: r.vector(field, "h", n)?,
                })
            }
            other => return Err(malformed(format!("unknown role {other}"))),
        };
        if !r.at_end() {
            return Err(malformed("trailing data"));
        }
        Ok(out)
    }
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_blank(&mut self) {
        while self.pos < self.lines.len() && self.lines[self.pos].trim().is_empty() {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_blank();
        self.pos == self.lines.len()
    }

    fn next(&mut self) -> Result<&'a str> {
        self.skip_blank();
        let line = self.lines.get(self.pos).ok_or_else(|| malformed("unexpected end of file"))?;
        self.pos += 1;
        Ok(line.trim())
    }

    fn keyed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let line = self.next()?;
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(k), Some(v), None) if k == key => {
                v.parse().map_err(|_| malformed(format!("bad value for {key}: {v}")))
            }
            _ => Err(malformed(format!("expected '{key} <value>', got '{line}'"))),
        }
    }

    fn matrix(&mut self, field: PrimeField, name: &str, rows: usize, cols: usize) -> Result<MatrixFq> {
        if self.next()? != name {
            return Err(malformed(format!("expected block {name}")));
        }
        let dims: Vec<usize> = self
            .next()?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| malformed(format!("{name}: bad shape"))))
            .collect::<Result<_>>()?;
        if dims != [rows, cols] {
            return Err(malformed(format!("{name}: expected shape {rows}x{cols}, got {dims:?}")));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = self.next()?;
            let before = data.len();
            for t in line.split_whitespace() {
                let v: u64 = t.parse().map_err(|_| malformed(format!("{name}: bad entry {t}")))?;
                if v >= field.modulus() {
                    return Err(malformed(format!("{name}: entry {v} not reduced")));
                }
                data.push(v);
            }
            if data.len() - before != cols {
                return Err(malformed(format!("{name}: row length")));
            }
        }
        MatrixFq::new(field, rows, cols, data)
    }

    fn vector(&mut self, field: PrimeField, name: &str, len: usize) -> Result<Vec<u64>> {
        Ok(self.matrix(field, name, 1, len)?.data().to_vec())
    }
}
