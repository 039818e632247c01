//! The worked toy example over F_67 with m = 3, transcribed as golden data.
//!
//! The recorded H_B is unusable (out-of-range entries, truncated), so
//! replays draw a fresh hyperplane from coker(M_B) instead.

use crate::error::{Error, Result};
use crate::ff::PrimeField;
use crate::forms::BiForm;
use crate::linalg::MatrixFq;

const DATA: &str = include_str!("../data/toy_example.txt");

pub const Q: u64 = 67;
pub const M: u32 = 3;
/// Exponent of A₁ used by the responder.
pub const EXPONENT: u64 = 70;
/// The agreed key.
pub const J: u64 = 57;

/// H_A, the initiator's public hyperplane.
pub const H_A: [i64; 20] = [
    1, 0, 0, -21, 0, -15, -32, 16, -10, 5, 11, 16, 1, -4, -28, -20, 18, 8, 1, 32,
];

/// σ_B*H_A as recorded, coefficient (i, j) of X₀^{3−i}X₁^i Y₀^{3−j}Y₁^j at
/// index 4i + j.
pub const PULLBACK_B: [i64; 16] = [12, 26, 29, 41, 2, 29, 0, 12, 13, 48, 37, 45, 60, 16, 9, 43];

/// σ_A^(s)*H_B as recorded (for the recorded, unusable H_B).
pub const PULLBACK_A: [i64; 16] = [
    0, 0, -29, -27, -32, -7, 19, -5, -15, -16, -11, -7, 24, 0, -16, 26,
];

/// The responder's component.
pub const C1: [i64; 9] = [-1, 28, -4, 6, -12, -24, 1, 30, -9];
/// The initiator's component.
pub const C2: [i64; 9] = [0, 0, 32, 33, -23, 0, 1, -2, -19];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyExample {
    pub field: PrimeField,
    pub frame: MatrixFq,
    pub a1: MatrixFq,
    pub m_secret: MatrixFq,
    pub m_public: MatrixFq,
    pub m_b: MatrixFq,
}

fn parse_blocks(field: PrimeField, text: &str) -> Result<Vec<(String, MatrixFq)>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut out = Vec::new();
    while let Some(name) = lines.next() {
        let dims: Vec<usize> = lines
            .next()
            .ok_or_else(|| Error::Malformed(format!("block {name}: missing shape")))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Malformed(format!("block {name}: bad shape"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Malformed(format!("block {name}: bad shape")));
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let row = lines
                .next()
                .ok_or_else(|| Error::Malformed(format!("block {name}: missing row")))?;
            for t in row.split_whitespace() {
                let v: i64 = t.parse().map_err(|_| Error::Malformed(format!("block {name}: bad entry {t}")))?;
                data.push(field.from_i64(v));
            }
        }
        out.push((name.to_string(), MatrixFq::new(field, rows, cols, data)?));
    }
    Ok(out)
}

impl ToyExample {
    pub fn load() -> Result<Self> {
        let field = PrimeField::new(Q)?;
        let blocks = parse_blocks(field, DATA)?;
        let get = |name: &str| {
            blocks
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| Error::Malformed(format!("toy data lacks {name}")))
        };
        Ok(Self {
            field,
            frame: get("frame")?,
            a1: get("a1")?,
            m_secret: get("m_secret")?,
            m_public: get("m_public")?,
            m_b: get("m_b")?,
        })
    }

    pub fn h_a(&self) -> Vec<u64> {
        H_A.iter().map(|&v| self.field.from_i64(v)).collect()
    }

    pub fn pullback_b(&self) -> BiForm {
        BiForm::from_i64(self.field, 3, 3, &PULLBACK_B).expect("shape")
    }

    pub fn pullback_a(&self) -> BiForm {
        BiForm::from_i64(self.field, 3, 3, &PULLBACK_A).expect("shape")
    }

    pub fn c1(&self) -> BiForm {
        BiForm::from_i64(self.field, 2, 2, &C1).expect("shape")
    }

    pub fn c2(&self) -> BiForm {
        BiForm::from_i64(self.field, 2, 2, &C2).expect("shape")
    }
}
