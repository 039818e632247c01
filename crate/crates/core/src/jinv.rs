//! Branch quartic and j-invariant of a bidegree-(2,2) curve on P¹×P¹.

use crate::embeddings::glemb;
use crate::error::{Error, Result};
use crate::ff::{FieldElement, PrimeField};
use crate::forms::BiForm;
use crate::linalg::MatrixFq;

/// G(X₀,X₁) = q₀X₀⁴ + q₁X₀³X₁ + q₂X₀²X₁² + q₃X₀X₁³ + q₄X₁⁴.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchQuartic {
    pub q: [u64; 5],
    pub field: PrimeField,
}

impl BranchQuartic {
    pub fn s(&self) -> u64 {
        let f = self.field;
        let [q0, q1, q2, q3, q4] = self.q;
        let quarter = f.inv(4).expect("q odd");
        let twelfth = f.inv(12).expect("gcd(q,6)=1");
        let a = f.mul(q0, q4);
        let b = f.mul(f.mul(q1, q3), quarter);
        let c = f.mul(f.mul(q2, q2), twelfth);
        f.add(f.sub(a, b), c)
    }

    pub fn t(&self) -> u64 {
        let f = self.field;
        let [q0, q1, q2, q3, q4] = self.q;
        let inv = |d: u64| f.inv(d).expect("gcd(q,6)=1");
        let m3 = |a: u64, b: u64, c: u64| f.mul(f.mul(a, b), c);
        let terms = [
            f.mul(m3(q0, q2, q4), inv(6)),
            f.mul(m3(q1, q2, q3), inv(48)),
            f.neg(f.mul(m3(q2, q2, q2), inv(216))),
            f.neg(f.mul(m3(q0, q3, q3), inv(16))),
            f.neg(f.mul(m3(q1, q1, q4), inv(16))),
        ];
        terms.iter().fold(0, |acc, &x| f.add(acc, x))
    }

    /// S³ − 27T²; vanishes exactly on quartics with a repeated root.
    pub fn delta(&self) -> u64 {
        let f = self.field;
        let s = self.s();
        let t = self.t();
        f.sub(f.pow(s, 3), f.mul(27, f.mul(t, t)))
    }

    pub fn is_zero(&self) -> bool {
        self.q.iter().all(|&c| c == 0)
    }
}

fn check_22(f: &BiForm) -> Result<()> {
    if f.bidegree() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "expected a (2,2) form, got {:?}",
            f.bidegree()
        )));
    }
    Ok(())
}

/// G = F₁² − 4F₀F₂ where f = Y₀²F₀ + Y₀Y₁F₁ + Y₁²F₂.
pub fn branch_quartic(f: &BiForm) -> Result<BranchQuartic> {
    check_22(f)?;
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    let field = f.field();
    let part = |j: usize| [f.coeff(0, j), f.coeff(1, j), f.coeff(2, j)];
    let (f0, f1, f2) = (part(0), part(1), part(2));
    let mut q = [0u64; 5];
    for a in 0..3 {
        for b in 0..3 {
            let sq = field.mul(f1[a], f1[b]);
            let cross = field.mul(4, field.mul(f0[a], f2[b]));
            q[a + b] = field.add(q[a + b], field.sub(sq, cross));
        }
    }
    Ok(BranchQuartic { q, field })
}

/// j = S³ / (S³ − 27T²).
pub fn j_invariant(f: &BiForm) -> Result<FieldElement> {
    let g = branch_quartic(f)?;
    let field = g.field;
    let delta = g.delta();
    if delta == 0 {
        return Err(Error::SingularCurve);
    }
    Ok(field.elem(field.div(field.pow(g.s(), 3), delta)?))
}

/// f(g₁·X, g₂·Y): substitute the X block by `g1` and the Y block by `g2`.
/// Works for any bidegree.
pub fn gl2_transport(f: &BiForm, g1: &MatrixFq, g2: &MatrixFq) -> Result<BiForm> {
    let (d1, d2) = f.bidegree();
    let field = f.field();
    let ex = glemb(1, d1, g1)?;
    let ey = glemb(1, d2, g2)?;
    let c = MatrixFq::new(field, d1 as usize + 1, d2 as usize + 1, f.coeffs().to_vec())?;
    let out = ex.transpose().mul(&c)?.mul(&ey)?;
    BiForm::new(field, d1, d2, out.data().to_vec())
}
