//! Factorization over F_q: univariate polynomials and bihomogeneous forms,
//! and extraction of the bidegree-(2,2) component of a pulled-back
//! hyperplane.

pub mod bivariate;
pub mod univariate;

use crate::error::{Error, Result};
use crate::ff::FieldElement;
use crate::forms::BiForm;
use crate::jinv::gl2_transport;
use crate::linalg::MatrixFq;
use crate::rng::Stream;

use bivariate::{factor_squarefree, gcd_primitive, Bivar};
pub use univariate::{univ_factor, UnivariateFactorization, UnivariatePoly};

/// `scalar · Π factorᵢ^{multᵢ}` with projectively normalized irreducible
/// factors, sorted by bidegree then coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorList {
    pub scalar: FieldElement,
    pub factors: Vec<(BiForm, u32)>,
}

impl FactorList {
    pub fn expand(&self) -> BiForm {
        let f = self.scalar.field();
        self.factors
            .iter()
            .fold(BiForm::constant(f, self.scalar.value()), |acc, (g, e)| {
                acc.mul(&g.pow(*e)).expect("same field")
            })
    }

    pub fn bidegrees(&self) -> Vec<((u32, u32), u32)> {
        let mut v: Vec<_> = self.factors.iter().map(|(g, e)| (g.bidegree(), *e)).collect();
        v.sort_unstable();
        v
    }
}

fn to_bivar(g: &BiForm) -> Bivar {
    let (d1, d2) = g.bidegree();
    Bivar::new(
        g.field(),
        (0..=d1 as usize).map(|i| (0..=d2 as usize).map(|j| g.coeff(i, j)).collect()).collect(),
    )
}

fn to_biform(p: &Bivar) -> BiForm {
    let f = p.field();
    let d1 = p.deg_x().unwrap_or(0);
    let d2 = p.deg_y().unwrap_or(0);
    let coeffs = (0..=d1).flat_map(|i| (0..=d2).map(move |j| (i, j))).map(|(i, j)| p.get(i, j)).collect();
    BiForm::new(f, d1 as u32, d2 as u32, coeffs).expect("consistent shape")
}

fn univ_to_biform(p: &UnivariatePoly, x_block: bool) -> BiForm {
    let f = p.field();
    let d = p.degree().unwrap_or(0) as u32;
    let coeffs = (0..=d as usize).map(|i| p.coeff(i)).collect();
    if x_block {
        BiForm::new(f, d, 0, coeffs).expect("shape")
    } else {
        BiForm::new(f, 0, d, coeffs).expect("shape")
    }
}

// Irreducible factors (with multiplicity) of a polynomial with no factor
// depending on x or y alone.
fn factor_primitive(p: &Bivar, rng: &mut Stream) -> Result<Vec<(Bivar, u32)>> {
    if p.deg_x().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let q = p.field().modulus() as usize;
    // the radical via gcd with ∂/∂x needs every multiplicity and x-degree
    // below the characteristic; fall back to ∂/∂y otherwise
    let (work, swapped) = if p.deg_x().unwrap() < q {
        (p.clone(), false)
    } else if p.deg_y().unwrap() < q {
        (p.swap(), true)
    } else {
        return Err(Error::InvalidParameters(format!(
            "bidegree {:?}x{:?} not below the characteristic",
            p.deg_x(),
            p.deg_y()
        )));
    };
    let dx = work.derivative_x().primitive_part();
    let g = gcd_primitive(&work, &dx);
    let radical = work.div_exact(&g).ok_or_else(|| Error::Invariant("radical".into()))?.primitive_part();
    let irreducibles = match factor_squarefree(&radical, rng) {
        Ok(v) => v,
        Err(Error::SpecializationFailed) => {
            // specialize the other variable instead
            factor_squarefree(&radical.swap(), rng)?.iter().map(Bivar::swap).collect()
        }
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for h in irreducibles {
        let mut rest = work.clone();
        let mut e = 0;
        while let Some(next) = rest.div_exact(&h) {
            rest = next;
            e += 1;
        }
        if e == 0 {
            return Err(Error::Invariant("lifted factor does not divide".into()));
        }
        out.push((if swapped { h.swap() } else { h }, e));
    }
    Ok(out)
}

fn push_univariate(
    out: &mut Vec<(BiForm, u32)>,
    p: &UnivariatePoly,
    x_block: bool,
    rng: &mut Stream,
) -> Result<()> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(());
    }
    for (g, e) in univ_factor(p, rng)?.factors {
        out.push((univ_to_biform(&g, x_block), e));
    }
    Ok(())
}

fn factor_affine(g: &BiForm, rng: &mut Stream) -> Result<Vec<(BiForm, u32)>> {
    let f = g.field();
    let (d1, d2) = g.bidegree();
    let p = to_bivar(g);
    let mut out = Vec::new();
    let x0 = (d1 as usize - p.deg_x().unwrap()) as u32;
    let y0 = (d2 as usize - p.deg_y().unwrap()) as u32;
    if x0 > 0 {
        out.push((BiForm::x_var(f, 0), x0));
    }
    if y0 > 0 {
        out.push((BiForm::y_var(f, 0), y0));
    }
    let cy = p.content_y();
    let p = p.div_y_poly(&cy)?;
    let cx = p.content_x();
    let p = p.swap().div_y_poly(&cx)?.swap();
    push_univariate(&mut out, &cy, false, rng)?;
    push_univariate(&mut out, &cx, true, rng)?;
    for (h, e) in factor_primitive(&p, rng)? {
        out.push((to_biform(&h), e));
    }
    Ok(out)
}

const TRANSPORT_RETRIES: usize = 8;

fn finish(g: &BiForm, raw: Vec<(BiForm, u32)>) -> Result<FactorList> {
    let f = g.field();
    let mut merged: Vec<(BiForm, u32)> = Vec::new();
    for (h, e) in raw {
        let h = h.normalized();
        match merged.iter_mut().find(|(x, _)| *x == h) {
            Some(slot) => slot.1 += e,
            None => merged.push((h, e)),
        }
    }
    merged.sort_by(|a, b| (a.0.bidegree(), a.0.coeffs()).cmp(&(b.0.bidegree(), b.0.coeffs())));
    let unit = FactorList { scalar: f.one(), factors: merged };
    let prod = unit.expand();
    if prod.bidegree() != g.bidegree() {
        return Err(Error::Invariant("factor bidegrees do not add up".into()));
    }
    let idx = g.coeffs().iter().position(|&c| c != 0).expect("nonzero");
    let scalar = f.div(g.coeffs()[idx], prod.coeffs()[idx])?;
    if prod.scale(scalar) != *g {
        return Err(Error::Invariant("trial multiplication failed".into()));
    }
    Ok(FactorList { scalar: f.elem(scalar), ..unit })
}

/// Complete factorization of a nonzero bihomogeneous form into
/// F_q-irreducible factors, verified by trial multiplication.
pub fn biform_factor(g: &BiForm) -> Result<FactorList> {
    biform_factor_with(g, &mut Stream::new(0, "biform-factor"))
}

/// As [`biform_factor`], drawing internal randomness from `rng`. The result
/// does not depend on the stream.
pub fn biform_factor_with(g: &BiForm, rng: &mut Stream) -> Result<FactorList> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    match factor_affine(g, rng) {
        Ok(raw) => return finish(g, raw),
        Err(Error::SpecializationFailed) => {}
        Err(e) => return Err(e),
    }
    // no usable point on either block: move to random coordinates
    let f = g.field();
    for _ in 0..TRANSPORT_RETRIES {
        let a = MatrixFq::random_invertible(f, 2, rng)?;
        let b = MatrixFq::random_invertible(f, 2, rng)?;
        let moved = gl2_transport(g, &a, &b)?;
        match factor_affine(&moved, rng) {
            Ok(raw) => {
                let (ai, bi) = (a.inverse()?, b.inverse()?);
                let back = raw
                    .into_iter()
                    .map(|(h, e)| Ok((gl2_transport(&h, &ai, &bi)?, e)))
                    .collect::<Result<Vec<_>>>()?;
                return finish(g, back);
            }
            Err(Error::SpecializationFailed) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SpecializationFailed)
}

// All multisets of factors (respecting multiplicity) whose bidegrees add
// up to (2,2), as normalized products.
fn sub_products_22(list: &FactorList) -> Vec<BiForm> {
    fn go(
        list: &[(BiForm, u32)],
        i: usize,
        need: (u32, u32),
        acc: BiForm,
        used: usize,
        out: &mut Vec<BiForm>,
    ) {
        if need == (0, 0) {
            if used > 1 {
                out.push(acc.normalized());
            }
            return;
        }
        if i == list.len() {
            return;
        }
        let (h, e) = &list[i];
        let (a, b) = h.bidegree();
        let mut cur = acc;
        let mut need = need;
        go(list, i + 1, need, cur.clone(), used, out);
        for k in 1..=*e {
            if a > need.0 || b > need.1 {
                break;
            }
            need = (need.0 - a, need.1 - b);
            cur = cur.mul(h).expect("same field");
            go(list, i + 1, need, cur.clone(), used + k as usize, out);
        }
    }
    let f = list.scalar.field();
    let mut out = Vec::new();
    go(&list.factors, 0, (2, 2), BiForm::constant(f, 1), 0, &mut out);
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    out.dedup();
    out
}

/// The bidegree-(2,2) component of a bidegree-(m,m) form.
///
/// `Ok` holds exactly one normalized irreducible (2,2) factor of
/// multiplicity one. Several candidates, a repeated one, or only reducible
/// (2,2) sub-products yield `Ambiguous`; no candidate at all yields
/// `NoComponent`.
pub fn extract_22(g: &BiForm) -> Result<BiForm> {
    let (d1, d2) = g.bidegree();
    if d1 != d2 || d1 < 3 {
        return Err(Error::InvalidParameters(format!(
            "extract_22 needs bidegree (m,m) with m >= 3, got ({d1},{d2})"
        )));
    }
    if g.is_zero() {
        return Err(Error::NoComponent);
    }
    let list = biform_factor(g)?;
    let irreducible: Vec<&(BiForm, u32)> =
        list.factors.iter().filter(|(h, _)| h.bidegree() == (2, 2)).collect();
    match irreducible.as_slice() {
        [(c, 1)] => Ok(c.clone()),
        [] => {
            let subs = sub_products_22(&list);
            if subs.is_empty() {
                Err(Error::NoComponent)
            } else {
                Err(Error::Ambiguous(subs))
            }
        }
        many => Err(Error::Ambiguous(many.iter().map(|(c, _)| c.clone()).collect())),
    }
}
