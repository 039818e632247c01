//! Browser bindings for the demo page in `www/`. Each export returns a
//! plain-text report; the logic lives in ordinary functions so it can be
//! tested natively.

use std::fmt::Write;

use qsi_core::factor::{biform_factor, extract_22};
use qsi_core::forms::pullback;
use qsi_core::jinv::j_invariant;
use qsi_core::protocol::{
    accept_detailed, keygen_user, public_key_bits, respond_detailed, respond_with_word, toy_keys,
    ExponentWord,
};
use qsi_core::toy::{self, ToyExample};
use qsi_core::{BiForm, Error, PrimeField, Stream};
use wasm_bindgen::prelude::*;

fn describe(e: Error) -> String {
    format!("{}: {e}", e.token())
}

pub fn toy_report() -> Result<String, String> {
    let t = ToyExample::load().map_err(describe)?;
    let (public, secret) = toy_keys(&t);
    let word = ExponentWord::from_u64([toy::EXPONENT, 0, 0, 0]);
    let resp = respond_with_word(&public, &word, &mut Stream::new(0, "demo")).map_err(describe)?;
    let g = pullback(&t.h_a(), &resp.m_b).map_err(describe)?;
    let (key_a, c_a) = accept_detailed(&secret, &resp.message).map_err(describe)?;
    let mut out = String::new();
    let _ = writeln!(out, "q = {}, m = {}, responder word A1^{}", toy::Q, toy::M, toy::EXPONENT);
    let _ = writeln!(out, "M_B matches the reference matrix: {}", resp.m_b == t.m_b);
    let _ = writeln!(out, "pullback H_A·M_B = {}", g.pretty());
    let _ = writeln!(out, "responder component C1 = {}", resp.component.pretty());
    let _ = writeln!(out, "initiator component = {}", c_a.pretty());
    let _ = writeln!(out, "j_B = {}, j_A = {}", resp.key.j, key_a.j);
    Ok(out)
}

pub fn exchange_report(q: u64, m: u32, seed: u64) -> Result<String, String> {
    let (public, secret) = keygen_user(q, m, 1, seed).map_err(describe)?;
    let resp = respond_detailed(&public, seed.wrapping_add(1)).map_err(describe)?;
    let (key_a, c_a) = accept_detailed(&secret, &resp.message).map_err(describe)?;
    let bits = public_key_bits(m, PrimeField::new(q).map_err(describe)?.bit_len() as u64);
    let mut out = String::new();
    let _ = writeln!(out, "public matrix {}×{}, hyperplane size {bits} bits", public.m_public.rows(), public.m_public.cols());
    if !resp.rejected.is_empty() {
        let _ = writeln!(out, "responder resampled after: {}", resp.rejected.join(", "));
    }
    let _ = writeln!(out, "responder curve: {}", resp.component.pretty());
    let _ = writeln!(out, "initiator curve: {}", c_a.pretty());
    let _ = writeln!(out, "j_B = {}, j_A = {}", resp.key.j, key_a.j);
    let _ = writeln!(out, "{}", if resp.key == key_a { "keys agree" } else { "KEYS DIFFER" });
    Ok(out)
}

/// Parses whitespace- or comma-separated coefficients of a square bidegree
/// form, row i holding the coefficients of X0^{d-i}X1^i.
pub fn parse_form(q: u64, text: &str) -> Result<BiForm, String> {
    let f = PrimeField::new(q).map_err(describe)?;
    let vals: Vec<i64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("not an integer: {t}")))
        .collect::<Result<_, _>>()?;
    let side = (vals.len() as f64).sqrt().round() as usize;
    if side < 2 || side * side != vals.len() {
        return Err(format!("{} coefficients is not a square count (d+1)^2", vals.len()));
    }
    let d = side as u32 - 1;
    BiForm::from_i64(f, d, d, &vals).map_err(describe)
}

pub fn analyze_report(q: u64, text: &str) -> Result<String, String> {
    let g = parse_form(q, text)?;
    let mut out = String::new();
    let _ = writeln!(out, "form: {}", g.pretty());
    let list = biform_factor(&g).map_err(describe)?;
    let _ = writeln!(out, "scalar {}", list.scalar);
    for (h, e) in &list.factors {
        let (a, b) = h.bidegree();
        let _ = writeln!(out, "  ({a},{b})^{e}: {}", h.pretty());
    }
    match extract_22(&g) {
        Ok(c) => {
            let _ = writeln!(out, "(2,2) component: {}", c.pretty());
            match j_invariant(&c) {
                Ok(j) => {
                    let _ = writeln!(out, "j = {j}");
                }
                Err(e) => {
                    let _ = writeln!(out, "j: {}", describe(e));
                }
            }
        }
        Err(e) => {
            let _ = writeln!(out, "(2,2) component: {}", describe(e));
        }
    }
    Ok(out)
}

/// Coefficients of a random (2,2)·(m−2,m−2) product, for the analyzer.
pub fn planted_text(q: u64, m: u32, seed: u64) -> Result<String, String> {
    let f = PrimeField::new(q).map_err(describe)?;
    if m < 2 {
        return Err("m must be at least 2".into());
    }
    let mut rng = Stream::new(seed, "demo-planted");
    let mut rand = |d: u32| {
        let n = ((d + 1) * (d + 1)) as usize;
        BiForm::new(f, d, d, (0..n).map(|_| rng.element(&f)).collect()).map_err(describe)
    };
    let g = rand(2)?.mul(&rand(m - 2)?).map_err(describe)?;
    let side = m as usize + 1;
    Ok(g.coeffs()
        .chunks(side)
        .map(|row| row.iter().map(|&c| f.signed(c).to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n"))
}

#[wasm_bindgen]
pub fn toy_replay() -> Result<String, JsError> {
    toy_report().map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn exchange(q: u64, m: u32, seed: u64) -> Result<String, JsError> {
    exchange_report(q, m, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn analyze_form(q: u64, coeffs: &str) -> Result<String, JsError> {
    analyze_report(q, coeffs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn planted_form(q: u64, m: u32, seed: u64) -> Result<String, JsError> {
    planted_text(q, m, seed).map_err(|e| JsError::new(&e))
}
