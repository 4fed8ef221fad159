//! Symbolic Wick ordering of `X_P` monomials over right LCM monoids.

use serde_json::json;

use crate::covariance::{join, require_lcm, require_semigroup_case, values_close, Bounds, RepAt};
use crate::error::{Error, Result};
use crate::ideal::IdealEngine;
use crate::monoid::{GroupElement, MonoidSpec};
use crate::rep::{Letter, OperatorWord};
use crate::scalar::Scalar;
use crate::verdict::CheckVerdict;

/// `t_r t_s^*`, or zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WickForm {
    Zero,
    Ordered { r: GroupElement, s: GroupElement },
}

impl WickForm {
    pub fn to_word(&self, spec: &MonoidSpec) -> Option<OperatorWord> {
        match self {
            WickForm::Zero => None,
            WickForm::Ordered { r, s } => {
                let mut letters = Vec::new();
                if !spec.is_identity(r) {
                    letters.push(Letter::plain(r.clone(), 0));
                }
                if !spec.is_identity(s) || letters.is_empty() {
                    letters.push(Letter::star(s.clone(), 0));
                }
                Some(OperatorWord::new(letters))
            }
        }
    }

    pub fn display(&self, spec: &MonoidSpec) -> String {
        match self.to_word(spec) {
            None => "0".into(),
            Some(w) => w.display(spec),
        }
    }
}

/// Merges neighbours of equal type and drops identity letters.
fn merge(spec: &MonoidSpec, letters: Vec<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for l in letters {
        if spec.is_identity(&l.elem) {
            continue;
        }
        match out.last_mut() {
            Some(prev) if prev.adjoint == l.adjoint => {
                // t_a t_b = t_{ab};  t_a^* t_b^* = t_{ba}^*
                prev.elem = if l.adjoint { spec.mul(&l.elem, &prev.elem) } else { spec.mul(&prev.elem, &l.elem) };
            }
            _ => out.push(l),
        }
    }
    out
}

/// Rewrites the leftmost `t_p^* t_q` until the word is `t_r t_s^*` or zero.
/// Returns the form and the number of rewrites.
pub fn wick_normal_form(engine: &IdealEngine, word: &OperatorWord, search_radius: usize) -> Result<(WickForm, usize)> {
    let spec = &engine.spec;
    let mut letters = merge(spec, word.letters.clone());
    let mut steps = 0;
    while let Some(i) = letters.windows(2).position(|w| w[0].adjoint && !w[1].adjoint) {
        let (p, q) = (letters[i].elem.clone(), letters[i + 1].elem.clone());
        let Some(w) = join(engine, &p, &q, search_radius)? else {
            return Ok((WickForm::Zero, steps + 1));
        };
        letters[i] = Letter::plain(spec.left_div(&p, &w), 0);
        letters[i + 1] = Letter::star(spec.left_div(&q, &w), 0);
        letters = merge(spec, letters);
        steps += 1;
        if steps > 10_000 {
            return Err(Error::resource("Wick rewriting", 10_000, "rewrite steps"));
        }
    }
    let e = spec.identity();
    let (mut r, mut s) = (e.clone(), e);
    for l in letters {
        if l.adjoint {
            s = l.elem;
        } else {
            r = l.elem;
        }
    }
    Ok((WickForm::Ordered { r, s }, steps))
}

/// Every word of at most `max_len` generator letters and adjoints: the normal
/// form exists and agrees with the word under `λ` on probes of level `b.l`.
pub fn check_wick<S: Scalar>(engine: &IdealEngine, lam_at: RepAt<S>, b: &Bounds, max_len: usize) -> Result<CheckVerdict> {
    const CHECK: &str = "wick";
    require_lcm(engine, b.l.max(2))?;
    let radius = b.l + max_len + 1;
    let lam = lam_at(radius)?;
    require_semigroup_case(&lam)?;
    let spec = lam.monoid().clone();
    let cols = lam.probe(b.l);
    let alphabet: Vec<Letter> = spec
        .generators
        .iter()
        .flat_map(|g| [Letter::plain(g.clone(), 0), Letter::star(g.clone(), 0)])
        .collect();
    let mut frontier = vec![OperatorWord::default()];
    let (mut words, mut zeros, mut rewrites) = (0usize, 0usize, 0usize);
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for w in &frontier {
            for l in &alphabet {
                let mut letters = w.letters.clone();
                letters.push(l.clone());
                next.push(OperatorWord::new(letters));
            }
        }
        for w in &next {
            words += 1;
            let (form, steps) = wick_normal_form(engine, w, 2 * max_len)?;
            rewrites += steps;
            let lhs = lam.eval(w, &cols)?.ok_or_else(|| Error::Structural("Wick check truncation too small".into()))?;
            let rhs = match form.to_word(&spec) {
                None => {
                    zeros += 1;
                    vec![Vec::new(); cols.len()]
                }
                Some(nf) => lam.eval(&nf, &cols)?.ok_or_else(|| Error::Structural("Wick check truncation too small".into()))?,
            };
            if !values_close(&lhs, &rhs, lam.tol()) {
                let wit = json!({
                    "kind": "wick",
                    "word": w.to_json(&spec),
                    "normal_form": form.to_word(&spec).map(|nf| nf.to_json(&spec)),
                    "radius": radius,
                    "probe": b.l,
                });
                return Ok(CheckVerdict::violation(CHECK, format!("{} and its normal form {} differ", w.display(&spec), form.display(&spec)), wit).with_rep(&lam.name));
            }
        }
        frontier = next;
    }
    Ok(CheckVerdict::pass(CHECK, format!("{words} words reduce to ordered monomials or zero and agree under λ"))
        .with_rep(&lam.name)
        .with_details(json!({"words": words, "zero": zeros, "rewrites": rewrites, "max_len": max_len})))
}
