//! Finite character actions on the Fock module, the crossed representation on
//! `ℱX ⊗ ℂ^{|H|}`, its conditional expectation and the core identities.
//!
//! Crossed basis vectors are block-major: index `j·dim + k` is base vector `k`
//! in the block of `j ∈ H`. `π̄(x)` acts on block `j` by `α_{j⁻¹}(x)` and `U_g`
//! moves block `j` to block `gj`.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cores::{alphabet, core_table, interior_core_table, Joint, Prune};
use crate::covariance::{check_theorem_a, Bounds};
use crate::error::{Error, Result};
use crate::fock::{LetterOp, TruncatedFock};
use crate::ideal::IdealEngine;
use crate::linalg::{Mat, SVec, Span};
use crate::monoid::{Ball, GroupElement, MonoidSpec};
use crate::rep::{flatten, Letter, LetterSource, OperatorWord, Rep, RepCache, Values};
use crate::scalar::{parse_literal, Scalar};
use crate::verdict::CheckVerdict;

/// Largest group accepted from a scenario.
pub const MAX_GROUP_ORDER: usize = 64;

/// A finite group `H` acting through characters `χ_h` of `P`.
#[derive(Clone, Debug)]
pub struct GaugeAction<S> {
    pub name: String,
    /// `table[h][k]` is the index of `hk`; index 0 is the identity.
    pub table: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    /// `chars[h][g]`: value of `χ_h` on generator `g`.
    pub chars: Vec<Vec<S>>,
}

fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

impl<S: Scalar> GaugeAction<S> {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn trivial(generators: usize) -> Self {
        GaugeAction {
            name: "trivial".into(),
            table: vec![vec![0]],
            inverse: vec![0],
            chars: vec![vec![S::one(); generators]],
        }
    }

    /// `ℤ/n` with `χ_h(g) = exp(2πi·h·k_g/n)`.
    pub fn cyclic(n: usize, exponents: &[u32]) -> Result<Self> {
        if n == 0 {
            return Err(structural("cyclic(0) is not a group"));
        }
        let table = (0..n).map(|h| (0..n).map(|k| (h + k) % n).collect()).collect();
        let mut chars = Vec::with_capacity(n);
        for h in 0..n {
            let row = exponents
                .iter()
                .map(|&k| {
                    let e = ((h as u64 * k as u64) % n as u64) as u32;
                    S::root_of_unity(n as u32, e).ok_or_else(|| {
                        structural(format!("roots of unity of order {n} are not exact in the {} backend; use the float backend", S::NAME))
                    })
                })
                .collect::<Result<Vec<S>>>()?;
            chars.push(row);
        }
        Self::from_table(format!("cyclic({n})"), table, chars, 0.0)
    }

    /// Validates the group table and that `h ↦ χ_h` is a homomorphism into unit scalars.
    pub fn from_table(name: String, table: Vec<Vec<usize>>, chars: Vec<Vec<S>>, tol: f64) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(structural("group table must be square with entries below its order"));
        }
        if (0..n).any(|k| table[0][k] != k || table[k][0] != k) {
            return Err(structural("index 0 of the group table must be the identity"));
        }
        let mut inverse = vec![usize::MAX; n];
        for h in 0..n {
            let mut seen = vec![false; n];
            for &x in &table[h] {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(structural(format!("row {h} of the group table is not a permutation")));
                }
            }
            inverse[h] = table[h].iter().position(|&x| x == 0).expect("permutation row hits the identity");
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(structural(format!("group table is not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        if chars.len() != n {
            return Err(structural(format!("{} character rows for a group of order {n}", chars.len())));
        }
        let gens = chars[0].len();
        for (h, row) in chars.iter().enumerate() {
            if row.len() != gens {
                return Err(structural(format!("character row {h} has {} entries, expected {gens}", row.len())));
            }
            for (g, c) in row.iter().enumerate() {
                if !c.mul(&c.conj()).sub(&S::one()).is_zero_tol(tol) {
                    return Err(structural(format!("χ_{h} on generator {g} is not a unit scalar")));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for (g, lhs) in chars[table[a][b]].iter().enumerate() {
                    if !lhs.sub(&chars[a][g].mul(&chars[b][g])).is_zero_tol(tol) {
                        return Err(structural(format!("χ is not multiplicative in H at ({a}, {b}) on generator {g}")));
                    }
                }
            }
        }
        Ok(GaugeAction { name, table, inverse, chars })
    }

    /// `{"group": "cyclic(n)" | "trivial" | {"table": [[..]]}, "exponents": [..] | "characters": [[..]]}`.
    pub fn from_json(v: &Value, generators: usize, path: &str, tol: f64) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::schema(path, "action must be an object"))?;
        let gpath = format!("{path}.group");
        let (name, table) = match obj.get("group") {
            Some(Value::String(s)) if s == "trivial" => return Ok(Self::trivial(generators)),
            Some(Value::String(s)) => {
                let n: usize = s
                    .strip_prefix("cyclic(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|n| n.trim().parse().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| Error::schema(&gpath, format!("unknown group {s:?}")))?;
                if n > MAX_GROUP_ORDER {
                    return Err(Error::resource("group order", MAX_GROUP_ORDER, gpath));
                }
                if let Some(e) = obj.get("exponents") {
                    let epath = format!("{path}.exponents");
                    let ex = e
                        .as_array()
                        .and_then(|a| a.iter().map(|x| x.as_u64().map(|x| x as u32)).collect::<Option<Vec<u32>>>())
                        .ok_or_else(|| Error::schema(&epath, "expected non-negative integers"))?;
                    if ex.len() != generators {
                        return Err(Error::schema(epath, format!("expected {generators} entries")));
                    }
                    return Self::cyclic(n, &ex);
                }
                (s.clone(), (0..n).map(|h| (0..n).map(|k| (h + k) % n).collect()).collect())
            }
            Some(Value::Object(t)) => {
                let table = t
                    .get("table")
                    .and_then(Value::as_array)
                    .and_then(|rows| {
                        rows.iter()
                            .map(|r| r.as_array().and_then(|r| r.iter().map(|x| x.as_u64().map(|x| x as usize)).collect::<Option<Vec<_>>>()))
                            .collect::<Option<Vec<_>>>()
                    })
                    .ok_or_else(|| Error::schema(format!("{gpath}.table"), "expected rows of element indices"))?;
                if table.len() > MAX_GROUP_ORDER {
                    return Err(Error::resource("group order", MAX_GROUP_ORDER, format!("{gpath}.table")));
                }
                ("table".to_string(), table)
            }
            _ => return Err(Error::schema(gpath, "expected \"trivial\", \"cyclic(n)\" or {\"table\": ..}")),
        };
        let cpath = format!("{path}.characters");
        let rows = obj.get("characters").and_then(Value::as_array).ok_or_else(|| Error::schema(&cpath, "expected one row per group element"))?;
        let chars = rows
            .iter()
            .enumerate()
            .map(|(h, r)| {
                let r = r.as_array().ok_or_else(|| Error::schema(format!("{cpath}[{h}]"), "expected an array"))?;
                if r.len() != generators {
                    return Err(Error::schema(format!("{cpath}[{h}]"), format!("expected {generators} entries")));
                }
                r.iter()
                    .enumerate()
                    .map(|(g, x)| S::from_literal(&parse_literal(x, &format!("{cpath}[{h}][{g}]"))?))
                    .collect()
            })
            .collect::<Result<Vec<Vec<S>>>>()?;
        Self::from_table(name, table, chars, tol)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "group": self.name,
            "order": self.order(),
            "characters": self.chars.iter().map(|r| r.iter().map(Scalar::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// `χ_h` on every ball element, checked against every ball edge `x·g`.
    pub fn node_characters(&self, monoid: &MonoidSpec, ball: &Ball, tol: f64) -> Result<Vec<Vec<S>>> {
        let mut out = Vec::with_capacity(self.order());
        for (h, gen_chars) in self.chars.iter().enumerate() {
            let vals: Vec<S> = (0..ball.len())
                .map(|i| ball.factorization(i).iter().fold(S::one(), |acc, &g| acc.mul(&gen_chars[g])))
                .collect();
            for i in 0..ball.len() {
                for (g, gen) in monoid.generators.iter().enumerate() {
                    let Some(j) = ball.index_of(&monoid.mul(ball.element(i), gen)) else { continue };
                    if !vals[j].sub(&vals[i].mul(&gen_chars[g])).is_zero_tol(tol) {
                        return Err(structural(format!(
                            "χ_{h} does not respect the relations of P: the values at {} and {}·{} differ",
                            ball.element(j),
                            ball.element(i),
                            gen
                        )));
                    }
                }
            }
            out.push(vals);
        }
        Ok(out)
    }
}

/// An extra letter `π̄(λ_p(ξ_i))U_h` placed in the `e`-fiber; used to corrupt fibers on purpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedLetter {
    pub elem: GroupElement,
    pub basis: usize,
    pub h: usize,
}

/// Letter `i = basis·|H| + g` at `p` is `π̄(λ_p(ξ_basis)) U_g`.
#[derive(Debug)]
struct CrossedSource<S> {
    base: Arc<Rep<S>>,
    action: Arc<GaugeAction<S>>,
    chi: Vec<Vec<S>>,
    extra: Vec<CrossedLetter>,
}

impl<S: Scalar> LetterSource<S> for CrossedSource<S> {
    fn build(&self, p: &GroupElement, i: usize, adjoint: bool) -> Result<LetterOp<S>> {
        let n = self.action.order();
        let plain = self.base.letter_count(p) * n;
        let (p, basis, g) = if i >= plain {
            let x = &self.extra[i - plain];
            (x.elem.clone(), x.basis, x.h)
        } else {
            (p.clone(), i / n, i % n)
        };
        let op = self.base.op(&p, basis, adjoint)?;
        let pi = self
            .base
            .fibers
            .ball
            .index_of(&p)
            .ok_or_else(|| structural(format!("{p} lies outside the crossed truncation")))?;
        let dim = self.base.dim();
        let (table, inv) = (&self.action.table, &self.action.inverse);
        let mut trip = Vec::new();
        let mut escapes = vec![false; n * dim];
        for j in 0..n {
            // U_g then π̄ on block gj, or π̄(·)^* on block j then U_{g⁻¹}.
            let (blk, s) = if adjoint {
                (table[inv[g]][j], self.chi[inv[j]][pi].conj())
            } else {
                let blk = table[g][j];
                (blk, self.chi[inv[blk]][pi].clone())
            };
            for k in 0..dim {
                let c = j * dim + k;
                escapes[c] = op.escapes[k];
                trip.extend(op.mat.column(k).iter().map(|(r, v)| (blk * dim + r, c, s.mul(v))));
            }
        }
        Ok(LetterOp {
            mat: Mat::from_triplets(n * dim, n * dim, trip),
            escapes,
        })
    }

    fn extra_letters(&self, p: &GroupElement) -> usize {
        if self.base.monoid().is_identity(p) {
            self.extra.len()
        } else {
            0
        }
    }
}

fn fock_of<S: Scalar>(rep: &Rep<S>) -> Result<&Arc<TruncatedFock<S>>> {
    rep.fock.as_ref().ok_or_else(|| structural("crossed products are built over the Fock representation"))
}

/// The identity representation `ι^⋊` of the crossed product system on `ℱX ⊗ ℂ^{|H|}`.
pub fn crossed_rep<S: Scalar>(name: &str, base: Arc<Rep<S>>, action: Arc<GaugeAction<S>>, extra: Vec<CrossedLetter>) -> Result<Rep<S>> {
    fock_of(&base)?;
    if base.copies != 1 {
        return Err(structural("the base of a crossed product must be a base representation"));
    }
    if action.chars[0].len() != base.monoid().generators.len() {
        return Err(structural("the action has characters for a different number of generators"));
    }
    let chi = action.node_characters(base.monoid(), &base.fibers.ball, base.tol())?;
    for x in &extra {
        if x.basis >= base.letter_count(&x.elem) || x.h >= action.order() {
            return Err(structural(format!("extra letter {}[{}]·U_{} does not exist", x.elem, x.basis, x.h)));
        }
    }
    let n = action.order();
    let levels = (0..n * base.dim()).map(|c| base.level(c % base.dim())).collect();
    let src = CrossedSource { base: base.clone(), action, chi, extra };
    Ok(Rep::new(name, "crossed", base.radius, base.fibers.clone(), n, levels, Arc::new(src)))
}

/// A Fock representation, a character action and the crossed representation over them.
pub struct CrossedSystem<S> {
    pub name: String,
    pub base: Arc<RepCache<S>>,
    pub action: Arc<GaugeAction<S>>,
    pub extra: Vec<CrossedLetter>,
    cache: RepCache<S>,
}

impl<S: Scalar> std::fmt::Debug for CrossedSystem<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CrossedSystem").field("name", &self.name).field("order", &self.action.order()).finish()
    }
}

impl<S: Scalar> CrossedSystem<S> {
    pub fn new(name: &str, base: Arc<RepCache<S>>, action: GaugeAction<S>, extra: Vec<CrossedLetter>) -> Self {
        let action = Arc::new(action);
        let (b, a, x, nm) = (base.clone(), action.clone(), extra.clone(), name.to_string());
        let cache = RepCache::new(move |r| crossed_rep(&nm, b.get(r)?, a.clone(), x.clone()));
        CrossedSystem {
            name: name.to_string(),
            base,
            action,
            extra,
            cache,
        }
    }

    pub fn lam(&self, radius: usize) -> Result<Arc<Rep<S>>> {
        self.base.get(radius)
    }

    pub fn iota(&self, radius: usize) -> Result<Arc<Rep<S>>> {
        self.cache.get(radius)
    }

    fn node_chars(&self, lam: &Rep<S>) -> Result<Vec<Vec<S>>> {
        self.action.node_characters(lam.monoid(), &lam.fibers.ball, lam.tol())
    }
}

// ---------------------------------------------------------------------------
// Block matrices

/// `α_h(x)`: entry `(r, k)` scaled by `χ_h(node r)·conj χ_h(node k)`.
pub fn alpha_matrix<S: Scalar>(chi_h: &[S], fock: &TruncatedFock<S>, x: &Mat<S>) -> Mat<S> {
    let cols = x
        .columns()
        .iter()
        .enumerate()
        .map(|(k, col)| {
            let ck = chi_h[fock.node(k)].conj();
            col.iter().map(|(r, v)| (*r, v.mul(&chi_h[fock.node(*r)]).mul(&ck))).collect()
        })
        .collect();
    Mat::from_columns(x.rows(), cols)
}

/// `π̄(x) = diag(α_{j⁻¹}(x))_j`.
pub fn pi_bar<S: Scalar>(action: &GaugeAction<S>, chi: &[Vec<S>], fock: &TruncatedFock<S>, x: &Mat<S>) -> Mat<S> {
    let (n, dim) = (action.order(), x.rows());
    let mut cols = Vec::with_capacity(n * dim);
    for j in 0..n {
        let a = alpha_matrix(&chi[action.inverse[j]], fock, x);
        cols.extend(a.columns().iter().map(|c| c.iter().map(|(r, v)| (j * dim + r, v.clone())).collect::<SVec<S>>()));
    }
    Mat::from_columns(n * dim, cols)
}

/// Left translation `U_h`: block `j` to block `hj`.
pub fn translation<S: Scalar>(action: &GaugeAction<S>, h: usize, dim: usize) -> Mat<S> {
    let n = action.order();
    Mat::from_triplets(n * dim, n * dim, (0..n).flat_map(|j| (0..dim).map(move |k| (action.table[h][j] * dim + k, j * dim + k, S::one()))))
}

/// `E_H`: the `(e, e)` block.
pub fn conditional_expectation<S: Scalar>(c: &Mat<S>, dim: usize) -> Mat<S> {
    let cols = (0..dim).map(|k| c.column(k).iter().filter(|(r, _)| *r < dim).cloned().collect()).collect();
    Mat::from_columns(dim, cols)
}

// ---------------------------------------------------------------------------
// Checks

fn span_of<S: Scalar>(rep: &Rep<S>, words: impl IntoIterator<Item = OperatorWord>, cols: &[usize]) -> Result<Option<Span<S>>> {
    let mut span = Span::new(rep.dim() * cols.len(), rep.num);
    for w in words {
        match rep.eval(&w, cols)? {
            Some(v) => {
                span.insert(&flatten(&v, rep.dim()));
            }
            None => return Ok(None),
        }
    }
    Ok(Some(span))
}

/// Outcome of one crossed fiber inclusion: `Some(true)` if it holds.
pub fn crossed_axiom_case<S: Scalar>(
    rep: &Rep<S>,
    adjoint: bool,
    p: &GroupElement,
    q: &GroupElement,
    a: usize,
    b: usize,
    cols: &[usize],
) -> Result<Option<bool>> {
    let spec = rep.monoid();
    let pq = spec.mul(p, q);
    let (word, target) = if adjoint {
        (OperatorWord::new(vec![Letter::star(p.clone(), a), Letter::plain(pq.clone(), b)]), q.clone())
    } else {
        (OperatorWord::new(vec![Letter::plain(p.clone(), a), Letter::plain(q.clone(), b)]), pq)
    };
    let span = span_of(rep, (0..rep.letter_count(&target)).map(|c| OperatorWord::new(vec![Letter::plain(target.clone(), c)])), cols)?;
    let (Some(span), Some(v)) = (span, rep.eval(&word, cols)?) else { return Ok(None) };
    Ok(Some(span.contains(&flatten(&v, rep.dim()))))
}

/// Span-level `X_p·X_q ⊆ X_{pq}` and `X_p^*·X_{pq} ⊆ X_q` for the crossed fibers,
/// `|p| + |q| ≤ l`, on crossed basis vectors of level at most `l`.
pub fn check_crossed_axioms<S: Scalar>(cs: &CrossedSystem<S>, l: usize) -> Result<CheckVerdict> {
    const CHECK: &str = "crossed-axioms";
    let radius = 2 * l + 1;
    let rep = cs.iota(radius)?;
    let spec = rep.monoid().clone();
    let ball = crate::monoid::enumerate_ball(&spec, l)?;
    let cols = rep.probe(l);
    let mut spans: HashMap<GroupElement, Span<S>> = HashMap::new();
    let mut fiber = |g: &GroupElement, rep: &Rep<S>| -> Result<Option<Span<S>>> {
        if let Some(s) = spans.get(g) {
            return Ok(Some(s.clone()));
        }
        let s = span_of(rep, (0..rep.letter_count(g)).map(|c| OperatorWord::new(vec![Letter::plain(g.clone(), c)])), &cols)?;
        if let Some(s) = &s {
            spans.insert(g.clone(), s.clone());
        }
        Ok(s)
    };
    let mut checked = 0usize;
    for pi in 0..ball.len() {
        for qi in 0..ball.len() {
            if ball.level(pi) + ball.level(qi) > l {
                continue;
            }
            let (p, q) = (ball.element(pi), ball.element(qi));
            let pq = spec.mul(p, q);
            for adjoint in [false, true] {
                let target = if adjoint { q.clone() } else { pq.clone() };
                let right = if adjoint { pq.clone() } else { q.clone() };
                let Some(span) = fiber(&target, &rep)? else {
                    return Ok(CheckVerdict::inconclusive(CHECK, format!("fiber at {target} leaves the truncation")).with_rep(&rep.name));
                };
                for a in 0..rep.letter_count(p) {
                    for b in 0..rep.letter_count(&right) {
                        let word = if adjoint {
                            OperatorWord::new(vec![Letter::star(p.clone(), a), Letter::plain(right.clone(), b)])
                        } else {
                            OperatorWord::new(vec![Letter::plain(p.clone(), a), Letter::plain(right.clone(), b)])
                        };
                        let Some(v) = rep.eval(&word, &cols)? else {
                            return Ok(CheckVerdict::inconclusive(CHECK, format!("{} leaves the truncation", word.display(&spec))).with_rep(&rep.name));
                        };
                        checked += 1;
                        if !span.contains(&flatten(&v, rep.dim())) {
                            let kind = if adjoint { "crossed-adjoint" } else { "crossed-product" };
                            let wit = json!({
                                "kind": kind,
                                "p": spec.element_to_json(p),
                                "q": spec.element_to_json(q),
                                "left": a,
                                "right": b,
                                "word": word.to_json(&spec),
                                "radius": radius,
                                "probe": l,
                            });
                            let what = if adjoint { format!("X_{p}^*·X_{pq} ⊄ X_{q}") } else { format!("X_{p}·X_{q} ⊄ X_{pq}") };
                            return Ok(CheckVerdict::violation(CHECK, format!("crossed fibers: {what} ({})", word.display(&spec)), wit)
                                .with_rep(&rep.name)
                                .with_stability(vec![radius]));
                        }
                    }
                }
            }
        }
    }
    Ok(CheckVerdict::pass(CHECK, format!("{checked} crossed fiber products stay in their fibers"))
        .with_rep(&rep.name)
        .with_details(json!({"products": checked, "order": cs.action.order(), "radius": radius})))
}

/// Lifts base probe images of `λ(b)` to crossed probe images of `π̄(λ(b))U_h`
/// for a neutral `b`, where `π̄(λ(b))` is block-diagonal.
fn lift<S: Scalar>(vals: &Values<S>, base_cols: &[usize], cross_cols: &[usize], dim: usize, action: &GaugeAction<S>, h: usize) -> Values<S> {
    let pos: HashMap<usize, usize> = base_cols.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    cross_cols
        .iter()
        .map(|&c| {
            let (j, k) = (c / dim, c % dim);
            let blk = action.table[h][j];
            vals[pos[&k]].iter().map(|(r, v)| (blk * dim + r, v.clone())).collect()
        })
        .collect()
}

/// The `(e, e)` block of crossed probe images, as base probe images.
fn expectation_values<S: Scalar>(vals: &Values<S>, cross_cols: &[usize], dim: usize) -> Values<S> {
    cross_cols
        .iter()
        .zip(vals)
        .filter(|(&c, _)| c < dim)
        .map(|(_, v)| v.iter().filter(|(r, _)| *r < dim).cloned().collect())
        .collect()
}

/// For every ideal reached by neutral words of at most `b.w` pairs: the span of
/// `ι^⋊` core words equals `{π̄(k)U_h : k ∈ K_{x,λ}, h ∈ H}`, and `E_H` maps the
/// former into `K_{x,λ}`.
pub fn check_core_identity<S: Scalar>(engine: &IdealEngine, cs: &CrossedSystem<S>, b: &Bounds) -> Result<CheckVerdict> {
    const CHECK: &str = "crossed-core-identity";
    let radius = b.word_radius(b.l);
    let (lam, iota) = (cs.lam(radius)?, cs.iota(radius)?);
    let cfg = b.core_config(Prune::Span);
    let lt = core_table(engine, &Joint::single(&lam, b.l), cfg)?;
    let it = core_table(engine, &Joint::single(&iota, b.l), cfg)?;
    for (t, r) in [(&lt, &lam), (&it, &iota)] {
        if let Some(w) = &t.escape {
            return Ok(CheckVerdict::inconclusive(CHECK, format!("{} leaves the truncation at radius {radius}", w.display(r.monoid()))).with_rep(&r.name));
        }
    }
    let (dim, cdim) = (lam.dim(), iota.dim());
    let (bcols, ccols) = (lam.probe(b.l), iota.probe(b.l));
    let spec = lam.monoid();
    let mut ideals: Vec<_> = lt.entries.iter().map(|e| e.ideal.clone()).collect();
    for e in &it.entries {
        if lt.entry(&e.ideal).is_none() {
            ideals.push(e.ideal.clone());
        }
    }
    let mut rows = Vec::new();
    for x in &ideals {
        let mut lhs = Span::new(cdim * ccols.len(), iota.num);
        let mut rhs = Span::new(cdim * ccols.len(), iota.num);
        let mut base = Span::new(dim * bcols.len(), lam.num);
        if let Some(e) = lt.entry(x) {
            for &i in &e.basis {
                base.insert(&flatten(&e.values[i][0], dim));
                for h in 0..cs.action.order() {
                    rhs.insert(&flatten(&lift(&e.values[i][0], &bcols, &ccols, dim, &cs.action, h), cdim));
                }
            }
        }
        let mut outside_e = None;
        if let Some(e) = it.entry(x) {
            for &i in &e.basis {
                lhs.insert(&flatten(&e.values[i][0], cdim));
                let ev = expectation_values(&e.values[i][0], &ccols, dim);
                if outside_e.is_none() && !base.contains(&flatten(&ev, dim)) {
                    outside_e = Some(e.words[i].clone());
                }
            }
        }
        let (rl, rr) = (lhs.rank(), rhs.rank());
        let mut joint = lhs.clone();
        for v in rhs.basis() {
            joint.insert(v);
        }
        let rj = joint.rank();
        rows.push(json!({"ideal": engine.ideal_to_json(x), "iota_rank": rl, "crossed_rank": rr, "joint_rank": rj, "lambda_rank": base.rank()}));
        if rl != rr || rj != rl || outside_e.is_some() {
            let reason = match &outside_e {
                Some(w) => format!("E_H({}) is not in the λ-core", w.display(spec)),
                None => format!("core ranks differ: ι^⋊ {rl}, crossed λ-core {rr}, together {rj}"),
            };
            let wit = json!({
                "kind": "core-identity",
                "ideal": engine.ideal_to_json(x),
                "iota_rank": rl,
                "crossed_rank": rr,
                "joint_rank": rj,
                "word": outside_e.map(|w| w.to_json(spec)),
                "radius": radius,
                "probe": b.l,
            });
            return Ok(CheckVerdict::violation(CHECK, reason, wit).with_rep(&iota.name).with_stability(vec![radius]));
        }
    }
    Ok(CheckVerdict::pass(CHECK, format!("core spans agree on {} ideals", ideals.len()))
        .with_rep(&iota.name)
        .with_details(json!({"radius": radius, "W": b.w, "ideals": rows})))
}

/// `α_h(λ_p(X_p)) = λ_p(X_p)` for `p` in the letter ball and `α_h(K_{x,λ}) = K_{x,λ}`.
pub fn check_gauge_invariance<S: Scalar>(engine: &IdealEngine, cs: &CrossedSystem<S>, b: &Bounds) -> Result<CheckVerdict> {
    const CHECK: &str = "crossed-gauge";
    let radius = b.word_radius(b.l);
    let lam = cs.lam(radius)?;
    let fock = fock_of(&lam)?.clone();
    let chi = cs.node_chars(&lam)?;
    let spec = lam.monoid();
    let n = cs.action.order();
    let violation = |reason: String, wit: Value| Ok(CheckVerdict::violation(CHECK, reason, wit).with_rep(&lam.name).with_stability(vec![radius]));

    for (p, _) in alphabet(&lam, b.letter_radius)?.into_iter().filter(|(_, i)| *i == 0) {
        let mats: Vec<Mat<S>> = (0..lam.letter_count(&p)).map(|i| lam.matrix(&Letter::plain(p.clone(), i))).collect::<Result<_>>()?;
        let mut span = Span::new(dim_sq(&mats), lam.num);
        for m in &mats {
            span.insert(&m.vectorize());
        }
        for (h, ch) in chi.iter().enumerate() {
            for (i, m) in mats.iter().enumerate() {
                if !span.contains(&alpha_matrix(ch, &fock, m).vectorize()) {
                    return violation(
                        format!("α_{h} moves λ_{p}(ξ_{i}) out of λ_{p}(X_{p})"),
                        json!({"kind": "gauge-fiber", "h": h, "p": spec.element_to_json(&p), "basis": i, "radius": radius}),
                    );
                }
            }
        }
    }

    let (table, joint) = interior_core_table(engine, Joint::single(&lam, b.l), b.core_config(Prune::Span))?;
    if let Some(w) = &table.escape {
        return Ok(CheckVerdict::inconclusive(CHECK, format!("interior empty: {} leaves the truncation at radius {radius}", w.display(spec))).with_rep(&lam.name));
    }
    let cols = joint.cols.into_iter().next().unwrap_or_default();
    for ent in &table.entries {
        let mut span = Span::new(lam.dim() * cols.len(), lam.num);
        for &i in &ent.basis {
            span.insert(&flatten(&ent.values[i][0], lam.dim()));
        }
        for (h, ch) in chi.iter().enumerate() {
            for &i in &ent.basis {
                let moved: Values<S> = cols
                    .iter()
                    .zip(&ent.values[i][0])
                    .map(|(&k, v)| {
                        let ck = ch[fock.node(k)].conj();
                        v.iter().map(|(r, x)| (*r, x.mul(&ch[fock.node(*r)]).mul(&ck))).collect()
                    })
                    .collect();
                if !span.contains(&flatten(&moved, lam.dim())) {
                    return violation(
                        format!("α_{h} moves {} out of its core", ent.words[i].display(spec)),
                        json!({"kind": "gauge-core", "h": h, "word": ent.words[i].to_json(spec), "ideal": engine.ideal_to_json(&ent.ideal), "radius": radius}),
                    );
                }
            }
        }
    }
    Ok(CheckVerdict::pass(CHECK, format!("fibers and {} cores are invariant under all {n} group elements", table.entries.len()))
        .with_rep(&lam.name)
        .with_details(json!({"radius": radius, "order": n})))
}

fn dim_sq<S: Scalar>(mats: &[Mat<S>]) -> usize {
    mats.first().map_or(0, |m| m.rows() * m.cols())
}

/// Random element of the base algebra: a few products of at most two letters
/// with small integer coefficients.
fn sample_base<S: Scalar>(rng: &mut ChaCha8Rng, letters: &[Mat<S>], dim: usize, tol: f64) -> Mat<S> {
    let mut x = Mat::zeros(dim, dim);
    for _ in 0..rng.gen_range(1..=3) {
        let c = S::from_i64(rng.gen_range(-2..=2));
        let a = &letters[rng.gen_range(0..letters.len())];
        let term = if rng.gen_bool(0.5) { a.clone() } else { a.mul_tol(&letters[rng.gen_range(0..letters.len())], tol) };
        x = x.add_scaled(&c, &term);
    }
    x
}

/// Seeded samples `c = Σ_h π̄(x_h)U_h` at radius `b.l`: `E_H(c) = x_e`,
/// `E_H(c^*c) = 0` only for `c = 0`, the bimodule property, `E_H(π̄(a)U_h) = 0`
/// for `h ≠ e`, and `U_h π̄(x) U_h^* = π̄(α_h(x))`.
pub fn check_expectation<S: Scalar>(cs: &CrossedSystem<S>, b: &Bounds, samples: usize) -> Result<CheckVerdict> {
    const CHECK: &str = "crossed-expectation";
    let lam = cs.lam(b.l)?;
    let fock = fock_of(&lam)?.clone();
    let chi = cs.node_chars(&lam)?;
    let (n, dim, tol) = (cs.action.order(), lam.dim(), lam.tol());
    let act = &*cs.action;
    let mut letters = Vec::new();
    for (p, i) in alphabet(&lam, b.letter_radius.max(1))? {
        letters.push(lam.matrix(&Letter::plain(p.clone(), i))?);
        letters.push(lam.matrix(&Letter::star(p, i))?);
    }
    let us: Vec<Mat<S>> = (0..n).map(|h| translation(act, h, dim)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    let mut nonzero = 0usize;
    for s in 0..samples {
        let fail = |property: &str| {
            let wit = json!({"kind": "crossed-expectation", "sample": s, "samples": samples, "seed": b.seed, "property": property, "radius": b.l});
            Ok(CheckVerdict::violation(CHECK, format!("sample {s}: {property} fails"), wit).with_rep(&cs.name))
        };
        let xs: Vec<Mat<S>> = (0..n).map(|_| sample_base(&mut rng, &letters, dim, tol)).collect();
        let (a, bb) = (sample_base(&mut rng, &letters, dim, tol), sample_base(&mut rng, &letters, dim, tol));
        let mut c = Mat::zeros(n * dim, n * dim);
        for (h, x) in xs.iter().enumerate() {
            c = c.add(&pi_bar(act, &chi, &fock, x).mul_tol(&us[h], tol));
        }
        if !conditional_expectation(&c, dim).approx_eq(&xs[0], tol) {
            return fail("E_H(Σ π̄(x_h)U_h) = x_e");
        }
        let cc = conditional_expectation(&c.adjoint().mul_tol(&c, tol), dim);
        if c.is_zero(tol) != cc.is_zero(tol) {
            return fail("faithfulness of E_H");
        }
        nonzero += usize::from(!c.is_zero(tol));
        let (pa, pb) = (pi_bar(act, &chi, &fock, &a), pi_bar(act, &chi, &fock, &bb));
        let lhs = conditional_expectation(&pa.mul_tol(&c, tol).mul_tol(&pb, tol), dim);
        let rhs = a.mul_tol(&conditional_expectation(&c, dim), tol).mul_tol(&bb, tol);
        if !lhs.approx_eq(&rhs, tol) {
            return fail("E_H(π̄(a) c π̄(b)) = a E_H(c) b");
        }
        for u in &us[1..] {
            if !conditional_expectation(&pa.mul_tol(u, tol), dim).is_zero(tol) {
                return fail("E_H(π̄(a)U_h) = 0 for h ≠ e");
            }
        }
        for h in 0..n {
            let conj = us[h].mul_tol(&pa, tol).mul_tol(&us[h].adjoint(), tol);
            if !conj.approx_eq(&pi_bar(act, &chi, &fock, &alpha_matrix(&chi[h], &fock, &a)), tol) {
                return fail("U_h π̄(x) U_h^* = π̄(α_h(x))");
            }
        }
    }
    Ok(CheckVerdict::pass(CHECK, format!("E_H is faithful and A-bilinear on {samples} seeded samples ({nonzero} nonzero)"))
        .with_rep(&cs.name)
        .with_details(json!({"samples": samples, "nonzero": nonzero, "seed": b.seed, "radius": b.l})))
}

/// Theorem A conditions for `ι^⋊` over the unchanged ideal lattice.
pub fn check_crossed_theorem_a<S: Scalar>(engine: &IdealEngine, cs: &CrossedSystem<S>, b: &Bounds) -> Result<CheckVerdict> {
    let at = |r: usize| cs.iota(r);
    let mut v = check_theorem_a(engine, &at, b, false)?;
    v.check = "crossed-theorem-a".into();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ProductSystemSpec;
    use crate::monoid::GroupElement::Int;
    use crate::scalar::{GaussRational, Numerics};
    use crate::verdict::Status;

    type Q = GaussRational;

    #[test]
    fn huge_groups_are_refused_before_allocating() {
        let v = json!({"group": "cyclic( 21222424)", "exponents": [2, 0]});
        assert!(matches!(GaugeAction::<Q>::from_json(&v, 2, "action", 1e-9), Err(Error::Resource { .. })));
    }

    fn system(m: &MonoidSpec, action: GaugeAction<Q>, extra: Vec<CrossedLetter>) -> CrossedSystem<Q> {
        let base = Arc::new(RepCache::fock("lambda", Arc::new(ProductSystemSpec::x_p(m)), m.clone(), Numerics::default()));
        CrossedSystem::new("iota", base, action, extra)
    }

    fn naturals() -> MonoidSpec {
        MonoidSpec::numerical(&[1]).unwrap()
    }

    #[test]
    fn sign_action_unrolled() {
        let m = naturals();
        let cs = system(&m, GaugeAction::cyclic(2, &[1]).unwrap(), vec![]);
        let (lam, iota) = (cs.lam(4).unwrap(), cs.iota(4).unwrap());
        let v = lam.matrix(&Letter::plain(Int(1), 0)).unwrap();
        let dim = lam.dim();
        // π̄(V₁) = diag(V₁, −V₁) and U swaps the blocks.
        let fock = lam.fock.clone().unwrap();
        let chi = cs.node_chars(&lam).unwrap();
        let pv = pi_bar(&cs.action, &chi, &fock, &v);
        for k in 0..dim {
            for r in 0..dim {
                assert_eq!(pv.get(r, k), v.get(r, k));
                assert_eq!(pv.get(dim + r, dim + k), v.get(r, k).neg());
                assert!(pv.get(dim + r, k).is_exact_zero());
            }
        }
        let u = translation(&cs.action, 1, dim);
        assert_eq!(u.get(dim, 0), Q::one());
        let conj = u.mul(&pv).mul(&u.adjoint());
        assert!(conj.approx_eq(&pv.scale(&Q::from_i64(-1)), 0.0));
        // Letter 0·2 + 1 of ι at 1 is π̄(V₁)U.
        assert!(iota.matrix(&Letter::plain(Int(1), 1)).unwrap().approx_eq(&pv.mul(&u), 0.0));
    }

    #[test]
    fn trivial_group_is_the_base() {
        let m = naturals();
        let cs = system(&m, GaugeAction::trivial(1), vec![]);
        let (lam, iota) = (cs.lam(5).unwrap(), cs.iota(5).unwrap());
        for p in [Int(0), Int(1), Int(2)] {
            for adj in [false, true] {
                let l = Letter { elem: p.clone(), basis: 0, adjoint: adj };
                assert!(lam.matrix(&l).unwrap().approx_eq(&iota.matrix(&l).unwrap(), 0.0));
            }
        }
    }

    #[test]
    fn relations_must_be_respected() {
        let m = MonoidSpec::numerical(&[2, 3]).unwrap();
        let cs = system(&m, GaugeAction::cyclic(2, &[1, 0]).unwrap(), vec![]);
        assert!(matches!(cs.iota(6), Err(Error::Structural(_))));
        let cs = system(&m, GaugeAction::cyclic(2, &[0, 0]).unwrap(), vec![]);
        assert!(cs.iota(6).is_ok());
    }

    #[test]
    fn bad_tables_are_rejected() {
        let bad = GaugeAction::<Q>::from_table("t".into(), vec![vec![0, 1], vec![1, 1]], vec![vec![Q::one()]; 2], 0.0);
        assert!(bad.is_err());
        let not_hom = GaugeAction::<Q>::from_table("t".into(), vec![vec![0, 1], vec![1, 0]], vec![vec![Q::one()], vec![Q::i()]], 0.0);
        assert!(not_hom.is_err());
        assert!(GaugeAction::<Q>::cyclic(3, &[1]).is_err());
        assert!(GaugeAction::<Q>::cyclic(4, &[1]).is_ok());
    }

    #[test]
    fn sign_action_checks_pass() {
        let m = naturals();
        let eng = IdealEngine::new(&m, 12).unwrap();
        let cs = system(&m, GaugeAction::cyclic(2, &[1]).unwrap(), vec![]);
        let b = Bounds { l: 4, l_big: 5, step: 2, w: 2, ..Bounds::default() };
        assert_eq!(check_crossed_axioms(&cs, 4).unwrap().status, Status::Pass);
        let v = check_core_identity(&eng, &cs, &b).unwrap();
        assert_eq!(v.status, Status::Pass, "{}", v.reason);
        // |H| times the λ-core dimension, for every ideal.
        for r in v.details["ideals"].as_array().unwrap() {
            assert_eq!(r["iota_rank"].as_u64().unwrap(), 2 * r["lambda_rank"].as_u64().unwrap());
        }
        assert_eq!(check_expectation(&cs, &b, 20).unwrap().status, Status::Pass);
        assert_eq!(check_gauge_invariance(&eng, &cs, &b).unwrap().status, Status::Pass);
        let v = check_crossed_theorem_a(&eng, &cs, &b).unwrap();
        assert_eq!(v.status, Status::Pass, "{}", v.reason);
    }

    #[test]
    fn corrupted_unit_fiber_fails() {
        let m = naturals();
        let extra = vec![CrossedLetter { elem: Int(1), basis: 0, h: 0 }];
        let cs = system(&m, GaugeAction::cyclic(2, &[1]).unwrap(), extra);
        let v = check_crossed_axioms(&cs, 3).unwrap();
        assert_eq!(v.status, Status::Violation);
    }
}
