//! Covariance checkers: representation axioms, the Laca–Sehnem style
//! conditions on semigroup representations, the two-condition criterion on
//! cores, kernel inclusion against the Fock representation, and Nica
//! covariance.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cores::{alphabet, interior_core_table, CoreConfig, CoreTable, Joint, Prune};
use crate::error::{Error, Result};
use crate::ideal::{chain_member, ConstructibleIdeal, Emptiness, IdealEngine, LcmVerdict, Tri, Word};
use crate::linalg::{svec_add_scaled, Mat, SVec, Span};
use crate::monoid::{enumerate_ball, GroupElement, MonoidSpec};
use crate::rep::{flatten, values_zero, Combination, Letter, OperatorWord, Rep, Values};
use crate::scalar::Scalar;
use crate::verdict::{CheckVerdict, Status};

/// Truncation and enumeration bounds shared by the checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Radius on which conclusions are asserted.
    #[serde(rename = "L")]
    pub l: usize,
    /// Radius on which hypotheses are evaluated.
    #[serde(rename = "L_big")]
    pub l_big: usize,
    /// Growth used to re-certify violations.
    pub step: usize,
    /// Word bound: at most `2w` letters.
    #[serde(rename = "W")]
    pub w: usize,
    pub letter_radius: usize,
    pub core_cap: usize,
    pub seed: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            l: 3,
            l_big: 5,
            step: 2,
            w: 2,
            letter_radius: 1,
            core_cap: 200_000,
            seed: 0,
        }
    }
}

impl Bounds {
    pub fn core_config(&self, prune: Prune) -> CoreConfig {
        CoreConfig {
            w: self.w,
            letter_radius: self.letter_radius,
            cap: self.core_cap,
            prune,
        }
    }

    /// Truncation radius that keeps words of the bound exact on probes of level `probe`.
    pub fn word_radius(&self, probe: usize) -> usize {
        probe + self.w * self.letter_radius + 1
    }
}

/// Builds (or fetches) a representation truncated at a radius.
pub type RepAt<'a, S> = &'a (dyn Fn(usize) -> Result<Arc<Rep<S>>> + Sync);

/// Generator length of `g`, searching balls up to radius 64.
pub fn level_of(spec: &MonoidSpec, g: &GroupElement) -> Result<usize> {
    let mut r = 4;
    loop {
        let ball = enumerate_ball(spec, r)?;
        if let Some(i) = ball.index_of(g) {
            return Ok(ball.level(i));
        }
        if r >= 64 {
            return Err(Error::Structural(format!("{g} is not a product of at most 64 generators")));
        }
        r *= 2;
    }
}

/// Radius needed to evaluate `comb` exactly on probes of level `probe`.
fn combination_radius<S: Scalar>(spec: &MonoidSpec, comb: &Combination<S>, probe: usize) -> Result<usize> {
    let mut levels: HashMap<GroupElement, usize> = HashMap::new();
    let mut reach = 0;
    for (_, w) in &comb.terms {
        let mut total = 0;
        for l in w.letters.iter().filter(|l| !l.adjoint) {
            if !levels.contains_key(&l.elem) {
                levels.insert(l.elem.clone(), level_of(spec, &l.elem)?);
            }
            total += levels[&l.elem];
        }
        reach = reach.max(total);
    }
    Ok(probe + reach + 1)
}

/// Witness payload for a combination that should vanish on probe columns.
pub fn combination_witness<S: Scalar>(kind: &str, spec: &MonoidSpec, comb: &Combination<S>, radius: usize, probe: usize) -> Value {
    json!({
        "kind": kind,
        "combination": comb.to_json(spec),
        "radius": radius,
        "probe": probe,
    })
}

fn is_certified_empty(engine: &IdealEngine, x: &ConstructibleIdeal) -> bool {
    matches!(engine.is_empty(x), Emptiness::Empty(_))
}

// ---------------------------------------------------------------------------
// Representation axioms

struct AxiomCase<S> {
    kind: &'static str,
    comb: Combination<S>,
}

fn lin_word<S: Scalar>(p: &GroupElement, coords: &[S], adjoint: bool) -> Vec<(S, OperatorWord)> {
    coords
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_exact_zero())
        .map(|(k, c)| (c.clone(), OperatorWord::new(vec![Letter { elem: p.clone(), basis: k, adjoint }])))
        .collect()
}

fn axiom_cases<S: Scalar>(rep: &Rep<S>, l: usize) -> Result<Vec<AxiomCase<S>>> {
    let fs = &rep.fibers;
    let spec = rep.monoid();
    let e = spec.identity();
    let alg = fs.algebra();
    let mut cases = Vec::new();
    let missing = |what: String| Error::Structural(format!("{what}; run fock-axioms"));
    for i in 0..alg.len() {
        let adj = alg.coords(&alg.basis()[i].adjoint()).ok_or_else(|| missing("coefficient algebra is not *-closed".into()))?;
        let mut terms = vec![(S::one(), OperatorWord::new(vec![Letter::star(e.clone(), i)]))];
        terms.extend(lin_word(&e, &adj, false).into_iter().map(|(c, w)| (c.neg(), w)));
        cases.push(AxiomCase { kind: "rep-star", comb: Combination { terms } });
    }
    let ball = enumerate_ball(spec, l)?;
    for pi in 0..ball.len() {
        for qi in 0..ball.len() {
            if ball.level(pi) + ball.level(qi) > l {
                continue;
            }
            let (p, q) = (ball.element(pi), ball.element(qi));
            let pq = spec.mul(p, q);
            let (fp, fq) = (fs.fiber(p).unwrap(), fs.fiber(q).unwrap());
            let fpq = fs.fiber(&pq).ok_or_else(|| missing(format!("{pq} lies outside the fiber ball")))?;
            for i in 0..fp.len() {
                for j in 0..fq.len() {
                    let m = fp.basis()[i].mul(&fq.basis()[j]);
                    let c = fpq.coords(&m).ok_or_else(|| missing(format!("X_{p}·X_{q} is not inside X_{pq}")))?;
                    let mut terms = vec![(S::one(), OperatorWord::new(vec![Letter::plain(p.clone(), i), Letter::plain(q.clone(), j)]))];
                    terms.extend(lin_word(&pq, &c, false).into_iter().map(|(c, w)| (c.neg(), w)));
                    cases.push(AxiomCase { kind: "rep-product", comb: Combination { terms } });
                }
                for k in 0..fpq.len() {
                    let m = fp.basis()[i].adjoint().mul(&fpq.basis()[k]);
                    let c = fq.coords(&m).ok_or_else(|| missing(format!("X_{p}^*·X_{pq} is not inside X_{q}")))?;
                    let mut terms = vec![(S::one(), OperatorWord::new(vec![Letter::star(p.clone(), i), Letter::plain(pq.clone(), k)]))];
                    terms.extend(lin_word(q, &c, false).into_iter().map(|(c, w)| (c.neg(), w)));
                    cases.push(AxiomCase { kind: "rep-adjoint", comb: Combination { terms } });
                }
            }
        }
    }
    Ok(cases)
}

/// Verifies `t_e` is a *-map, `t_p(ξ)t_q(η) = t_{pq}(ξη)` and
/// `t_p(ξ)^* t_{pq}(ζ) = t_q(ξ^*ζ)` for `|p| + |q| ≤ l`, on basis vectors of
/// level at most `l` where both sides stay inside the truncation.
pub fn check_rep_axioms<S: Scalar>(rep_at: RepAt<S>, l: usize) -> Result<CheckVerdict> {
    const CHECK: &str = "rep-axioms";
    let radius = 2 * l + 1;
    let rep = rep_at(radius)?;
    if rep.copies != 1 {
        return Err(Error::Structural("rep-axioms applies to representations of the base product system".into()));
    }
    let cols = rep.probe(l);
    let tol = rep.tol();
    let cases = axiom_cases(&rep, l)?;
    let mut compared = 0usize;
    let mut skipped = 0usize;
    for case in &cases {
        for &c in &cols {
            match case.comb.eval_column(&rep, c)? {
                None => skipped += 1,
                Some(v) => {
                    compared += 1;
                    if !v.iter().all(|(_, x)| x.is_zero_tol(tol)) {
                        let residual = v.iter().map(|(_, x)| x.abs()).fold(0.0, f64::max);
                        let mut w = combination_witness(case.kind, rep.monoid(), &case.comb, radius, l);
                        w["column"] = json!(c);
                        w["residual"] = json!(residual);
                        return Ok(CheckVerdict::violation(
                            CHECK,
                            format!("{} identity fails on basis vector {c}", case.kind),
                            w,
                        )
                        .with_rep(&rep.name)
                        .with_stability(vec![radius]));
                    }
                }
            }
        }
    }
    Ok(CheckVerdict::pass(CHECK, format!("{} identities hold on {compared} probe columns", cases.len()))
        .with_rep(&rep.name)
        .with_details(json!({"identities": cases.len(), "compared": compared, "skipped_at_boundary": skipped, "radius": radius})))
}

/// Rank test: are the images of the coefficient basis linearly independent?
pub fn injective_on_algebra<S: Scalar>(rep: &Rep<S>) -> Result<bool> {
    let e = rep.monoid().identity();
    let cols = rep.probe(usize::MAX);
    let n = rep.fibers.algebra().len();
    let mut span = Span::new(rep.dim() * cols.len(), rep.num);
    for i in 0..n * rep.copies {
        let v = rep
            .eval(&OperatorWord::new(vec![Letter::plain(e.clone(), i)]), &cols)?
            .ok_or_else(|| Error::Structural("coefficient letters must not leave the truncation".into()))?;
        span.insert(&flatten(&v, rep.dim()));
    }
    Ok(span.rank() == n * rep.copies)
}

// ---------------------------------------------------------------------------
// Two-condition criterion

pub(crate) fn escape_inconclusive(check: &str, rep: &Rep<impl Scalar>, word: &OperatorWord, radius: usize) -> CheckVerdict {
    CheckVerdict::inconclusive(
        check,
        format!("interior empty: word {} leaves the truncation at radius {radius} from every probe; raise L", word.display(rep.monoid())),
    )
    .with_rep(&rep.name)
}

/// A null vector of the hypothesis system that breaks the conclusion.
struct CoreViolation<S> {
    comb: Combination<S>,
    ideals: Vec<ConstructibleIdeal>,
}

struct Unknown {
    entry: usize,
    word: usize,
}

fn core_unknowns<S: Scalar>(engine: &IdealEngine, table: &CoreTable<S>, family: Option<&[ConstructibleIdeal]>) -> Vec<Unknown> {
    let mut out = Vec::new();
    for (e, ent) in table.entries.iter().enumerate() {
        if engine.is_empty_on_ball(&ent.ideal) {
            continue;
        }
        if let Some(f) = family {
            if !f.iter().any(|x| engine.same(x, &ent.ideal)) {
                continue;
            }
        }
        out.extend(ent.basis.iter().map(|&w| Unknown { entry: e, word: w }));
    }
    out
}

fn witness_from_null<S: Scalar>(table: &CoreTable<S>, unknowns: &[Unknown], nv: &SVec<S>) -> CoreViolation<S> {
    let mut terms = Vec::new();
    let mut ideals = Vec::new();
    for (k, c) in nv {
        let u = &unknowns[*k];
        let ent = &table.entries[u.entry];
        terms.push((c.clone(), ent.words[u.word].clone()));
        ideals.push(ent.ideal.clone());
    }
    CoreViolation {
        comb: Combination { terms },
        ideals,
    }
}

pub(crate) fn dot<S: Scalar>(a: &SVec<S>, b: &SVec<S>) -> S {
    let mut acc = S::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc = acc.add(&a[i].1.mul(&b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Pushes the coordinate rows of `vals` (one row per output coordinate) into `rows`.
pub(crate) fn coordinate_rows<S: Scalar>(rows: &mut BTreeMap<usize, SVec<S>>, unknown: usize, v: &SVec<S>, offset: usize) {
    for (d, x) in v {
        rows.entry(offset + d).or_default().push((unknown, x.clone()));
    }
}

/// Checks `conclusion ⊆ rowspan(hypothesis)`; on failure returns a null vector
/// of the hypothesis on which a conclusion row is nonzero.
pub(crate) fn span_inclusion<S: Scalar>(hyp: &Span<S>, conclusion: &[SVec<S>], tol: f64) -> Option<SVec<S>> {
    let bad = conclusion.iter().find(|r| !hyp.contains(r))?;
    hyp.nullspace().into_iter().find(|nv| !dot(bad, nv).is_zero_tol(tol))
}

/// Condition (ii) with hypotheses on `Ball(h)`.
fn condition_ii<S: Scalar>(
    engine: &IdealEngine,
    rep: &Rep<S>,
    table: &CoreTable<S>,
    unknowns: &[Unknown],
    cols: &[usize],
    h: usize,
    l: usize,
) -> Result<(Option<CoreViolation<S>>, usize)> {
    let spec = rep.monoid();
    let tol = rep.tol();
    let n = unknowns.len();
    let mut pos = vec![usize::MAX; rep.dim()];
    for (k, &c) in cols.iter().enumerate() {
        pos[c] = k;
    }
    let value = |u: &Unknown| &table.entries[u.entry].values[u.word][0];
    let mut hyp = Span::new(n, rep.num);
    let ball = enumerate_ball(spec, h)?;
    let hp = rep.probe(h);
    let member_of: Vec<Vec<bool>> = table
        .entries
        .iter()
        .map(|ent| ball.elements().iter().map(|r| engine.member(r, &ent.ideal)).collect())
        .collect();
    'outer: for (ri, r) in ball.elements().iter().enumerate() {
        let members: Vec<usize> = (0..n).filter(|&k| member_of[unknowns[k].entry][ri]).collect();
        if members.is_empty() {
            continue;
        }
        for i in 0..rep.letter_count(r) {
            let op = rep.op(r, i, false)?;
            for &j in &hp {
                let Some(u) = op.apply(&vec![(j, S::one())], tol) else { continue };
                if u.iter().any(|(s, _)| pos[*s] == usize::MAX) {
                    continue;
                }
                let mut rows: BTreeMap<usize, SVec<S>> = BTreeMap::new();
                for &k in &members {
                    let vals = value(&unknowns[k]);
                    let mut v: SVec<S> = Vec::new();
                    for (s, c) in &u {
                        v = svec_add_scaled(&v, c, &vals[pos[*s]], tol);
                    }
                    coordinate_rows(&mut rows, k, &v, 0);
                }
                for row in rows.values() {
                    hyp.insert(row);
                    if hyp.rank() == n {
                        break 'outer;
                    }
                }
            }
        }
    }
    let rank = hyp.rank();
    if rank == n {
        return Ok((None, rank));
    }
    let mut conclusion: BTreeMap<usize, SVec<S>> = BTreeMap::new();
    for (p, &c) in cols.iter().enumerate() {
        if rep.level(c) > l {
            continue;
        }
        for (k, u) in unknowns.iter().enumerate() {
            coordinate_rows(&mut conclusion, k, &value(u)[p], p * rep.dim());
        }
    }
    let conclusion: Vec<SVec<S>> = conclusion.into_values().collect();
    Ok((span_inclusion(&hyp, &conclusion, tol).map(|nv| witness_from_null(table, unknowns, &nv)), rank))
}

/// Conditions (i) and (ii) for `t`, with the double-ball protocol on (ii).
pub fn check_theorem_a<S: Scalar>(engine: &IdealEngine, rep_at: RepAt<S>, b: &Bounds, preconditions: bool) -> Result<CheckVerdict> {
    const CHECK: &str = "theorem-a";
    if preconditions {
        let ax = check_rep_axioms(rep_at, b.l)?;
        if ax.status != Status::Pass {
            return Ok(CheckVerdict::inconclusive(CHECK, format!("precondition not met: {}", ax.reason)).with_details(json!({"rep-axioms": ax})));
        }
        let small = rep_at(b.l)?;
        if !injective_on_algebra(&small)? {
            return Ok(CheckVerdict::inconclusive(CHECK, "precondition not met: the representation is not injective on the coefficient algebra").with_rep(&small.name));
        }
    }
    let p0 = b.l_big + b.step;
    let radius = b.word_radius(p0);
    let rep = rep_at(radius)?;
    let spec = rep.monoid();
    let (table, joint) = interior_core_table(engine, Joint::single(&rep, p0), b.core_config(Prune::Span))?;
    if let Some(w) = &table.escape {
        return Ok(escape_inconclusive(CHECK, &rep, w, radius));
    }
    let cols = joint.cols.into_iter().next().unwrap_or_default();
    let boundary = rep.probe(p0).len() - cols.len();
    let tol = rep.tol();

    for ent in &table.entries {
        if !engine.is_empty_on_ball(&ent.ideal) {
            continue;
        }
        for (w, v) in ent.words.iter().zip(&ent.values) {
            if values_zero(&v[0], tol) {
                continue;
            }
            let comb = Combination::<S>::single(w.clone());
            let mut wit = combination_witness("theorem-a-i", spec, &comb, radius, p0);
            wit["ideal"] = engine.ideal_to_json(&ent.ideal);
            if !is_certified_empty(engine, &ent.ideal) {
                return Ok(CheckVerdict::inconclusive(CHECK, "an ideal empty on the reference ball has a nonzero core; emptiness is not certified")
                    .with_rep(&rep.name)
                    .with_details(json!({"candidate": wit})));
            }
            return Ok(CheckVerdict::violation(CHECK, format!("condition (i): {} has empty ideal but nonzero image", w.display(spec)), wit)
                .with_rep(&rep.name)
                .with_stability(vec![p0]));
        }
    }

    let unknowns = core_unknowns(engine, &table, None);
    let details = |rank: usize| {
        json!({
            "W": b.w,
            "letter_radius": b.letter_radius,
            "radius": radius,
            "ideals": table.entries.len(),
            "unknowns": unknowns.len(),
            "hypothesis_rank": rank,
            "states": table.states,
            "boundary_columns": boundary,
        })
    };
    let mut radii = Vec::new();
    let mut last = None;
    for h in [b.l_big, b.l_big + b.step] {
        let (viol, rank) = condition_ii(engine, &rep, &table, &unknowns, &cols, h, b.l)?;
        match viol {
            None => {
                if radii.is_empty() {
                    return Ok(CheckVerdict::pass(CHECK, format!("conditions (i) and (ii) hold for cores of words with at most {} letters", 2 * b.w))
                        .with_rep(&rep.name)
                        .with_stability(vec![h])
                        .with_details(details(rank)));
                }
                return Ok(CheckVerdict::inconclusive(CHECK, format!("condition (ii) failed with hypotheses on radius {} but not on {h}", b.l_big))
                    .with_rep(&rep.name)
                    .with_details(details(rank)));
            }
            Some(v) => {
                radii.push(h);
                last = Some((v, rank, h));
            }
        }
    }
    let (v, rank, h) = last.expect("two violations recorded");
    let mut wit = combination_witness("theorem-a-ii", spec, &v.comb, radius, b.l);
    wit["ideals"] = Value::Array(v.ideals.iter().map(|x| engine.ideal_to_json(x)).collect());
    wit["hypothesis_radius"] = json!(h);
    wit["hypothesis_probe"] = json!(p0);
    Ok(CheckVerdict::violation(
        CHECK,
        format!("condition (ii): a core combination kills every t_r(X_r) with r in its ideals up to radius {h} but is nonzero"),
        wit,
    )
    .with_rep(&rep.name)
    .with_stability(radii)
    .with_details(details(rank)))
}

/// Replays a `theorem-a-ii` witness: the hypothesis holds on `Ball(h)` and the combination is nonzero.
/// Evaluates `comb` column by column, skipping boundary columns whose chain
/// leaves the truncation. `Inconclusive` only when no column survives.
pub fn interior_status<S: Scalar>(comb: &Combination<S>, rep: &Rep<S>, cols: &[usize]) -> Result<Status> {
    let mut seen = false;
    for &c in cols {
        match comb.eval(rep, &[c])? {
            None => {}
            Some(v) if values_zero(&v, rep.tol()) => seen = true,
            Some(_) => return Ok(Status::Violation),
        }
    }
    Ok(if seen { Status::Pass } else { Status::Inconclusive })
}

pub fn replay_theorem_a_ii<S: Scalar>(engine: &IdealEngine, rep: &Rep<S>, comb: &Combination<S>, probe: usize, h: usize, hp0: usize) -> Result<Status> {
    let spec = rep.monoid();
    let tol = rep.tol();
    let ideals: Vec<ConstructibleIdeal> = comb
        .terms
        .iter()
        .map(|(_, w)| w.ideal_word(spec).map(|iw| engine.k_of_word(&iw)).ok_or_else(|| Error::schema("witness", "core words must alternate")))
        .collect::<Result<_>>()?;
    let ball = enumerate_ball(spec, h)?;
    for r in ball.elements() {
        let terms: Vec<(S, OperatorWord)> = comb
            .terms
            .iter()
            .zip(&ideals)
            .filter(|(_, x)| engine.member(r, x))
            .map(|(t, _)| t.clone())
            .collect();
        if terms.is_empty() {
            continue;
        }
        let part = Combination { terms };
        for i in 0..rep.letter_count(r) {
            let op = rep.op(r, i, false)?;
            for j in rep.probe(h) {
                let Some(u) = op.apply(&vec![(j, S::one())], tol) else { continue };
                if u.iter().any(|(s, _)| rep.level(*s) > hp0) {
                    continue;
                }
                let Some(v) = part.eval_on(rep, vec![u])? else { continue };
                if !values_zero(&v, tol) {
                    return Ok(Status::Pass);
                }
            }
        }
    }
    interior_status(comb, rep, &rep.probe(probe))
}

// ---------------------------------------------------------------------------
// Kernel inclusion against λ

/// `ker λ ⊆ ker t` on the span of enumerated core words of `family` (all ideals if `None`).
pub fn check_kernel_inclusion<S: Scalar>(
    engine: &IdealEngine,
    lam_at: RepAt<S>,
    rep_at: RepAt<S>,
    b: &Bounds,
    family: Option<&[ConstructibleIdeal]>,
) -> Result<CheckVerdict> {
    const CHECK: &str = "kernel-inclusion";
    let p0 = b.l_big + b.step;
    let (rl, rt) = (b.word_radius(p0), b.word_radius(b.l));
    let lam = lam_at(rl)?;
    let rep = rep_at(rt)?;
    let spec = rep.monoid();
    let joint = Joint {
        reps: vec![&*lam, &*rep],
        cols: vec![lam.probe(p0), rep.probe(b.l)],
    };
    let (table, joint) = interior_core_table(engine, joint, b.core_config(Prune::Span))?;
    if let Some(w) = &table.escape {
        return Ok(escape_inconclusive(CHECK, &rep, w, rt));
    }
    let tol = rep.tol();
    let mut unknowns = Vec::new();
    for (e, ent) in table.entries.iter().enumerate() {
        if let Some(f) = family {
            if !f.iter().any(|x| engine.same(x, &ent.ideal)) {
                continue;
            }
        }
        unknowns.extend(ent.basis.iter().map(|&w| Unknown { entry: e, word: w }));
    }
    let n = unknowns.len();
    let t_rows = {
        let mut rows = BTreeMap::new();
        for (k, u) in unknowns.iter().enumerate() {
            let v = &table.entries[u.entry].values[u.word][1];
            coordinate_rows(&mut rows, k, &flatten(v, rep.dim()), 0);
        }
        rows.into_values().collect::<Vec<_>>()
    };
    let lcols = &joint.cols[0];
    let mut radii = Vec::new();
    let mut last = None;
    for h in [b.l_big, p0] {
        let mut lam_span = Span::new(n, lam.num);
        let mut rows = BTreeMap::new();
        for (k, u) in unknowns.iter().enumerate() {
            let v = &table.entries[u.entry].values[u.word][0];
            for (p, &c) in lcols.iter().enumerate() {
                if lam.level(c) <= h {
                    coordinate_rows(&mut rows, k, &v[p], p * lam.dim());
                }
            }
        }
        for r in rows.values() {
            lam_span.insert(r);
            if lam_span.rank() == n {
                break;
            }
        }
        match span_inclusion(&lam_span, &t_rows, tol) {
            None => {
                if radii.is_empty() {
                    return Ok(CheckVerdict::pass(CHECK, format!("ker λ ⊆ ker t on a core span of dimension {n}"))
                        .with_rep(&rep.name)
                        .with_stability(vec![h])
                        .with_details(json!({"unknowns": n, "lambda_rank": lam_span.rank(), "W": b.w})));
                }
                return Ok(CheckVerdict::inconclusive(CHECK, format!("kernel gap at λ-radius {} closed at {h}", b.l_big)).with_rep(&rep.name));
            }
            Some(nv) => {
                radii.push(h);
                last = Some((witness_from_null(&table, &unknowns, &nv), h));
            }
        }
    }
    let (v, h) = last.expect("violations recorded");
    let mut wit = combination_witness("kernel", spec, &v.comb, rt, b.l);
    wit["lambda_radius"] = json!(rl);
    wit["lambda_probe"] = json!(h);
    wit["ideals"] = Value::Array(v.ideals.iter().map(|x| engine.ideal_to_json(x)).collect());
    Ok(CheckVerdict::violation(CHECK, "a core element in ker λ is not killed by t", wit)
        .with_rep(&rep.name)
        .with_stability(radii))
}

// ---------------------------------------------------------------------------
// Semigroup conditions

pub(crate) fn require_semigroup_case<S: Scalar>(rep: &Rep<S>) -> Result<()> {
    if rep.fibers.spec.is_semigroup_case() && rep.copies == 1 {
        Ok(())
    } else {
        Err(Error::Structural("this check applies to representations of the product system X_P".into()))
    }
}

/// Outcome of one product-identity instance.
#[derive(Clone, Debug)]
pub struct T4Outcome<S> {
    pub combination: Combination<S>,
    pub radius: usize,
    pub residual_rank: usize,
    /// `Some` when the residual maps probe vectors into the probe span.
    pub projection: Option<bool>,
    /// `escaped` is set only when every probe column leaves the truncation.
    pub escaped: bool,
    /// Probe columns dropped because their chain leaves the truncation.
    pub boundary: usize,
}

/// Expands `∏_{β∈F}(ẇ_α − ẇ_β)` into signed concatenated words.
pub fn t4_expansion<S: Scalar>(alpha: &OperatorWord, family: &[OperatorWord]) -> Combination<S> {
    let mut terms = vec![(S::one(), OperatorWord::default())];
    for beta in family {
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (c, w) in &terms {
            next.push((c.clone(), w.concat(alpha)));
            next.push((c.neg(), w.concat(beta)));
        }
        terms = next;
    }
    Combination { terms }
}

/// Evaluates one product identity on probes of level `l`.
pub fn check_t4_instance<S: Scalar>(rep_at: RepAt<S>, l: usize, alpha: &OperatorWord, family: &[OperatorWord]) -> Result<T4Outcome<S>> {
    if family.len() > 12 {
        return Err(Error::resource("product identity expansion", 12, "family size"));
    }
    let comb = t4_expansion::<S>(alpha, family);
    let probe_rep = rep_at(l)?;
    let radius = combination_radius(probe_rep.monoid(), &comb, l)?;
    let rep = rep_at(radius)?;
    let radius = rep.radius;
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for c in rep.probe(l) {
        if let Some(v) = comb.eval(&rep, &[c])? {
            cols.push(c);
            vals.extend(v);
        }
    }
    if cols.is_empty() {
        return Ok(T4Outcome {
            combination: comb,
            radius,
            residual_rank: 0,
            projection: None,
            escaped: true,
            boundary: 0,
        });
    };
    let boundary = rep.probe(l).len() - cols.len();
    let m = Mat::from_columns(rep.dim(), vals.clone());
    let rank = m.rank(rep.num);
    let mut pos = vec![usize::MAX; rep.dim()];
    for (k, &c) in cols.iter().enumerate() {
        pos[c] = k;
    }
    let projection = if vals.iter().flatten().all(|(i, _)| pos[*i] != usize::MAX) {
        let sq = Mat::from_columns(
            cols.len(),
            vals.iter().map(|v| v.iter().map(|(i, x)| (pos[*i], x.clone())).collect()).collect(),
        );
        Some(sq.mul(&sq).approx_eq(&sq, rep.tol()) && sq.adjoint().approx_eq(&sq, rep.tol()))
    } else {
        None
    };
    Ok(T4Outcome {
        combination: comb,
        radius,
        residual_rank: rank,
        projection,
        escaped: false,
        boundary,
    })
}

fn t4_witness<S: Scalar>(engine: &IdealEngine, spec: &MonoidSpec, alpha: &OperatorWord, family: &[OperatorWord], out: &T4Outcome<S>, l: usize) -> Value {
    let ideal_word = |w: &OperatorWord| w.ideal_word(spec).map(|iw| iw.to_json(spec)).unwrap_or(Value::Null);
    let mut wit = combination_witness("t4", spec, &out.combination, out.radius, l);
    wit["alpha"] = ideal_word(alpha);
    wit["family"] = Value::Array(family.iter().map(ideal_word).collect());
    wit["ideal"] = alpha.ideal_word(spec).map(|iw| engine.ideal_to_json(&engine.k_of_word(&iw))).unwrap_or(Value::Null);
    wit["residual_rank"] = json!(out.residual_rank);
    wit["projection"] = json!(out.projection);
    wit
}

/// Sub-verdict of one condition.
#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub status: Status,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Condition {
    fn pass(reason: impl Into<String>) -> Self {
        Condition {
            status: Status::Pass,
            reason: reason.into(),
            witness: None,
        }
    }

    fn inconclusive(reason: impl Into<String>) -> Self {
        Condition {
            status: Status::Inconclusive,
            reason: reason.into(),
            witness: None,
        }
    }

    fn violation(reason: impl Into<String>, witness: Value) -> Self {
        Condition {
            status: Status::Violation,
            reason: reason.into(),
            witness: Some(witness),
        }
    }
}

/// An explicit product-identity instance `(α, F)` given as semigroup words.
#[derive(Clone, Debug)]
pub struct T4Instance {
    pub alpha: Word,
    pub family: Vec<Word>,
}

/// Checks one explicit instance: the union condition, then the product identity.
pub fn t4_instance_condition<S: Scalar>(engine: &IdealEngine, rep_at: RepAt<S>, l: usize, inst: &T4Instance) -> Result<Condition> {
    let x = engine.k_of_word(&inst.alpha);
    let members: Vec<ConstructibleIdeal> = inst.family.iter().map(|w| engine.k_of_word(w)).collect();
    match engine.union_equals(&x, &members) {
        Tri::True => {}
        Tri::False => return Err(Error::Structural("declared product-identity instance: K(α) is not the union of the family".into())),
        Tri::UnknownUpTo(h) => return Ok(Condition::inconclusive(format!("union decided only up to radius {h}"))),
    }
    let alpha = OperatorWord::from_word(&inst.alpha, 0);
    let family: Vec<OperatorWord> = inst.family.iter().map(|w| OperatorWord::from_word(w, 0)).collect();
    t4_condition(engine, rep_at, l, &alpha, &family)
}

fn t4_condition<S: Scalar>(engine: &IdealEngine, rep_at: RepAt<S>, l: usize, alpha: &OperatorWord, family: &[OperatorWord]) -> Result<Condition> {
    let out = check_t4_instance(rep_at, l, alpha, family)?;
    let spec = &engine.spec;
    if out.escaped {
        return Ok(Condition::inconclusive(format!("interior empty: the product expansion leaves the truncation at radius {} from every probe; raise L", out.radius)));
    }
    if out.residual_rank == 0 {
        return Ok(Condition::pass("product identity holds"));
    }
    Ok(Condition::violation(
        format!("product identity fails for α = {}: residual of rank {}", alpha.display(spec), out.residual_rank),
        t4_witness(engine, spec, alpha, family, &out, l),
    ))
}

/// Conditions (T1)–(T4) for a representation of `X_P`.
pub fn check_t_conditions<S: Scalar>(engine: &IdealEngine, rep_at: RepAt<S>, b: &Bounds, explicit: &[T4Instance]) -> Result<CheckVerdict> {
    const CHECK: &str = "t-conditions";
    let small = rep_at(b.l + 1)?;
    require_semigroup_case(&small)?;
    let spec = small.monoid().clone();
    let e = spec.identity();
    let tol = small.tol();

    let cols = small.probe(b.l);
    let id_word = OperatorWord::new(vec![Letter::plain(e.clone(), 0)]);
    let t1 = match small.eval(&id_word, &cols)? {
        None => Condition::inconclusive("w_e leaves the truncation"),
        Some(v) => {
            let diff = v.iter().zip(&cols).any(|(col, &c)| !svec_add_scaled(col, &S::one().neg(), &vec![(c, S::one())], tol).is_empty());
            if diff {
                let comb = Combination {
                    terms: vec![(S::one(), id_word.clone()), (S::one().neg(), OperatorWord::default())],
                };
                Condition::violation("w_e is not the identity", combination_witness("t1", &spec, &comb, b.l + 1, b.l))
            } else {
                Condition::pass("w_e = 1 on probes")
            }
        }
    };

    let radius = b.word_radius(b.l);
    let rep = rep_at(radius)?;
    let (table, _) = interior_core_table(engine, Joint::single(&rep, b.l), b.core_config(Prune::Distinct))?;
    let (t2, t3) = if let Some(w) = &table.escape {
        let msg = format!("interior empty: word {} leaves the truncation at radius {radius} from every probe", w.display(&spec));
        (Condition::inconclusive(&msg), Condition::inconclusive(&msg))
    } else {
        let mut t2 = Condition::pass("every word with empty ideal vanishes");
        let mut t3 = Condition::pass("words with equal ideals have equal images");
        for ent in &table.entries {
            if engine.is_empty_on_ball(&ent.ideal) && t2.status == Status::Pass {
                if let Some((w, _)) = ent.words.iter().zip(&ent.values).find(|(_, v)| !values_zero(&v[0], tol)) {
                    let mut wit = combination_witness("t2", &spec, &Combination::<S>::single(w.clone()), radius, b.l);
                    wit["ideal"] = engine.ideal_to_json(&ent.ideal);
                    t2 = if is_certified_empty(engine, &ent.ideal) {
                        Condition::violation(format!("{} has empty ideal but nonzero image", w.display(&spec)), wit)
                    } else {
                        Condition::inconclusive("nonzero word on an ideal that is empty only on the reference ball")
                    };
                }
            }
            if ent.words.len() > 1 && t3.status == Status::Pass {
                let (a, bw) = (&ent.words[0], &ent.words[1]);
                let mut wit = combination_witness("t3", &spec, &Combination::<S>::difference(a.clone(), bw.clone()), radius, b.l);
                wit["ideal"] = engine.ideal_to_json(&ent.ideal);
                t3 = if engine.is_exact() {
                    Condition::violation(format!("{} and {} share an ideal but differ", a.display(&spec), bw.display(&spec)), wit)
                } else {
                    Condition::inconclusive("distinct images on ideals equal only up to the horizon")
                };
            }
        }
        (t2, t3)
    };

    let mut t4 = Condition::pass("no union instance fails");
    let mut instances = 0usize;
    for inst in explicit {
        instances += 1;
        let c = t4_instance_condition(engine, rep_at, b.l, inst)?;
        if c.status != Status::Pass {
            t4 = c;
            break;
        }
    }
    if t4.status == Status::Pass && table.escape.is_none() {
        let lattice: Vec<usize> = (0..table.entries.len()).filter(|&k| !engine.is_empty_on_ball(&table.entries[k].ideal)).collect();
        'x: for &xi in &lattice {
            let x = &table.entries[xi].ideal;
            let subs: Vec<usize> = lattice
                .iter()
                .copied()
                .filter(|&yi| yi != xi && engine.is_subset(&table.entries[yi].ideal, x) == Tri::True && !engine.same(&table.entries[yi].ideal, x))
                .collect();
            if subs.is_empty() {
                continue;
            }
            let ideals = |v: &[usize]| v.iter().map(|&k| table.entries[k].ideal.clone()).collect::<Vec<_>>();
            match engine.union_equals(x, &ideals(&subs)) {
                Tri::False => continue,
                Tri::UnknownUpTo(h) => {
                    t4 = Condition::inconclusive(format!("union of subideals decided only up to radius {h}"));
                    break 'x;
                }
                Tri::True => {}
            }
            let mut fam = subs.clone();
            for k in (0..subs.len()).rev() {
                let trial: Vec<usize> = fam.iter().copied().filter(|&y| y != subs[k]).collect();
                if !trial.is_empty() && engine.union_equals(x, &ideals(&trial)) == Tri::True {
                    fam = trial;
                }
            }
            instances += 1;
            let words: Vec<OperatorWord> = fam.iter().map(|&k| table.entries[k].words[0].clone()).collect();
            let c = t4_condition(engine, rep_at, b.l, &table.entries[xi].words[0], &words)?;
            if c.status != Status::Pass {
                t4 = c;
                break;
            }
        }
    }
    if t4.status == Status::Pass {
        t4.reason = format!("{instances} union instances hold");
    }

    let conds = [("T1", &t1), ("T2", &t2), ("T3", &t3), ("T4", &t4)];
    let worst = conds.iter().map(|(_, c)| c.status).max().unwrap_or(Status::Pass);
    let details = json!({
        "T1": t1, "T2": t2, "T3": t3, "T4": t4,
        "W": b.w, "radius": radius, "ideals": table.entries.len(),
    });
    let failing: Vec<String> = conds.iter().filter(|(_, c)| c.status == worst && worst != Status::Pass).map(|(n, c)| format!("{n}: {}", c.reason)).collect();
    let mut v = match worst {
        Status::Pass => CheckVerdict::pass(CHECK, "T1–T4 hold"),
        Status::Violation => {
            let wit = conds.iter().find(|(_, c)| c.status == Status::Violation).and_then(|(_, c)| c.witness.clone()).unwrap_or(Value::Null);
            CheckVerdict::violation(CHECK, failing.join("; "), wit).with_stability(vec![radius])
        }
        s => CheckVerdict::new(CHECK, s, failing.join("; ")),
    };
    v = v.with_rep(&rep.name).with_details(details);
    Ok(v)
}

// ---------------------------------------------------------------------------
// Nica covariance

/// `w` with `pP ∩ qP = wP`, `None` if empty.
pub fn join(engine: &IdealEngine, p: &GroupElement, q: &GroupElement, search_radius: usize) -> Result<Option<GroupElement>> {
    let full = engine.full();
    let meet = engine.intersect(&engine.left_mult(p, &full), &engine.left_mult(q, &full));
    if is_certified_empty(engine, &meet) || (!engine.is_exact() && engine.is_empty_on_ball(&meet)) {
        return Ok(None);
    }
    // Only the generic backend needs to search a ball.
    if let Some(w) = engine.principal_generator(&meet, &enumerate_ball(&engine.spec, 0)?) {
        return Ok(Some(w));
    }
    let ball = enumerate_ball(&engine.spec, search_radius)?;
    engine
        .principal_generator(&meet, &ball)
        .map(Some)
        .ok_or_else(|| Error::Structural(format!("{p}P ∩ {q}P = {} is not principal", engine.describe(&meet))))
}

pub(crate) fn require_lcm(engine: &IdealEngine, radius: usize) -> Result<Option<usize>> {
    match crate::ideal::is_right_lcm_up_to(engine, radius)? {
        LcmVerdict::Yes(_) => Ok(None),
        LcmVerdict::CounterexampleFree { horizon, .. } => Ok(Some(horizon)),
        LcmVerdict::No { p, q, ideal } => Err(Error::Structural(format!(
            "the monoid is not right LCM ({q}^-1·{p}P = {}); use t-conditions or theorem-a instead",
            engine.describe(&ideal)
        ))),
    }
}

struct NicaCase {
    p: GroupElement,
    q: GroupElement,
    w: Option<GroupElement>,
    product: OperatorWord,
}

fn nica_cases<S: Scalar>(engine: &IdealEngine, lam: &Rep<S>, radius: usize) -> Result<Vec<NicaCase>> {
    let spec = lam.monoid();
    let ball = enumerate_ball(spec, radius)?;
    let mut out = Vec::new();
    for p in ball.elements() {
        for q in ball.elements() {
            let w = join(engine, p, q, 2 * radius)?;
            let (np, nq) = (lam.letter_count(p), lam.letter_count(q));
            for i in 0..np {
                for j in 0..np {
                    for k in 0..nq {
                        for l in 0..nq {
                            out.push(NicaCase {
                                p: p.clone(),
                                q: q.clone(),
                                w: w.clone(),
                                product: OperatorWord::new(vec![
                                    Letter::plain(p.clone(), i),
                                    Letter::star(p.clone(), j),
                                    Letter::plain(q.clone(), k),
                                    Letter::star(q.clone(), l),
                                ]),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn theta_words<S: Scalar>(rep: &Rep<S>, w: &GroupElement) -> Vec<OperatorWord> {
    let n = rep.letter_count(w);
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| OperatorWord::new(vec![Letter::plain(w.clone(), a), Letter::star(w.clone(), b)]))
        .collect()
}

/// Solves `λ(product) = Σ c λ(θ)` on λ probes. `Ok(None)` if outside the span.
fn lambda_coefficients<S: Scalar>(lam: &Rep<S>, cols: &[usize], case: &NicaCase) -> Result<Option<Combination<S>>> {
    let prod = lam
        .eval(&case.product, cols)?
        .ok_or_else(|| Error::Structural("λ truncation too small for the Nica products".into()))?;
    let Some(w) = &case.w else {
        return Ok(values_zero(&prod, lam.tol()).then(|| Combination { terms: vec![] }));
    };
    let thetas = theta_words(lam, w);
    let mut span = Span::new(lam.dim() * cols.len(), lam.num);
    let mut kept = Vec::new();
    for th in &thetas {
        let v = lam.eval(th, cols)?.ok_or_else(|| Error::Structural("λ truncation too small for the Nica products".into()))?;
        if span.insert(&flatten(&v, lam.dim())) {
            kept.push(th.clone());
        }
    }
    Ok(span.coordinates(&flatten(&prod, lam.dim())).map(|c| Combination {
        terms: c.into_iter().zip(kept).filter(|(c, _)| !c.is_exact_zero()).collect(),
    }))
}

/// λ-side products of rank-one images stay in the span at the join.
pub fn check_compact_alignment<S: Scalar>(engine: &IdealEngine, lam_at: RepAt<S>, b: &Bounds) -> Result<CheckVerdict> {
    const CHECK: &str = "compact-alignment";
    let horizon = require_lcm(engine, b.l.max(2))?;
    let pr = b.letter_radius.max(1);
    let probe = b.l.max(2 * pr);
    let radius = probe + 4 * pr + 1;
    let lam = lam_at(radius)?;
    let cols = lam.probe(probe);
    let cases = nica_cases(engine, &lam, pr)?;
    for case in &cases {
        if lambda_coefficients(&lam, &cols, case)?.is_none() {
            let spec = lam.monoid();
            let wit = json!({
                "kind": "compact-alignment",
                "p": spec.element_to_json(&case.p),
                "q": spec.element_to_json(&case.q),
                "product": case.product.to_json(spec),
                "radius": radius,
                "probe": probe,
            });
            return Ok(CheckVerdict::violation(CHECK, format!("product over ({}, {}) leaves the span at the join", case.p, case.q), wit).with_rep(&lam.name));
        }
    }
    let mut v = CheckVerdict::pass(CHECK, format!("{} products lie in the compact span at their join", cases.len())).with_rep(&lam.name);
    if let Some(h) = horizon {
        v.details = json!({"right_lcm": format!("counterexample-free up to radius {h}")});
    }
    Ok(v)
}

/// Nica covariance of `t`, with the join coefficients read off λ.
pub fn check_nica<S: Scalar>(engine: &IdealEngine, lam_at: RepAt<S>, rep_at: RepAt<S>, b: &Bounds) -> Result<CheckVerdict> {
    const CHECK: &str = "nica";
    let horizon = require_lcm(engine, b.l.max(2))?;
    let pr = b.letter_radius.max(1);
    let lprobe = b.l.max(2 * pr);
    let lam = lam_at(lprobe + 4 * pr + 1)?;
    let lcols = lam.probe(lprobe);
    let rt = b.l + 2 * pr + 1;
    let rep = rep_at(rt)?;
    let spec = rep.monoid();
    let tcols = rep.probe(b.l);
    let cases = nica_cases(engine, &lam, pr)?;
    for case in &cases {
        let Some(coef) = lambda_coefficients(&lam, &lcols, case)? else {
            return Ok(CheckVerdict::inconclusive(CHECK, format!("λ products over ({}, {}) do not lie in the span at the join", case.p, case.q)).with_rep(&rep.name));
        };
        let mut comb = Combination::single(case.product.clone());
        comb.terms.extend(coef.terms.into_iter().map(|(c, w)| (c.neg(), w)));
        let status = interior_status(&comb, &rep, &tcols)?;
        if status == Status::Inconclusive {
            return Ok(escape_inconclusive(CHECK, &rep, &case.product, rt));
        }
        if status == Status::Violation {
            let mut wit = combination_witness("nica", spec, &comb, rt, b.l);
            wit["p"] = spec.element_to_json(&case.p);
            wit["q"] = spec.element_to_json(&case.q);
            wit["join"] = case.w.as_ref().map_or(Value::Null, |w| spec.element_to_json(w));
            let reason = match &case.w {
                Some(w) => format!("t(ξ_p)t(η_p)*t(ξ_q)t(η_q)* differs from its image at the join {w} for p = {}, q = {}", case.p, case.q),
                None => format!("pP ∩ qP = ∅ for p = {}, q = {} but the product is nonzero", case.p, case.q),
            };
            return Ok(CheckVerdict::violation(CHECK, reason, wit).with_rep(&rep.name).with_stability(vec![rt]));
        }
    }
    let mut v = CheckVerdict::pass(CHECK, format!("{} products agree with their images at the join", cases.len())).with_rep(&rep.name);
    if let Some(h) = horizon {
        v.details = json!({"right_lcm": format!("counterexample-free up to radius {h}")});
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Fock-side identities

fn fock_of<S: Scalar>(rep: &Rep<S>) -> Result<&Arc<crate::fock::TruncatedFock<S>>> {
    rep.fock.as_ref().ok_or_else(|| Error::Structural("this check needs the Fock representation".into()))
}

/// Diagonal projections: words with ideal `x` evaluate to `E_x`, and `E_x E_y = E_{x∩y}`.
pub fn check_projection_algebra<S: Scalar>(engine: &IdealEngine, lam_at: RepAt<S>, b: &Bounds) -> Result<CheckVerdict> {
    const CHECK: &str = "projection-algebra";
    let radius = b.word_radius(b.l);
    let lam = lam_at(radius)?;
    require_semigroup_case(&lam)?;
    let fock = fock_of(&lam)?.clone();
    let spec = lam.monoid().clone();
    let (table, joint) = interior_core_table(engine, Joint::single(&lam, b.l), b.core_config(Prune::Distinct))?;
    if let Some(w) = &table.escape {
        return Ok(escape_inconclusive(CHECK, &lam, w, radius));
    }
    let cols = joint.cols.into_iter().next().unwrap_or_default();
    let ball = fock.ball();
    let e_of = |x: &ConstructibleIdeal| -> Values<S> {
        cols.iter()
            .map(|&c| if engine.member(ball.element(fock.node(c)), x) { vec![(c, S::one())] } else { vec![] })
            .collect()
    };
    let mut words = 0;
    for ent in &table.entries {
        let ex = e_of(&ent.ideal);
        for (w, v) in ent.words.iter().zip(&ent.values) {
            words += 1;
            if !values_close(&v[0], &ex, lam.tol()) {
                let mut wit = combination_witness("projection", &spec, &Combination::<S>::single(w.clone()), radius, b.l);
                wit["ideal"] = engine.ideal_to_json(&ent.ideal);
                return Ok(CheckVerdict::violation(CHECK, format!("{} differs from the projection onto its ideal", w.display(&spec)), wit).with_rep(&lam.name));
            }
        }
    }
    let big_radius = b.l + 2 * b.w * b.letter_radius + 1;
    let big = lam_at(big_radius)?;
    let mut pairs = 0;
    let lattice: Vec<&ConstructibleIdeal> = table.entries.iter().map(|e| &e.ideal).collect();
    for x in &lattice {
        for y in &lattice {
            pairs += 1;
            let meet = engine.intersect(x, y);
            let (ex, ey, em) = (e_of(x), e_of(y), e_of(&meet));
            let prod: Values<S> = ex.iter().zip(&ey).map(|(a, b)| if a.is_empty() || b.is_empty() { vec![] } else { a.clone() }).collect();
            let word = OperatorWord::from_word(&meet.word, 0);
            let via_word = big.eval(&word, &cols)?;
            if prod != em || via_word.as_ref().is_some_and(|v| !values_close(v, &em, big.tol())) {
                let wit = json!({
                    "kind": "projection-meet",
                    "x": engine.ideal_to_json(x),
                    "y": engine.ideal_to_json(y),
                    "meet": engine.ideal_to_json(&meet),
                    "radius": big_radius,
                    "probe": b.l,
                });
                return Ok(CheckVerdict::violation(CHECK, "E_x E_y differs from E_{x∩y}", wit).with_rep(&lam.name));
            }
        }
    }
    Ok(CheckVerdict::pass(CHECK, format!("{words} words match their projections; {pairs} lattice pairs multiply correctly"))
        .with_rep(&lam.name)
        .with_details(json!({"ideals": lattice.len(), "words": words, "pairs": pairs})))
}

pub(crate) fn values_close<S: Scalar>(a: &Values<S>, b: &Values<S>, tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| svec_add_scaled(x, &S::one().neg(), y, tol).iter().all(|(_, z)| z.is_zero_tol(tol)))
}

/// Random operator words against the closed-form action on basis vectors,
/// and vanishing of every enumerated word with empty ideal.
pub fn check_fock_formulas<S: Scalar>(engine: &IdealEngine, lam_at: RepAt<S>, b: &Bounds, samples: usize) -> Result<CheckVerdict> {
    const CHECK: &str = "fock-formulas";
    let max_len = 2 * b.w;
    let radius = b.l + max_len * b.letter_radius + 1;
    let lam = lam_at(radius)?;
    let fock = fock_of(&lam)?.clone();
    let spec = lam.monoid().clone();
    let fs = &lam.fibers;
    let tol = lam.tol();
    let alpha = alphabet(&lam, b.letter_radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    let cols = lam.probe(b.l);
    let mut compared = 0usize;
    for _ in 0..samples {
        let len = rng.gen_range(1..=max_len);
        let mut star = rng.gen_bool(0.5);
        let mut letters = Vec::with_capacity(len);
        for _ in 0..len {
            let (p, i) = alpha[rng.gen_range(0..alpha.len())].clone();
            letters.push(Letter { elem: p, basis: i, adjoint: star });
            star = !star;
        }
        let word = OperatorWord::new(letters);
        let iw = word.ideal_word(&spec).expect("alternating");
        let deg = word.degree(&spec);
        let mut product: Option<Mat<S>> = None;
        for l in &word.letters {
            let xi = &fs.fiber(&l.elem).expect("alphabet letter").basis()[l.basis];
            let xi = if l.adjoint { xi.adjoint() } else { xi.clone() };
            product = Some(match product {
                None => xi,
                Some(m) => m.mul(&xi),
            });
        }
        let product = product.expect("nonempty word");
        for &c in &cols {
            let Some(got) = lam.eval(&word, &[c])? else { continue };
            compared += 1;
            let node = fock.node(c);
            let r = fock.ball().element(node);
            let zeta = &fs.fiber_at(node).basis()[c - fock.offset(node)];
            let expected = if chain_member(&spec, &iw, r) { Some(product.mul(zeta)) } else { None };
            let got_m = fock.to_matrix(&got[0]);
            let target = spec.mul(&deg, r);
            let ok = match (&expected, &got_m) {
                (None, _) => got[0].iter().all(|(_, x)| x.is_zero_tol(tol)),
                (Some(m), None) => got[0].is_empty() && m.is_zero(tol),
                (Some(m), Some((n, g))) => fock.ball().element(*n) == &target && g.approx_eq(m, tol),
            };
            if !ok {
                let wit = json!({
                    "kind": "fock-formula",
                    "word": word.to_json(&spec),
                    "column": c,
                    "node": spec.element_to_json(r),
                    "in_ideal": expected.is_some(),
                    "radius": radius,
                });
                return Ok(CheckVerdict::violation(CHECK, format!("{} on basis vector {c} disagrees with the closed form", word.display(&spec)), wit).with_rep(&lam.name));
            }
        }
    }
    let (table, _) = interior_core_table(engine, Joint::single(&lam, b.l), b.core_config(Prune::Distinct))?;
    if let Some(w) = &table.escape {
        return Ok(escape_inconclusive(CHECK, &lam, w, radius));
    }
    let mut empty_words = 0;
    for ent in table.entries.iter().filter(|e| engine.is_empty_on_ball(&e.ideal)) {
        for (w, v) in ent.words.iter().zip(&ent.values) {
            empty_words += 1;
            if !values_zero(&v[0], tol) {
                let wit = combination_witness("theorem-a-i", &spec, &Combination::<S>::single(w.clone()), radius, b.l);
                return Ok(CheckVerdict::violation(CHECK, format!("{} has empty ideal but nonzero image", w.display(&spec)), wit).with_rep(&lam.name));
            }
        }
    }
    Ok(CheckVerdict::pass(
        CHECK,
        format!("{samples} random words match the closed form on {compared} basis vectors; {empty_words} distinct empty-ideal images vanish"),
    )
    .with_rep(&lam.name)
    .with_details(json!({"samples": samples, "compared": compared, "seed": b.seed, "empty_ideal_images": empty_words})))
}
