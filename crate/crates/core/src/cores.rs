//! Enumeration of neutral operator words grouped by their ideal, and the
//! K-core spans they produce in one or several representations.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ideal::{Backend, ConstructibleIdeal, IdealEngine};
use crate::linalg::{SVec, Span};
use crate::monoid::{enumerate_ball, GroupElement, MonoidSpec};
use crate::rep::{flatten, Letter, OperatorWord, Rep, Values};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prune {
    /// Keep a state only if it enlarges the span of its class.
    Span,
    /// Keep a state only if its value is new in its class.
    Distinct,
}

#[derive(Clone, Copy, Debug)]
pub struct CoreConfig {
    /// Maximal number of `(p, q)` pairs; words have at most `2w` letters.
    pub w: usize,
    pub letter_radius: usize,
    /// Cap on generated states.
    pub cap: usize,
    pub prune: Prune,
}

/// Representations evaluated jointly, each on its own probe columns.
pub struct Joint<'a, S> {
    pub reps: Vec<&'a Rep<S>>,
    pub cols: Vec<Vec<usize>>,
}

impl<'a, S: Scalar> Joint<'a, S> {
    pub fn single(rep: &'a Rep<S>, radius: usize) -> Self {
        Joint {
            cols: vec![rep.probe(radius)],
            reps: vec![rep],
        }
    }

    fn flat_dim(&self) -> usize {
        self.reps.iter().zip(&self.cols).map(|(r, c)| r.dim() * c.len()).sum()
    }

    fn flatten(&self, vals: &[Values<S>]) -> SVec<S> {
        let mut out = Vec::new();
        let mut off = 0;
        for ((r, c), v) in self.reps.iter().zip(&self.cols).zip(vals) {
            out.extend(flatten(v, r.dim()).into_iter().map(|(i, x)| (off + i, x)));
            off += r.dim() * c.len();
        }
        out
    }

    fn tol(&self) -> f64 {
        self.reps.first().map_or(0.0, |r| r.tol())
    }
}

/// Neutral words found for one ideal.
#[derive(Clone, Debug)]
pub struct CoreEntry<S> {
    pub ideal: ConstructibleIdeal,
    /// Kept words; the first one found is always kept.
    pub words: Vec<OperatorWord>,
    /// Per kept word, per representation.
    pub values: Vec<Vec<Values<S>>>,
    /// Kept words whose joint values form a basis of the core span.
    pub basis: Vec<usize>,
    /// Neutral completions reaching this ideal.
    pub found: usize,
}

impl<S: Scalar> CoreEntry<S> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct CoreTable<S> {
    pub entries: Vec<CoreEntry<S>>,
    pub states: usize,
    /// First word whose evaluation left the truncation; the table is then partial.
    pub escape: Option<OperatorWord>,
    /// Every escaping word at the depth where the first escape happened.
    pub escapes: Vec<OperatorWord>,
    pub config: CoreConfig,
}

impl<S: Scalar> CoreTable<S> {
    pub fn entry(&self, x: &ConstructibleIdeal) -> Option<&CoreEntry<S>> {
        self.entries.iter().find(|e| e.ideal.backend == x.backend)
    }
}

/// Letters available at each slot: ball elements of the letter radius times coefficient indices.
pub fn alphabet<S: Scalar>(rep: &Rep<S>, letter_radius: usize) -> Result<Vec<(GroupElement, usize)>> {
    let ball = enumerate_ball(rep.monoid(), letter_radius)?;
    Ok(ball
        .elements()
        .iter()
        .flat_map(|p| (0..rep.letter_count(p)).map(move |i| (p.clone(), i)))
        .collect())
}

/// A distance from `e` that each letter `p` changes by at most `norm(p)`.
fn norm(g: &GroupElement) -> Option<i64> {
    match g {
        GroupElement::Lattice(v) => Some(v.iter().map(|x| x.abs()).sum()),
        GroupElement::Free(w) => Some(w.len() as i64),
        GroupElement::Int(n) => Some(n.abs()),
        _ => None,
    }
}

struct State<S> {
    z: ConstructibleIdeal,
    g: GroupElement,
    next_star: bool,
    letters: Vec<Letter>,
    vals: Vec<Values<S>>,
}

enum ClassData<S> {
    Span(Span<S>),
    Seen(Vec<SVec<S>>),
}

fn same_vec<S: Scalar>(a: &SVec<S>, b: &SVec<S>, tol: f64) -> bool {
    if S::EXACT {
        return a == b;
    }
    let mut i = 0;
    let mut j = 0;
    while i < a.len() || j < b.len() {
        let (ka, kb) = (a.get(i).map(|x| x.0), b.get(j).map(|x| x.0));
        let d = match (ka, kb) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
                a[i - 1].1.sub(&b[j - 1].1)
            }
            (Some(x), Some(y)) if x < y => {
                i += 1;
                a[i - 1].1.clone()
            }
            (Some(_), None) => {
                i += 1;
                a[i - 1].1.clone()
            }
            _ => {
                j += 1;
                b[j - 1].1.clone()
            }
        };
        if !d.is_zero_tol(tol) {
            return false;
        }
    }
    true
}

impl<S: Scalar> ClassData<S> {
    fn new(prune: Prune, dim: usize, rep: &Rep<S>) -> Self {
        match prune {
            Prune::Span => ClassData::Span(Span::new(dim, rep.num)),
            Prune::Distinct => ClassData::Seen(Vec::new()),
        }
    }

    /// Records `v`; returns whether it was new.
    fn offer(&mut self, v: &SVec<S>, tol: f64) -> bool {
        match self {
            ClassData::Span(s) => s.insert(v),
            ClassData::Seen(seen) => {
                if seen.iter().any(|w| same_vec(w, v, tol)) {
                    false
                } else {
                    seen.push(v.clone());
                    true
                }
            }
        }
    }
}

/// Runs the right-to-left enumeration of alternating words with at most
/// `2·cfg.w` letters drawn from `Ball(cfg.letter_radius)`.
pub fn core_table<S: Scalar>(engine: &IdealEngine, joint: &Joint<S>, cfg: CoreConfig) -> Result<CoreTable<S>> {
    let spec: &MonoidSpec = &engine.spec;
    let lead = *joint.reps.first().ok_or_else(|| Error::Structural("core enumeration needs a representation".into()))?;
    let alpha = alphabet(lead, cfg.letter_radius)?;
    let step_norm = alpha.iter().map(|(p, _)| norm(p)).try_fold(0i64, |m, n| n.map(|n| m.max(n)));
    let dim = joint.flat_dim();
    let tol = joint.tol();
    let e = spec.identity();

    let start_vals: Vec<Values<S>> = joint.reps.iter().zip(&joint.cols).map(|(r, c)| r.unit_columns(c)).collect();
    let mut frontier: Vec<State<S>> = [false, true]
        .into_iter()
        .map(|next_star| State {
            z: engine.full(),
            g: e.clone(),
            next_star,
            letters: Vec::new(),
            vals: start_vals.clone(),
        })
        .collect();

    let mut classes: HashMap<(Backend, GroupElement, bool), ClassData<S>> = HashMap::new();
    let mut entries: Vec<CoreEntry<S>> = Vec::new();
    let mut entry_spans: Vec<Span<S>> = Vec::new();
    let mut entry_seen: Vec<Vec<SVec<S>>> = Vec::new();
    let mut entry_of: HashMap<Backend, usize> = HashMap::new();
    let mut states = 0usize;
    let max_depth = 2 * cfg.w;

    for depth in 1..=max_depth {
        let remaining = (max_depth - depth) as i64;
        let candidates: Vec<Result<Option<State<S>>>> = frontier
            .par_iter()
            .flat_map_iter(|st| alpha.iter().map(move |(p, i)| (st, p, *i)))
            .map(|(st, p, i)| {
                let letter = Letter { elem: p.clone(), basis: i, adjoint: st.next_star };
                let (z, g) = if st.next_star {
                    (engine.preimage(p, &st.z), spec.mul(&spec.inv(p), &st.g))
                } else {
                    (engine.left_mult(p, &st.z), spec.mul(p, &st.g))
                };
                if let (Some(n), Some(step)) = (norm(&g), step_norm) {
                    if n > remaining * step {
                        return Ok(None);
                    }
                }
                let mut vals = Vec::with_capacity(st.vals.len());
                let mut letters = Vec::with_capacity(st.letters.len() + 1);
                letters.push(letter.clone());
                letters.extend(st.letters.iter().cloned());
                for (rep, v) in joint.reps.iter().zip(&st.vals) {
                    match rep.apply(&letter, v)? {
                        Some(nv) => vals.push(nv),
                        None => {
                            return Ok(Some(State { z, g, next_star: !st.next_star, letters, vals: Vec::new() }));
                        }
                    }
                }
                Ok(Some(State { z, g, next_star: !st.next_star, letters, vals }))
            })
            .collect();

        let mut next = Vec::new();
        let mut escapes = Vec::new();
        for cand in candidates {
            let Some(st) = cand? else { continue };
            states += 1;
            if states > cfg.cap {
                return Err(Error::resource(format!("core enumeration at word length {depth}"), cfg.cap, "core_cap"));
            }
            if st.vals.len() != joint.reps.len() {
                escapes.push(OperatorWord::new(st.letters));
                continue;
            }
            let flat = joint.flatten(&st.vals);
            let key = (st.z.backend.clone(), st.g.clone(), st.next_star);
            let fresh_class = !classes.contains_key(&key);
            let class = classes.entry(key).or_insert_with(|| ClassData::new(cfg.prune, dim, lead));
            let grew = class.offer(&flat, tol);
            let keep = fresh_class || grew;

            if spec.is_identity(&st.g) {
                let word = OperatorWord::new(st.letters.clone());
                let idx = match entry_of.get(&st.z.backend) {
                    Some(&k) => k,
                    None => {
                        let iw = word.ideal_word(spec).expect("enumerated words alternate");
                        entries.push(CoreEntry {
                            ideal: ConstructibleIdeal { word: iw, backend: st.z.backend.clone() },
                            words: Vec::new(),
                            values: Vec::new(),
                            basis: Vec::new(),
                            found: 0,
                        });
                        entry_spans.push(Span::new(dim, lead.num));
                        entry_seen.push(Vec::new());
                        entry_of.insert(st.z.backend.clone(), entries.len() - 1);
                        entries.len() - 1
                    }
                };
                let ent = &mut entries[idx];
                ent.found += 1;
                let in_basis = entry_spans[idx].insert(&flat);
                let new_value = match cfg.prune {
                    Prune::Span => in_basis,
                    Prune::Distinct => {
                        let seen = &mut entry_seen[idx];
                        if seen.iter().any(|w| same_vec(w, &flat, tol)) {
                            false
                        } else {
                            seen.push(flat.clone());
                            true
                        }
                    }
                };
                if new_value || ent.words.is_empty() {
                    if in_basis {
                        ent.basis.push(ent.words.len());
                    }
                    ent.words.push(word);
                    ent.values.push(st.vals.clone());
                }
            }
            if keep && depth < max_depth {
                next.push(st);
            }
        }
        if !escapes.is_empty() {
            return Ok(CoreTable {
                entries,
                states,
                escape: escapes.first().cloned(),
                escapes,
                config: cfg,
            });
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(CoreTable {
        entries,
        states,
        escape: None,
        escapes: Vec::new(),
        config: cfg,
    })
}

/// [`core_table`] on the common interior: probe columns through which an
/// enumerated word leaves the truncation are dropped and the enumeration is
/// rerun. The returned table still has `escape` set if some representation
/// loses every column.
pub fn interior_core_table<'a, S: Scalar>(engine: &IdealEngine, mut joint: Joint<'a, S>, cfg: CoreConfig) -> Result<(CoreTable<S>, Joint<'a, S>)> {
    loop {
        let table = core_table(engine, &joint, cfg)?;
        if table.escapes.is_empty() {
            return Ok((table, joint));
        }
        let mut dropped = 0;
        for (rep, cols) in joint.reps.iter().zip(joint.cols.iter_mut()) {
            let before = cols.len();
            let mut keep = Vec::with_capacity(before);
            for &c in cols.iter() {
                let mut inside = true;
                for w in &table.escapes {
                    if rep.eval(w, &[c])?.is_none() {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    keep.push(c);
                }
            }
            dropped += before - keep.len();
            *cols = keep;
        }
        if dropped == 0 || joint.cols.iter().any(Vec::is_empty) {
            return Ok((table, joint));
        }
    }
}

/// Every alternating neutral word of at most `2w` letters over `Ball(letter_radius)`
/// (coefficient indices up to `letters_at(p)`) whose ideal equals `x`. Brute force.
pub fn enumerate_core_words(
    engine: &IdealEngine,
    x: &ConstructibleIdeal,
    w: usize,
    letter_radius: usize,
    letters_at: impl Fn(&GroupElement) -> usize,
    cap: usize,
) -> Result<Vec<OperatorWord>> {
    let spec = &engine.spec;
    let ball = enumerate_ball(spec, letter_radius)?;
    let alpha: Vec<(GroupElement, usize)> = ball
        .elements()
        .iter()
        .flat_map(|p| (0..letters_at(p)).map(move |i| (p.clone(), i)))
        .collect();
    let mut out = Vec::new();
    let mut count = 0usize;
    let mut stack: Vec<Vec<Letter>> = vec![];
    for first_star in [false, true] {
        for (p, i) in &alpha {
            stack.push(vec![Letter { elem: p.clone(), basis: *i, adjoint: first_star }]);
        }
    }
    while let Some(letters) = stack.pop() {
        count += 1;
        if count > cap {
            return Err(Error::resource("brute-force core word enumeration", cap, "core_cap"));
        }
        let word = OperatorWord::new(letters);
        if spec.is_identity(&word.degree(spec)) {
            let iw = word.ideal_word(spec).expect("alternating");
            if engine.same(&engine.k_of_word(&iw), x) {
                out.push(word.clone());
            }
        }
        if word.len() < 2 * w {
            let star = !word.letters.last().unwrap().adjoint;
            for (p, i) in &alpha {
                let mut l = word.letters.clone();
                l.push(Letter { elem: p.clone(), basis: *i, adjoint: star });
                stack.push(l);
            }
        }
    }
    out.sort_by_key(|w| w.len());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FiberSystem, ProductSystemSpec, TruncatedFock};
    use crate::monoid::GroupElement::{Free, Lattice};
    use crate::rep::{fock_rep, values_zero};
    use crate::scalar::{GaussRational, Numerics};
    use std::sync::Arc;

    type Q = GaussRational;

    fn lambda(spec: &MonoidSpec, r: usize) -> Rep<Q> {
        let fs = Arc::new(FiberSystem::build(Arc::new(ProductSystemSpec::x_p(spec)), spec, r, Numerics::default()).unwrap());
        fock_rep("lambda", Arc::new(TruncatedFock::new(fs)))
    }

    fn cfg(w: usize, prune: Prune) -> CoreConfig {
        CoreConfig { w, letter_radius: 1, cap: 1_000_000, prune }
    }

    #[test]
    fn identity_word_is_in_the_core_of_p() {
        let n = MonoidSpec::numerical(&[1]).unwrap();
        let eng = IdealEngine::new(&n, 8).unwrap();
        let rep = lambda(&n, 6);
        let t = core_table(&eng, &Joint::single(&rep, 3), cfg(1, Prune::Distinct)).unwrap();
        let p = t.entry(&eng.full()).unwrap();
        assert!(p.words.iter().any(|w| w.len() == 1 && w.letters[0].elem == n.identity()));
    }

    #[test]
    fn free_monoid_empty_core_vanishes() {
        let f = MonoidSpec::free(2);
        let eng = IdealEngine::new(&f, 4).unwrap();
        let rep = lambda(&f, 6);
        let t = core_table(&eng, &Joint::single(&rep, 2), cfg(2, Prune::Span)).unwrap();
        assert!(t.escape.is_none());
        let empty = t.entries.iter().find(|e| e.ideal.backend == Backend::Empty).unwrap();
        assert_eq!(empty.rank(), 0);
        assert!(empty.values.iter().all(|v| values_zero(&v[0], 0.0)));
        let (e, a, b) = (Free(vec![]), Free(vec![1]), Free(vec![2]));
        let brute = enumerate_core_words(&eng, &empty.ideal, 2, 1, |_| 1, 100_000).unwrap();
        let target = OperatorWord::new(vec![
            Letter::plain(a.clone(), 0),
            Letter::star(a, 0),
            Letter::plain(b.clone(), 0),
            Letter::star(b, 0),
        ]);
        assert!(brute.contains(&target));
        let _ = e;
    }

    #[test]
    fn lattice_corner_core_contains_projection() {
        let z2 = MonoidSpec::lattice(2);
        let eng = IdealEngine::new(&z2, 6).unwrap();
        let rep = lambda(&z2, 7);
        let w = Lattice(vec![1, 1]);
        let x = eng.left_mult(&w, &eng.full());
        let t = core_table(&eng, &Joint::single(&rep, 3), CoreConfig { w: 1, letter_radius: 2, cap: 1_000_000, prune: Prune::Distinct }).unwrap();
        let ent = t.entry(&x).unwrap();
        let target = OperatorWord::new(vec![Letter::plain(w.clone(), 0), Letter::star(w, 0)]);
        let cols = rep.probe(3);
        let tv = rep.eval(&target, &cols).unwrap().unwrap();
        assert!(ent.values.iter().any(|v| v[0] == tv));
    }
}
