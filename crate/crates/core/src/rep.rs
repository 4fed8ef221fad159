//! Representations as letter sources on a truncated space, operator words, and
//! escape-checked evaluation on probe columns.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::{Atom, FiberSystem, LetterCache, LetterOp, ProductSystemSpec, TruncatedFock};
use crate::ideal::Word;
use crate::linalg::{svec_add_scaled, Mat, SVec};
use crate::monoid::{GroupElement, MonoidSpec};
use crate::scalar::{parse_literal, Numerics, Scalar};

/// Images of probe columns, one sparse vector per column.
pub type Values<S> = Vec<SVec<S>>;

/// Builds the operator of one letter `t_p(ξ_i)` or its adjoint.
pub trait LetterSource<S>: Send + Sync + fmt::Debug {
    fn build(&self, p: &GroupElement, i: usize, adjoint: bool) -> Result<LetterOp<S>>;

    /// Letters at `p` beyond the fiber basis.
    fn extra_letters(&self, _p: &GroupElement) -> usize {
        0
    }
}

#[derive(Debug)]
pub struct Rep<S> {
    pub name: String,
    pub kind: &'static str,
    /// Truncation radius the operators were built at.
    pub radius: usize,
    pub fibers: Arc<FiberSystem<S>>,
    /// Letters at `p` are `fiber(p).len() * copies`.
    pub copies: usize,
    pub num: Numerics,
    /// Set for Fock representations.
    pub fock: Option<Arc<TruncatedFock<S>>>,
    dim: usize,
    levels: Vec<usize>,
    source: Arc<dyn LetterSource<S>>,
    cache: Mutex<LetterCache<S>>,
}

impl<S: Scalar> Rep<S> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: &str,
        kind: &'static str,
        radius: usize,
        fibers: Arc<FiberSystem<S>>,
        copies: usize,
        levels: Vec<usize>,
        source: Arc<dyn LetterSource<S>>,
    ) -> Self {
        let num = fibers.num;
        Rep {
            name: name.to_string(),
            kind,
            radius,
            fibers,
            copies,
            num,
            fock: None,
            dim: levels.len(),
            levels,
            source,
            cache: Mutex::new(LetterCache::default()),
        }
    }

    pub fn monoid(&self) -> &MonoidSpec {
        &self.fibers.monoid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self, k: usize) -> usize {
        self.levels[k]
    }

    pub fn tol(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            self.num.tol
        }
    }

    pub fn letter_count(&self, p: &GroupElement) -> usize {
        self.fibers.fiber(p).map_or(0, |f| f.len() * self.copies) + self.source.extra_letters(p)
    }

    /// Basis vectors of level at most `radius`, ascending.
    pub fn probe(&self, radius: usize) -> Vec<usize> {
        (0..self.dim).filter(|&k| self.levels[k] <= radius).collect()
    }

    pub fn op(&self, p: &GroupElement, i: usize, adjoint: bool) -> Result<Arc<LetterOp<S>>> {
        if i >= self.letter_count(p) {
            return Err(Error::Structural(format!("letter {p}[{i}] is not available in rep {}", self.name)));
        }
        let mut cache = self.cache.lock().expect("letter cache poisoned");
        cache.get_or((p.clone(), i, adjoint), || self.source.build(p, i, adjoint))
    }

    pub fn unit_columns(&self, cols: &[usize]) -> Values<S> {
        cols.iter().map(|&c| vec![(c, S::one())]).collect()
    }

    /// Applies one letter to every column; `None` if some column escapes.
    pub fn apply(&self, letter: &Letter, vals: &Values<S>) -> Result<Option<Values<S>>> {
        // A letter beyond the fiber ball has no truncated operator: it escapes
        // unless there is nothing to move.
        if self.fibers.fiber(&letter.elem).is_none() && self.source.extra_letters(&letter.elem) == 0 {
            let tol = self.tol();
            return Ok(vals.iter().all(|v| v.iter().all(|(_, x)| x.is_zero_tol(tol))).then(|| vals.clone()));
        }
        let op = self.op(&letter.elem, letter.basis, letter.adjoint)?;
        let tol = self.tol();
        Ok(vals.iter().map(|v| op.apply(v, tol)).collect())
    }

    /// Applies a whole word (rightmost letter first) to `vals`.
    pub fn eval_on(&self, word: &OperatorWord, vals: Values<S>) -> Result<Option<Values<S>>> {
        let mut cur = vals;
        for l in word.letters.iter().rev() {
            match self.apply(l, &cur)? {
                Some(v) => cur = v,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    pub fn eval(&self, word: &OperatorWord, cols: &[usize]) -> Result<Option<Values<S>>> {
        self.eval_on(word, self.unit_columns(cols))
    }

    /// Full truncated matrix of a letter, ignoring escapes.
    pub fn matrix(&self, letter: &Letter) -> Result<Mat<S>> {
        Ok(self.op(&letter.elem, letter.basis, letter.adjoint)?.mat.clone())
    }
}

/// Column-stacked flattening of probe images: column `c`, row `i` ↦ `c·dim + i`.
pub fn flatten<S: Scalar>(vals: &Values<S>, dim: usize) -> SVec<S> {
    vals.iter()
        .enumerate()
        .flat_map(|(c, v)| v.iter().map(move |(i, x)| (c * dim + i, x.clone())))
        .collect()
}

pub fn values_zero<S: Scalar>(vals: &Values<S>, tol: f64) -> bool {
    vals.iter().all(|v| v.iter().all(|(_, x)| x.is_zero_tol(tol)))
}

/// `acc += c · v`, column by column.
pub fn values_axpy<S: Scalar>(acc: &mut Values<S>, c: &S, v: &Values<S>, tol: f64) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = svec_add_scaled(a, c, b, tol);
    }
}

/// Probe columns as a `dim × cols` matrix.
pub fn values_matrix<S: Scalar>(vals: &Values<S>, dim: usize) -> Mat<S> {
    Mat::from_columns(dim, vals.clone())
}

/// A linear combination of operator words.
#[derive(Clone, Debug, PartialEq)]
pub struct Combination<S> {
    pub terms: Vec<(S, OperatorWord)>,
}

impl<S: Scalar> Combination<S> {
    pub fn single(word: OperatorWord) -> Self {
        Combination { terms: vec![(S::one(), word)] }
    }

    pub fn difference(a: OperatorWord, b: OperatorWord) -> Self {
        Combination {
            terms: vec![(S::one(), a), (S::one().neg(), b)],
        }
    }

    /// Largest number of creation letters in a term.
    pub fn creations(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.letters.iter().filter(|l| !l.adjoint).count()).max().unwrap_or(0)
    }

    /// Image of one column; `None` if some term escapes the truncation there.
    pub fn eval_column(&self, rep: &Rep<S>, col: usize) -> Result<Option<SVec<S>>> {
        let tol = rep.tol();
        let mut acc: SVec<S> = Vec::new();
        for (c, w) in &self.terms {
            match rep.eval(w, &[col])? {
                Some(v) => acc = svec_add_scaled(&acc, c, &v[0], tol),
                None => return Ok(None),
            }
        }
        Ok(Some(acc))
    }

    pub fn eval(&self, rep: &Rep<S>, cols: &[usize]) -> Result<Option<Values<S>>> {
        self.eval_on(rep, rep.unit_columns(cols))
    }

    pub fn eval_on(&self, rep: &Rep<S>, vals: Values<S>) -> Result<Option<Values<S>>> {
        let mut out = vec![Vec::new(); vals.len()];
        for (c, w) in &self.terms {
            match rep.eval_on(w, vals.clone())? {
                Some(v) => values_axpy(&mut out, c, &v, rep.tol()),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }

    pub fn to_json(&self, spec: &MonoidSpec) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(c, w)| json!({"coefficient": c.to_json(), "word": w.to_json(spec)}))
                .collect(),
        )
    }

    pub fn from_json(spec: &MonoidSpec, v: &Value, path: &str) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::schema(path, "combination must be a list of terms"))?;
        let terms = arr
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let tp = format!("{path}[{k}]");
                let c = match t.get("coefficient") {
                    Some(c) => S::from_literal(&parse_literal(c, &format!("{tp}.coefficient"))?)?,
                    None => S::one(),
                };
                let w = OperatorWord::from_json(spec, t.get("word").ok_or_else(|| Error::schema(&tp, "missing \"word\""))?, &format!("{tp}.word"))?;
                Ok((c, w))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Combination { terms })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub elem: GroupElement,
    pub basis: usize,
    pub adjoint: bool,
}

impl Letter {
    pub fn plain(elem: GroupElement, basis: usize) -> Self {
        Letter { elem, basis, adjoint: false }
    }

    pub fn star(elem: GroupElement, basis: usize) -> Self {
        Letter { elem, basis, adjoint: true }
    }
}

/// A product of letters, left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OperatorWord {
    pub letters: Vec<Letter>,
}

impl OperatorWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        OperatorWord { letters }
    }

    /// The operator word of `α` with coefficient index `basis` in every slot.
    pub fn from_word(word: &Word, basis: usize) -> Self {
        let n = word.pairs.len();
        let mut letters = Vec::with_capacity(2 * n);
        for (k, (p, q)) in word.pairs.iter().enumerate() {
            if k > 0 || word.eps_left {
                letters.push(Letter::star(p.clone(), basis));
            }
            if k + 1 < n || word.eps_right {
                letters.push(Letter::plain(q.clone(), basis));
            }
        }
        OperatorWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn degree(&self, spec: &MonoidSpec) -> GroupElement {
        self.letters.iter().fold(spec.identity(), |g, l| {
            let x = if l.adjoint { spec.inv(&l.elem) } else { l.elem.clone() };
            spec.mul(&g, &x)
        })
    }

    pub fn is_alternating(&self) -> bool {
        self.letters.windows(2).all(|w| w[0].adjoint != w[1].adjoint)
    }

    /// The word `α` read off an alternating operator word.
    pub fn ideal_word(&self, spec: &MonoidSpec) -> Option<Word> {
        if self.letters.is_empty() || !self.is_alternating() {
            return None;
        }
        let e = spec.identity();
        let mut pairs = Vec::new();
        let mut it = self.letters.iter().peekable();
        let eps_left = self.letters[0].adjoint;
        while let Some(l) = it.next() {
            if l.adjoint {
                let q = match it.peek() {
                    Some(n) if !n.adjoint => it.next().map(|n| n.elem.clone()).unwrap(),
                    _ => e.clone(),
                };
                pairs.push((l.elem.clone(), q));
            } else {
                pairs.push((e.clone(), l.elem.clone()));
            }
        }
        let eps_right = !self.letters.last().unwrap().adjoint;
        Some(Word { pairs, eps_left, eps_right })
    }

    /// Total level of the creation letters: how far outward the word can push a vector.
    pub fn reach(&self, level: impl Fn(&GroupElement) -> Option<usize>) -> Option<usize> {
        self.letters.iter().filter(|l| !l.adjoint).map(|l| level(&l.elem)).sum()
    }

    pub fn adjoint(&self) -> OperatorWord {
        OperatorWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter { adjoint: !l.adjoint, ..l.clone() })
                .collect(),
        }
    }

    pub fn concat(&self, other: &OperatorWord) -> OperatorWord {
        OperatorWord {
            letters: self.letters.iter().chain(&other.letters).cloned().collect(),
        }
    }

    pub fn to_json(&self, spec: &MonoidSpec) -> Value {
        Value::Array(
            self.letters
                .iter()
                .map(|l| json!({"p": spec.element_to_json(&l.elem), "i": l.basis, "star": l.adjoint}))
                .collect(),
        )
    }

    pub fn from_json(spec: &MonoidSpec, v: &Value, path: &str) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::schema(path, "operator word must be a list of letters"))?;
        let letters = arr
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let lp = format!("{path}[{k}]");
                let p = spec.element_from_json(l.get("p").ok_or_else(|| Error::schema(&lp, "missing \"p\""))?, &lp)?;
                if !spec.in_monoid(&p) {
                    return Err(Error::schema(&lp, "letter must lie in the monoid"));
                }
                let basis = l.get("i").and_then(Value::as_u64).unwrap_or(0) as usize;
                let adjoint = l.get("star").and_then(Value::as_bool).unwrap_or(false);
                Ok(Letter { elem: p, basis, adjoint })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorWord { letters })
    }

    pub fn display(&self, spec: &MonoidSpec) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        self.letters
            .iter()
            .map(|l| {
                let x = spec.element_to_json(&l.elem).to_string();
                let c = if l.basis > 0 { format!("[{}]", l.basis) } else { String::new() };
                format!("t{}({x}){c}", if l.adjoint { "*" } else { "" })
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `λ` on the truncated Fock module.
#[derive(Debug)]
pub struct FockSource<S> {
    pub fock: Arc<TruncatedFock<S>>,
}

impl<S: Scalar> LetterSource<S> for FockSource<S> {
    fn build(&self, p: &GroupElement, i: usize, adjoint: bool) -> Result<LetterOp<S>> {
        if adjoint {
            self.fock.annihilation(p, i)
        } else {
            self.fock.creation(p, i)
        }
    }
}

/// Evaluates fiber monomials with given atom operators; adjoints are conjugate transposes.
#[derive(Debug)]
pub struct MonomialSource<S> {
    pub fibers: Arc<FiberSystem<S>>,
    pub coefs: Vec<LetterOp<S>>,
    /// Per declared fiber, per generator.
    pub gens: Vec<Vec<LetterOp<S>>>,
    pub dim: usize,
}

impl<S: Scalar> LetterSource<S> for MonomialSource<S> {
    fn build(&self, p: &GroupElement, i: usize, adjoint: bool) -> Result<LetterOp<S>> {
        let fib = self.fibers.fiber(p).ok_or_else(|| Error::Structural(format!("{p} is outside the fiber ball")))?;
        let mut op = LetterOp::identity(self.dim);
        for a in fib.monomial(i) {
            let next = match *a {
                Atom::Coef { index, adjoint: false } => self.coefs[index].clone(),
                Atom::Coef { index, adjoint: true } => LetterOp::exact(self.coefs[index].mat.adjoint()),
                Atom::Fiber { decl, index } => self.gens[decl][index].clone(),
            };
            op = op.compose(&next);
        }
        Ok(if adjoint { LetterOp::exact(op.mat.adjoint()) } else { op })
    }
}

pub fn fock_rep<S: Scalar>(name: &str, fock: Arc<TruncatedFock<S>>) -> Rep<S> {
    let levels = (0..fock.dim()).map(|k| fock.ball().level(fock.node(k))).collect();
    let fibers = fock.fibers.clone();
    let radius = fibers.ball.radius;
    let mut rep = Rep::new(name, "fock", radius, fibers, 1, levels, Arc::new(FockSource { fock: fock.clone() }));
    rep.fock = Some(fock);
    rep
}

/// `S^w` on `ℓ²{0..n-1}`: columns with `k + w ≥ n` escape.
pub fn shift_op<S: Scalar>(n: usize, w: usize) -> LetterOp<S> {
    let mat = Mat::from_triplets(n, n, (0..n).filter(|k| k + w < n).map(|k| (k + w, k, S::one())));
    LetterOp {
        mat,
        escapes: (0..n).map(|k| k + w >= n).collect(),
    }
}

/// `w_g = S^{weights[g]}` on a truncated `ℓ²(ℕ)`. Requires the semigroup case.
pub fn shift_rep<S: Scalar>(name: &str, fibers: Arc<FiberSystem<S>>, weights: &[usize]) -> Result<Rep<S>> {
    let monoid = &fibers.monoid;
    if !fibers.spec.is_semigroup_case() {
        return Err(Error::Structural("shift-power representations need the product system X_P".into()));
    }
    if weights.len() != monoid.generators.len() {
        return Err(Error::schema("weights", format!("expected {} weights", monoid.generators.len())));
    }
    let radius = fibers.ball.radius;
    let maxw = weights.iter().copied().max().unwrap_or(0);
    let n = maxw * radius + 1;
    let decl_weight: Vec<usize> = fibers
        .spec
        .fibers
        .iter()
        .map(|f| {
            monoid
                .generators
                .iter()
                .position(|g| monoid.eq(g, &f.element))
                .map(|k| weights[k])
                .ok_or_else(|| Error::Structural("shift-power: declared fiber is not a generator".into()))
        })
        .collect::<Result<_>>()?;
    let levels = (0..n).map(|k| if maxw == 0 { 0 } else { k.div_ceil(maxw) }).collect();
    let source = MonomialSource {
        fibers: fibers.clone(),
        coefs: vec![LetterOp::identity(n)],
        gens: decl_weight.iter().map(|&w| vec![shift_op(n, w)]).collect(),
        dim: n,
    };
    Ok(Rep::new(name, "shift-power", radius, fibers, 1, levels, Arc::new(source)))
}

/// Literal matrices for coefficient and declared fiber generators.
pub fn literal_rep<S: Scalar>(name: &str, fibers: Arc<FiberSystem<S>>, coefs: Vec<Mat<S>>, gens: Vec<Vec<Mat<S>>>) -> Result<Rep<S>> {
    let spec = &fibers.spec;
    let n = coefs.first().or_else(|| gens.iter().flatten().next()).map(|m| m.rows()).unwrap_or(0);
    if n == 0 {
        return Err(Error::schema("representation", "matrix representation needs at least one matrix"));
    }
    if coefs.len() != spec.coefficients.len() {
        return Err(Error::schema("representation.coefficients", format!("expected {} matrices", spec.coefficients.len())));
    }
    if gens.len() != spec.fibers.len() || gens.iter().zip(&spec.fibers).any(|(g, f)| g.len() != f.generators.len()) {
        return Err(Error::schema("representation.fibers", "must mirror the declared fibers of the product system"));
    }
    if coefs.iter().chain(gens.iter().flatten()).any(|m| m.rows() != n || m.cols() != n) {
        return Err(Error::schema("representation", format!("all matrices must be {n}x{n}")));
    }
    let radius = fibers.ball.radius;
    let source = MonomialSource {
        fibers: fibers.clone(),
        coefs: coefs.into_iter().map(LetterOp::exact).collect(),
        gens: gens.into_iter().map(|g| g.into_iter().map(LetterOp::exact).collect()).collect(),
        dim: n,
    };
    Ok(Rep::new(name, "matrix", radius, fibers, 1, vec![0; n], Arc::new(source)))
}

type Builder<S> = dyn Fn(usize) -> Result<Rep<S>> + Send + Sync;

/// Memoised truncations of one representation, keyed by radius.
pub struct RepCache<S> {
    build: Box<Builder<S>>,
    cache: Mutex<HashMap<usize, Arc<Rep<S>>>>,
}

impl<S> fmt::Debug for RepCache<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepCache").finish_non_exhaustive()
    }
}

impl<S: Scalar> RepCache<S> {
    pub fn new(build: impl Fn(usize) -> Result<Rep<S>> + Send + Sync + 'static) -> Self {
        RepCache {
            build: Box::new(build),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(&self, radius: usize) -> Result<Arc<Rep<S>>> {
        if let Some(r) = self.cache.lock().expect("rep cache poisoned").get(&radius) {
            return Ok(r.clone());
        }
        let rep = Arc::new((self.build)(radius)?);
        self.cache.lock().expect("rep cache poisoned").insert(radius, rep.clone());
        Ok(rep)
    }

    /// `λ` on the Fock module of `spec`.
    pub fn fock(name: &str, spec: Arc<ProductSystemSpec<S>>, monoid: MonoidSpec, num: Numerics) -> Self {
        let name = name.to_string();
        RepCache::new(move |r| {
            let fs = Arc::new(FiberSystem::build(spec.clone(), &monoid, r, num)?);
            Ok(fock_rep(&name, Arc::new(TruncatedFock::new(fs))))
        })
    }

    /// `w_g = S^{weights[g]}` on a truncated `ℓ²(ℕ)`.
    pub fn shift(name: &str, monoid: MonoidSpec, weights: Vec<usize>, num: Numerics) -> Self {
        let name = name.to_string();
        RepCache::new(move |r| {
            let fs = Arc::new(FiberSystem::build(Arc::new(ProductSystemSpec::x_p(&monoid)), &monoid, r, num)?);
            shift_rep(&name, fs, &weights)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ProductSystemSpec;
    use crate::ideal::IdealEngine;
    use crate::monoid::GroupElement::{Free, Int, Lattice};
    use crate::scalar::GaussRational;

    type Q = GaussRational;

    fn xp(spec: &MonoidSpec, r: usize) -> Arc<FiberSystem<Q>> {
        Arc::new(FiberSystem::build(Arc::new(ProductSystemSpec::x_p(spec)), spec, r, Numerics::default()).unwrap())
    }

    #[test]
    fn ideal_word_roundtrip() {
        let n = MonoidSpec::numerical(&[1]).unwrap();
        for flat in [[2, 3, 3, 2], [0, 2, 2, 0]] {
            let w = Word::from_flat(&flat.map(Int)).unwrap();
            let ow = OperatorWord::from_word(&w, 0);
            assert_eq!(ow.ideal_word(&n).unwrap(), w);
        }
        let mut w = Word::from_flat(&[Int(0), Int(2), Int(2), Int(0)]).unwrap();
        w.eps_left = false;
        w.eps_right = false;
        let ow = OperatorWord::from_word(&w, 0);
        assert_eq!(ow.len(), 2);
        assert_eq!(ow.ideal_word(&n).unwrap(), w);
        assert!(ow.degree(&n) == Int(0));
    }

    #[test]
    fn fock_word_on_free_monoid_vanishes() {
        let f = MonoidSpec::free(2);
        let fs = xp(&f, 4);
        let rep = fock_rep("lambda", Arc::new(TruncatedFock::new(fs)));
        let (e, a, b) = (Free(vec![]), Free(vec![1]), Free(vec![2]));
        let w = Word::from_flat(&[e.clone(), a.clone(), a, e.clone(), e.clone(), b.clone(), b, e]).unwrap();
        let vals = rep.eval(&OperatorWord::from_word(&w, 0), &rep.probe(2)).unwrap().unwrap();
        assert!(values_zero(&vals, 0.0));
    }

    #[test]
    fn neutral_word_is_projection_on_s23() {
        let s = MonoidSpec::numerical(&[2, 3]).unwrap();
        let fs = xp(&s, 8);
        let rep = fock_rep("lambda", Arc::new(TruncatedFock::new(fs.clone())));
        let eng = IdealEngine::new(&s, 8).unwrap();
        let w = Word::from_flat(&[3, 2, 2, 3].map(Int)).unwrap();
        let k = eng.k_of_word(&w);
        let cols = rep.probe(4);
        let vals = rep.eval(&OperatorWord::from_word(&w, 0), &cols).unwrap().unwrap();
        for (c, v) in cols.iter().zip(&vals) {
            let r = fs.ball.element(*c);
            let expect: SVec<Q> = if eng.member(r, &k) { vec![(*c, Q::one())] } else { vec![] };
            assert_eq!(v, &expect, "column {r}");
        }
    }

    #[test]
    fn shift_rep_on_lattice() {
        let z2 = MonoidSpec::lattice(2);
        let fs = xp(&z2, 4);
        let rep = shift_rep("s1", fs, &[1, 0]).unwrap();
        assert_eq!(rep.dim(), 5);
        let w = rep.op(&Lattice(vec![2, 1]), 0, false).unwrap();
        assert_eq!(w.apply(&vec![(0, Q::one())], 0.0), Some(vec![(2, Q::one())]));
        assert_eq!(w.apply(&vec![(3, Q::one())], 0.0), None);
        let ws = rep.op(&Lattice(vec![2, 1]), 0, true).unwrap();
        assert_eq!(ws.apply(&vec![(1, Q::one())], 0.0), Some(vec![]));
    }
}
