//! Constructible right ideals: words, semantic backends, and the lattice operations.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::monoid::{enumerate_ball, Ball, Family, GroupElement, MonoidSpec, NumericalData};

/// `α = (p₁,q₁,…,pₙ,qₙ)` with outer-letter flags. Ideals always read the full
/// pattern; absent outer letters behave like `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub pairs: Vec<(GroupElement, GroupElement)>,
    pub eps_left: bool,
    pub eps_right: bool,
}

impl Word {
    pub fn new(pairs: Vec<(GroupElement, GroupElement)>) -> Self {
        Word {
            pairs,
            eps_left: true,
            eps_right: true,
        }
    }

    /// Reads `p₁,q₁,…,pₙ,qₙ` from a flat list.
    pub fn from_flat(flat: &[GroupElement]) -> Result<Self> {
        if flat.is_empty() || !flat.len().is_multiple_of(2) {
            return Err(Error::schema("word", "a word needs an even, nonzero number of letters"));
        }
        Ok(Word::new(flat.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()))
    }

    pub fn identity(spec: &MonoidSpec) -> Self {
        let e = spec.identity();
        Word::new(vec![(e.clone(), e)])
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn flat(&self) -> Vec<GroupElement> {
        self.pairs.iter().flat_map(|(p, q)| [p.clone(), q.clone()]).collect()
    }

    /// Pairs with absent outer letters replaced by `e`.
    pub fn effective_pairs(&self, spec: &MonoidSpec) -> Vec<(GroupElement, GroupElement)> {
        let mut pairs = self.pairs.clone();
        let n = pairs.len();
        if n > 0 {
            if !self.eps_left {
                pairs[0].0 = spec.identity();
            }
            if !self.eps_right {
                pairs[n - 1].1 = spec.identity();
            }
        }
        pairs
    }

    /// `p₁^{−ε} q₁ ⋯ pₙ^{−1} qₙ^{ε′}`
    pub fn degree(&self, spec: &MonoidSpec) -> GroupElement {
        self.effective_pairs(spec)
            .iter()
            .fold(spec.identity(), |g, (p, q)| spec.mul(&g, &spec.left_div(p, q)))
    }

    pub fn is_neutral(&self, spec: &MonoidSpec) -> bool {
        spec.is_identity(&self.degree(spec))
    }

    /// `(qₙ,pₙ,…,q₁,p₁)`
    pub fn mirror(&self) -> Word {
        Word {
            pairs: self.pairs.iter().rev().map(|(p, q)| (q.clone(), p.clone())).collect(),
            eps_left: self.eps_right,
            eps_right: self.eps_left,
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.pairs.iter().chain(&other.pairs).cloned().collect())
    }

    pub fn letters_in_monoid(&self, spec: &MonoidSpec) -> bool {
        self.pairs.iter().all(|(p, q)| spec.in_monoid(p) && spec.in_monoid(q))
    }

    pub fn to_json(&self, spec: &MonoidSpec) -> Value {
        let mut v = json!({ "letters": self.flat().iter().map(|g| spec.element_to_json(g)).collect::<Vec<_>>() });
        if !self.eps_left || !self.eps_right {
            v["eps"] = json!([self.eps_left as u8, self.eps_right as u8]);
        }
        v
    }

    pub fn from_json(spec: &MonoidSpec, v: &Value, path: &str) -> Result<Self> {
        let (letters, eps) = match v {
            Value::Array(a) => (a.clone(), None),
            Value::Object(o) => (
                o.get("letters")
                    .and_then(Value::as_array)
                    .cloned()
                    .ok_or_else(|| Error::schema(path, "word object needs \"letters\""))?,
                o.get("eps"),
            ),
            _ => return Err(Error::schema(path, "expected a letter list")),
        };
        let flat = letters
            .iter()
            .enumerate()
            .map(|(i, x)| spec.element_from_json(x, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut w = Word::from_flat(&flat).map_err(|_| Error::schema(path, "a word needs an even, nonzero number of letters"))?;
        if let Some(eps) = eps {
            let e = eps.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::schema(path, "eps must be [0|1, 0|1]"))?;
            w.eps_left = e[0].as_u64() == Some(1);
            w.eps_right = e[1].as_u64() == Some(1);
        }
        if !w.letters_in_monoid(spec) {
            return Err(Error::schema(path, "word letters must lie in the monoid"));
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.flat().iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Chain-condition membership: `r ∈ K(α)` iff every partial product
/// `pᵢ^{−1}qᵢ⋯pₙ^{−1}qₙ r` stays in `P`. Uses only the group law and `in_monoid`.
pub fn chain_member(spec: &MonoidSpec, word: &Word, r: &GroupElement) -> bool {
    if !spec.in_monoid(r) {
        return false;
    }
    let mut s = r.clone();
    for (p, q) in word.effective_pairs(spec).iter().rev() {
        s = spec.mul(q, &s);
        s = spec.left_div(p, &s);
        if !spec.in_monoid(&s) {
            return false;
        }
    }
    true
}

/// Eventually-full subset of a numerical semigroup: `below ∪ [threshold, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumIdeal {
    pub threshold: i64,
    pub below: Vec<i64>,
}

impl NumIdeal {
    fn normalized(threshold: i64, below: BTreeSet<i64>) -> Self {
        let mut t = threshold;
        let mut below = below;
        while t > 0 && below.remove(&(t - 1)) {
            t -= 1;
        }
        below.retain(|&x| x < t);
        NumIdeal {
            threshold: t,
            below: below.into_iter().collect(),
        }
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.threshold || self.below.binary_search(&n).is_ok()
    }

    pub fn min(&self) -> i64 {
        self.below.first().copied().unwrap_or(self.threshold)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Empty,
    /// `wP` with `w` canonical up to units (see [`canonical_generator`]).
    Principal(GroupElement),
    Numerical(NumIdeal),
    /// Characteristic vector on the engine's reference ball.
    Generic(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstructibleIdeal {
    pub word: Word,
    pub backend: Backend,
}

impl ConstructibleIdeal {
    pub fn is_generic(&self) -> bool {
        matches!(self.backend, Backend::Generic(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty(String),
    NonEmpty(GroupElement),
    UnknownUpTo(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    UnknownUpTo(usize),
}

impl Tri {
    pub fn is_true(self) -> bool {
        self == Tri::True
    }
}

#[derive(Clone, Debug)]
pub struct IdealFamily {
    pub ideals: Vec<ConstructibleIdeal>,
    pub cap_closed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcmEntry {
    pub p: GroupElement,
    pub q: GroupElement,
    /// `None` when `pP ∩ qP = ∅`.
    pub join: Option<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LcmTable {
    pub entries: Vec<LcmEntry>,
    /// Joins are only determined up to right multiplication by units.
    pub unit_ambiguity: bool,
}

impl LcmTable {
    pub fn join(&self, p: &GroupElement, q: &GroupElement) -> Option<Option<&GroupElement>> {
        self.entries.iter().find(|e| &e.p == p && &e.q == q).map(|e| e.join.as_ref())
    }
}

#[derive(Clone, Debug)]
pub enum LcmVerdict {
    Yes(LcmTable),
    CounterexampleFree { horizon: usize, table: LcmTable },
    No { p: GroupElement, q: GroupElement, ideal: ConstructibleIdeal },
}

/// Ideal calculus over one monoid. Custom monoids (or an explicit request)
/// use the ball-characteristic backend with horizon `horizon`.
#[derive(Clone, Debug)]
pub struct IdealEngine {
    pub spec: MonoidSpec,
    reference: Option<Ball>,
}

fn rat_int(r: &num_rational::Rational64) -> i64 {
    debug_assert!(r.is_integer());
    r.to_integer()
}

fn aff(b: i64, a: i64) -> GroupElement {
    GroupElement::Affine(num_rational::Rational64::from_integer(b), num_rational::Rational64::from_integer(a))
}

/// Smallest `x ≥ lo` with `x ≡ r (mod m)`.
fn first_at_least(lo: i64, r: i64, m: i64) -> i64 {
    lo + (r - lo).rem_euclid(m)
}

/// Inverse of `a` modulo `m` (`gcd(a, m) = 1`).
fn mod_inv(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    e.x.rem_euclid(m)
}

/// Solutions `u` of `c·u ≡ t (mod a)` as `u ≡ u0 (mod m)`, if any.
fn solve_linear(c: i64, t: i64, a: i64) -> Option<(i64, i64)> {
    let g = c.abs().gcd(&a);
    if t.rem_euclid(g) != 0 {
        return None;
    }
    let m = a / g;
    let u0 = ((t / g).rem_euclid(m) * mod_inv(c / g, m)).rem_euclid(m);
    Some((u0, m))
}

/// Common solutions of `x ≡ r1 (mod m1)`, `x ≡ r2 (mod m2)`.
fn crt(r1: i64, m1: i64, r2: i64, m2: i64) -> Option<(i64, i64)> {
    let (u0, m) = solve_linear(m1, r2 - r1, m2)?;
    let l = m1 * m;
    Some(((r1 + m1 * u0).rem_euclid(l), l))
}

impl IdealEngine {
    pub fn new(spec: &MonoidSpec, horizon: usize) -> Result<Self> {
        let reference = if spec.is_custom() { Some(enumerate_ball(spec, horizon)?) } else { None };
        Ok(IdealEngine { spec: spec.clone(), reference })
    }

    /// Forces the ball-characteristic backend, whatever the family.
    pub fn generic(spec: &MonoidSpec, horizon: usize) -> Result<Self> {
        Ok(IdealEngine {
            spec: spec.clone(),
            reference: Some(enumerate_ball(spec, horizon)?),
        })
    }

    pub fn horizon(&self) -> Option<usize> {
        self.reference.as_ref().map(|b| b.radius)
    }

    pub fn is_exact(&self) -> bool {
        self.reference.is_none()
    }

    fn numerical(&self) -> Option<&NumericalData> {
        match &self.spec.family {
            Family::Numerical(d) => Some(d),
            _ => None,
        }
    }

    fn affine_full(&self) -> bool {
        matches!(self.spec.family, Family::Affine { full: true })
    }

    /// Canonical representative of `wP` among `w·units`.
    fn canonical_generator(&self, w: GroupElement) -> GroupElement {
        match (&self.spec.family, &w) {
            (Family::Affine { full: true }, GroupElement::Affine(b, a)) => {
                let a = rat_int(a).abs();
                aff(rat_int(b).rem_euclid(a), a)
            }
            _ => w,
        }
    }

    fn generic_chars(&self, word: &Word) -> Backend {
        let ball = self.reference.as_ref().expect("generic backend without reference ball");
        Backend::Generic(ball.elements().iter().map(|r| chain_member(&self.spec, word, r)).collect())
    }

    /// The whole monoid `P = K((e,e))`.
    pub fn full(&self) -> ConstructibleIdeal {
        let word = Word::identity(&self.spec);
        let backend = if self.reference.is_some() {
            self.generic_chars(&word)
        } else if let Some(d) = self.numerical() {
            let below = (0..=d.frobenius.max(0)).filter(|&n| d.contains(n)).collect();
            Backend::Numerical(NumIdeal::normalized(d.frobenius + 1, below))
        } else {
            Backend::Principal(self.spec.identity())
        };
        ConstructibleIdeal { word, backend }
    }

    pub fn left_mult(&self, p: &GroupElement, z: &ConstructibleIdeal) -> ConstructibleIdeal {
        let word = z.word.concat(&Word::new(vec![(p.clone(), self.spec.identity())]));
        let backend = match &z.backend {
            Backend::Empty => Backend::Empty,
            Backend::Generic(_) => self.generic_chars(&word),
            Backend::Principal(w) => Backend::Principal(self.canonical_generator(self.spec.mul(p, w))),
            Backend::Numerical(ni) => {
                let GroupElement::Int(p) = p else { unreachable!() };
                Backend::Numerical(NumIdeal::normalized(ni.threshold + p, ni.below.iter().map(|z| z + p).collect()))
            }
        };
        ConstructibleIdeal { word, backend }
    }

    /// `q⁻¹Z = {y ∈ P : qy ∈ Z}`
    pub fn preimage(&self, q: &GroupElement, z: &ConstructibleIdeal) -> ConstructibleIdeal {
        let word = z.word.concat(&Word::new(vec![(self.spec.identity(), q.clone())]));
        let backend = match &z.backend {
            Backend::Empty => Backend::Empty,
            Backend::Generic(_) => self.generic_chars(&word),
            Backend::Numerical(ni) => {
                let d = self.numerical().expect("numerical backend");
                let GroupElement::Int(q) = q else { unreachable!() };
                let t = (ni.threshold - q).max(d.frobenius + 1).max(0);
                let below = (0..t).filter(|&y| d.contains(y) && ni.contains(y + q)).collect();
                Backend::Numerical(NumIdeal::normalized(t, below))
            }
            Backend::Principal(w) => self.principal_preimage(q, w),
        };
        ConstructibleIdeal { word, backend }
    }

    fn principal_preimage(&self, q: &GroupElement, w: &GroupElement) -> Backend {
        match (q, w) {
            (GroupElement::Lattice(q), GroupElement::Lattice(w)) => {
                Backend::Principal(GroupElement::Lattice(w.iter().zip(q).map(|(w, q)| (w - q).max(0)).collect()))
            }
            (GroupElement::Free(q), GroupElement::Free(w)) => {
                if w.len() <= q.len() {
                    if q.starts_with(w) {
                        Backend::Principal(self.spec.identity())
                    } else {
                        Backend::Empty
                    }
                } else if w.starts_with(q) {
                    Backend::Principal(GroupElement::Free(w[q.len()..].to_vec()))
                } else {
                    Backend::Empty
                }
            }
            (GroupElement::Affine(d, c), GroupElement::Affine(b, a)) => {
                let (d, c, b, a) = (rat_int(d), rat_int(c), rat_int(b), rat_int(a));
                // q·(u, v) = (d + c u, c v) must satisfy membership in (b, a)P.
                let Some((u0, m)) = solve_linear(c, b - d, a) else {
                    return Backend::Empty;
                };
                if self.affine_full() {
                    Backend::Principal(aff(u0, m))
                } else {
                    let lo = Integer::div_ceil(&(b - d), &c).max(0);
                    Backend::Principal(aff(first_at_least(lo, u0, m), m))
                }
            }
            _ => unreachable!("principal backend outside principal families"),
        }
    }

    fn principal_meet(&self, x: &GroupElement, y: &GroupElement) -> Backend {
        match (x, y) {
            (GroupElement::Lattice(a), GroupElement::Lattice(b)) => {
                Backend::Principal(GroupElement::Lattice(a.iter().zip(b).map(|(a, b)| *a.max(b)).collect()))
            }
            (GroupElement::Free(a), GroupElement::Free(b)) => {
                if a.starts_with(b) {
                    Backend::Principal(x.clone())
                } else if b.starts_with(a) {
                    Backend::Principal(y.clone())
                } else {
                    Backend::Empty
                }
            }
            (GroupElement::Affine(b1, a1), GroupElement::Affine(b2, a2)) => {
                let (b1, a1, b2, a2) = (rat_int(b1), rat_int(a1), rat_int(b2), rat_int(a2));
                let Some((r, l)) = crt(b1, a1, b2, a2) else {
                    return Backend::Empty;
                };
                if self.affine_full() {
                    Backend::Principal(aff(r, l))
                } else {
                    Backend::Principal(aff(first_at_least(b1.max(b2), r, l), l))
                }
            }
            _ => unreachable!("principal backend outside principal families"),
        }
    }

    /// Defining word for `x ∩ y`: `β·α` when `α` is neutral, else `β·mirror(α)·α`.
    pub fn intersect(&self, x: &ConstructibleIdeal, y: &ConstructibleIdeal) -> ConstructibleIdeal {
        let word = if x.word.is_neutral(&self.spec) {
            y.word.concat(&x.word)
        } else {
            y.word.concat(&x.word.mirror()).concat(&x.word)
        };
        let backend = match (&x.backend, &y.backend) {
            (Backend::Empty, _) | (_, Backend::Empty) => Backend::Empty,
            (Backend::Generic(a), Backend::Generic(b)) => Backend::Generic(a.iter().zip(b).map(|(a, b)| *a && *b).collect()),
            (Backend::Numerical(a), Backend::Numerical(b)) => {
                let t = a.threshold.max(b.threshold);
                let below = (0..t).filter(|&n| a.contains(n) && b.contains(n)).collect();
                Backend::Numerical(NumIdeal::normalized(t, below))
            }
            (Backend::Principal(a), Backend::Principal(b)) => self.principal_meet(a, b),
            _ => unreachable!("mixed backends"),
        };
        ConstructibleIdeal { word, backend }
    }

    pub fn k_of_word(&self, word: &Word) -> ConstructibleIdeal {
        let backend = if self.reference.is_some() {
            self.generic_chars(word)
        } else {
            let mut z = self.full();
            for (p, q) in word.effective_pairs(&self.spec) {
                z = self.preimage(&q, &self.left_mult(&p, &z));
            }
            z.backend
        };
        ConstructibleIdeal { word: word.clone(), backend }
    }

    /// `q_1^{-1}…` applied to an arbitrary ideal: `apply(α, Z) = qₙ⁻¹pₙ⋯q₁⁻¹p₁Z`.
    pub fn apply(&self, word: &Word, z: &ConstructibleIdeal) -> ConstructibleIdeal {
        let mut out = z.clone();
        for (p, q) in word.effective_pairs(&self.spec) {
            out = self.preimage(&q, &self.left_mult(&p, &out));
        }
        out
    }

    pub fn member(&self, r: &GroupElement, x: &ConstructibleIdeal) -> bool {
        match &x.backend {
            Backend::Empty => false,
            Backend::Principal(w) => self.principal_member(w, r),
            Backend::Numerical(ni) => matches!(r, GroupElement::Int(n) if ni.contains(*n)),
            Backend::Generic(chars) => {
                let ball = self.reference.as_ref().expect("reference ball");
                match ball.index_of(r) {
                    Some(i) => chars[i],
                    None => chain_member(&self.spec, &x.word, r),
                }
            }
        }
    }

    fn principal_member(&self, w: &GroupElement, r: &GroupElement) -> bool {
        if !self.spec.in_monoid(r) {
            return false;
        }
        match (w, r) {
            (GroupElement::Affine(b, a), GroupElement::Affine(x, y)) => {
                let (b, a, x, y) = (rat_int(b), rat_int(a), rat_int(x), rat_int(y));
                (x - b).rem_euclid(a) == 0 && y.rem_euclid(a) == 0 && (self.affine_full() || x >= b)
            }
            _ => self.spec.in_right_ideal_of(w, r),
        }
    }

    pub fn is_empty(&self, x: &ConstructibleIdeal) -> Emptiness {
        match &x.backend {
            Backend::Empty => Emptiness::Empty(format!("backend proves K{} = ∅", x.word)),
            Backend::Principal(w) => Emptiness::NonEmpty(w.clone()),
            Backend::Numerical(ni) => Emptiness::NonEmpty(GroupElement::Int(ni.min())),
            Backend::Generic(chars) => {
                let ball = self.reference.as_ref().expect("reference ball");
                match chars.iter().position(|c| *c) {
                    Some(i) => Emptiness::NonEmpty(ball.element(i).clone()),
                    None => Emptiness::UnknownUpTo(ball.radius),
                }
            }
        }
    }

    /// Whether the ideal is empty, treating "no member up to the horizon" as empty.
    pub fn is_empty_on_ball(&self, x: &ConstructibleIdeal) -> bool {
        !matches!(self.is_empty(x), Emptiness::NonEmpty(_))
    }

    pub fn equal(&self, x: &ConstructibleIdeal, y: &ConstructibleIdeal) -> Tri {
        match (&x.backend, &y.backend) {
            (Backend::Generic(a), Backend::Generic(b)) => {
                if a == b {
                    Tri::UnknownUpTo(self.horizon().unwrap_or(0))
                } else {
                    Tri::False
                }
            }
            (a, b) => {
                if a == b {
                    Tri::True
                } else {
                    Tri::False
                }
            }
        }
    }

    /// Backend equality, with ball-equality standing in for Generic backends.
    pub fn same(&self, x: &ConstructibleIdeal, y: &ConstructibleIdeal) -> bool {
        x.backend == y.backend
    }

    pub fn is_subset(&self, x: &ConstructibleIdeal, y: &ConstructibleIdeal) -> Tri {
        match (&x.backend, &y.backend) {
            (Backend::Empty, _) => Tri::True,
            (_, Backend::Empty) => match self.is_empty(x) {
                Emptiness::Empty(_) => Tri::True,
                Emptiness::NonEmpty(_) => Tri::False,
                Emptiness::UnknownUpTo(l) => Tri::UnknownUpTo(l),
            },
            (Backend::Principal(w), _) => {
                if self.member(w, y) {
                    Tri::True
                } else {
                    Tri::False
                }
            }
            (Backend::Numerical(a), Backend::Numerical(b)) => {
                let t = a.threshold.max(b.threshold);
                let ok = (0..=t).all(|n| !a.contains(n) || b.contains(n));
                if ok {
                    Tri::True
                } else {
                    Tri::False
                }
            }
            (Backend::Generic(a), Backend::Generic(b)) => {
                if a.iter().zip(b).all(|(a, b)| !a || *b) {
                    Tri::UnknownUpTo(self.horizon().unwrap_or(0))
                } else {
                    Tri::False
                }
            }
            _ => unreachable!("mixed backends"),
        }
    }

    /// Whether `x` is the union of `members`.
    pub fn union_equals(&self, x: &ConstructibleIdeal, members: &[ConstructibleIdeal]) -> Tri {
        let mut unknown = None;
        for m in members {
            match self.is_subset(m, x) {
                Tri::False => return Tri::False,
                Tri::UnknownUpTo(l) => unknown = Some(l),
                Tri::True => {}
            }
        }
        match &x.backend {
            Backend::Empty => Tri::True,
            // A member containing the generator contains all of wP.
            Backend::Principal(w) => {
                if members.iter().any(|m| self.member(w, m)) {
                    unknown.map_or(Tri::True, Tri::UnknownUpTo)
                } else {
                    Tri::False
                }
            }
            Backend::Numerical(ni) => {
                let t = members
                    .iter()
                    .filter_map(|m| match &m.backend {
                        Backend::Numerical(n) => Some(n.threshold),
                        _ => None,
                    })
                    .min()
                    .unwrap_or(i64::MAX);
                if t == i64::MAX {
                    return Tri::False;
                }
                let hi = t.max(ni.threshold);
                if (0..=hi).all(|n| ni.contains(n) == members.iter().any(|m| self.member(&GroupElement::Int(n), m))) {
                    Tri::True
                } else {
                    Tri::False
                }
            }
            Backend::Generic(chars) => {
                let covered = chars.iter().enumerate().all(|(i, c)| {
                    !c || members.iter().any(|m| matches!(&m.backend, Backend::Generic(b) if b[i]))
                });
                if covered {
                    Tri::UnknownUpTo(self.horizon().unwrap_or(0))
                } else {
                    Tri::False
                }
            }
        }
    }

    pub fn cap_closure(&self, family: &[ConstructibleIdeal]) -> IdealFamily {
        let mut ideals: Vec<ConstructibleIdeal> = Vec::new();
        for x in family {
            if !ideals.iter().any(|y| self.same(x, y)) {
                ideals.push(x.clone());
            }
        }
        let mut start = 0;
        loop {
            let n = ideals.len();
            let mut fresh = Vec::new();
            for i in 0..n {
                for j in (i + 1).max(start)..n {
                    let z = self.intersect(&ideals[i], &ideals[j]);
                    if !ideals.iter().chain(&fresh).any(|y| self.same(&z, y)) {
                        fresh.push(z);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            start = n;
            ideals.extend(fresh);
        }
        IdealFamily { ideals, cap_closed: true }
    }

    /// Generator `w` with `x = wP`, if `x` is principal and nonempty.
    pub fn principal_generator(&self, x: &ConstructibleIdeal, ball: &Ball) -> Option<GroupElement> {
        match &x.backend {
            Backend::Empty => None,
            Backend::Principal(w) => Some(w.clone()),
            Backend::Numerical(ni) => {
                let m = GroupElement::Int(ni.min());
                let cand = self.left_mult(&m, &self.full());
                self.same(&cand, x).then_some(m)
            }
            Backend::Generic(_) => ball.elements().iter().find_map(|w| {
                let cand = self.left_mult(w, &self.full());
                self.same(&cand, x).then(|| w.clone())
            }),
        }
    }

    pub fn describe(&self, x: &ConstructibleIdeal) -> String {
        match &x.backend {
            Backend::Empty => "∅".into(),
            Backend::Principal(w) => format!("{w}P"),
            Backend::Numerical(ni) => {
                let mut parts: Vec<String> = ni.below.iter().map(i64::to_string).collect();
                parts.push(format!("{}", ni.threshold));
                parts.push(format!("{}", ni.threshold + 1));
                format!("{{{},…}}", parts.join(","))
            }
            Backend::Generic(chars) => {
                let ball = self.reference.as_ref().expect("reference ball");
                let members: Vec<String> = chars
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| **c)
                    .take(8)
                    .map(|(i, _)| ball.element(i).to_string())
                    .collect();
                format!("{{{},…}} (ball-bounded, horizon {})", members.join(","), ball.radius)
            }
        }
    }

    pub fn ideal_to_json(&self, x: &ConstructibleIdeal) -> Value {
        json!({ "word": x.word.to_json(&self.spec), "set": self.describe(x) })
    }

    /// Ideals of a family as an inclusion adjacency list.
    pub fn lattice_to_json(&self, family: &[ConstructibleIdeal]) -> Value {
        let nodes: Vec<Value> = family.iter().map(|x| self.ideal_to_json(x)).collect();
        let edges: Vec<Value> = (0..family.len())
            .flat_map(|i| (0..family.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.is_subset(&family[i], &family[j]) == Tri::True)
            .map(|(i, j)| json!([i, j]))
            .collect();
        json!({ "ideals": nodes, "inclusions": edges })
    }
}

/// Searches the ball for a pair `p, q` violating Clifford's condition, and
/// otherwise tabulates right LCMs.
pub fn is_right_lcm_up_to(engine: &IdealEngine, radius: usize) -> Result<LcmVerdict> {
    if radius == 0 {
        return Err(Error::Structural("right-LCM search needs radius ≥ 1".into()));
    }
    let spec = &engine.spec;
    let ball = enumerate_ball(spec, radius)?;
    let full = engine.full();
    let principal: Vec<ConstructibleIdeal> = ball.elements().iter().map(|p| engine.left_mult(p, &full)).collect();
    for (pi, p) in ball.elements().iter().enumerate() {
        for q in ball.elements() {
            let x = engine.preimage(q, &principal[pi]);
            if engine.is_empty_on_ball(&x) {
                continue;
            }
            if engine.principal_generator(&x, &ball).is_none() {
                return Ok(LcmVerdict::No {
                    p: p.clone(),
                    q: q.clone(),
                    ideal: x,
                });
            }
        }
    }
    let mut entries = Vec::new();
    for (pi, p) in ball.elements().iter().enumerate() {
        for (qi, q) in ball.elements().iter().enumerate() {
            let meet = engine.intersect(&principal[pi], &principal[qi]);
            let join = engine.principal_generator(&meet, &ball);
            if join.is_none() && !engine.is_empty_on_ball(&meet) {
                return Ok(LcmVerdict::No {
                    p: p.clone(),
                    q: q.clone(),
                    ideal: meet,
                });
            }
            entries.push(LcmEntry {
                p: p.clone(),
                q: q.clone(),
                join,
            });
        }
    }
    let unit_ambiguity = matches!(spec.family, Family::Affine { full: true }) || spec.is_custom();
    let table = LcmTable { entries, unit_ambiguity };
    let structural = engine.is_exact()
        && match &spec.family {
            Family::LatticeCone { .. } | Family::FreeMonoid { .. } | Family::Affine { .. } => true,
            Family::Numerical(d) => d.is_naturals(),
            Family::Custom(_) => false,
        };
    Ok(if structural {
        LcmVerdict::Yes(table)
    } else {
        LcmVerdict::CounterexampleFree { horizon: radius, table }
    })
}

/// Whether the family is right LCM for structural reasons (no search needed).
pub fn is_structurally_right_lcm(spec: &MonoidSpec) -> Option<bool> {
    match &spec.family {
        Family::LatticeCone { .. } | Family::FreeMonoid { .. } | Family::Affine { .. } => Some(true),
        Family::Numerical(d) => Some(d.is_naturals()),
        Family::Custom(_) => None,
    }
}

impl Backend {
    pub fn is_empty(&self) -> bool {
        match self {
            Backend::Empty => true,
            Backend::Generic(c) => c.iter().all(|x| !x),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::GroupElement::{Free, Int, Lattice};

    fn ints(v: &[i64]) -> Vec<GroupElement> {
        v.iter().map(|&x| Int(x)).collect()
    }

    #[test]
    fn k_of_word_examples() {
        let n = MonoidSpec::numerical(&[1]).unwrap();
        let eng = IdealEngine::new(&n, 8).unwrap();
        let k = eng.k_of_word(&Word::from_flat(&ints(&[2, 3])).unwrap());
        assert_eq!(eng.equal(&k, &eng.full()), Tri::True);

        let s = MonoidSpec::numerical(&[2, 3]).unwrap();
        let eng = IdealEngine::new(&s, 12).unwrap();
        let k = eng.k_of_word(&Word::from_flat(&ints(&[3, 2, 2, 3])).unwrap());
        assert_eq!(k.backend, Backend::Numerical(NumIdeal { threshold: 2, below: vec![] }));
        assert_eq!(eng.describe(&k), "{2,3,…}");

        let f = MonoidSpec::free(2);
        let eng = IdealEngine::new(&f, 4).unwrap();
        let (e, a, b) = (Free(vec![]), Free(vec![1]), Free(vec![2]));
        let w = Word::from_flat(&[e.clone(), a.clone(), a, e.clone(), e.clone(), b.clone(), b, e]).unwrap();
        assert!(matches!(eng.is_empty(&eng.k_of_word(&w)), Emptiness::Empty(_)));
    }

    #[test]
    fn preimage_and_left_mult() {
        let s = MonoidSpec::numerical(&[2, 3]).unwrap();
        let eng = IdealEngine::new(&s, 12).unwrap();
        let p = eng.full();
        assert_eq!(eng.preimage(&Int(0), &p).backend, p.backend);
        let two = eng.left_mult(&Int(2), &p);
        let x = eng.preimage(&Int(3), &two);
        assert_eq!(eng.describe(&x), "{2,3,…}");
        let ball = enumerate_ball(&s, 12).unwrap();
        assert!(eng.principal_generator(&x, &ball).is_none());
        assert!(eng.member(&Int(2), &x) && !eng.member(&Int(0), &x));
    }

    #[test]
    fn intersections() {
        let z2 = MonoidSpec::lattice(2);
        let eng = IdealEngine::new(&z2, 6).unwrap();
        let p = eng.full();
        let x = eng.left_mult(&Lattice(vec![1, 0]), &p);
        let y = eng.left_mult(&Lattice(vec![0, 1]), &p);
        assert_eq!(eng.intersect(&x, &y).backend, Backend::Principal(Lattice(vec![1, 1])));
        assert_eq!(eng.intersect(&x, &p).backend, x.backend);
        let fam = eng.cap_closure(&[x, y]);
        assert_eq!(fam.ideals.len(), 3);
        let again = eng.cap_closure(&fam.ideals);
        assert_eq!(again.ideals.len(), 3);

        let f = MonoidSpec::free(2);
        let eng = IdealEngine::new(&f, 4).unwrap();
        let p = eng.full();
        let a = eng.left_mult(&Free(vec![1]), &p);
        let b = eng.left_mult(&Free(vec![2]), &p);
        assert!(matches!(eng.is_empty(&eng.intersect(&a, &b)), Emptiness::Empty(_)));
        assert!(!eng.member(&Free(vec![2, 1]), &a));
    }

    #[test]
    fn neutrality() {
        let n = MonoidSpec::numerical(&[1]).unwrap();
        assert!(Word::from_flat(&ints(&[2, 3, 3, 2])).unwrap().is_neutral(&n));
        assert!(!Word::from_flat(&ints(&[2, 3])).unwrap().is_neutral(&n));
    }

    #[test]
    fn affine_ideals() {
        let spec = MonoidSpec::affine(&[(1, 1), (0, 2), (0, 3)], false).unwrap();
        let eng = IdealEngine::new(&spec, 4).unwrap();
        let p = eng.full();
        let x = eng.left_mult(&aff(1, 2), &p);
        let y = eng.left_mult(&aff(0, 3), &p);
        // x ≡ 1 mod 2, x ≡ 0 mod 3, x ≥ 1 → 3; 6 | y
        assert_eq!(eng.intersect(&x, &y).backend, Backend::Principal(aff(3, 6)));
        let z = eng.left_mult(&aff(0, 2), &p);
        assert!(matches!(eng.is_empty(&eng.intersect(&x, &z)), Emptiness::Empty(_)));
    }

    #[test]
    fn right_lcm_verdicts() {
        let z2 = MonoidSpec::lattice(2);
        let eng = IdealEngine::new(&z2, 4).unwrap();
        let LcmVerdict::Yes(t) = is_right_lcm_up_to(&eng, 3).unwrap() else { panic!() };
        assert_eq!(
            t.join(&Lattice(vec![1, 0]), &Lattice(vec![0, 2])),
            Some(Some(&Lattice(vec![1, 2])))
        );
        let f = MonoidSpec::free(2);
        let eng = IdealEngine::new(&f, 4).unwrap();
        let LcmVerdict::Yes(t) = is_right_lcm_up_to(&eng, 2).unwrap() else { panic!() };
        assert_eq!(t.join(&Free(vec![1]), &Free(vec![1, 2])), Some(Some(&Free(vec![1, 2]))));
        assert_eq!(t.join(&Free(vec![1]), &Free(vec![2])), Some(None));
        let s = MonoidSpec::numerical(&[2, 3]).unwrap();
        let eng = IdealEngine::new(&s, 12).unwrap();
        let LcmVerdict::No { p, q, ideal } = is_right_lcm_up_to(&eng, 12).unwrap() else { panic!() };
        assert_eq!((p, q), (Int(2), Int(3)));
        assert_eq!(eng.describe(&ideal), "{2,3,…}");
    }

    #[test]
    fn union_detection() {
        let s = MonoidSpec::numerical(&[2, 3]).unwrap();
        let eng = IdealEngine::new(&s, 12).unwrap();
        let x = eng.k_of_word(&Word::from_flat(&ints(&[3, 2, 2, 3])).unwrap());
        let b1 = eng.k_of_word(&Word::from_flat(&ints(&[0, 2, 2, 0])).unwrap());
        let b2 = eng.k_of_word(&Word::from_flat(&ints(&[0, 3, 3, 0])).unwrap());
        assert_eq!(eng.union_equals(&x, &[b1.clone(), b2.clone()]), Tri::True);
        assert_eq!(eng.union_equals(&x, &[b1]), Tri::False);
        let z2 = MonoidSpec::lattice(2);
        let eng = IdealEngine::new(&z2, 6).unwrap();
        let p = eng.full();
        let a = eng.left_mult(&Lattice(vec![1, 0]), &p);
        let b = eng.left_mult(&Lattice(vec![0, 1]), &p);
        assert_eq!(eng.union_equals(&p, &[a, b]), Tri::False);
    }
}
