//! Monoids embedded in groups: canonical forms, membership and balls.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Element of an ambient group, in canonical form for its family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    /// ℤ^k
    Lattice(Vec<i64>),
    /// Reduced word in a free group; letter `+k` is generator k (1-based), `-k` its inverse.
    Free(Vec<i32>),
    /// ℤ, the ambient group of a numerical semigroup.
    Int(i64),
    /// `(b, a)` acting as `x ↦ b + a x`; rational so that inverses exist.
    Affine(Rational64, Rational64),
    /// Opaque payload interpreted by a [`CustomMonoid`].
    Custom(Vec<i64>),
}

/// Elements known to lie in `P`. Same representation as the ambient group.
pub type MonoidElement = GroupElement;

impl GroupElement {
    fn tag(&self) -> &'static str {
        match self {
            GroupElement::Lattice(_) => "lattice",
            GroupElement::Free(_) => "free",
            GroupElement::Int(_) => "int",
            GroupElement::Affine(..) => "affine",
            GroupElement::Custom(_) => "custom",
        }
    }
}

fn free_letter_name(l: i32) -> String {
    let base = (b'a' + (l.unsigned_abs() as u8 - 1) % 26) as char;
    if l > 0 {
        base.to_string()
    } else {
        base.to_ascii_uppercase().to_string()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Free(w) if w.is_empty() => write!(f, "e"),
            GroupElement::Free(w) => {
                for l in w {
                    write!(f, "{}", free_letter_name(*l))?;
                }
                Ok(())
            }
            GroupElement::Int(n) => write!(f, "{n}"),
            GroupElement::Affine(b, a) => write!(f, "({b},{a})"),
            GroupElement::Custom(v) => write!(f, "custom{v:?}"),
        }
    }
}

/// User-supplied monoid. Payloads must be canonical: `eq` should agree with
/// payload equality, since engines hash elements.
pub trait CustomMonoid: Send + Sync + fmt::Debug {
    fn mul(&self, g: &[i64], h: &[i64]) -> Vec<i64>;
    fn inv(&self, g: &[i64]) -> Vec<i64>;
    fn eq(&self, g: &[i64], h: &[i64]) -> bool;
    fn in_monoid(&self, g: &[i64]) -> bool;
    fn generators(&self) -> Vec<Vec<i64>>;
}

/// Apéry data of a numerical semigroup with respect to its smallest generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumericalData {
    pub generators: Vec<i64>,
    pub multiplicity: i64,
    pub apery: Vec<i64>,
    pub frobenius: i64,
}

impl NumericalData {
    pub fn new(generators: &[i64]) -> Result<Self> {
        let mut gens: Vec<i64> = generators.to_vec();
        gens.sort_unstable();
        gens.dedup();
        if gens.is_empty() || gens[0] <= 0 {
            return Err(Error::schema("monoid.generators", "numerical semigroup generators must be positive"));
        }
        if gens.iter().fold(0, |g, &x| g.gcd(&x)) != 1 {
            return Err(Error::schema("monoid.generators", "numerical semigroup generators must have gcd 1"));
        }
        let m = gens[0];
        if m > 100_000 {
            return Err(Error::resource("smallest numerical generator", 100_000, "generators"));
        }
        if gens.len() > 64 || gens[gens.len() - 1] > 1 << 40 {
            return Err(Error::resource("numerical generators", 64, "generators"));
        }
        // Shortest paths over residues mod m.
        let mu = m as usize;
        let mut dist = vec![i64::MAX; mu];
        dist[0] = 0;
        let mut heap = BinaryHeap::from([Reverse((0i64, 0usize))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &g in &gens[1..] {
                let v = (u + (g % m) as usize) % mu;
                if d + g < dist[v] {
                    dist[v] = d + g;
                    heap.push(Reverse((d + g, v)));
                }
            }
        }
        let frobenius = dist.iter().max().copied().unwrap_or(0) - m;
        Ok(NumericalData {
            generators: gens,
            multiplicity: m,
            apery: dist,
            frobenius,
        })
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= 0 && n >= self.apery[n.rem_euclid(self.multiplicity) as usize]
    }

    /// Whether the semigroup is all of ℕ.
    pub fn is_naturals(&self) -> bool {
        self.multiplicity == 1
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    LatticeCone { rank: usize },
    FreeMonoid { rank: usize },
    Numerical(NumericalData),
    /// `full = false`: ℕ⋊ℤ_{>0}; `full = true`: ℤ⋊(ℤ∖{0}).
    Affine { full: bool },
    Custom(Arc<dyn CustomMonoid>),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::LatticeCone { .. } => "lattice",
            Family::FreeMonoid { .. } => "free",
            Family::Numerical(_) => "numerical",
            Family::Affine { .. } => "affine",
            Family::Custom(_) => "custom",
        }
    }
}

pub const DEFAULT_BALL_CAP: usize = 5000;

#[derive(Clone, Debug)]
pub struct MonoidSpec {
    pub family: Family,
    pub generators: Vec<GroupElement>,
    pub ball_cap: usize,
}

fn rat(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn free_reduce(mut w: Vec<i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for l in w.drain(..) {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl MonoidSpec {
    /// ℕ^k with the standard basis as generators.
    pub fn lattice(rank: usize) -> Self {
        let generators = (0..rank)
            .map(|i| {
                let mut v = vec![0; rank];
                v[i] = 1;
                GroupElement::Lattice(v)
            })
            .collect();
        MonoidSpec {
            family: Family::LatticeCone { rank },
            generators,
            ball_cap: DEFAULT_BALL_CAP,
        }
    }

    /// Free monoid on `rank` letters.
    pub fn free(rank: usize) -> Self {
        MonoidSpec {
            family: Family::FreeMonoid { rank },
            generators: (1..=rank as i32).map(|k| GroupElement::Free(vec![k])).collect(),
            ball_cap: DEFAULT_BALL_CAP,
        }
    }

    pub fn numerical(gens: &[i64]) -> Result<Self> {
        let data = NumericalData::new(gens)?;
        let generators = data.generators.iter().map(|&g| GroupElement::Int(g)).collect();
        Ok(MonoidSpec {
            family: Family::Numerical(data),
            generators,
            ball_cap: DEFAULT_BALL_CAP,
        })
    }

    /// Affine monoid with the given `(b, a)` generators.
    pub fn affine(gens: &[(i64, i64)], full: bool) -> Result<Self> {
        let spec = MonoidSpec {
            family: Family::Affine { full },
            generators: gens.iter().map(|&(b, a)| GroupElement::Affine(rat(b), rat(a))).collect(),
            ball_cap: DEFAULT_BALL_CAP,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn custom(m: Arc<dyn CustomMonoid>) -> Self {
        let generators = m.generators().into_iter().map(GroupElement::Custom).collect();
        MonoidSpec {
            family: Family::Custom(m),
            generators,
            ball_cap: DEFAULT_BALL_CAP,
        }
    }

    pub fn with_generators(mut self, gens: Vec<GroupElement>) -> Result<Self> {
        self.generators = gens;
        self.validate()?;
        Ok(self)
    }

    pub fn with_ball_cap(mut self, cap: usize) -> Self {
        self.ball_cap = cap;
        self
    }

    /// Checks the declared invariants: generators and `e` lie in `P`.
    pub fn validate(&self) -> Result<()> {
        let e = self.identity();
        if !self.in_monoid(&e) {
            return Err(Error::Structural("identity is not in the monoid".into()));
        }
        for (i, g) in self.generators.iter().enumerate() {
            self.check_family(g)?;
            if !self.in_monoid(g) {
                return Err(Error::schema(format!("monoid.generators[{i}]"), format!("{g} is not in the monoid")));
            }
        }
        Ok(())
    }

    pub fn is_custom(&self) -> bool {
        matches!(self.family, Family::Custom(_))
    }

    pub fn identity(&self) -> GroupElement {
        match &self.family {
            Family::LatticeCone { rank } => GroupElement::Lattice(vec![0; *rank]),
            Family::FreeMonoid { .. } => GroupElement::Free(Vec::new()),
            Family::Numerical(_) => GroupElement::Int(0),
            Family::Affine { .. } => GroupElement::Affine(rat(0), rat(1)),
            Family::Custom(m) => {
                let g = m.generators().into_iter().next().unwrap_or_default();
                GroupElement::Custom(m.mul(&g, &m.inv(&g)))
            }
        }
    }

    pub fn check_family(&self, g: &GroupElement) -> Result<()> {
        let ok = match (&self.family, g) {
            (Family::LatticeCone { rank }, GroupElement::Lattice(v)) => v.len() == *rank,
            (Family::FreeMonoid { rank }, GroupElement::Free(w)) => {
                w.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= *rank)
            }
            (Family::Numerical(_), GroupElement::Int(_)) => true,
            (Family::Affine { .. }, GroupElement::Affine(_, a)) => !a.is_zero(),
            (Family::Custom(_), GroupElement::Custom(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FamilyMismatch(format!("{} element {g} in {} monoid", g.tag(), self.family.name())))
        }
    }

    pub fn try_mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        Ok(match (g, h) {
            (Lattice(a), Lattice(b)) if a.len() == b.len() => Lattice(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            (Free(a), Free(b)) => Free(free_reduce(a.iter().chain(b).copied().collect())),
            (Int(a), Int(b)) => Int(a + b),
            (Affine(b, a), Affine(d, c)) => Affine(b + a * d, a * c),
            (Custom(a), Custom(b)) => match &self.family {
                Family::Custom(m) => Custom(m.mul(a, b)),
                _ => return Err(Error::FamilyMismatch("custom element outside custom family".into())),
            },
            _ => return Err(Error::FamilyMismatch(format!("{} · {}", g.tag(), h.tag()))),
        })
    }

    /// Group product. Panics on a family mismatch, which is an engine bug;
    /// use [`MonoidSpec::try_mul`] at input boundaries.
    pub fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.try_mul(g, h).expect("family mismatch")
    }

    pub fn inv(&self, g: &GroupElement) -> GroupElement {
        use GroupElement::*;
        match g {
            Lattice(a) => Lattice(a.iter().map(|x| -x).collect()),
            Free(a) => Free(a.iter().rev().map(|l| -l).collect()),
            Int(a) => Int(-a),
            Affine(b, a) => Affine(-b / a, a.recip()),
            Custom(a) => match &self.family {
                Family::Custom(m) => Custom(m.inv(a)),
                _ => panic!("custom element outside custom family"),
            },
        }
    }

    pub fn eq(&self, g: &GroupElement, h: &GroupElement) -> bool {
        match (&self.family, g, h) {
            (Family::Custom(m), GroupElement::Custom(a), GroupElement::Custom(b)) => m.eq(a, b),
            _ => g == h,
        }
    }

    pub fn is_identity(&self, g: &GroupElement) -> bool {
        self.eq(g, &self.identity())
    }

    pub fn in_monoid(&self, g: &GroupElement) -> bool {
        match (&self.family, g) {
            (Family::LatticeCone { rank }, GroupElement::Lattice(v)) => v.len() == *rank && v.iter().all(|x| *x >= 0),
            (Family::FreeMonoid { .. }, GroupElement::Free(w)) => w.iter().all(|l| *l > 0),
            (Family::Numerical(d), GroupElement::Int(n)) => d.contains(*n),
            (Family::Affine { full }, GroupElement::Affine(b, a)) => {
                b.is_integer() && a.is_integer() && !a.is_zero() && (*full || (!b.is_negative() && a >= &Rational64::one()))
            }
            (Family::Custom(m), GroupElement::Custom(a)) => m.in_monoid(a),
            _ => false,
        }
    }

    /// `p⁻¹ g`
    pub fn left_div(&self, p: &GroupElement, g: &GroupElement) -> GroupElement {
        self.mul(&self.inv(p), g)
    }

    /// Whether `g ∈ pP`.
    pub fn in_right_ideal_of(&self, p: &GroupElement, g: &GroupElement) -> bool {
        self.in_monoid(&self.left_div(p, g))
    }

    pub fn element_to_json(&self, g: &GroupElement) -> Value {
        match g {
            GroupElement::Lattice(v) => json!(v),
            GroupElement::Free(w) => Value::String(if w.is_empty() {
                "e".to_string()
            } else {
                w.iter().map(|l| free_letter_name(*l)).collect()
            }),
            GroupElement::Int(n) => json!(n),
            GroupElement::Affine(b, a) => json!([rat_str(b), rat_str(a)]),
            GroupElement::Custom(v) => json!(v),
        }
    }

    /// Parses an element literal for this family (see [`MonoidSpec::element_to_json`]).
    pub fn element_from_json(&self, v: &Value, path: &str) -> Result<GroupElement> {
        let bad = |m: &str| Error::schema(path, m.to_string());
        let g = match &self.family {
            Family::LatticeCone { rank } => {
                let arr = v.as_array().ok_or_else(|| bad("expected integer tuple"))?;
                if arr.len() != *rank {
                    return Err(bad(&format!("expected {rank} coordinates")));
                }
                GroupElement::Lattice(
                    arr.iter()
                        .map(|x| x.as_i64().filter(|x| x.abs() < 1 << 40).ok_or_else(|| bad("expected integer")))
                        .collect::<Result<_>>()?,
                )
            }
            Family::FreeMonoid { rank } => {
                let word = match v {
                    Value::String(s) if s == "e" => Vec::new(),
                    Value::String(s) => s
                        .chars()
                        .map(|c| {
                            let k = (c.to_ascii_lowercase() as i64) - ('a' as i64) + 1;
                            if !c.is_ascii_alphabetic() || k < 1 || k as usize > *rank {
                                return Err(bad(&format!("letter {c:?} outside rank {rank}")));
                            }
                            Ok(if c.is_ascii_uppercase() { -(k as i32) } else { k as i32 })
                        })
                        .collect::<Result<Vec<i32>>>()?,
                    Value::Array(a) => a
                        .iter()
                        .map(|x| {
                            x.as_i64()
                                .filter(|k| *k != 0 && k.unsigned_abs() as usize <= *rank)
                                .map(|k| k as i32)
                                .ok_or_else(|| bad("expected nonzero letter index"))
                        })
                        .collect::<Result<Vec<i32>>>()?,
                    _ => return Err(bad("expected word string")),
                };
                GroupElement::Free(free_reduce(word))
            }
            Family::Numerical(_) => GroupElement::Int(
                v.as_i64().filter(|x| x.abs() < 1 << 40).ok_or_else(|| bad("expected integer"))?,
            ),
            Family::Affine { .. } => {
                let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected [b, a]"))?;
                let parse = |x: &Value| -> Result<Rational64> {
                    match x {
                        Value::Number(n) => n.as_i64().filter(|x| x.abs() < 1 << 30).map(rat).ok_or_else(|| bad("expected integer")),
                        Value::String(s) => {
                            let r = crate::scalar::parse_rational(s)?;
                            let n: i64 = r.numer().try_into().map_err(|_| bad("rational too large"))?;
                            let d: i64 = r.denom().try_into().map_err(|_| bad("rational too large"))?;
                            if n.abs() >= 1 << 30 || d >= 1 << 30 {
                                return Err(bad("rational too large"));
                            }
                            Ok(Rational64::new(n, d))
                        }
                        _ => Err(bad("expected number or \"num/den\"")),
                    }
                };
                let (b, a) = (parse(&arr[0])?, parse(&arr[1])?);
                if a.is_zero() {
                    return Err(bad("affine multiplier must be nonzero"));
                }
                GroupElement::Affine(b, a)
            }
            Family::Custom(_) => GroupElement::Custom(
                v.as_array()
                    .ok_or_else(|| bad("expected integer list"))?
                    .iter()
                    .map(|x| x.as_i64().ok_or_else(|| bad("expected integer")))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(g)
    }

    /// Additive height used by truncation models: total degree for cones,
    /// word length for free monoids, the value itself for numerical semigroups.
    /// `None` when the family has no such grading.
    pub fn height(&self, g: &GroupElement) -> Option<i64> {
        match g {
            GroupElement::Lattice(v) => Some(v.iter().sum()),
            GroupElement::Free(w) => Some(w.iter().map(|l| l.signum() as i64).sum()),
            GroupElement::Int(n) => Some(*n),
            _ => None,
        }
    }
}

fn rat_str(r: &Rational64) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Products of at most `radius` generators, graded by length then ordered
/// by canonical form.
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    elements: Vec<GroupElement>,
    levels: Vec<usize>,
    factorizations: Vec<Vec<usize>>,
    index: HashMap<GroupElement, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn level(&self, i: usize) -> usize {
        self.levels[i]
    }

    /// Generator indices whose product (left to right) is element `i`.
    pub fn factorization(&self, i: usize) -> &[usize] {
        &self.factorizations[i]
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    /// Indices of elements with level at most `r`.
    pub fn within(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.levels[i] <= r)
    }
}

pub fn enumerate_ball(spec: &MonoidSpec, radius: usize) -> Result<Ball> {
    let e = spec.identity();
    let mut ball = Ball {
        radius,
        elements: vec![e.clone()],
        levels: vec![0],
        factorizations: vec![Vec::new()],
        index: HashMap::from([(e, 0)]),
    };
    let custom = spec.is_custom();
    let mut frontier = vec![0usize];
    for level in 1..=radius {
        let mut fresh: BTreeMap<GroupElement, Vec<usize>> = BTreeMap::new();
        for &x in &frontier {
            for (gi, g) in spec.generators.iter().enumerate() {
                let y = spec.mul(&ball.elements[x], g);
                let known = if custom {
                    ball.elements.iter().any(|z| spec.eq(z, &y)) || fresh.keys().any(|z| spec.eq(z, &y))
                } else {
                    ball.index.contains_key(&y) || fresh.contains_key(&y)
                };
                if !known {
                    let mut f = ball.factorizations[x].clone();
                    f.push(gi);
                    fresh.insert(y, f);
                }
            }
        }
        if ball.len() + fresh.len() > spec.ball_cap {
            return Err(Error::resource(
                format!("ball of radius {radius} ({} elements at level {level})", ball.len() + fresh.len()),
                spec.ball_cap,
                "ball_cap",
            ));
        }
        frontier.clear();
        for (y, f) in fresh {
            let i = ball.elements.len();
            ball.index.insert(y.clone(), i);
            ball.elements.push(y);
            ball.levels.push(level);
            ball.factorizations.push(f);
            frontier.push(i);
        }
        if frontier.is_empty() {
            break;
        }
    }
    Ok(ball)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn products_per_family() {
        let z2 = MonoidSpec::lattice(2);
        assert_eq!(
            z2.mul(&GroupElement::Lattice(vec![1, 0]), &GroupElement::Lattice(vec![0, 1])),
            GroupElement::Lattice(vec![1, 1])
        );
        let f2 = MonoidSpec::free(2);
        assert_eq!(f2.mul(&GroupElement::Free(vec![1]), &GroupElement::Free(vec![-1])), f2.identity());
        let aff = MonoidSpec::affine(&[(1, 1), (0, 2)], false).unwrap();
        let g = GroupElement::Affine(rat(3), rat(2));
        let h = GroupElement::Affine(rat(5), rat(7));
        assert_eq!(aff.mul(&g, &h), GroupElement::Affine(rat(13), rat(14)));
        assert!(z2.try_mul(&g, &h).is_ok());
        assert!(z2.try_mul(&GroupElement::Int(1), &h).is_err());
    }

    #[test]
    fn membership() {
        let s = MonoidSpec::numerical(&[2, 3]).unwrap();
        assert!(!s.in_monoid(&GroupElement::Int(1)));
        assert!(s.in_monoid(&GroupElement::Int(7)));
        assert!(!MonoidSpec::lattice(2).in_monoid(&GroupElement::Lattice(vec![-1, 2])));
        let Family::Numerical(d) = &s.family else { unreachable!() };
        assert_eq!(d.frobenius, 1);
        let s = MonoidSpec::numerical(&[5, 7, 9]).unwrap();
        let Family::Numerical(d) = &s.family else { unreachable!() };
        // brute force Frobenius number
        let reach: Vec<bool> = (0..100)
            .map(|n: i64| (0..=20).any(|a| (0..=20).any(|b| (0..=20).any(|c| 5 * a + 7 * b + 9 * c == n))))
            .collect();
        let frob = (0..100).filter(|&n| !reach[n as usize]).max().unwrap();
        assert_eq!(d.frobenius, frob);
        for n in 0..100 {
            assert_eq!(d.contains(n), reach[n as usize], "n = {n}");
        }
        assert!(MonoidSpec::numerical(&[2, 4]).is_err());
        // two generators: Sylvester's formula, and fast at large multiplicity
        let s = MonoidSpec::numerical(&[68444, 44443]).unwrap();
        let Family::Numerical(d) = &s.family else { unreachable!() };
        assert_eq!(d.frobenius, 68444 * 44443 - 68444 - 44443);
    }

    #[test]
    fn balls() {
        let n = MonoidSpec::lattice(1);
        let b = enumerate_ball(&n, 3).unwrap();
        assert_eq!(b.elements(), &[0, 1, 2, 3].map(|x| GroupElement::Lattice(vec![x])));
        let f2 = MonoidSpec::free(2);
        let b = enumerate_ball(&f2, 2).unwrap();
        let names: Vec<String> = b.elements().iter().map(|g| g.to_string()).collect();
        assert_eq!(names, ["e", "a", "b", "aa", "ab", "ba", "bb"]);
        let s = MonoidSpec::numerical(&[2, 3]).unwrap();
        let b = enumerate_ball(&s, 2).unwrap();
        assert_eq!(b.elements(), &[0, 2, 3, 4, 5, 6].map(GroupElement::Int));
        let capped = MonoidSpec::lattice(3).with_ball_cap(10);
        let err = enumerate_ball(&capped, 4).unwrap_err();
        assert!(err.to_string().contains("10"));
    }

    #[test]
    fn ball_growth_is_monotone_and_prefix_closed() {
        let spec = MonoidSpec::affine(&[(1, 1), (0, 2), (0, 3)], false).unwrap();
        let small = enumerate_ball(&spec, 3).unwrap();
        let big = enumerate_ball(&spec, 4).unwrap();
        for g in small.elements() {
            assert!(big.contains(g));
        }
        for i in 0..big.len() {
            let f = big.factorization(i);
            let mut acc = spec.identity();
            for &gi in f {
                acc = spec.mul(&acc, &spec.generators[gi]);
                assert!(big.contains(&acc));
            }
            assert_eq!(&acc, big.element(i));
        }
    }

    #[test]
    fn element_json_round_trip() {
        let f2 = MonoidSpec::free(2);
        let g = f2.element_from_json(&json!("abA"), "x").unwrap();
        assert_eq!(g, GroupElement::Free(vec![1, 2, -1]));
        assert_eq!(f2.element_from_json(&f2.element_to_json(&g), "x").unwrap(), g);
        assert!(f2.element_from_json(&json!("c"), "x").is_err());
        let aff = MonoidSpec::affine(&[(1, 1)], true).unwrap();
        let g = aff.element_from_json(&json!(["1/2", 3]), "x").unwrap();
        assert_eq!(aff.element_from_json(&aff.element_to_json(&g), "x").unwrap(), g);
    }

    fn spec_strategy() -> impl Strategy<Value = MonoidSpec> {
        prop_oneof![
            Just(MonoidSpec::lattice(2)),
            Just(MonoidSpec::free(2)),
            Just(MonoidSpec::numerical(&[2, 3]).unwrap()),
            Just(MonoidSpec::affine(&[(1, 1), (0, 2)], false).unwrap()),
            Just(MonoidSpec::affine(&[(1, 1), (0, -1), (0, 2)], true).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn group_axioms_on_ball(spec in spec_strategy(), i in 0usize..40, j in 0usize..40, k in 0usize..40) {
            let ball = enumerate_ball(&spec, 3).unwrap();
            let n = ball.len();
            let (g, h, x) = (ball.element(i % n), ball.element(j % n), ball.element(k % n));
            prop_assert_eq!(spec.mul(&spec.mul(g, h), x), spec.mul(g, &spec.mul(h, x)));
            prop_assert_eq!(spec.mul(g, &spec.inv(g)), spec.identity());
            prop_assert!(spec.in_monoid(&spec.mul(g, h)));
            let gi = spec.mul(&spec.inv(h), g);
            prop_assert_eq!(spec.mul(h, &gi), g.clone());
        }
    }
}
