//! Concrete product systems, their fibers over a ball, and the truncated Fock module.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ideal::{ConstructibleIdeal, IdealEngine};
use crate::linalg::{Mat, SVec, Span};
use crate::monoid::{enumerate_ball, Ball, GroupElement, MonoidSpec};
use crate::scalar::{Numerics, Scalar};

#[derive(Clone, Debug)]
pub struct DeclaredFiber<S> {
    pub element: GroupElement,
    pub generators: Vec<Mat<S>>,
}

/// Fibers given by generating matrices in `M_D`. Every monoid generator must be
/// declared; other elements may be declared to override the product closure.
#[derive(Clone, Debug)]
pub struct ProductSystemSpec<S> {
    pub dim: usize,
    pub coefficients: Vec<Mat<S>>,
    pub fibers: Vec<DeclaredFiber<S>>,
}

impl<S: Scalar> ProductSystemSpec<S> {
    /// `X_p = ℂ v_p` for every `p`.
    pub fn x_p(monoid: &MonoidSpec) -> Self {
        let one = Mat::identity(1);
        ProductSystemSpec {
            dim: 1,
            coefficients: vec![one.clone()],
            fibers: monoid
                .generators
                .iter()
                .map(|g| DeclaredFiber {
                    element: g.clone(),
                    generators: vec![one.clone()],
                })
                .collect(),
        }
    }

    pub fn is_semigroup_case(&self) -> bool {
        let one = Mat::<S>::identity(1);
        self.dim == 1
            && !self.coefficients.is_empty()
            && self.coefficients.iter().all(|c| *c == one)
            && self.fibers.iter().all(|f| f.generators.iter().all(|g| *g == one))
    }

    pub fn validate(&self, monoid: &MonoidSpec) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::schema("product_system.dim", "must be positive"));
        }
        let square = |m: &Mat<S>| m.rows() == self.dim && m.cols() == self.dim;
        for (k, c) in self.coefficients.iter().enumerate() {
            if !square(c) {
                return Err(Error::schema(format!("product_system.coefficients[{k}]"), format!("expected {0}x{0}", self.dim)));
            }
        }
        let mut seen = Vec::new();
        for (k, f) in self.fibers.iter().enumerate() {
            let path = format!("product_system.fibers[{k}]");
            monoid.check_family(&f.element)?;
            if !monoid.in_monoid(&f.element) || monoid.is_identity(&f.element) {
                return Err(Error::schema(&path, "fiber element must be a non-identity monoid element"));
            }
            if seen.iter().any(|s| monoid.eq(s, &f.element)) {
                return Err(Error::schema(&path, "fiber declared twice"));
            }
            seen.push(f.element.clone());
            for (j, g) in f.generators.iter().enumerate() {
                if !square(g) {
                    return Err(Error::schema(format!("{path}.generators[{j}]"), format!("expected {0}x{0}", self.dim)));
                }
            }
        }
        for g in &monoid.generators {
            if !seen.iter().any(|s| monoid.eq(s, g)) {
                return Err(Error::schema("product_system.fibers", format!("generator {g} has no declared fiber")));
            }
        }
        Ok(())
    }
}

/// Factor of a fiber basis element: a coefficient generator (possibly adjointed)
/// or a declared fiber generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Coef { index: usize, adjoint: bool },
    Fiber { decl: usize, index: usize },
}

pub type Monomial = Vec<Atom>;

fn adjoint_monomial(m: &Monomial) -> Option<Monomial> {
    m.iter()
        .rev()
        .map(|a| match *a {
            Atom::Coef { index, adjoint } => Some(Atom::Coef { index, adjoint: !adjoint }),
            Atom::Fiber { .. } => None,
        })
        .collect()
}

/// A finite-dimensional subspace of `M_D` with a basis of monomials.
#[derive(Clone, Debug)]
pub struct Fiber<S> {
    basis: Vec<Mat<S>>,
    monomials: Vec<Monomial>,
    span: Span<S>,
}

impl<S: Scalar> Fiber<S> {
    fn new(d: usize, num: Numerics) -> Self {
        Fiber {
            basis: Vec::new(),
            monomials: Vec::new(),
            span: Span::new(d * d, num),
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Mat<S>] {
        &self.basis
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    fn insert(&mut self, m: Mat<S>, mono: Monomial) -> bool {
        if self.span.insert(&m.vectorize()) {
            self.basis.push(m);
            self.monomials.push(mono);
            true
        } else {
            false
        }
    }

    /// Coordinates of `m` in the basis, if `m` lies in the fiber.
    pub fn coords(&self, m: &Mat<S>) -> Option<Vec<S>> {
        self.span.coordinates(&m.vectorize())
    }

    pub fn residual(&self, m: &Mat<S>) -> f64 {
        self.span.residual_norm(&m.vectorize())
    }

    pub fn combine(&self, coords: &SVec<S>) -> Mat<S> {
        let d = self.basis.first().map_or(0, |b| b.rows());
        coords
            .iter()
            .fold(Mat::zeros(d, d), |acc, (k, c)| acc.add_scaled(c, &self.basis[*k]))
    }
}

/// Fibers `X_r` for every `r` in a ball.
#[derive(Debug)]
pub struct FiberSystem<S> {
    pub spec: Arc<ProductSystemSpec<S>>,
    pub monoid: MonoidSpec,
    pub ball: Ball,
    pub num: Numerics,
    fibers: Vec<Fiber<S>>,
}

impl<S: Scalar> FiberSystem<S> {
    pub fn build(spec: Arc<ProductSystemSpec<S>>, monoid: &MonoidSpec, radius: usize, num: Numerics) -> Result<Self> {
        spec.validate(monoid)?;
        let ball = enumerate_ball(monoid, radius)?;
        let d = spec.dim;
        let mut algebra = Fiber::new(d, num);
        for (k, c) in spec.coefficients.iter().enumerate() {
            algebra.insert(c.clone(), vec![Atom::Coef { index: k, adjoint: false }]);
        }
        // *-closure
        loop {
            let n = algebra.len();
            for i in 0..n {
                if let Some(mono) = adjoint_monomial(&algebra.monomials[i]) {
                    let m = algebra.basis[i].adjoint();
                    algebra.insert(m, mono);
                }
                for j in 0..n {
                    let m = algebra.basis[i].mul(&algebra.basis[j]);
                    let mono = [algebra.monomials[i].clone(), algebra.monomials[j].clone()].concat();
                    algebra.insert(m, mono);
                }
            }
            if algebra.len() == n {
                break;
            }
        }

        let mut fibers: Vec<Fiber<S>> = (0..ball.len()).map(|_| Fiber::new(d, num)).collect();
        let mut declared = vec![false; ball.len()];
        for (decl, f) in spec.fibers.iter().enumerate() {
            let Some(r) = ball.index_of(&f.element) else { continue };
            declared[r] = true;
            let fib = &mut fibers[r];
            for (index, g) in f.generators.iter().enumerate() {
                let atom = Atom::Fiber { decl, index };
                fib.insert(g.clone(), vec![atom]);
                for (a, am) in algebra.basis.iter().zip(&algebra.monomials) {
                    fib.insert(a.mul(g), [am.clone(), vec![atom]].concat());
                    fib.insert(g.mul(a), [vec![atom], am.clone()].concat());
                }
                for (a, am) in algebra.basis.iter().zip(&algebra.monomials) {
                    for (b, bm) in algebra.basis.iter().zip(&algebra.monomials) {
                        fib.insert(a.mul(g).mul(b), [am.clone(), vec![atom], bm.clone()].concat());
                    }
                }
            }
        }
        declared[0] = true;
        fibers[0] = algebra;

        // X_r = Σ_d X_d X_{d⁻¹r} over generators d, to a fixed point.
        let gens: Vec<usize> = monoid.generators.iter().filter_map(|g| ball.index_of(g)).collect();
        loop {
            let mut grew = false;
            for r in 0..ball.len() {
                if declared[r] {
                    continue;
                }
                for &d in &gens {
                    let s = monoid.left_div(ball.element(d), ball.element(r));
                    let Some(si) = ball.index_of(&s) else { continue };
                    if !monoid.in_monoid(&s) {
                        continue;
                    }
                    let (xd, xs) = (fibers[d].clone(), fibers[si].clone());
                    for (a, am) in xd.basis.iter().zip(&xd.monomials) {
                        for (b, bm) in xs.basis.iter().zip(&xs.monomials) {
                            grew |= fibers[r].insert(a.mul(b), [am.clone(), bm.clone()].concat());
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        Ok(FiberSystem {
            spec,
            monoid: monoid.clone(),
            ball,
            num,
            fibers,
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn algebra(&self) -> &Fiber<S> {
        &self.fibers[0]
    }

    pub fn fiber(&self, r: &GroupElement) -> Option<&Fiber<S>> {
        self.ball.index_of(r).map(|i| &self.fibers[i])
    }

    pub fn fiber_at(&self, i: usize) -> &Fiber<S> {
        &self.fibers[i]
    }

    pub fn fiber_dims_json(&self) -> Value {
        Value::Array(
            (0..self.ball.len())
                .map(|i| json!([self.monoid.element_to_json(self.ball.element(i)), self.fibers[i].len()]))
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inclusion {
    /// `X_p · X_q ⊆ X_{pq}`
    Product,
    /// `X_p^* · X_{pq} ⊆ X_q`
    Adjoint,
}

#[derive(Clone, Debug)]
pub struct AxiomViolation {
    pub kind: Inclusion,
    pub p: GroupElement,
    pub q: GroupElement,
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

impl AxiomViolation {
    pub fn to_json(&self, monoid: &MonoidSpec) -> Value {
        json!({
            "kind": match self.kind { Inclusion::Product => "fiber-product", Inclusion::Adjoint => "fiber-adjoint" },
            "p": monoid.element_to_json(&self.p),
            "q": monoid.element_to_json(&self.q),
            "basis": [self.i, self.j],
            "residual": self.residual,
        })
    }
}

/// Checks both fiber inclusions for one pair `(p, q)`.
pub fn check_axiom_pair<S: Scalar>(fs: &FiberSystem<S>, p: usize, q: usize) -> Vec<AxiomViolation> {
    let mut out = Vec::new();
    let (pe, qe) = (fs.ball.element(p), fs.ball.element(q));
    let pq = fs.monoid.mul(pe, qe);
    let Some(pqi) = fs.ball.index_of(&pq) else { return out };
    let (xp, xq, xpq) = (&fs.fibers[p], &fs.fibers[q], &fs.fibers[pqi]);
    for (i, a) in xp.basis.iter().enumerate() {
        for (j, b) in xq.basis.iter().enumerate() {
            let m = a.mul(b);
            if xpq.coords(&m).is_none() {
                out.push(AxiomViolation { kind: Inclusion::Product, p: pe.clone(), q: qe.clone(), i, j, residual: xpq.residual(&m) });
            }
        }
    }
    for (i, a) in xp.basis.iter().enumerate() {
        let at = a.adjoint();
        for (j, b) in xpq.basis.iter().enumerate() {
            let m = at.mul(b);
            if xq.coords(&m).is_none() {
                out.push(AxiomViolation { kind: Inclusion::Adjoint, p: pe.clone(), q: qe.clone(), i, j, residual: xq.residual(&m) });
            }
        }
    }
    out
}

/// All violations of the two inclusions on pairs with `p, q, pq` of level at
/// most `radius`, in ball order.
pub fn check_product_system_axioms<S: Scalar>(fs: &FiberSystem<S>, radius: usize) -> Vec<AxiomViolation> {
    let idx: Vec<usize> = fs.ball.within(radius).collect();
    let mut out = Vec::new();
    for &p in &idx {
        for &q in &idx {
            let pq = fs.monoid.mul(fs.ball.element(p), fs.ball.element(q));
            if fs.ball.index_of(&pq).is_some_and(|k| fs.ball.level(k) <= radius) {
                out.extend(check_axiom_pair(fs, p, q));
            }
        }
    }
    out
}

/// An operator on a truncated space together with the columns whose true image
/// leaves the truncation.
#[derive(Clone, Debug)]
pub struct LetterOp<S> {
    pub mat: Mat<S>,
    pub escapes: Vec<bool>,
}

impl<S: Scalar> LetterOp<S> {
    pub fn exact(mat: Mat<S>) -> Self {
        let n = mat.cols();
        LetterOp { mat, escapes: vec![false; n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::exact(Mat::identity(n))
    }

    /// Image of `v`, or `None` if part of `v` escapes.
    pub fn apply(&self, v: &SVec<S>, tol: f64) -> Option<SVec<S>> {
        if v.iter().any(|(i, _)| self.escapes[*i]) {
            return None;
        }
        Some(self.mat.mul_vec(v, tol))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &LetterOp<S>) -> LetterOp<S> {
        let escapes = (0..other.mat.cols())
            .map(|j| other.escapes[j] || other.mat.column(j).iter().any(|(i, _)| self.escapes[*i]))
            .collect();
        LetterOp {
            mat: self.mat.mul(&other.mat),
            escapes,
        }
    }
}

/// `⊕_{r ∈ ball} X_r` in fiber coordinates.
#[derive(Debug)]
pub struct TruncatedFock<S> {
    pub fibers: Arc<FiberSystem<S>>,
    offsets: Vec<usize>,
    node_of: Vec<usize>,
}

impl<S: Scalar> TruncatedFock<S> {
    pub fn new(fibers: Arc<FiberSystem<S>>) -> Self {
        let mut offsets = Vec::with_capacity(fibers.ball.len() + 1);
        let mut node_of = Vec::new();
        offsets.push(0);
        for r in 0..fibers.ball.len() {
            let n = fibers.fibers[r].len();
            node_of.extend(std::iter::repeat_n(r, n));
            offsets.push(offsets[r] + n);
        }
        TruncatedFock { fibers, offsets, node_of }
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn ball(&self) -> &Ball {
        &self.fibers.ball
    }

    pub fn offset(&self, node: usize) -> usize {
        self.offsets[node]
    }

    pub fn block_len(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Ball index of the block holding basis vector `k`.
    pub fn node(&self, k: usize) -> usize {
        self.node_of[k]
    }

    fn letter_fiber(&self, p: &GroupElement, i: usize) -> Result<&Mat<S>> {
        self.fibers
            .fiber(p)
            .and_then(|f| f.basis.get(i))
            .ok_or_else(|| Error::Structural(format!("letter {p}[{i}] is outside the Fock ball")))
    }

    fn place(&self, node: usize, coords: Vec<S>) -> impl Iterator<Item = (usize, S)> + '_ {
        let off = self.offsets[node];
        coords.into_iter().enumerate().filter(|(_, c)| !c.is_exact_zero()).map(move |(k, c)| (off + k, c))
    }

    /// `λ_p(ξ_i)`: `η_r ↦ ξ_i η_r ∈ X_{pr}`.
    pub fn creation(&self, p: &GroupElement, i: usize) -> Result<LetterOp<S>> {
        let xi = self.letter_fiber(p, i)?;
        let ball = self.ball();
        let mut trip = Vec::new();
        let mut escapes = vec![false; self.dim()];
        for r in 0..ball.len() {
            let target = self.fibers.monoid.mul(p, ball.element(r));
            let t = ball.index_of(&target);
            for k in 0..self.block_len(r) {
                let col = self.offsets[r] + k;
                let Some(t) = t else {
                    escapes[col] = true;
                    continue;
                };
                let m = xi.mul(&self.fibers.fibers[r].basis[k]);
                let c = self.fibers.fibers[t].coords(&m).ok_or_else(|| {
                    Error::Structural(format!("X_{p}·X_{} is not inside X_{target}; run fock-axioms", ball.element(r)))
                })?;
                trip.extend(self.place(t, c).map(|(row, v)| (row, col, v)));
            }
        }
        Ok(LetterOp {
            mat: Mat::from_triplets(self.dim(), self.dim(), trip),
            escapes,
        })
    }

    /// Module adjoint of `λ_p(ξ_i)`: `η_r ↦ ξ_i^* η_r ∈ X_{p⁻¹r}` when `r ∈ pP`, else 0.
    pub fn annihilation(&self, p: &GroupElement, i: usize) -> Result<LetterOp<S>> {
        let xi = self.letter_fiber(p, i)?.adjoint();
        let ball = self.ball();
        let monoid = &self.fibers.monoid;
        let mut trip = Vec::new();
        let mut escapes = vec![false; self.dim()];
        for r in 0..ball.len() {
            let s = monoid.left_div(p, ball.element(r));
            if !monoid.in_monoid(&s) {
                continue;
            }
            let t = ball.index_of(&s);
            for k in 0..self.block_len(r) {
                let col = self.offsets[r] + k;
                let Some(t) = t else {
                    escapes[col] = true;
                    continue;
                };
                let m = xi.mul(&self.fibers.fibers[r].basis[k]);
                let c = self.fibers.fibers[t].coords(&m).ok_or_else(|| {
                    Error::Structural(format!("X_{p}^*·X_{} is not inside X_{s}; run fock-axioms", ball.element(r)))
                })?;
                trip.extend(self.place(t, c).map(|(row, v)| (row, col, v)));
            }
        }
        Ok(LetterOp {
            mat: Mat::from_triplets(self.dim(), self.dim(), trip),
            escapes,
        })
    }

    /// The matrix in `M_D` represented by a Fock vector supported in one block.
    pub fn to_matrix(&self, v: &SVec<S>) -> Option<(usize, Mat<S>)> {
        let node = self.node(v.first()?.0);
        if v.iter().any(|(k, _)| self.node(*k) != node) {
            return None;
        }
        let off = self.offsets[node];
        let local: SVec<S> = v.iter().map(|(k, c)| (k - off, c.clone())).collect();
        Some((node, self.fibers.fibers[node].combine(&local)))
    }
}

/// Diagonal projection onto `⊕_{r ∈ x} X_r`.
pub fn projection_e<S: Scalar>(x: &ConstructibleIdeal, engine: &IdealEngine, fock: &TruncatedFock<S>) -> Mat<S> {
    let ball = fock.ball();
    let trip = (0..ball.len())
        .filter(|&r| engine.member(ball.element(r), x))
        .flat_map(|r| (0..fock.block_len(r)).map(move |k| fock.offset(r) + k))
        .map(|c| (c, c, S::one()))
        .collect::<Vec<_>>();
    Mat::from_triplets(fock.dim(), fock.dim(), trip)
}

/// Per-element lookups that are expensive to recompute.
#[derive(Debug)]
pub struct LetterCache<S> {
    ops: HashMap<(GroupElement, usize, bool), Arc<LetterOp<S>>>,
}

impl<S> Default for LetterCache<S> {
    fn default() -> Self {
        LetterCache { ops: HashMap::new() }
    }
}

impl<S: Scalar> LetterCache<S> {
    pub fn get_or(&mut self, key: (GroupElement, usize, bool), f: impl FnOnce() -> Result<LetterOp<S>>) -> Result<Arc<LetterOp<S>>> {
        if let Some(op) = self.ops.get(&key) {
            return Ok(op.clone());
        }
        let op = Arc::new(f()?);
        self.ops.insert(key, op.clone());
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::GroupElement::{Free, Int};
    use crate::scalar::GaussRational;

    type Q = GaussRational;

    fn e(i: usize, j: usize) -> Mat<Q> {
        Mat::from_triplets(3, 3, [(i - 1, j - 1, Q::one())])
    }

    fn nilpotent(corrupt: bool) -> ProductSystemSpec<Q> {
        let s = e(1, 2).add(&e(2, 3));
        let x2 = if corrupt { s.mul(&s).add(&e(1, 1)) } else { s.mul(&s) };
        ProductSystemSpec {
            dim: 3,
            coefficients: vec![e(1, 1), e(2, 2), e(3, 3)],
            fibers: vec![
                DeclaredFiber { element: Int(1), generators: vec![s] },
                DeclaredFiber { element: Int(2), generators: vec![x2] },
            ],
        }
    }

    #[test]
    fn x_p_fibers_are_lines() {
        let n = MonoidSpec::numerical(&[1]).unwrap();
        let fs = FiberSystem::build(Arc::new(ProductSystemSpec::<Q>::x_p(&n)), &n, 3, Numerics::default()).unwrap();
        assert!(fs.spec.is_semigroup_case());
        assert!((0..4).all(|i| fs.fiber_at(i).len() == 1));
        assert!(check_product_system_axioms(&fs, 3).is_empty());
    }

    #[test]
    fn nilpotent_shift_system() {
        let n = MonoidSpec::numerical(&[1]).unwrap();
        let fs = FiberSystem::build(Arc::new(nilpotent(false)), &n, 4, Numerics::default()).unwrap();
        assert_eq!(fs.algebra().len(), 3);
        assert_eq!(fs.fiber(&Int(1)).unwrap().len(), 2);
        assert_eq!(fs.fiber(&Int(2)).unwrap().len(), 1);
        assert_eq!(fs.fiber(&Int(3)).unwrap().len(), 0);
        assert!(check_product_system_axioms(&fs, 4).is_empty());

        let bad = FiberSystem::build(Arc::new(nilpotent(true)), &n, 4, Numerics::default()).unwrap();
        let v = check_product_system_axioms(&bad, 4);
        assert!(!v.is_empty());
        assert_eq!((v[0].p.clone(), v[0].q.clone(), v[0].kind), (Int(1), Int(1), Inclusion::Adjoint));
    }

    #[test]
    fn creation_on_naturals_is_the_shift() {
        let n = MonoidSpec::numerical(&[1]).unwrap();
        let fs = Arc::new(FiberSystem::build(Arc::new(ProductSystemSpec::<Q>::x_p(&n)), &n, 3, Numerics::default()).unwrap());
        let fock = TruncatedFock::new(fs);
        let v = fock.creation(&Int(1), 0).unwrap();
        let expect = Mat::from_triplets(4, 4, (0..3).map(|i| (i + 1, i, Q::one())));
        assert_eq!(v.mat, expect);
        assert_eq!(v.escapes, vec![false, false, false, true]);
        let vs = fock.annihilation(&Int(1), 0).unwrap();
        let prod = vs.compose(&v);
        for j in 0..3 {
            assert_eq!(prod.apply(&vec![(j, Q::one())], 0.0), Some(vec![(j, Q::one())]));
        }
        assert_eq!(prod.apply(&vec![(3, Q::one())], 0.0), None);
    }

    #[test]
    fn free_creations_compose() {
        let f = MonoidSpec::free(2);
        let fs = Arc::new(FiberSystem::build(Arc::new(ProductSystemSpec::<Q>::x_p(&f)), &f, 2, Numerics::default()).unwrap());
        let fock = TruncatedFock::new(fs.clone());
        let a = fock.creation(&Free(vec![1]), 0).unwrap();
        let b = fock.creation(&Free(vec![2]), 0).unwrap();
        let ab = fs.ball.index_of(&Free(vec![1, 2])).unwrap();
        assert_eq!(a.compose(&b).apply(&vec![(0, Q::one())], 0.0), Some(vec![(fock.offset(ab), Q::one())]));
    }
}
