//! Sparse column-major matrices and row-reduced spans over a [`Scalar`].

use std::collections::BTreeMap;

use crate::scalar::{Numerics, Scalar};

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SVec<S> = Vec<(usize, S)>;

pub fn svec_add_scaled<S: Scalar>(a: &SVec<S>, c: &S, b: &SVec<S>, tol: f64) -> SVec<S> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = c.mul(&b[j].1);
            if !v.is_zero_tol(tol) {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = a[i].1.add(&c.mul(&b[j].1));
            if !v.is_zero_tol(tol) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn svec_scale<S: Scalar>(a: &SVec<S>, c: &S) -> SVec<S> {
    a.iter()
        .map(|(i, v)| (*i, v.mul(c)))
        .filter(|(_, v)| !v.is_exact_zero())
        .collect()
}

pub fn svec_is_zero<S: Scalar>(a: &SVec<S>, tol: f64) -> bool {
    a.iter().all(|(_, v)| v.is_zero_tol(tol))
}

fn accumulate<S: Scalar>(acc: &mut BTreeMap<usize, S>, i: usize, v: S) {
    match acc.get_mut(&i) {
        Some(x) => *x = x.add(&v),
        None => {
            acc.insert(i, v);
        }
    }
}

fn drain_acc<S: Scalar>(acc: BTreeMap<usize, S>, tol: f64) -> SVec<S> {
    acc.into_iter().filter(|(_, v)| !v.is_zero_tol(tol)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<SVec<S>>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Mat {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, S::one())]).collect(),
        }
    }

    pub fn from_columns(rows: usize, data: Vec<SVec<S>>) -> Self {
        debug_assert!(data.iter().all(|c| c.iter().all(|(i, _)| *i < rows)));
        Mat {
            rows,
            cols: data.len(),
            data,
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(rows: usize, cols: usize, t: impl IntoIterator<Item = (usize, usize, S)>) -> Self {
        let mut accs: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); cols];
        for (i, j, v) in t {
            assert!(i < rows && j < cols, "triplet out of range");
            accumulate(&mut accs[j], i, v);
        }
        Mat {
            rows,
            cols,
            data: accs.into_iter().map(|a| drain_acc(a, 0.0)).collect(),
        }
    }

    pub fn from_dense(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_triplets(
            r,
            c,
            rows.into_iter()
                .enumerate()
                .flat_map(|(i, row)| row.into_iter().enumerate().map(move |(j, v)| (i, j, v)))
                .filter(|(_, _, v)| !v.is_exact_zero()),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &SVec<S> {
        &self.data[j]
    }

    pub fn columns(&self) -> &[SVec<S>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[j]
            .binary_search_by_key(&i, |(k, _)| *k)
            .map(|p| self.data[j][p].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let mut out = vec![vec![S::zero(); self.cols]; self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                out[*i][j] = v.clone();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &SVec<S>, tol: f64) -> SVec<S> {
        let mut acc = BTreeMap::new();
        for (k, x) in v {
            for (i, a) in &self.data[*k] {
                accumulate(&mut acc, *i, a.mul(x));
            }
        }
        drain_acc(acc, tol)
    }

    pub fn mul(&self, other: &Mat<S>) -> Mat<S> {
        self.mul_tol(other, 0.0)
    }

    pub fn mul_tol(&self, other: &Mat<S>, tol: f64) -> Mat<S> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        Mat {
            rows: self.rows,
            cols: other.cols,
            data: other.data.iter().map(|c| self.mul_vec(c, tol)).collect(),
        }
    }

    pub fn add(&self, other: &Mat<S>) -> Mat<S> {
        self.add_scaled(&S::one(), other)
    }

    pub fn sub(&self, other: &Mat<S>) -> Mat<S> {
        self.add_scaled(&S::from_i64(-1), other)
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: &S, other: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| svec_add_scaled(a, c, b, 0.0))
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|col| svec_scale(col, c)).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat<S> {
        let mut cols: Vec<SVec<S>> = vec![Vec::new(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (i, v) in col {
                cols[*i].push((j, v.conj()));
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data: cols,
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|c| svec_is_zero(c, tol))
    }

    pub fn approx_eq(&self, other: &Mat<S>, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.sub(other).is_zero(tol)
    }

    pub fn select_columns(&self, cols: &[usize]) -> Mat<S> {
        Mat {
            rows: self.rows,
            cols: cols.len(),
            data: cols.iter().map(|&j| self.data[j].clone()).collect(),
        }
    }

    /// Column-stacked vectorization: entry `(i, j)` lands at `j * rows + i`.
    pub fn vectorize(&self) -> SVec<S> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (j * self.rows + i, v.clone())))
            .collect()
    }

    pub fn unvectorize(rows: usize, cols: usize, v: &SVec<S>) -> Mat<S> {
        Self::from_triplets(rows, cols, v.iter().map(|(k, x)| (k % rows, k / rows, x.clone())))
    }

    pub fn rank(&self, num: Numerics) -> usize {
        let mut span = Span::new(self.rows, num);
        for c in &self.data {
            span.insert(c);
        }
        span.rank()
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|c| c.iter().map(|(_, v)| v.abs()))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.to_dense()
                .iter()
                .map(|row| serde_json::Value::Array(row.iter().map(S::to_json).collect()))
                .collect(),
        )
    }
}

/// A linear span kept in reduced row echelon form. Each stored row remembers its
/// expression in terms of the vectors that were accepted by [`Span::insert`].
#[derive(Debug, Clone)]
pub struct Span<S> {
    dim: usize,
    num: Numerics,
    rows: Vec<SVec<S>>,
    prov: Vec<SVec<S>>,
    pivot_row: BTreeMap<usize, usize>,
    kept: usize,
}

impl<S: Scalar> Span<S> {
    pub fn new(dim: usize, num: Numerics) -> Self {
        Span {
            dim,
            num,
            rows: Vec::new(),
            prov: Vec::new(),
            pivot_row: BTreeMap::new(),
            kept: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn tol(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            self.num.tol
        }
    }

    /// Residual of `v` and the multipliers of the reduced rows that were removed.
    fn reduce(&self, v: &SVec<S>) -> (SVec<S>, Vec<(usize, S)>) {
        let tol = self.tol();
        let mut acc: BTreeMap<usize, S> = v.iter().cloned().collect();
        let mut used = Vec::new();
        let mut residual = Vec::new();
        while let Some((k, x)) = acc.pop_first() {
            if x.is_zero_tol(tol) {
                continue;
            }
            match self.pivot_row.get(&k) {
                Some(&r) => {
                    for (i, y) in self.rows[r].iter().skip(1) {
                        accumulate(&mut acc, *i, x.mul(y).neg());
                    }
                    used.push((r, x));
                }
                None => residual.push((k, x)),
            }
        }
        (residual, used)
    }

    pub fn contains(&self, v: &SVec<S>) -> bool {
        let (res, _) = self.reduce(v);
        self.leading(&res).is_none()
    }

    pub fn residual_norm(&self, v: &SVec<S>) -> f64 {
        let (res, _) = self.reduce(v);
        res.iter().map(|(_, x)| x.abs()).fold(0.0, f64::max)
    }

    fn leading(&self, res: &SVec<S>) -> Option<usize> {
        if S::EXACT {
            res.iter().position(|(_, x)| !x.is_exact_zero())
        } else {
            res.iter().position(|(_, x)| x.abs() > self.num.pivot)
        }
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &SVec<S>) -> bool {
        let (res, used) = self.reduce(v);
        let Some(lead) = self.leading(&res) else {
            return false;
        };
        let tol = self.tol();
        let inv = res[lead].1.inv().expect("pivot is nonzero");
        let row: SVec<S> = res[lead..]
            .iter()
            .map(|(i, x)| (*i, x.mul(&inv)))
            .filter(|(_, x)| !x.is_zero_tol(tol))
            .collect();
        let pivot = row[0].0;
        let mut prov: SVec<S> = vec![(self.kept, S::one())];
        for (r, x) in &used {
            prov = svec_add_scaled(&prov, &x.neg(), &self.prov[*r], 0.0);
        }
        let prov = svec_scale(&prov, &inv);
        for r in 0..self.rows.len() {
            if let Ok(p) = self.rows[r].binary_search_by_key(&pivot, |(k, _)| *k) {
                let c = self.rows[r][p].1.neg();
                self.rows[r] = svec_add_scaled(&self.rows[r], &c, &row, tol);
                self.prov[r] = svec_add_scaled(&self.prov[r], &c, &prov, 0.0);
            }
        }
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(row);
        self.prov.push(prov);
        self.kept += 1;
        true
    }

    /// Coefficients expressing `v` in the accepted vectors (in acceptance order).
    pub fn coordinates(&self, v: &SVec<S>) -> Option<Vec<S>> {
        let (res, used) = self.reduce(v);
        if self.leading(&res).is_some() {
            return None;
        }
        let mut out = vec![S::zero(); self.kept];
        for (r, x) in used {
            for (k, p) in &self.prov[r] {
                out[*k] = out[*k].add(&x.mul(p));
            }
        }
        Some(out)
    }

    /// Basis of the null space of the linear map whose rows were inserted,
    /// as vectors of length `dim`.
    pub fn nullspace(&self) -> Vec<SVec<S>> {
        let mut out = Vec::new();
        for f in (0..self.dim).filter(|c| !self.pivot_row.contains_key(c)) {
            let mut v: BTreeMap<usize, S> = BTreeMap::new();
            v.insert(f, S::one());
            for (&p, &r) in &self.pivot_row {
                if let Ok(pos) = self.rows[r].binary_search_by_key(&f, |(k, _)| *k) {
                    v.insert(p, self.rows[r][pos].1.neg());
                }
            }
            out.push(v.into_iter().collect());
        }
        out
    }

    pub fn basis(&self) -> &[SVec<S>] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Float, GaussRational};
    use proptest::prelude::*;

    type Q = GaussRational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn product_and_adjoint() {
        let a = Mat::from_dense(vec![vec![q(1), q(2)], vec![q(0), q(3)]]);
        let b = Mat::from_dense(vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
        let ab = a.mul(&b);
        assert_eq!(ab.to_dense(), vec![vec![q(2), q(1)], vec![q(3), q(0)]]);
        assert_eq!(a.mul(&b).adjoint(), b.adjoint().mul(&a.adjoint()));
    }

    #[test]
    fn span_coordinates_and_nullspace() {
        let mut s: Span<Q> = Span::new(3, Numerics::default());
        assert!(s.insert(&vec![(0, q(1)), (1, q(1))]));
        assert!(s.insert(&vec![(1, q(1)), (2, q(1))]));
        assert!(!s.insert(&vec![(0, q(1)), (2, q(-1))]));
        let c = s.coordinates(&vec![(0, q(2)), (1, q(5)), (2, q(3))]).unwrap();
        assert_eq!(c, vec![q(2), q(3)]);
        let ns = s.nullspace();
        assert_eq!(ns.len(), 1);
        // (1,1,0) and (0,1,1) both annihilate (1,-1,1)
        assert_eq!(ns[0], vec![(0, q(1)), (1, q(-1)), (2, q(1))]);
    }

    #[test]
    fn float_span_respects_pivot_threshold() {
        let mut s: Span<Float> = Span::new(2, Numerics::default());
        assert!(s.insert(&vec![(0, Float::one())]));
        let tiny = Float::from_i64(1).mul(&Float(num_complex::Complex64::new(1e-10, 0.0)));
        assert!(!s.insert(&vec![(0, Float::one()), (1, tiny)]));
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(entries in proptest::collection::vec(-2i64..3, 12)) {
            let rows: Vec<Vec<Q>> = entries.chunks(4).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let m = Mat::from_dense(rows);
            prop_assert_eq!(m.rank(Numerics::default()), m.adjoint().rank(Numerics::default()));
        }

        #[test]
        fn coordinates_reconstruct(entries in proptest::collection::vec(-2i64..3, 12), mix in proptest::collection::vec(-3i64..4, 3)) {
            let cols: Vec<SVec<Q>> = entries.chunks(4).map(|c| c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, q(x))).collect()).collect();
            let mut span = Span::new(4, Numerics::default());
            let mut kept = Vec::new();
            for c in &cols {
                if span.insert(c) { kept.push(c.clone()); }
            }
            let mut target: SVec<Q> = Vec::new();
            for (c, m) in cols.iter().zip(&mix) {
                target = svec_add_scaled(&target, &q(*m), c, 0.0);
            }
            let coords = span.coordinates(&target).unwrap();
            let mut back: SVec<Q> = Vec::new();
            for (c, k) in coords.iter().zip(&kept) {
                back = svec_add_scaled(&back, c, k, 0.0);
            }
            prop_assert_eq!(back, target);
        }
    }
}
