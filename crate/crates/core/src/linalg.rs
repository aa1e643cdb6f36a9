//! Complex linear algebra over basis-labelled spaces with weighted inner
//! products.
//!
//! Every space carries a squared-norm weight per basis index, so the dagger is
//! the adjoint with respect to `<u,v> = sum_i w_i conj(u_i) v_i` rather than the
//! plain conjugate transpose. Operators store either a dense row-major matrix
//! or a sorted coordinate list; both storages support the same operations and
//! must agree entrywise.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Squared norms of the implicit orthogonal basis of a [`Space`].
#[derive(Clone, Debug)]
pub enum Weights {
    Uniform(f64),
    PerIndex(Arc<[f64]>),
}

impl Weights {
    fn get(&self, i: usize) -> f64 {
        match self {
            Weights::Uniform(w) => *w,
            Weights::PerIndex(ws) => ws[i],
        }
    }
}

/// A finite-dimensional complex space with a labelled orthogonal basis.
///
/// Vectors are coefficient arrays with respect to that basis; the weight at
/// index `i` is the squared norm of the i-th basis vector.
#[derive(Clone)]
pub struct Space {
    label: String,
    dim: usize,
    weights: Weights,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({}, dim={})", self.label, self.dim)
    }
}

impl Space {
    pub fn uniform(label: impl Into<String>, dim: usize, weight: f64) -> Self {
        Space {
            label: label.into(),
            dim,
            weights: Weights::Uniform(weight),
        }
    }

    /// Orthonormal basis: all weights 1.
    pub fn orthonormal(label: impl Into<String>, dim: usize) -> Self {
        Self::uniform(label, dim, 1.0)
    }

    pub fn weighted(label: impl Into<String>, weights: Vec<f64>) -> Self {
        Space {
            label: label.into(),
            dim: weights.len(),
            weights: Weights::PerIndex(weights.into()),
        }
    }

    /// The one-dimensional scalar space.
    pub fn scalar() -> Self {
        Self::orthonormal("C", 1)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.get(i)
    }

    /// Tensor product space; weights multiply pointwise in row-major order.
    pub fn tensor(&self, other: &Space) -> Space {
        let label = compose_label(&self.label, &other.label);
        let dim = self.dim * other.dim;
        let weights = match (&self.weights, &other.weights) {
            (Weights::Uniform(a), Weights::Uniform(b)) => Weights::Uniform(a * b),
            _ => {
                let mut ws = Vec::with_capacity(dim);
                for i in 0..self.dim {
                    let wi = self.weight(i);
                    for j in 0..other.dim {
                        ws.push(wi * other.weight(j));
                    }
                }
                Weights::PerIndex(ws.into())
            }
        };
        Space { label, dim, weights }
    }

    /// Same dimension and (numerically) the same weights.
    pub fn compatible(&self, other: &Space) -> bool {
        if self.dim != other.dim {
            return false;
        }
        for i in 0..self.dim {
            let a = self.weight(i);
            let b = other.weight(i);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return false;
            }
        }
        true
    }
}

fn compose_label(a: &str, b: &str) -> String {
    let s = format!("{a}*{b}");
    if s.len() > 48 {
        format!("{}..", &s[..46])
    } else {
        s
    }
}

/// A vector in a [`Space`], stored densely as basis coefficients.
#[derive(Clone, Debug)]
pub struct StateVec {
    space: Space,
    amp: Vec<C64>,
}

impl StateVec {
    pub fn zero(space: Space) -> Self {
        let amp = vec![C64::new(0.0, 0.0); space.dim()];
        StateVec { space, amp }
    }

    pub fn basis(space: Space, index: usize) -> Self {
        let mut v = Self::zero(space);
        v.amp[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_amplitudes(space: Space, amp: Vec<C64>) -> Result<Self> {
        if amp.len() != space.dim() {
            return Err(Error::Shape(format!(
                "vector length {} does not match space dim {}",
                amp.len(),
                space.dim()
            )));
        }
        Ok(StateVec { space, amp })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn get(&self, i: usize) -> C64 {
        self.amp[i]
    }

    pub fn set(&mut self, i: usize, v: C64) {
        self.amp[i] = v;
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    /// Weighted inner product `<self, other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &StateVec) -> Result<C64> {
        if !self.space.compatible(&other.space) {
            return Err(Error::Shape(format!(
                "inner product between {:?} and {:?}",
                self.space, other.space
            )));
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.amp.len() {
            acc += self.space.weight(i) * self.amp[i].conj() * other.amp[i];
        }
        Ok(acc)
    }

    pub fn norm2(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.amp.len() {
            acc += self.space.weight(i) * self.amp[i].norm_sqr();
        }
        acc
    }

    pub fn add(&self, other: &StateVec) -> Result<StateVec> {
        if !self.space.compatible(&other.space) {
            return Err(Error::Shape("state addition".into()));
        }
        let amp = self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a + b)
            .collect();
        Ok(StateVec {
            space: self.space.clone(),
            amp,
        })
    }

    pub fn sub(&self, other: &StateVec) -> Result<StateVec> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> StateVec {
        StateVec {
            space: self.space.clone(),
            amp: self.amp.iter().map(|a| a * c).collect(),
        }
    }

    pub fn kron(&self, other: &StateVec) -> StateVec {
        let space = self.space.tensor(&other.space);
        let mut amp = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amp {
            for b in &other.amp {
                amp.push(a * b);
            }
        }
        StateVec { space, amp }
    }

    pub fn max_abs_diff(&self, other: &StateVec) -> f64 {
        self.amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
enum MatData {
    /// Row-major `rows x cols`.
    Dense(Vec<C64>),
    /// Sorted by (row, col), no duplicates, no stored exact zeros.
    Sparse(Vec<(u32, u32, C64)>),
}

/// A linear map between two weighted spaces.
///
/// `truncated` marks operators whose matrix is the compression of a larger
/// operator onto a cutoff basis (occupation-sector truncation); it propagates
/// through every algebraic operation so that no silently-truncated result can
/// masquerade as exact.
#[derive(Clone, Debug)]
pub struct LinOp {
    dom: Space,
    cod: Space,
    data: MatData,
    truncated: bool,
}

impl LinOp {
    pub fn zeros(dom: Space, cod: Space) -> Self {
        LinOp {
            dom,
            cod,
            data: MatData::Sparse(Vec::new()),
            truncated: false,
        }
    }

    pub fn identity(space: Space) -> Self {
        let entries = (0..space.dim() as u32)
            .map(|i| (i, i, C64::new(1.0, 0.0)))
            .collect();
        LinOp {
            dom: space.clone(),
            cod: space,
            data: MatData::Sparse(entries),
            truncated: false,
        }
    }

    pub fn from_dense(dom: Space, cod: Space, data: Vec<C64>) -> Result<Self> {
        if data.len() != dom.dim() * cod.dim() {
            return Err(Error::Shape(format!(
                "dense data length {} vs {}x{}",
                data.len(),
                cod.dim(),
                dom.dim()
            )));
        }
        Ok(LinOp {
            dom,
            cod,
            data: MatData::Dense(data),
            truncated: false,
        })
    }

    pub fn from_fn(dom: Space, cod: Space, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dom.dim() * cod.dim());
        for i in 0..cod.dim() {
            for j in 0..dom.dim() {
                data.push(f(i, j));
            }
        }
        LinOp {
            dom,
            cod,
            data: MatData::Dense(data),
            truncated: false,
        }
    }

    /// Build from coordinate entries; duplicates are summed.
    pub fn from_entries(dom: Space, cod: Space, mut entries: Vec<(u32, u32, C64)>) -> Self {
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut out: Vec<(u32, u32, C64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            if let Some(last) = out.last_mut() {
                if last.0 == i && last.1 == j {
                    last.2 += v;
                    continue;
                }
            }
            out.push((i, j, v));
        }
        out.retain(|&(_, _, v)| v != C64::new(0.0, 0.0));
        LinOp {
            dom,
            cod,
            data: MatData::Sparse(out),
            truncated: false,
        }
    }

    pub fn dom(&self) -> &Space {
        &self.dom
    }

    pub fn cod(&self) -> &Space {
        &self.cod
    }

    pub fn rows(&self) -> usize {
        self.cod.dim()
    }

    pub fn cols(&self) -> usize {
        self.dom.dim()
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.data, MatData::Sparse(_))
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn set_truncated(&mut self, t: bool) {
        self.truncated = t;
    }

    pub fn with_truncated(mut self, t: bool) -> Self {
        self.truncated = t;
        self
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match &self.data {
            MatData::Dense(d) => d[i * self.cols() + j],
            MatData::Sparse(es) => {
                match es.binary_search_by_key(&(i as u32, j as u32), |&(r, c, _)| (r, c)) {
                    Ok(pos) => es[pos].2,
                    Err(_) => C64::new(0.0, 0.0),
                }
            }
        }
    }

    /// Nonzero entries as (row, col, value). Dense storage yields stored
    /// entries including zeros.
    pub fn entries(&self) -> Vec<(u32, u32, C64)> {
        match &self.data {
            MatData::Dense(d) => {
                let cols = self.cols();
                d.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != C64::new(0.0, 0.0))
                    .map(|(k, v)| ((k / cols) as u32, (k % cols) as u32, *v))
                    .collect()
            }
            MatData::Sparse(es) => es.clone(),
        }
    }

    pub fn to_dense(&self) -> LinOp {
        match &self.data {
            MatData::Dense(_) => self.clone(),
            MatData::Sparse(es) => {
                let cols = self.cols();
                let mut d = vec![C64::new(0.0, 0.0); self.rows() * cols];
                for &(i, j, v) in es {
                    d[i as usize * cols + j as usize] = v;
                }
                LinOp {
                    dom: self.dom.clone(),
                    cod: self.cod.clone(),
                    data: MatData::Dense(d),
                    truncated: self.truncated,
                }
            }
        }
    }

    pub fn to_sparse(&self) -> LinOp {
        match &self.data {
            MatData::Sparse(_) => self.clone(),
            MatData::Dense(_) => LinOp {
                dom: self.dom.clone(),
                cod: self.cod.clone(),
                data: MatData::Sparse(self.entries()),
                truncated: self.truncated,
            },
        }
    }

    /// Adjoint with respect to the weighted inner products of domain and
    /// codomain: `<dagger(A) u, v>_dom = <u, A v>_cod`.
    pub fn dagger(&self) -> LinOp {
        let entry = |i: usize, j: usize, v: C64| {
            // A^dag[j,i] = conj(A[i,j]) * w_cod(i) / w_dom(j)
            v.conj() * (self.cod.weight(i) / self.dom.weight(j))
        };
        let data = match &self.data {
            MatData::Dense(_) => {
                let mut d = vec![C64::new(0.0, 0.0); self.rows() * self.cols()];
                for i in 0..self.rows() {
                    for j in 0..self.cols() {
                        d[j * self.rows() + i] = entry(i, j, self.get(i, j));
                    }
                }
                MatData::Dense(d)
            }
            MatData::Sparse(es) => {
                let mut out: Vec<(u32, u32, C64)> = es
                    .iter()
                    .map(|&(i, j, v)| (j, i, entry(i as usize, j as usize, v)))
                    .collect();
                out.sort_by_key(|&(i, j, _)| (i, j));
                MatData::Sparse(out)
            }
        };
        LinOp {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            data,
            truncated: self.truncated,
        }
    }

    /// `self . rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &LinOp) -> Result<LinOp> {
        if !self.dom.compatible(&rhs.cod) {
            return Err(Error::Shape(format!(
                "compose: {:?} . {:?}",
                self.dom, rhs.cod
            )));
        }
        let truncated = self.truncated || rhs.truncated;
        let data = match (&self.data, &rhs.data) {
            (MatData::Sparse(a), MatData::Sparse(b)) => {
                // rows of rhs indexed by row for the inner loop
                let mut rows_of_b: Vec<Vec<(u32, C64)>> = vec![Vec::new(); rhs.rows()];
                for &(i, j, v) in b {
                    rows_of_b[i as usize].push((j, v));
                }
                let mut acc: std::collections::BTreeMap<(u32, u32), C64> =
                    std::collections::BTreeMap::new();
                for &(i, k, va) in a {
                    for &(j, vb) in &rows_of_b[k as usize] {
                        *acc.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += va * vb;
                    }
                }
                let out: Vec<(u32, u32, C64)> = acc
                    .into_iter()
                    .filter(|&(_, v)| v != C64::new(0.0, 0.0))
                    .map(|((i, j), v)| (i, j, v))
                    .collect();
                MatData::Sparse(out)
            }
            _ => {
                let a = self.to_dense();
                let b = rhs.to_dense();
                let (m, k, n) = (self.rows(), self.cols(), rhs.cols());
                let (da, db) = match (&a.data, &b.data) {
                    (MatData::Dense(da), MatData::Dense(db)) => (da, db),
                    _ => unreachable!(),
                };
                let mut d = vec![C64::new(0.0, 0.0); m * n];
                for i in 0..m {
                    for l in 0..k {
                        let v = da[i * k + l];
                        if v == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for j in 0..n {
                            d[i * n + j] += v * db[l * n + j];
                        }
                    }
                }
                MatData::Dense(d)
            }
        };
        Ok(LinOp {
            dom: rhs.dom.clone(),
            cod: self.cod.clone(),
            data,
            truncated,
        })
    }

    pub fn add(&self, other: &LinOp) -> Result<LinOp> {
        if !self.dom.compatible(&other.dom) || !self.cod.compatible(&other.cod) {
            return Err(Error::Shape("operator addition".into()));
        }
        let truncated = self.truncated || other.truncated;
        let data = match (&self.data, &other.data) {
            (MatData::Sparse(a), MatData::Sparse(b)) => {
                let mut es = a.clone();
                es.extend_from_slice(b);
                return Ok(LinOp::from_entries(self.dom.clone(), self.cod.clone(), es)
                    .with_truncated(truncated));
            }
            _ => {
                let a = self.to_dense();
                let b = other.to_dense();
                match (&a.data, &b.data) {
                    (MatData::Dense(da), MatData::Dense(db)) => MatData::Dense(
                        da.iter().zip(db.iter()).map(|(x, y)| x + y).collect(),
                    ),
                    _ => unreachable!(),
                }
            }
        };
        Ok(LinOp {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            data,
            truncated,
        })
    }

    pub fn sub(&self, other: &LinOp) -> Result<LinOp> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> LinOp {
        let data = match &self.data {
            MatData::Dense(d) => MatData::Dense(d.iter().map(|v| v * c).collect()),
            MatData::Sparse(es) => {
                MatData::Sparse(es.iter().map(|&(i, j, v)| (i, j, v * c)).collect())
            }
        };
        LinOp {
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            data,
            truncated: self.truncated,
        }
    }

    /// Kronecker product in row-major ordering: `(A x B)[(i1,i2),(j1,j2)] = A[i1,j1] B[i2,j2]`.
    pub fn tensor(&self, other: &LinOp) -> LinOp {
        let dom = self.dom.tensor(&other.dom);
        let cod = self.cod.tensor(&other.cod);
        let truncated = self.truncated || other.truncated;
        match (&self.data, &other.data) {
            (MatData::Dense(da), MatData::Dense(db)) => {
                let (ra, ca) = (self.rows(), self.cols());
                let (rb, cb) = (other.rows(), other.cols());
                let cols = ca * cb;
                let mut d = vec![C64::new(0.0, 0.0); ra * rb * cols];
                for i1 in 0..ra {
                    for j1 in 0..ca {
                        let va = da[i1 * ca + j1];
                        if va == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for i2 in 0..rb {
                            for j2 in 0..cb {
                                d[(i1 * rb + i2) * cols + (j1 * cb + j2)] =
                                    va * db[i2 * cb + j2];
                            }
                        }
                    }
                }
                LinOp {
                    dom,
                    cod,
                    data: MatData::Dense(d),
                    truncated,
                }
            }
            _ => {
                let ea = self.entries();
                let eb = other.entries();
                let (cb, rb) = (other.cols() as u32, other.rows() as u32);
                let mut out = Vec::with_capacity(ea.len() * eb.len());
                for &(i1, j1, va) in &ea {
                    for &(i2, j2, vb) in &eb {
                        out.push((i1 * rb + i2, j1 * cb + j2, va * vb));
                    }
                }
                LinOp::from_entries(dom, cod, out).with_truncated(truncated)
            }
        }
    }

    pub fn apply(&self, v: &StateVec) -> Result<StateVec> {
        if !self.dom.compatible(v.space()) {
            return Err(Error::Shape(format!(
                "apply: {:?} to vector in {:?}",
                self.dom,
                v.space()
            )));
        }
        let mut out = StateVec::zero(self.cod.clone());
        match &self.data {
            MatData::Dense(d) => {
                let cols = self.cols();
                for i in 0..self.rows() {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..cols {
                        acc += d[i * cols + j] * v.amp[j];
                    }
                    out.amp[i] = acc;
                }
            }
            MatData::Sparse(es) => {
                for &(i, j, m) in es {
                    out.amp[i as usize] += m * v.amp[j as usize];
                }
            }
        }
        Ok(out)
    }

    /// Maximum absolute entry; zero iff the operator is the zero matrix.
    pub fn opnorm_max(&self) -> f64 {
        match &self.data {
            MatData::Dense(d) => d.iter().map(|v| v.norm()).fold(0.0, f64::max),
            MatData::Sparse(es) => es.iter().map(|&(_, _, v)| v.norm()).fold(0.0, f64::max),
        }
    }

    pub fn max_abs_diff(&self, other: &LinOp) -> Result<f64> {
        Ok(self.sub(other)?.opnorm_max())
    }
}

/// Commutator `AB - BA`.
pub fn comm(a: &LinOp, b: &LinOp) -> Result<LinOp> {
    a.compose(b)?.sub(&b.compose(a)?)
}

/// The rank-one operator `|ket><bra|`: `v -> ket * <bra, v>`.
pub fn outer(ket: &StateVec, bra: &StateVec) -> LinOp {
    let dom = bra.space().clone();
    let cod = ket.space().clone();
    let mut entries = Vec::new();
    for i in 0..cod.dim() {
        let ki = ket.get(i);
        if ki == C64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..dom.dim() {
            let bj = bra.get(j);
            if bj == C64::new(0.0, 0.0) {
                continue;
            }
            entries.push((i as u32, j as u32, ki * dom.weight(j) * bj.conj()));
        }
    }
    LinOp::from_entries(dom, cod, entries)
}

/// The functional `v -> <bra, v>` as a map into the scalar space.
pub fn bra_row(bra: &StateVec) -> LinOp {
    let dom = bra.space().clone();
    let entries = (0..dom.dim())
        .filter(|&j| bra.get(j) != C64::new(0.0, 0.0))
        .map(|j| (0u32, j as u32, dom.weight(j) * bra.get(j).conj()))
        .collect();
    LinOp::from_entries(dom, Space::scalar(), entries)
}

/// The state as a map from the scalar space.
pub fn ket_col(ket: &StateVec) -> LinOp {
    let cod = ket.space().clone();
    let entries = (0..cod.dim())
        .filter(|&i| ket.get(i) != C64::new(0.0, 0.0))
        .map(|i| (i as u32, 0u32, ket.get(i)))
        .collect();
    LinOp::from_entries(Space::scalar(), cod, entries)
}

/// Permutation of tensor factors: output factor `k` is input factor `perm[k]`.
pub fn tensor_permutation(spaces: &[Space], perm: &[usize]) -> Result<LinOp> {
    if perm.len() != spaces.len() {
        return Err(Error::Shape("permutation length".into()));
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::Shape("invalid permutation".into()));
        }
        seen[p] = true;
    }
    let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
    let dom = spaces
        .iter()
        .skip(1)
        .fold(spaces[0].clone(), |acc, s| acc.tensor(s));
    let out_spaces: Vec<Space> = perm.iter().map(|&p| spaces[p].clone()).collect();
    let cod = out_spaces
        .iter()
        .skip(1)
        .fold(out_spaces[0].clone(), |acc, s| acc.tensor(s));
    let total: usize = dims.iter().product();
    let mut entries = Vec::with_capacity(total);
    for in_idx in 0..total {
        // decompose row-major over input dims
        let mut digits = vec![0usize; dims.len()];
        let mut rem = in_idx;
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let mut out_idx = 0usize;
        for (k, &p) in perm.iter().enumerate() {
            out_idx = out_idx * dims[p] + digits[p];
            let _ = k;
        }
        entries.push((out_idx as u32, in_idx as u32, C64::new(1.0, 0.0)));
    }
    Ok(LinOp::from_entries(dom, cod, entries))
}

/// Least-squares fit of `a ~ lambda * b`; returns the fitted scalar and the
/// max-entry residual `|a - lambda b|`.
pub fn fit_scalar(a: &LinOp, b: &LinOp) -> Result<(C64, f64)> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape("fit_scalar".into()));
    }
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (i, j, v) in b.entries() {
        num += v.conj() * a.get(i as usize, j as usize);
        den += v.norm_sqr();
    }
    let lambda = if den > 0.0 { num / den } else { C64::new(0.0, 0.0) };
    let residual = a.sub(&b.scale(lambda))?.opnorm_max();
    Ok((lambda, residual))
}
