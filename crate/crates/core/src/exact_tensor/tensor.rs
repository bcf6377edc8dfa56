use super::ring::{Field, Ring};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Color,
    Flavor,
    /// Index over formal generator symbols.
    Symbol,
}

/// One tensor axis. Operator axes come in pairs: the row axis is labelled by the space
/// name `s`, the column axis by `s*`. A lone `s` is a vector slot, a lone `s*` a covector slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axis {
    pub label: String,
    pub dim: usize,
    pub kind: Kind,
}

impl Axis {
    pub fn new(label: impl Into<String>, dim: usize, kind: Kind) -> Self {
        Axis { label: label.into(), dim, kind }
    }

    pub fn row(space: &str, dim: usize, kind: Kind) -> Self {
        Axis::new(space, dim, kind)
    }

    pub fn col(space: &str, dim: usize, kind: Kind) -> Self {
        Axis::new(dual_label(space), dim, kind)
    }

    pub fn is_col(&self) -> bool {
        self.label.ends_with('*')
    }

    pub fn space(&self) -> &str {
        self.label.trim_end_matches('*')
    }
}

pub fn dual_label(label: &str) -> String {
    match label.strip_suffix('*') {
        Some(s) => s.to_string(),
        None => format!("{label}*"),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("axis label {0:?} appears twice")]
    DuplicateLabel(String),
    #[error("no axis labelled {0:?}")]
    MissingLabel(String),
    #[error("cannot pair {left:?} ({ldim}, {lkind:?}) with {right:?} ({rdim}, {rkind:?})")]
    Mismatch { left: String, ldim: usize, lkind: Kind, right: String, rdim: usize, rkind: Kind },
    #[error("{got} entries supplied for axes of total size {expected}")]
    Shape { got: usize, expected: usize },
    #[error("{0:?} is not a permutation of the tensor's labels")]
    NotAPermutation(Vec<String>),
    #[error("space {space:?} is not square: rows {rows}, columns {cols}")]
    NonSquare { space: String, rows: usize, cols: usize },
    #[error("operator on {spaces:?} is singular (determinant 0)")]
    Singular { spaces: Vec<String> },
    #[error("space {0:?} is only half present; cannot pad with an identity")]
    HalfSpace(String),
}

pub type TResult<T> = Result<T, TensorError>;

/// Dense tensor whose entries live in a (possibly noncommutative) ring, stored row-major
/// in the order of `axes`.
#[derive(Clone, PartialEq)]
pub struct LabeledTensor<E> {
    axes: Vec<Axis>,
    data: Vec<E>,
}

fn check_unique(axes: &[Axis]) -> TResult<()> {
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.label == a.label) {
            return Err(TensorError::DuplicateLabel(a.label.clone()));
        }
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Odometer over a row-major index space.
pub(crate) struct MultiIndex {
    dims: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl MultiIndex {
    pub(crate) fn new(dims: &[usize]) -> Self {
        MultiIndex { dims: dims.to_vec(), cur: vec![0; dims.len()], done: dims.iter().any(|&d| d == 0) }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut k = self.dims.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.cur[k] += 1;
            if self.cur[k] < self.dims[k] {
                break;
            }
            self.cur[k] = 0;
        }
        Some(out)
    }
}

impl<E: Ring> LabeledTensor<E> {
    pub fn new(axes: Vec<Axis>, data: Vec<E>) -> TResult<Self> {
        check_unique(&axes)?;
        let expected: usize = axes.iter().map(|a| a.dim).product();
        if data.len() != expected {
            return Err(TensorError::Shape { got: data.len(), expected });
        }
        Ok(LabeledTensor { axes, data })
    }

    pub fn zeros(axes: Vec<Axis>) -> TResult<Self> {
        let n: usize = axes.iter().map(|a| a.dim).product();
        Self::new(axes, vec![E::zero(); n])
    }

    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[usize]) -> E) -> TResult<Self> {
        let dims: Vec<usize> = axes.iter().map(|a| a.dim).collect();
        let data = MultiIndex::new(&dims).map(|i| f(&i)).collect();
        Self::new(axes, data)
    }

    pub fn scalar(x: E) -> Self {
        LabeledTensor { axes: vec![], data: vec![x] }
    }

    /// Identity operator on the given spaces, axes ordered `s1, s1*, s2, s2*, …`.
    pub fn identity(spaces: &[(&str, usize, Kind)]) -> Self {
        let axes: Vec<Axis> = spaces
            .iter()
            .flat_map(|&(s, d, k)| [Axis::row(s, d, k), Axis::col(s, d, k)])
            .collect();
        Self::from_fn(axes, |i| {
            if i.chunks(2).all(|p| p[0] == p[1]) {
                E::one()
            } else {
                E::zero()
            }
        })
        .expect("identity axes are well formed")
    }

    /// Flip operator P on `s1 ⊗ s2`: P(e_i ⊗ e_j) = e_j ⊗ e_i. Axes `s1, s1*, s2, s2*`.
    pub fn flip(s1: &str, s2: &str, dim: usize, kind: Kind) -> Self {
        let axes = vec![
            Axis::row(s1, dim, kind),
            Axis::col(s1, dim, kind),
            Axis::row(s2, dim, kind),
            Axis::col(s2, dim, kind),
        ];
        Self::from_fn(axes, |i| if i[0] == i[3] && i[1] == i[2] { E::one() } else { E::zero() })
            .expect("flip axes are well formed")
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn labels(&self) -> Vec<&str> {
        self.axes.iter().map(|a| a.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.dim).collect()
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn into_data(self) -> Vec<E> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn position(&self, label: &str) -> TResult<usize> {
        self.axes
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| TensorError::MissingLabel(label.to_string()))
    }

    pub fn has(&self, label: &str) -> bool {
        self.axes.iter().any(|a| a.label == label)
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        let s = strides(&self.dims());
        idx.iter().zip(&s).map(|(i, s)| i * s).sum()
    }

    pub fn get(&self, idx: &[usize]) -> &E {
        &self.data[self.offset(idx)]
    }

    /// Entry addressed by `(label, index)` pairs; every axis must be named.
    pub fn get_labeled(&self, at: &[(&str, usize)]) -> TResult<&E> {
        let mut idx = vec![usize::MAX; self.rank()];
        for &(l, i) in at {
            idx[self.position(l)?] = i;
        }
        if let Some(k) = idx.iter().position(|&i| i == usize::MAX) {
            return Err(TensorError::MissingLabel(self.axes[k].label.clone()));
        }
        Ok(self.get(&idx))
    }

    pub fn set(&mut self, idx: &[usize], x: E) {
        let o = self.offset(idx);
        self.data[o] = x;
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> {
        MultiIndex::new(&self.dims())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &E)> {
        self.indices().zip(self.data.iter())
    }

    pub fn map<F: Ring>(&self, f: impl Fn(&E) -> F) -> LabeledTensor<F> {
        LabeledTensor { axes: self.axes.clone(), data: self.data.iter().map(f).collect() }
    }

    /// Like `map`, but the closure also sees the multi-index of each entry.
    pub fn map_indexed<F: Ring>(&self, mut f: impl FnMut(&[usize], &E) -> F) -> LabeledTensor<F> {
        let data = self.iter().map(|(i, e)| f(&i, e)).collect();
        LabeledTensor { axes: self.axes.clone(), data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn negate(&self) -> Self {
        self.map(|e| e.negate())
    }

    /// Left multiplication of every entry by `x`.
    pub fn scale_left(&self, x: &E) -> Self {
        self.map(|e| x.times(e))
    }

    fn zip(&self, other: &Self, f: impl Fn(&E, &E) -> E) -> TResult<Self> {
        let o = other.permute_axes(&self.labels())?;
        for (a, b) in self.axes.iter().zip(&o.axes) {
            if a.dim != b.dim || a.kind != b.kind {
                return Err(mismatch(a, b));
            }
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| f(a, b)).collect();
        Ok(LabeledTensor { axes: self.axes.clone(), data })
    }

    pub fn plus(&self, other: &Self) -> TResult<Self> {
        self.zip(other, |a, b| a.plus(b))
    }

    pub fn minus(&self, other: &Self) -> TResult<Self> {
        self.zip(other, |a, b| a.minus(b))
    }

    pub fn rename(&self, map: &[(&str, &str)]) -> TResult<Self> {
        let mut axes = self.axes.clone();
        for &(from, to) in map {
            let k = self.position(from)?;
            axes[k].label = to.to_string();
        }
        check_unique(&axes)?;
        Ok(LabeledTensor { axes, data: self.data.clone() })
    }

    pub fn permute_axes(&self, order: &[&str]) -> TResult<Self> {
        let bad = || TensorError::NotAPermutation(order.iter().map(|s| s.to_string()).collect());
        if order.len() != self.rank() {
            return Err(bad());
        }
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            let k = self.position(l).map_err(|_| bad())?;
            if perm.contains(&k) {
                return Err(bad());
            }
            perm.push(k);
        }
        if perm.iter().enumerate().all(|(i, &k)| i == k) {
            return Ok(self.clone());
        }
        let axes: Vec<Axis> = perm.iter().map(|&k| self.axes[k].clone()).collect();
        let old = strides(&self.dims());
        let new_dims: Vec<usize> = axes.iter().map(|a| a.dim).collect();
        let data = MultiIndex::new(&new_dims)
            .map(|i| {
                let o: usize = i.iter().zip(&perm).map(|(x, &k)| x * old[k]).sum();
                self.data[o].clone()
            })
            .collect();
        Ok(LabeledTensor { axes, data })
    }

    /// Swaps row and column roles of the named spaces. A space present only as a vector
    /// slot becomes a covector slot and vice versa. Involutive.
    pub fn partial_transpose(&self, spaces: &[&str]) -> TResult<Self> {
        let mut axes = self.axes.clone();
        for &s in spaces {
            let r = self.axes.iter().position(|a| a.label == s);
            let c = self.axes.iter().position(|a| a.label == dual_label(s));
            match (r, c) {
                (Some(r), Some(c)) => {
                    if self.axes[r].dim != self.axes[c].dim {
                        return Err(TensorError::NonSquare {
                            space: s.to_string(),
                            rows: self.axes[r].dim,
                            cols: self.axes[c].dim,
                        });
                    }
                    axes[r].label = dual_label(s);
                    axes[c].label = s.to_string();
                }
                (Some(r), None) => axes[r].label = dual_label(s),
                (None, Some(c)) => axes[c].label = s.to_string(),
                (None, None) => return Err(TensorError::MissingLabel(s.to_string())),
            }
        }
        Ok(LabeledTensor { axes, data: self.data.clone() })
    }

    /// Sums over the paired axes. Result axes are the unpaired axes of `self`, then those
    /// of `u`, each in their original order. Entries multiply as `self · u`.
    pub fn contract(&self, u: &Self, pairs: &[(&str, &str)]) -> TResult<Self> {
        let mut tp = Vec::with_capacity(pairs.len());
        let mut up = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            let i = self.position(a)?;
            let j = u.position(b)?;
            let (x, y) = (&self.axes[i], &u.axes[j]);
            if x.dim != y.dim || x.kind != y.kind {
                return Err(mismatch(x, y));
            }
            if tp.contains(&i) {
                return Err(TensorError::DuplicateLabel(a.to_string()));
            }
            if up.contains(&j) {
                return Err(TensorError::DuplicateLabel(b.to_string()));
            }
            tp.push(i);
            up.push(j);
        }
        let tfree: Vec<usize> = (0..self.rank()).filter(|i| !tp.contains(i)).collect();
        let ufree: Vec<usize> = (0..u.rank()).filter(|j| !up.contains(j)).collect();
        let axes: Vec<Axis> = tfree
            .iter()
            .map(|&i| self.axes[i].clone())
            .chain(ufree.iter().map(|&j| u.axes[j].clone()))
            .collect();
        check_unique(&axes)?;

        let pdims: Vec<usize> = tp.iter().map(|&i| self.axes[i].dim).collect();
        let pstr = strides(&pdims);
        let tfd: Vec<usize> = tfree.iter().map(|&i| self.axes[i].dim).collect();
        let ufd: Vec<usize> = ufree.iter().map(|&j| u.axes[j].dim).collect();
        let tfs = strides(&tfd);
        let ufs = strides(&ufd);
        let usize_free: usize = ufd.iter().product();

        let mut groups: HashMap<usize, Vec<(usize, &E)>> = HashMap::new();
        for (idx, e) in u.iter() {
            if e.is_zero() {
                continue;
            }
            let key: usize = up.iter().zip(&pstr).map(|(&j, s)| idx[j] * s).sum();
            let off: usize = ufree.iter().zip(&ufs).map(|(&j, s)| idx[j] * s).sum();
            groups.entry(key).or_default().push((off, e));
        }
        let total: usize = axes.iter().map(|a| a.dim).product();
        let mut data = vec![E::zero(); total];
        for (idx, e) in self.iter() {
            if e.is_zero() {
                continue;
            }
            let key: usize = tp.iter().zip(&pstr).map(|(&i, s)| idx[i] * s).sum();
            let Some(g) = groups.get(&key) else { continue };
            let base: usize = tfree.iter().zip(&tfs).map(|(&i, s)| idx[i] * s).sum::<usize>() * usize_free;
            for (off, f) in g {
                data[base + off].plus_assign(&e.times(f));
            }
        }
        Ok(LabeledTensor { axes, data })
    }

    pub fn outer(&self, u: &Self) -> TResult<Self> {
        self.contract(u, &[])
    }

    /// Operator composition `self ∘ u`: every column axis `s*` of `self` meets the row
    /// axis `s` of `u` when both exist. Spaces absent from one factor act as identity.
    pub fn compose(&self, u: &Self) -> TResult<Self> {
        let pairs: Vec<(String, String)> = self
            .axes
            .iter()
            .filter(|a| a.is_col() && u.has(a.space()))
            .map(|a| (a.label.clone(), a.space().to_string()))
            .collect();
        let p: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        self.contract(u, &p)
    }

    /// Composition restricted to the listed spaces.
    pub fn matmul(&self, u: &Self, on: &[&str]) -> TResult<Self> {
        let cols: Vec<String> = on.iter().map(|s| dual_label(s)).collect();
        let p: Vec<(&str, &str)> = cols.iter().map(|c| c.as_str()).zip(on.iter().copied()).collect();
        self.contract(u, &p)
    }

    /// Tensors with identities on every space of `target` that is missing here, then
    /// reorders the axes to match `target` exactly.
    pub fn embed(&self, target: &[Axis]) -> TResult<Self> {
        for a in &self.axes {
            if !target.iter().any(|t| t == a) {
                return Err(TensorError::MissingLabel(a.label.clone()));
            }
        }
        let mut out = self.clone();
        for t in target {
            if self.has(&t.label) || t.is_col() {
                continue;
            }
            let dual = dual_label(&t.label);
            let partner = target.iter().find(|x| x.label == dual);
            match partner {
                Some(p) if !self.has(&dual) && p.dim == t.dim => {
                    out = out.outer(&Self::identity(&[(t.label.as_str(), t.dim, t.kind)]))?;
                }
                _ => return Err(TensorError::HalfSpace(t.label.clone())),
            }
        }
        for t in target {
            if !out.has(&t.label) {
                return Err(TensorError::HalfSpace(t.space().to_string()));
            }
        }
        let order: Vec<&str> = target.iter().map(|a| a.label.as_str()).collect();
        out.permute_axes(&order)
    }

    /// Exact equality up to axis order. Tensors over different label sets are unequal.
    pub fn equals(&self, other: &Self) -> bool {
        matches!(self.first_difference(other), Ok(None))
    }

    /// First entry (in `self`'s lexicographic order) where the tensors differ, with the
    /// labelled index and both values.
    pub fn first_difference(&self, other: &Self) -> TResult<Option<(Vec<(String, usize)>, E, E)>> {
        let o = other.permute_axes(&self.labels())?;
        for (a, b) in self.axes.iter().zip(&o.axes) {
            if a.dim != b.dim {
                return Err(mismatch(a, b));
            }
        }
        for ((idx, x), y) in self.iter().zip(&o.data) {
            if x != y {
                let at = self.axes.iter().zip(idx).map(|(a, i)| (a.label.clone(), i)).collect();
                return Ok(Some((at, x.clone(), y.clone())));
            }
        }
        Ok(None)
    }

    /// Nonzero entries with their labelled indices.
    pub fn support(&self) -> Vec<(Vec<(String, usize)>, E)> {
        self.iter()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| (self.axes.iter().zip(i).map(|(a, k)| (a.label.clone(), k)).collect(), e.clone()))
            .collect()
    }
}

impl<E: Field> LabeledTensor<E> {
    /// Inverse of the operator on `spaces`. The tensor must consist of exactly the row
    /// and column axes of those spaces. The result uses axes `s1.., s1*..` in the given order.
    pub fn inverse(&self, spaces: &[&str]) -> TResult<Self> {
        let rows: Vec<String> = spaces.iter().map(|s| s.to_string()).collect();
        let cols: Vec<String> = spaces.iter().map(|s| dual_label(s)).collect();
        let order: Vec<&str> = rows.iter().chain(&cols).map(|s| s.as_str()).collect();
        let t = self.permute_axes(&order)?;
        let half = spaces.len();
        for k in 0..half {
            if t.axes[k].dim != t.axes[half + k].dim {
                return Err(TensorError::NonSquare {
                    space: rows[k].clone(),
                    rows: t.axes[k].dim,
                    cols: t.axes[half + k].dim,
                });
            }
        }
        let n: usize = t.axes[..half].iter().map(|a| a.dim).product();
        let mut m: Vec<Vec<E>> = t.data.chunks(n).map(|r| r.to_vec()).collect();
        let mut inv: Vec<Vec<E>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { E::one() } else { E::zero() }).collect()).collect();
        let singular = || TensorError::Singular { spaces: rows.clone() };
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r][col].is_zero()).ok_or_else(singular)?;
            m.swap(col, piv);
            inv.swap(col, piv);
            let p = m[col][col].inverse().ok_or_else(singular)?;
            for j in 0..n {
                m[col][j] = p.times(&m[col][j]);
                inv[col][j] = p.times(&inv[col][j]);
            }
            for r in 0..n {
                if r == col || m[r][col].is_zero() {
                    continue;
                }
                let f = m[r][col].clone();
                for j in 0..n {
                    let a = f.times(&m[col][j]);
                    m[r][j] = m[r][j].minus(&a);
                    let b = f.times(&inv[col][j]);
                    inv[r][j] = inv[r][j].minus(&b);
                }
            }
        }
        Ok(LabeledTensor { axes: t.axes, data: inv.into_iter().flatten().collect() })
    }
}

fn mismatch(a: &Axis, b: &Axis) -> TensorError {
    TensorError::Mismatch {
        left: a.label.clone(),
        ldim: a.dim,
        lkind: a.kind,
        right: b.label.clone(),
        rdim: b.dim,
        rkind: b.kind,
    }
}

impl<E: Ring> fmt::Debug for LabeledTensor<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabeledTensor{:?} {{", self.labels())?;
        for (idx, e) in self.iter().filter(|(_, e)| !e.is_zero()) {
            write!(f, " {idx:?}: {e:?};")?;
        }
        write!(f, " }}")
    }
}
