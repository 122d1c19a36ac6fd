//! Dense multi-index tensors over a fixed frame.
//!
//! Components are stored row-major: the last index varies fastest. Every
//! operation returns a new tensor; nothing is mutated after construction.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dim: usize,
    rank: usize,
    data: Vec<f64>,
}

/// Iterates over all multi-indices of a `dim^rank` grid in storage order.
#[derive(Debug, Clone)]
pub struct MultiIndex {
    dim: usize,
    current: Vec<usize>,
    done: bool,
}

impl MultiIndex {
    pub fn new(dim: usize, rank: usize) -> Self {
        MultiIndex {
            dim,
            current: vec![0; rank],
            done: dim == 0 && rank > 0,
        }
    }
}

impl Iterator for MultiIndex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut s = self.current.len();
        loop {
            if s == 0 {
                self.done = true;
                break;
            }
            s -= 1;
            self.current[s] += 1;
            if self.current[s] < self.dim {
                break;
            }
            self.current[s] = 0;
        }
        Some(out)
    }
}

impl DenseTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        DenseTensor {
            dim,
            rank,
            data: vec![0.0; dim.pow(rank as u32)],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        DenseTensor {
            dim,
            rank: 0,
            data: vec![value],
        }
    }

    pub fn from_vec(dim: usize, rank: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("tensor dimension must be positive"));
        }
        let expected = dim.pow(rank as u32);
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "rank-{rank} tensor over dim {dim} needs {expected} components, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite tensor component".into()));
        }
        Ok(DenseTensor { dim, rank, data })
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let data = MultiIndex::new(dim, rank).map(|idx| f(&idx)).collect();
        DenseTensor { dim, rank, data }
    }

    /// Rank-2 tensor with `t[i][j] = m[(i, j)]`.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape("matrix must be square".into()));
        }
        Ok(Self::from_fn(m.nrows(), 2, |ix| m[(ix[0], ix[1])]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    /// Value of a rank-0 tensor.
    pub fn value(&self) -> f64 {
        debug_assert_eq!(self.rank, 0);
        self.data[0]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.rank, 2, "to_matrix needs a rank-2 tensor");
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(&[i, j]))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| v * alpha)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        DenseTensor {
            dim: self.dim,
            rank: self.rank,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.rank != other.rank {
            return Err(Error::Shape(format!(
                "dim/rank ({}, {}) vs ({}, {})",
                self.dim, self.rank, other.dim, other.rank
            )));
        }
        Ok(())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(DenseTensor {
            dim: self.dim,
            rank: self.rank,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    /// Reorders arguments: `out(i_0, .., i_{r-1}) = self(i_{perm[0]}, .., i_{perm[r-1]})`.
    ///
    /// With `perm = [2, 1, 0, 3]` the result is `(x, y, z, w) ↦ t(z, y, x, w)`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.rank {
            return Err(Error::arg(format!(
                "permutation of length {} for rank {}",
                perm.len(),
                self.rank
            )));
        }
        let mut seen = vec![false; self.rank];
        for &p in perm {
            if p >= self.rank || seen[p] {
                return Err(Error::arg(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut src = vec![0; self.rank];
        Ok(Self::from_fn(self.dim, self.rank, |idx| {
            for (s, &p) in perm.iter().enumerate() {
                src[s] = idx[p];
            }
            self.get(&src)
        }))
    }

    /// Feeds `M e_k` into one argument: `out(.., k, ..) = Σ_m M[m][k] t(.., m, ..)`.
    ///
    /// With `M = J` (column `k` holds `J e_k`) this is the tensor `t(.., J·, ..)`.
    pub fn apply_matrix(&self, slot: usize, m: &DMatrix<f64>) -> Result<Self> {
        if slot >= self.rank {
            return Err(Error::arg(format!("slot {slot} out of range for rank {}", self.rank)));
        }
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::Shape("matrix does not match tensor dimension".into()));
        }
        let mut src = vec![0; self.rank];
        Ok(Self::from_fn(self.dim, self.rank, |idx| {
            src.copy_from_slice(idx);
            let k = idx[slot];
            (0..self.dim)
                .map(|mm| {
                    src[slot] = mm;
                    m[(mm, k)] * self.get(&src)
                })
                .sum()
        }))
    }

    /// Tensor product `out(a.., b..) = self(a..) · other(b..)`.
    pub fn outer(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape("outer product of different dimensions".into()));
        }
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Ok(DenseTensor {
            dim: self.dim,
            rank: self.rank + other.rank,
            data,
        })
    }
}

/// Contracts two slots against a (symmetric or not) bilinear form:
/// `out(..) = Σ_{p,q} metric_inv[p][q] · t(.., p at slot_a, .., q at slot_b, ..)`.
///
/// The remaining slots keep their relative order.
pub fn contract(
    t: &DenseTensor,
    slot_a: usize,
    slot_b: usize,
    metric_inv: &DMatrix<f64>,
) -> Result<DenseTensor> {
    if t.rank < 2 {
        return Err(Error::arg("contraction needs rank >= 2"));
    }
    if slot_a >= t.rank || slot_b >= t.rank {
        return Err(Error::arg(format!(
            "slots ({slot_a}, {slot_b}) out of range for rank {}",
            t.rank
        )));
    }
    if slot_a == slot_b {
        return Err(Error::arg("cannot contract a slot with itself"));
    }
    if metric_inv.nrows() != t.dim || metric_inv.ncols() != t.dim {
        return Err(Error::Shape(format!(
            "contraction matrix is {}x{}, tensor dim is {}",
            metric_inv.nrows(),
            metric_inv.ncols(),
            t.dim
        )));
    }
    let keep: Vec<usize> = (0..t.rank).filter(|&s| s != slot_a && s != slot_b).collect();
    let mut src = vec![0; t.rank];
    Ok(DenseTensor::from_fn(t.dim, t.rank - 2, |idx| {
        for (k, &s) in keep.iter().enumerate() {
            src[s] = idx[k];
        }
        let mut acc = 0.0;
        for p in 0..t.dim {
            src[slot_a] = p;
            for q in 0..t.dim {
                let w = metric_inv[(p, q)];
                if w != 0.0 {
                    src[slot_b] = q;
                    acc += w * t.get(&src);
                }
            }
        }
        acc
    }))
}

/// `t + t∘σ + t∘σ²` where σ rotates the values held in three slots.
pub fn cyclic_sum3(t: &DenseTensor, slots: [usize; 3]) -> Result<DenseTensor> {
    if t.rank < 3 {
        return Err(Error::arg("cyclic sum needs rank >= 3"));
    }
    let [a, b, c] = slots;
    if a == b || b == c || a == c {
        return Err(Error::arg(format!("cyclic sum slots {slots:?} must be distinct")));
    }
    if a >= t.rank || b >= t.rank || c >= t.rank {
        return Err(Error::arg(format!("cyclic sum slots {slots:?} out of range")));
    }
    let mut src = vec![0; t.rank];
    Ok(DenseTensor::from_fn(t.dim, t.rank, |idx| {
        let (x, y, z) = (idx[a], idx[b], idx[c]);
        src.copy_from_slice(idx);
        let mut acc = t.get(&src);
        src[a] = y;
        src[b] = z;
        src[c] = x;
        acc += t.get(&src);
        src[a] = z;
        src[b] = x;
        src[c] = y;
        acc + t.get(&src)
    }))
}

/// Relative sup-norm distance `max|a-b| / (1 + max(max|a|, max|b|))`.
pub fn residual(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    a.check_same_shape(b)?;
    let diff = a
        .data
        .iter()
        .zip(&b.data)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(diff / (1.0 + a.max_abs().max(b.max_abs())))
}

/// Residual of `t` against the zero tensor of the same shape.
pub fn residual_to_zero(t: &DenseTensor) -> f64 {
    let m = t.max_abs();
    m / (1.0 + m)
}

/// Same relative residual for two matrices of equal shape.
pub fn matrix_residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let diff = (a - b).amax();
    diff / (1.0 + a.amax().max(b.amax()))
}

/// Scalar identity residual `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
pub fn scalar_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / 1.0_f64.max(lhs.abs()).max(rhs.abs())
}

/// The metric `g`, its inverse and the associated metric `g̃(x, y) = g(x, Jy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPair {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub g_tilde: DMatrix<f64>,
}

pub const METRIC_TOLERANCE: f64 = 1e-12;

impl MetricPair {
    pub fn new(g: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<Self> {
        let dim = g.nrows();
        if g.ncols() != dim || j.nrows() != dim || j.ncols() != dim {
            return Err(Error::Shape("metric and J must be square of equal size".into()));
        }
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::arg(format!("dimension {dim} is not even and positive")));
        }
        if matrix_residual(g, &g.transpose()) > METRIC_TOLERANCE {
            return Err(Error::Numeric("metric is not symmetric".into()));
        }
        let g_inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("metric is singular".into()))?;
        let id = DMatrix::<f64>::identity(dim, dim);
        if (g * &g_inv - &id).amax() > METRIC_TOLERANCE {
            return Err(Error::Numeric("metric inverse is inaccurate".into()));
        }
        let (pos, neg) = signature(g);
        if pos != dim / 2 || neg != dim / 2 {
            return Err(Error::Numeric(format!(
                "metric signature ({pos}, {neg}) is not ({n}, {n})",
                n = dim / 2
            )));
        }
        let g_tilde = g * j;
        if matrix_residual(&g_tilde, &g_tilde.transpose()) > METRIC_TOLERANCE {
            return Err(Error::Numeric("associated metric g(x, Jy) is not symmetric".into()));
        }
        Ok(MetricPair {
            g: g.clone(),
            g_inv,
            g_tilde,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }
}

/// Counts of positive and negative eigenvalues of a symmetric matrix.
pub fn signature(g: &DMatrix<f64>) -> (usize, usize) {
    let sym = (g + g.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    let cut = 1e-12 * scale;
    let pos = eig.eigenvalues.iter().filter(|&&v| v > cut).count();
    let neg = eig.eigenvalues.iter().filter(|&&v| v < -cut).count();
    (pos, neg)
}
