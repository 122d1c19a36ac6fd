//! Left-invariant almost complex structures with Norden metric on Lie groups.
//!
//! All geometric input lives at the identity: structure constants
//! `[e_i, e_j] = Σ_k C[k][i][j] e_k`, the metric matrix `g[i][j] = g(e_i, e_j)`
//! and the matrix of `J` whose column `j` holds `J e_j`. Frame components of
//! left-invariant tensors are constant, so covariant derivatives reduce to
//! connection terms.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::{matrix_residual, residual, residual_to_zero, signature, DenseTensor};

/// Tolerance for the purely algebraic invariants (`J² = -1`, Norden compatibility, symmetry).
pub const ALGEBRAIC_TOLERANCE: f64 = 1e-12;
/// Structure constants found by iterative search carry solver round-off.
pub const JACOBI_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LieFrameManifold {
    dim: usize,
    structure_constants: DenseTensor,
    metric: DMatrix<f64>,
    j: DMatrix<f64>,
    metric_inv: Option<DMatrix<f64>>,
}

impl LieFrameManifold {
    /// Checks shapes only; geometric invariants are the job of [`validate_manifold`].
    pub fn new(
        structure_constants: DenseTensor,
        metric: DMatrix<f64>,
        j: DMatrix<f64>,
    ) -> Result<Self> {
        let dim = structure_constants.dim();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::arg(format!("dimension {dim} must be even and positive")));
        }
        if structure_constants.rank() != 3 {
            return Err(Error::Shape("structure constants must have rank 3".into()));
        }
        if metric.shape() != (dim, dim) || j.shape() != (dim, dim) {
            return Err(Error::Shape(format!(
                "metric {:?} and J {:?} must be {dim}x{dim}",
                metric.shape(),
                j.shape()
            )));
        }
        let metric_inv = metric.clone().try_inverse();
        Ok(LieFrameManifold {
            dim,
            structure_constants,
            metric,
            j,
            metric_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constants(&self) -> &DenseTensor {
        &self.structure_constants
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn complex_structure(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn metric_inverse(&self) -> Result<&DMatrix<f64>> {
        self.metric_inv
            .as_ref()
            .ok_or_else(|| Error::Numeric("metric is singular".into()))
    }

    /// `g̃(x, y) = g(x, Jy)` as a matrix.
    pub fn associated_metric(&self) -> DMatrix<f64> {
        &self.metric * &self.j
    }

    /// Bracket `[e_i, e_j]` lowered with `g`: `c[i][j][k] = g([e_i, e_j], e_k)`.
    pub fn lowered_brackets(&self) -> DenseTensor {
        let c = &self.structure_constants;
        let g = &self.metric;
        DenseTensor::from_fn(self.dim, 3, |ix| {
            (0..self.dim).map(|m| c.get(&[m, ix[0], ix[1]]) * g[(m, ix[2])]).sum()
        })
    }
}

/// `g = diag(1,..,1,-1,..,-1)` and `J e_i = e_{n+i}`, `J e_{n+i} = -e_i`.
pub fn canonical_norden_pair(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = 2 * n;
    let g = DMatrix::from_fn(dim, dim, |i, k| match (i == k, i < n) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    });
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..n {
        j[(n + i, i)] = 1.0;
        j[(i, n + i)] = -1.0;
    }
    (g, j)
}

/// The abelian 4-dimensional group with the canonical Norden pair.
pub fn flat_kahler_4() -> LieFrameManifold {
    let (g, j) = canonical_norden_pair(2);
    LieFrameManifold::new(DenseTensor::zeros(4, 3), g, j).expect("canonical shapes")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub invariant: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationOutcome {
    pub violations: Vec<Violation>,
}

impl ValidationOutcome {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn find(&self, invariant: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.invariant == invariant)
    }
}

impl fmt::Display for ValidationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                write!(f, "; ")?;
            }
            write!(
                f,
                "{} (residual {:.3e} > {:.1e})",
                v.invariant, v.residual, v.tolerance
            )?;
        }
        Ok(())
    }
}

pub const INV_BRACKET_ANTISYMMETRY: &str = "bracket antisymmetry";
pub const INV_JACOBI: &str = "Jacobi identity";
pub const INV_J_SQUARED: &str = "J^2 = -id";
pub const INV_NORDEN: &str = "Norden compatibility J^T g J = -g";
pub const INV_METRIC_SYMMETRY: &str = "metric symmetry";
pub const INV_NONDEGENERATE: &str = "metric nondegenerate";
pub const INV_SIGNATURE: &str = "metric signature (n,n)";

/// `Σ_m C[m][i][j] C[p][m][l]` summed cyclically over `(i, j, l)`, stored as `[p][i][j][l]`.
pub fn jacobiator(c: &DenseTensor) -> DenseTensor {
    let d = c.dim();
    let term = |p: usize, i: usize, j: usize, l: usize| -> f64 {
        (0..d).map(|m| c.get(&[m, i, j]) * c.get(&[p, m, l])).sum()
    };
    DenseTensor::from_fn(d, 4, |ix| {
        let (p, i, j, l) = (ix[0], ix[1], ix[2], ix[3]);
        term(p, i, j, l) + term(p, j, l, i) + term(p, l, i, j)
    })
}

pub fn validate_manifold(m: &LieFrameManifold) -> ValidationOutcome {
    validate_manifold_with(m, JACOBI_TOLERANCE)
}

pub fn validate_manifold_with(m: &LieFrameManifold, jacobi_tolerance: f64) -> ValidationOutcome {
    let mut out = ValidationOutcome::default();
    let mut check = |invariant: &'static str, residual: f64, tolerance: f64| {
        if residual.is_nan() || residual > tolerance {
            out.violations.push(Violation {
                invariant,
                residual,
                tolerance,
            });
        }
    };

    let c = m.structure_constants();
    let swapped = c.permute(&[0, 2, 1]).expect("rank 3");
    let anti = residual(c, &swapped.scale(-1.0)).expect("same shape");
    check(INV_BRACKET_ANTISYMMETRY, anti, ALGEBRAIC_TOLERANCE);
    check(INV_JACOBI, residual_to_zero(&jacobiator(c)), jacobi_tolerance);

    let j = m.complex_structure();
    let g = m.metric();
    let id = DMatrix::<f64>::identity(m.dim(), m.dim());
    check(INV_J_SQUARED, matrix_residual(&(j * j), &(-&id)), ALGEBRAIC_TOLERANCE);
    check(
        INV_NORDEN,
        matrix_residual(&(j.transpose() * g * j), &(-g)),
        ALGEBRAIC_TOLERANCE,
    );
    check(
        INV_METRIC_SYMMETRY,
        matrix_residual(g, &g.transpose()),
        ALGEBRAIC_TOLERANCE,
    );

    let eig = ((g + g.transpose()) * 0.5).symmetric_eigen();
    let largest = eig.eigenvalues.amax();
    let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    let conditioning = if largest > 0.0 { smallest / largest } else { 0.0 };
    if conditioning.is_nan() || conditioning <= ALGEBRAIC_TOLERANCE || m.metric_inv.is_none() {
        out.violations.push(Violation {
            invariant: INV_NONDEGENERATE,
            residual: conditioning,
            tolerance: ALGEBRAIC_TOLERANCE,
        });
    } else {
        let (pos, neg) = signature(g);
        let n = m.dim() / 2;
        let off = pos.abs_diff(n) + neg.abs_diff(n);
        check(INV_SIGNATURE, off as f64, 0.0);
    }
    out
}

/// Frame connection symbols: `∇_{e_i} e_j = Σ_k Γ[k][i][j] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoeffs(DenseTensor);

impl ConnectionCoeffs {
    pub fn new(gamma: DenseTensor) -> Result<Self> {
        if gamma.rank() != 3 {
            return Err(Error::Shape("connection symbols must have rank 3".into()));
        }
        Ok(ConnectionCoeffs(gamma))
    }

    pub fn gamma(&self) -> &DenseTensor {
        &self.0
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.0.get(&[k, i, j])
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `T[k][i][j] = Γ[k][i][j] - Γ[k][j][i] - C[k][i][j]`.
    pub fn torsion(&self, m: &LieFrameManifold) -> DenseTensor {
        let c = m.structure_constants();
        DenseTensor::from_fn(self.dim(), 3, |ix| {
            let (k, i, j) = (ix[0], ix[1], ix[2]);
            self.get(k, i, j) - self.get(k, j, i) - c.get(&[k, i, j])
        })
    }

    /// Components of `∇g`, `(∇_i g)(e_j, e_k) = -g(∇_i e_j, e_k) - g(e_j, ∇_i e_k)`.
    pub fn metric_derivative(&self, g: &DMatrix<f64>) -> DenseTensor {
        let d = self.dim();
        DenseTensor::from_fn(d, 3, |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            -(0..d)
                .map(|m| self.get(m, i, j) * g[(m, k)] + self.get(m, i, k) * g[(j, m)])
                .sum::<f64>()
        })
    }
}

/// Levi-Civita symbols from the Koszul formula for left-invariant fields:
/// `2 g(∇_{e_i} e_j, e_k) = g([e_i,e_j],e_k) + g([e_k,e_i],e_j) + g([e_k,e_j],e_i)`.
pub fn levi_civita(m: &LieFrameManifold) -> Result<ConnectionCoeffs> {
    let g_inv = m.metric_inverse()?;
    let c = m.lowered_brackets();
    let d = m.dim();
    let low = DenseTensor::from_fn(d, 3, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        0.5 * (c.get(&[i, j, k]) + c.get(&[k, i, j]) + c.get(&[k, j, i]))
    });
    let gamma = DenseTensor::from_fn(d, 3, |ix| {
        let (m_, i, j) = (ix[0], ix[1], ix[2]);
        (0..d).map(|k| g_inv[(m_, k)] * low.get(&[i, j, k])).sum()
    });
    if !gamma.is_finite() {
        return Err(Error::Numeric("Levi-Civita symbols are not finite".into()));
    }
    ConnectionCoeffs::new(gamma)
}

/// `(∇t)[i][a_1..a_r] = -Σ_s Σ_m Γ[m][i][a_s] t[a_1..m..a_r]`; the new index is slot 0.
pub fn covariant_derivative(
    m: &LieFrameManifold,
    conn: &ConnectionCoeffs,
    t: &DenseTensor,
) -> Result<DenseTensor> {
    let d = m.dim();
    if t.dim() != d || conn.dim() != d {
        return Err(Error::Shape("tensor, connection and manifold dimensions differ".into()));
    }
    let r = t.rank();
    if r == 0 {
        return Ok(DenseTensor::zeros(d, 1));
    }
    let mut src = vec![0; r];
    Ok(DenseTensor::from_fn(d, r + 1, |ix| {
        let i = ix[0];
        let args = &ix[1..];
        let mut acc = 0.0;
        for s in 0..r {
            src.copy_from_slice(args);
            for mm in 0..d {
                let w = conn.get(mm, i, args[s]);
                if w != 0.0 {
                    src[s] = mm;
                    acc -= w * t.get(&src);
                }
            }
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_example_validates() {
        assert!(validate_manifold(&flat_kahler_4()).is_ok());
    }

    #[test]
    fn identity_metric_breaks_norden_compatibility() {
        let (_, j) = canonical_norden_pair(2);
        let m = LieFrameManifold::new(DenseTensor::zeros(4, 3), DMatrix::identity(4, 4), j)
            .unwrap();
        let out = validate_manifold(&m);
        let v = out.find(INV_NORDEN).expect("Norden violation reported");
        assert_eq!(v.residual, 1.0);
        assert!(out.find(INV_SIGNATURE).is_some());
    }

    #[test]
    fn odd_dimension_is_an_argument_error() {
        let r = LieFrameManifold::new(
            DenseTensor::zeros(3, 3),
            DMatrix::identity(3, 3),
            DMatrix::identity(3, 3),
        );
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn misshaped_metric_is_a_shape_error() {
        let (_, j) = canonical_norden_pair(2);
        let r = LieFrameManifold::new(DenseTensor::zeros(4, 3), DMatrix::identity(3, 3), j);
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn abelian_connection_vanishes() {
        let m = flat_kahler_4();
        let lc = levi_civita(&m).unwrap();
        assert_eq!(lc.gamma().max_abs(), 0.0);
        let t = DenseTensor::from_fn(4, 2, |ix| (ix[0] + 3 * ix[1]) as f64);
        assert_eq!(covariant_derivative(&m, &lc, &t).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn scalar_derivative_is_zero_vector() {
        let m = flat_kahler_4();
        let lc = levi_civita(&m).unwrap();
        let d = covariant_derivative(&m, &lc, &DenseTensor::scalar(4, 2.5)).unwrap();
        assert_eq!(d.rank(), 1);
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn broken_jacobi_is_reported() {
        // [e0,e1] = e1, [e1,e2] = e0: the Jacobiator on (e0,e1,e2) is e0
        let (g, j) = canonical_norden_pair(2);
        let mut c = vec![0.0; 64];
        let mut set = |k: usize, i: usize, jj: usize, v: f64| {
            c[k * 16 + i * 4 + jj] = v;
            c[k * 16 + jj * 4 + i] = -v;
        };
        set(1, 0, 1, 1.0);
        set(0, 1, 2, 1.0);
        let m = LieFrameManifold::new(DenseTensor::from_vec(4, 3, c).unwrap(), g, j).unwrap();
        assert!(validate_manifold(&m).find(INV_JACOBI).is_some());
    }
}
