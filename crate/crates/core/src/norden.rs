//! Tensors built from `∇J`: the fundamental tensor `F`, the Norden class, the
//! square norms of `∇J`, the torsion potential `Q` and the connection `∇' = ∇ + Q`.
//!
//! Vector-valued objects (`∇J`, `Q(x, y)`) keep their contravariant index in
//! slot 0: `(∇_{e_i} J) e_j = Σ_k nabla_j[k][i][j] e_k`. Everything of type
//! (0, k) is stored fully covariant.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::manifold::{ConnectionCoeffs, LieFrameManifold};
use crate::tensor::{cyclic_sum3, residual_to_zero, DenseTensor};

/// `(∇J)[k][i][j] = Σ_m (Γ[k][i][m] J[m][j] - J[k][m] Γ[m][i][j])`.
pub fn compute_nabla_j(m: &LieFrameManifold, conn: &ConnectionCoeffs) -> DenseTensor {
    let d = m.dim();
    let j = m.complex_structure();
    DenseTensor::from_fn(d, 3, |ix| {
        let (k, i, jj) = (ix[0], ix[1], ix[2]);
        (0..d)
            .map(|mm| conn.get(k, i, mm) * j[(mm, jj)] - j[(k, mm)] * conn.get(mm, i, jj))
            .sum()
    })
}

/// Lowers the contravariant slot 0 of a vector-valued tensor into the last slot:
/// `out[i][j][l] = Σ_k g[k][l] v[k][i][j]`.
pub fn lower_vector_valued(g: &DMatrix<f64>, v: &DenseTensor) -> DenseTensor {
    let d = v.dim();
    DenseTensor::from_fn(d, 3, |ix| {
        (0..d).map(|k| g[(k, ix[2])] * v.get(&[k, ix[0], ix[1]])).sum()
    })
}

/// Inverse of [`lower_vector_valued`] given `g⁻¹`.
pub fn raise_vector_valued(g_inv: &DMatrix<f64>, cov: &DenseTensor) -> DenseTensor {
    let d = cov.dim();
    DenseTensor::from_fn(d, 3, |ix| {
        (0..d).map(|l| g_inv[(ix[0], l)] * cov.get(&[ix[1], ix[2], l])).sum()
    })
}

/// `F(x, y, z) = g((∇_x J) y, z)`.
pub fn compute_f(m: &LieFrameManifold, nabla_j: &DenseTensor) -> DenseTensor {
    lower_vector_valued(m.metric(), nabla_j)
}

/// `A(x, y) = (∇_x J) J y + (∇_{Jx} J) y`, the vector-valued form behind `H`
/// and the third characterisation of quasi-Kähler structures.
pub fn twisted_nabla_j(m: &LieFrameManifold, nabla_j: &DenseTensor) -> DenseTensor {
    let d = m.dim();
    let j = m.complex_structure();
    DenseTensor::from_fn(d, 3, |ix| {
        let (k, x, y) = (ix[0], ix[1], ix[2]);
        (0..d)
            .map(|mm| nabla_j.get(&[k, x, mm]) * j[(mm, y)] + j[(mm, x)] * nabla_j.get(&[k, mm, y]))
            .sum()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NordenClass {
    KahlerW0,
    QuasiKahlerW3,
    Other,
}

impl NordenClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NordenClass::KahlerW0 => "KAHLER_W0",
            NordenClass::QuasiKahlerW3 => "QUASI_KAHLER_W3",
            NordenClass::Other => "OTHER",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "KAHLER_W0" => Some(NordenClass::KahlerW0),
            "QUASI_KAHLER_W3" => Some(NordenClass::QuasiKahlerW3),
            "OTHER" => Some(NordenClass::Other),
            _ => None,
        }
    }

    /// W₀ is contained in W₃, so both carry the quasi-Kähler identities.
    pub fn is_quasi_kahler(self) -> bool {
        self != NordenClass::Other
    }
}

impl fmt::Display for NordenClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassLabel {
    pub class: NordenClass,
    /// `max |F|`.
    pub f_norm: f64,
    /// Cyclic sum of `F(x, y, z)` against zero.
    pub w3_residual: f64,
    /// Cyclic sum of `F(Jx, y, z)` against zero.
    pub jf_cyclic_residual: f64,
    /// `A(x, y) + A(y, x)` against zero.
    pub twisted_symmetric_residual: f64,
}

pub fn classify(
    m: &LieFrameManifold,
    f: &DenseTensor,
    nabla_j: &DenseTensor,
    tolerance: f64,
) -> ClassLabel {
    let f_norm = f.max_abs();
    let w3_residual = residual_to_zero(&cyclic_sum3(f, [0, 1, 2]).expect("rank 3"));
    let jf = f
        .apply_matrix(0, m.complex_structure())
        .expect("matching dimensions");
    let jf_cyclic_residual = residual_to_zero(&cyclic_sum3(&jf, [0, 1, 2]).expect("rank 3"));
    let a = twisted_nabla_j(m, nabla_j);
    let a_sym = a.add(&a.permute(&[0, 2, 1]).expect("rank 3")).expect("same shape");
    let twisted_symmetric_residual = residual_to_zero(&a_sym);
    let class = if f_norm <= tolerance {
        NordenClass::KahlerW0
    } else if w3_residual <= tolerance {
        NordenClass::QuasiKahlerW3
    } else {
        NordenClass::Other
    };
    ClassLabel {
        class,
        f_norm,
        w3_residual,
        jf_cyclic_residual,
        twisted_symmetric_residual,
    }
}

/// How the associated square norm `‖∇J‖*²` pairs its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssocNormVariant {
    /// `g^{ij} g^{ks} g̃((∇_{e_i}J)e_k, (∇_{e_j}J)e_s)`.
    #[default]
    InnerAssociated,
    /// `g̃^{ij} g̃^{ks} g((∇_{e_i}J)e_k, (∇_{e_j}J)e_s)`.
    OuterAssociatedInverse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareNorms {
    pub sq_norm: f64,
    pub assoc_sq_norm: f64,
}

/// `Σ outer[i][j] outer[k][s] inner((∇_iJ)e_k, (∇_jJ)e_s)`, with the second
/// pair of arguments optionally transposed to `(∇_sJ)e_j`.
fn nabla_j_pairing(
    nabla_j: &DenseTensor,
    outer: &DMatrix<f64>,
    inner: &DMatrix<f64>,
    crossed: bool,
) -> f64 {
    let d = nabla_j.dim();
    // inner-lowered copy: low[j][s][m] = Σ_p inner[m][p] ∇J[p][j][s]
    let low = DenseTensor::from_fn(d, 3, |ix| {
        (0..d).map(|p| inner[(ix[2], p)] * nabla_j.get(&[p, ix[0], ix[1]])).sum()
    });
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            let oij = outer[(i, j)];
            if oij == 0.0 {
                continue;
            }
            for k in 0..d {
                for s in 0..d {
                    let oks = outer[(k, s)];
                    if oks == 0.0 {
                        continue;
                    }
                    let pair: f64 = (0..d)
                        .map(|mm| {
                            let second = if crossed {
                                low.get(&[s, j, mm])
                            } else {
                                low.get(&[j, s, mm])
                            };
                            nabla_j.get(&[mm, i, k]) * second
                        })
                        .sum();
                    acc += oij * oks * pair;
                }
            }
        }
    }
    acc
}

pub fn square_norms(m: &LieFrameManifold, nabla_j: &DenseTensor) -> Result<SquareNorms> {
    square_norms_with(m, nabla_j, AssocNormVariant::default())
}

pub fn square_norms_with(
    m: &LieFrameManifold,
    nabla_j: &DenseTensor,
    variant: AssocNormVariant,
) -> Result<SquareNorms> {
    let g = m.metric();
    let g_inv = m.metric_inverse()?;
    let g_tilde = m.associated_metric();
    let sq_norm = nabla_j_pairing(nabla_j, g_inv, g, false);
    let assoc_sq_norm = match variant {
        AssocNormVariant::InnerAssociated => nabla_j_pairing(nabla_j, g_inv, &g_tilde, false),
        AssocNormVariant::OuterAssociatedInverse => {
            let gt_inv = g_tilde
                .try_inverse()
                .ok_or_else(|| Error::Numeric("associated metric is singular".into()))?;
            nabla_j_pairing(nabla_j, &gt_inv, g, false)
        }
    };
    Ok(SquareNorms {
        sq_norm,
        assoc_sq_norm,
    })
}

/// `-2 g^{ij} g^{ks} g((∇_{e_i}J)e_k, (∇_{e_s}J)e_j)`, equal to `‖∇J‖²` on W₃.
pub fn sq_norm_cross_form(m: &LieFrameManifold, nabla_j: &DenseTensor) -> Result<f64> {
    Ok(-2.0 * nabla_j_pairing(nabla_j, m.metric_inverse()?, m.metric(), true))
}

/// The torsion potential in both storage forms.
#[derive(Debug, Clone, PartialEq)]
pub struct TorsionPotential {
    /// `Q(e_i, e_j) = Σ_k vec[k][i][j] e_k`.
    pub vec: DenseTensor,
    /// `Q(y, z, w) = g(Q(y, z), w)`.
    pub cov: DenseTensor,
}

/// `Q(x, y) = ¼{(∇_x J)Jy - (∇_{Jx} J)y - 2(∇_y J)Jx}`.
///
/// Only defined here for quasi-Kähler inputs.
pub fn compute_q(
    m: &LieFrameManifold,
    nabla_j: &DenseTensor,
    label: &ClassLabel,
) -> Result<TorsionPotential> {
    if !label.class.is_quasi_kahler() {
        return Err(Error::Refused(format!(
            "torsion potential needs a quasi-Kähler input, class is {} (cyclic F residual {:.3e})",
            label.class, label.w3_residual
        )));
    }
    let d = m.dim();
    let j = m.complex_structure();
    let vec = DenseTensor::from_fn(d, 3, |ix| {
        let (k, x, y) = (ix[0], ix[1], ix[2]);
        0.25 * (0..d)
            .map(|mm| {
                j[(mm, y)] * nabla_j.get(&[k, x, mm])
                    - j[(mm, x)] * nabla_j.get(&[k, mm, y])
                    - 2.0 * j[(mm, x)] * nabla_j.get(&[k, y, mm])
            })
            .sum::<f64>()
    });
    let cov = lower_vector_valued(m.metric(), &vec);
    Ok(TorsionPotential { vec, cov })
}

/// `-¼ 𝔖_{y,z,w} F(y, z, Jw)`, the second route to the covariant `Q`.
pub fn q_from_f(m: &LieFrameManifold, f: &DenseTensor) -> DenseTensor {
    let fj = f
        .apply_matrix(2, m.complex_structure())
        .expect("matching dimensions");
    cyclic_sum3(&fj, [0, 1, 2]).expect("rank 3").scale(-0.25)
}

/// `Γ' = Γ + Q`.
pub fn connection_prime(conn: &ConnectionCoeffs, q_vec: &DenseTensor) -> Result<ConnectionCoeffs> {
    ConnectionCoeffs::new(conn.gamma().add(q_vec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{flat_kahler_4, levi_civita};

    #[test]
    fn flat_example_is_kahler() {
        let m = flat_kahler_4();
        let lc = levi_civita(&m).unwrap();
        let nj = compute_nabla_j(&m, &lc);
        assert_eq!(nj.max_abs(), 0.0);
        let f = compute_f(&m, &nj);
        let label = classify(&m, &f, &nj, 1e-9);
        assert_eq!(label.class, NordenClass::KahlerW0);
        assert_eq!(label.w3_residual, 0.0);
        assert_eq!(label.jf_cyclic_residual, 0.0);
        assert_eq!(label.twisted_symmetric_residual, 0.0);
        let norms = square_norms(&m, &nj).unwrap();
        assert_eq!((norms.sq_norm, norms.assoc_sq_norm), (0.0, 0.0));
        let q = compute_q(&m, &nj, &label).unwrap();
        assert_eq!(q.vec.max_abs(), 0.0);
        assert_eq!(q.cov.max_abs(), 0.0);
        let prime = connection_prime(&lc, &q.vec).unwrap();
        assert_eq!(prime, lc);
    }

    #[test]
    fn other_class_is_refused() {
        let m = flat_kahler_4();
        let nj = DenseTensor::zeros(4, 3);
        let label = ClassLabel {
            class: NordenClass::Other,
            f_norm: 1.0,
            w3_residual: 0.5,
            jf_cyclic_residual: 0.5,
            twisted_symmetric_residual: 0.5,
        };
        assert!(matches!(compute_q(&m, &nj, &label), Err(Error::Refused(_))));
    }

    #[test]
    fn class_names_round_trip() {
        for c in [NordenClass::KahlerW0, NordenClass::QuasiKahlerW3, NordenClass::Other] {
            assert_eq!(NordenClass::parse(c.as_str()), Some(c));
        }
    }
}
