//! Curvature tensors, Ricci contractions, the auxiliary tensors `P` and `H`,
//! and the four-dimensional decomposition through `π₁, π₂, π₃`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::manifold::{ConnectionCoeffs, LieFrameManifold};
use crate::norden::twisted_nabla_j;
use crate::tensor::{contract, cyclic_sum3, residual, residual_to_zero, DenseTensor};

/// A covariant rank-4 tensor together with its algebraic-symmetry residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    pub t: DenseTensor,
    /// `L(x,y,z,w) = -L(y,x,z,w) = -L(x,y,w,z)`, worst of the two.
    pub antisymmetry_residual: f64,
    /// First Bianchi identity, cyclic over the first three slots.
    pub bianchi_residual: f64,
    /// `L(x,y,Jz,Jw) = -L(x,y,z,w)`.
    pub kahler_residual: f64,
    pub is_curvature_like: bool,
    pub is_kahler: bool,
}

impl CurvatureTensor {
    pub fn analyse(t: DenseTensor, j: &DMatrix<f64>, tolerance: f64) -> Result<Self> {
        if t.rank() != 4 {
            return Err(Error::Shape("curvature tensors have rank 4".into()));
        }
        let neg = t.scale(-1.0);
        let a1 = residual(&t.permute(&[1, 0, 2, 3])?, &neg)?;
        let a2 = residual(&t.permute(&[0, 1, 3, 2])?, &neg)?;
        let antisymmetry_residual = a1.max(a2);
        let bianchi_residual = residual_to_zero(&cyclic_sum3(&t, [0, 1, 2])?);
        let jj = t.apply_matrix(2, j)?.apply_matrix(3, j)?;
        let kahler_residual = residual(&jj, &neg)?;
        let is_curvature_like =
            antisymmetry_residual <= tolerance && bianchi_residual <= tolerance;
        let is_kahler = is_curvature_like && kahler_residual <= tolerance;
        Ok(CurvatureTensor {
            t,
            antisymmetry_residual,
            bianchi_residual,
            kahler_residual,
            is_curvature_like,
            is_kahler,
        })
    }

    /// Worst residual among all three Kähler-tensor properties.
    pub fn kahler_tensor_residual(&self) -> f64 {
        self.antisymmetry_residual
            .max(self.bianchi_residual)
            .max(self.kahler_residual)
    }
}

/// `R(x,y,z,w) = g(R(x,y)z, w)` with `R(x,y) = [∇_x, ∇_y] - ∇_{[x,y]}`.
///
/// Works for any connection given by frame symbols, torsion or not.
pub fn riemann_components(m: &LieFrameManifold, conn: &ConnectionCoeffs) -> DenseTensor {
    let d = m.dim();
    let c = m.structure_constants();
    let g = m.metric();
    // vector form first: out[p][i][j][k] = (R(e_i,e_j)e_k)^p
    let vecform = DenseTensor::from_fn(d, 4, |ix| {
        let (p, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        (0..d)
            .map(|mm| {
                conn.get(p, i, mm) * conn.get(mm, j, k)
                    - conn.get(p, j, mm) * conn.get(mm, i, k)
                    - c.get(&[mm, i, j]) * conn.get(p, mm, k)
            })
            .sum()
    });
    DenseTensor::from_fn(d, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        (0..d).map(|p| g[(p, l)] * vecform.get(&[p, i, j, k])).sum()
    })
}

pub fn riemann(
    m: &LieFrameManifold,
    conn: &ConnectionCoeffs,
    tolerance: f64,
) -> Result<CurvatureTensor> {
    CurvatureTensor::analyse(riemann_components(m, conn), m.complex_structure(), tolerance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RicciScalars {
    /// `ρ(x,y) = g^{ij} L(e_i,x,y,e_j)`.
    pub rho: DenseTensor,
    /// `ρ*(x,y) = g^{ij} L(e_i,x,y,Je_j)`.
    pub rho_star: DenseTensor,
    pub tau: f64,
    /// `g^{ij} ρ(e_i, Je_j)`.
    pub tau_star: f64,
    /// `g^{ij} ρ*(e_i, e_j)`; diagnostic only.
    pub tau_star_via_rho_star: f64,
}

pub fn ricci_and_scalars(m: &LieFrameManifold, l: &DenseTensor) -> Result<RicciScalars> {
    if l.rank() != 4 {
        return Err(Error::Shape("Ricci contraction needs a rank-4 tensor".into()));
    }
    let g_inv = m.metric_inverse()?;
    let j = m.complex_structure();
    let rho = contract(l, 0, 3, g_inv)?;
    let rho_star = contract(&l.apply_matrix(3, j)?, 0, 3, g_inv)?;
    let tau = contract(&rho, 0, 1, g_inv)?.value();
    let tau_star = contract(&rho.apply_matrix(1, j)?, 0, 1, g_inv)?.value();
    let tau_star_via_rho_star = contract(&rho_star, 0, 1, g_inv)?.value();
    Ok(RicciScalars {
        rho,
        rho_star,
        tau,
        tau_star,
        tau_star_via_rho_star,
    })
}

/// `QQ(a,b,c,d) = g(Q(a,b), Q(c,d))`.
pub fn q_pairing(m: &LieFrameManifold, q_vec: &DenseTensor) -> DenseTensor {
    vector_pairing(m.metric(), q_vec)
}

fn vector_pairing(g: &DMatrix<f64>, v: &DenseTensor) -> DenseTensor {
    let d = v.dim();
    let low = crate::norden::lower_vector_valued(g, v);
    DenseTensor::from_fn(d, 4, |ix| {
        (0..d)
            .map(|p| low.get(&[ix[0], ix[1], p]) * v.get(&[p, ix[2], ix[3]]))
            .sum()
    })
}

/// `P(x,y,z,w) = 2g(Q(x,y),Q(z,w)) + g(Q(z,y),Q(x,w)) + g(Q(x,z),Q(y,w))`.
pub fn tensor_p(m: &LieFrameManifold, q_vec: &DenseTensor, tolerance: f64) -> Result<CurvatureTensor> {
    let qq = q_pairing(m, q_vec);
    let t = qq
        .scale(2.0)
        .add(&qq.permute(&[2, 1, 0, 3])?)?
        .add(&qq.permute(&[0, 2, 1, 3])?)?;
    CurvatureTensor::analyse(t, m.complex_structure(), tolerance)
}

/// `H(x,y,z,w) = g((∇_xJ)Jy + (∇_{Jx}J)y, (∇_zJ)Jw + (∇_{Jz}J)w)`.
pub fn tensor_h(m: &LieFrameManifold, nabla_j: &DenseTensor, tolerance: f64) -> Result<CurvatureTensor> {
    let a = twisted_nabla_j(m, nabla_j);
    CurvatureTensor::analyse(vector_pairing(m.metric(), &a), m.complex_structure(), tolerance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiForms {
    pub pi1: DenseTensor,
    pub pi2: DenseTensor,
    pub pi3: DenseTensor,
}

impl PiForms {
    /// `a(π₁ - π₂) + b π₃`.
    pub fn combination(&self, a: f64, b: f64) -> DenseTensor {
        self.pi1
            .combine(a, &self.pi2, -a)
            .and_then(|t| t.combine(1.0, &self.pi3, b))
            .expect("π-forms share a shape")
    }
}

pub fn pi_forms(m: &LieFrameManifold) -> PiForms {
    let d = m.dim();
    let g = m.metric();
    let gt = m.associated_metric();
    let pi1 = DenseTensor::from_fn(d, 4, |ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        g[(y, z)] * g[(x, w)] - g[(x, z)] * g[(y, w)]
    });
    let pi2 = DenseTensor::from_fn(d, 4, |ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        gt[(y, z)] * gt[(x, w)] - gt[(x, z)] * gt[(y, w)]
    });
    let pi3 = DenseTensor::from_fn(d, 4, |ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        -g[(y, z)] * gt[(x, w)] + g[(x, z)] * gt[(y, w)] - gt[(y, z)] * g[(x, w)]
            + gt[(x, z)] * g[(y, w)]
    });
    PiForms { pi1, pi2, pi3 }
}

/// Every scalar attached to a quasi-Kähler manifold.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalarPanel {
    pub tau: f64,
    pub tau_star: f64,
    pub tau_prime: f64,
    pub tau_prime_star: f64,
    pub tau_p: f64,
    pub tau_star_p: f64,
    pub tau_h: f64,
    pub tau_star_h: f64,
    pub sq_norm_nabla_j: f64,
    pub assoc_sq_norm_nabla_j: f64,
}

impl ScalarPanel {
    /// Field names and values in serialization order.
    pub fn entries(&self) -> [(&'static str, f64); 10] {
        [
            ("tau", self.tau),
            ("tau_star", self.tau_star),
            ("tau_prime", self.tau_prime),
            ("tau_prime_star", self.tau_prime_star),
            ("tau_P", self.tau_p),
            ("tau_star_P", self.tau_star_p),
            ("tau_H", self.tau_h),
            ("tau_star_H", self.tau_star_h),
            ("sq_norm_nablaJ", self.sq_norm_nabla_j),
            ("assoc_sq_norm_nablaJ", self.assoc_sq_norm_nabla_j),
        ]
    }

    pub fn from_entries(get: impl Fn(&str) -> Option<f64>) -> Option<Self> {
        Some(ScalarPanel {
            tau: get("tau")?,
            tau_star: get("tau_star")?,
            tau_prime: get("tau_prime")?,
            tau_prime_star: get("tau_prime_star")?,
            tau_p: get("tau_P")?,
            tau_star_p: get("tau_star_P")?,
            tau_h: get("tau_H")?,
            tau_star_h: get("tau_star_H")?,
            sq_norm_nabla_j: get("sq_norm_nablaJ")?,
            assoc_sq_norm_nabla_j: get("assoc_sq_norm_nablaJ")?,
        })
    }
}

fn require_dim4(m: &LieFrameManifold) -> Result<()> {
    if m.dim() != 4 {
        return Err(Error::arg(format!(
            "the π-form decomposition is four-dimensional, got dimension {}",
            m.dim()
        )));
    }
    Ok(())
}

fn require_kahler(r_prime: &CurvatureTensor) -> Result<()> {
    if !r_prime.is_kahler {
        return Err(Error::Refused(format!(
            "curvature of ∇' is not a Kähler tensor (Bianchi {:.3e}, antisymmetry {:.3e}, J-invariance {:.3e})",
            r_prime.bianchi_residual, r_prime.antisymmetry_residual, r_prime.kahler_residual
        )));
    }
    Ok(())
}

/// Residual of `R' = (τ'/8)(π₁ - π₂) + (τ'*/8) π₃`; no preconditions checked.
pub fn decomposition_residual(
    pi: &PiForms,
    r_prime: &DenseTensor,
    tau_prime: f64,
    tau_prime_star: f64,
) -> f64 {
    residual(r_prime, &pi.combination(tau_prime / 8.0, tau_prime_star / 8.0))
        .expect("rank-4 tensors of one dimension")
}

pub fn kahler_decomposition_dim4(
    m: &LieFrameManifold,
    r_prime: &CurvatureTensor,
    tau_prime: f64,
    tau_prime_star: f64,
) -> Result<f64> {
    require_dim4(m)?;
    require_kahler(r_prime)?;
    Ok(decomposition_residual(&pi_forms(m), &r_prime.t, tau_prime, tau_prime_star))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dim4Reconstruction {
    /// `R` against `(1/8){τ(π₁-π₂) + τ*π₃} - P/3`.
    pub isotropic_form: f64,
    /// `R` against `(1/128){(16τ+τ(H))(π₁-π₂) + (16τ*-τ(H))π₃} - P/3`.
    pub h_form: f64,
    /// `R` against `(1/8){(τ+⅜‖∇J‖²)(π₁-π₂) + (τ*-⅛‖∇J‖²)π₃} - P/3`.
    pub norm_form: f64,
}

/// Reconstruction residuals for `R`; no preconditions checked.
pub fn reconstruction_residuals(
    pi: &PiForms,
    r: &DenseTensor,
    p: &DenseTensor,
    panel: &ScalarPanel,
) -> Dim4Reconstruction {
    let against = |a: f64, b: f64| {
        let model = pi
            .combination(a, b)
            .combine(1.0, p, -1.0 / 3.0)
            .expect("same shape");
        residual(r, &model).expect("same shape")
    };
    let ScalarPanel {
        tau,
        tau_star,
        tau_h,
        sq_norm_nabla_j: sq,
        ..
    } = *panel;
    Dim4Reconstruction {
        isotropic_form: against(tau / 8.0, tau_star / 8.0),
        h_form: against((16.0 * tau + tau_h) / 128.0, (16.0 * tau_star - tau_h) / 128.0),
        norm_form: against((tau + 0.375 * sq) / 8.0, (tau_star - 0.125 * sq) / 8.0),
    }
}

pub fn reconstruct_r_dim4(
    m: &LieFrameManifold,
    r: &DenseTensor,
    r_prime: &CurvatureTensor,
    p: &DenseTensor,
    panel: &ScalarPanel,
) -> Result<Dim4Reconstruction> {
    require_dim4(m)?;
    require_kahler(r_prime)?;
    Ok(reconstruction_residuals(&pi_forms(m), r, p, panel))
}
