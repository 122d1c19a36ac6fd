//! Named identity checks over one manifold and the runner that assembles
//! them into a [`VerificationReport`].
//!
//! Every check reduces to a non-negative residual compared with the suite
//! tolerance. Tensor identities use the relative sup-norm residual, scalar
//! identities `|lhs - rhs| / max(1, |lhs|, |rhs|)`, and the biconditional
//! checks report `0` when both sides agree and `1` otherwise.
//!
//! Checks carry a gate. A check whose gate is unmet reports `NA` with the
//! reason; its residual is still evaluated and logged whenever the
//! ingredients exist, so failed preconditions stay visible in the data.

use std::time::{Duration, Instant};

use crate::curvature::{
    decomposition_residual, pi_forms, q_pairing, reconstruction_residuals, ricci_and_scalars,
    riemann, tensor_h, tensor_p, CurvatureTensor, Dim4Reconstruction, RicciScalars, ScalarPanel,
};
use crate::error::{Error, Result};
use crate::manifold::{
    covariant_derivative, levi_civita, validate_manifold, ConnectionCoeffs, LieFrameManifold,
};
use crate::norden::{
    classify, compute_f, compute_nabla_j, compute_q, connection_prime, q_from_f, square_norms,
    square_norms_with, sq_norm_cross_form, AssocNormVariant, ClassLabel, SquareNorms,
    TorsionPotential,
};
use crate::tensor::{
    contract, cyclic_sum3, residual, residual_to_zero, scalar_residual, DenseTensor,
};

pub const SUITE_VERSION: &str = "norden-suite/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// Runs on every valid Norden manifold.
    Always,
    /// Needs a quasi-Kähler (W₃ or W₀) input.
    QuasiKahler,
    /// Needs a quasi-Kähler input whose `∇'` curvature is a Kähler tensor.
    KahlerRPrime,
    /// As [`Gate::KahlerRPrime`], in dimension four.
    KahlerRPrimeDim4,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub id: &'static str,
    pub anchor: &'static str,
    pub gate: Gate,
}

macro_rules! catalog {
    ($( $id:literal, $gate:ident, $anchor:literal; )*) => {
        pub const CATALOG: &[CheckSpec] = &[
            $( CheckSpec { id: $id, anchor: $anchor, gate: Gate::$gate }, )*
        ];
    };
}

catalog! {
    "EQ_1_3_SYM", Always, "F(x,y,z) = F(x,z,y)";
    "EQ_1_3_J", Always, "F(x,y,z) = F(x,Jy,Jz)";
    "EQ_1_5", Always, "(∇_x F)(y,z,w) - (∇_y F)(x,z,w) = R(x,y,Jz,w) - R(x,y,z,Jw)";
    "EQ_1_4", QuasiKahler, "S_{x,y,z} F(x,y,z) = 0";
    "EQ_1_13", QuasiKahler, "S_{x,y,z} F(Jx,y,z) = 0";
    "EQ_1_14", QuasiKahler, "(∇_x J)Jy + (∇_y J)Jx + (∇_Jx J)y + (∇_Jy J)x = 0";
    "F_TRACES", QuasiKahler, "g^ij F(e_i,e_j,z) = g^ij F(e_i,Je_j,z) = 0";
    "EQ_1_7", QuasiKahler, "||∇J||^2 = -2 g^ij g^ks g((∇_ei J)e_k, (∇_es J)e_j)";
    "ASSOC_SQ_NORM_ZERO", QuasiKahler, "||∇J||*^2 = g^ij g^ks g~((∇_ei J)e_k, (∇_ej J)e_s) = 0";
    "EQ_1_15", QuasiKahler, "S_{x,y,z}{R(x,Jy,Jz,w) - R(x,Jy,z,Jw) + R(Jx,y,z,Jw) - R(Jx,y,Jz,w)} = -S_{x,y,z} g((∇_x J)y + (∇_y J)x, (∇_z J)w + (∇_w J)z)";
    "EQ_1_19", QuasiKahler, "g(Q(y,z),w) = -1/4 S_{y,z,w} F(y,z,Jw)";
    "Q_SKEW", QuasiKahler, "Q(y,z,w) totally skew-symmetric";
    "Q_TRACE", QuasiKahler, "g^ij Q(e_i,e_j) = 0";
    "NATURAL_G", QuasiKahler, "∇'g = 0";
    "NATURAL_J", QuasiKahler, "∇'J = 0";
    "TORSION_2Q", QuasiKahler, "T(x,y) = 2Q(x,y)";
    "BIANCHI_R", QuasiKahler, "S_{x,y,z} R(x,y,z,w) = 0";
    "PAIR_SYM_R", QuasiKahler, "R(x,y,z,w) = R(z,w,x,y)";
    "ANTISYM_R_PRIME", QuasiKahler, "R'(x,y,z,w) = -R'(y,x,z,w) = -R'(x,y,w,z)";
    "KAHLER_R_PRIME", QuasiKahler, "R'(x,y,Jz,Jw) = -R'(x,y,z,w)";
    "EQ_2_3", QuasiKahler, "R' = R + (∇_x Q)(y,z,w) - (∇_y Q)(x,z,w) - g(Q(y,z),Q(x,w)) + g(Q(x,z),Q(y,w))";
    "BIANCHI_R_PRIME", QuasiKahler, "S_{x,y,z} R'(x,y,z,w) = 0";
    "EQ_2_8", QuasiKahler, "3R' = 3R + 2g(Q(x,y),Q(z,w)) + g(Q(z,y),Q(x,w)) + g(Q(x,z),Q(y,w))";
    "THM_2_1", QuasiKahler, "R' Kähler iff 3R' = 3R + P";
    "EQ_2_14", QuasiKahler, "S_{x,y,z} g((∇_x J)Jy + (∇_Jx J)y, (∇_z J)Jw + (∇_Jz J)w) = 0";
    "THM_2_3", QuasiKahler, "R' Kähler iff S_{x,y,z} H(x,y,z,w) = 0";
    "CURVATURE_LIKE_P", QuasiKahler, "P satisfies antisymmetry and first Bianchi";
    "H_SYMMETRIES", QuasiKahler, "H(x,y,z,w) = -H(y,x,z,w) = -H(x,y,w,z), H(x,y,Jz,Jw) = -H(x,y,z,w)";
    "COR_2_4", QuasiKahler, "R' Kähler iff H Kähler";
    "EQ_3_3", QuasiKahler, "tau(P) = 3 g^ij g^ks g(Q(e_i,e_k),Q(e_s,e_j))";
    "EQ_3_4", QuasiKahler, "tau(P) = 9/8 ||∇J||^2";
    "TAU_STAR_P_CONTRACTION", QuasiKahler, "tau*(P) = 3 g^ij g^ks g(Q(e_i,e_k),Q(Je_s,e_j))";
    "EQ_3_6", QuasiKahler, "tau*(P) = -3/8 ||∇J||^2";
    "EQ_3_9_TAU_H", QuasiKahler, "tau(H) = 2 ||∇J||^2";
    "EQ_3_9_TAU_STAR_H", QuasiKahler, "tau*(H) = 2 ||∇J||^2";
    "EQ_2_6", KahlerRPrime, "R'(x,y,z,w) = R(x,y,z,w) - (∇_z Q)(x,y,w) + g(Q(x,y),Q(z,w))";
    "EQ_2_7", KahlerRPrime, "R'(x,y,z,w) + R'(z,y,x,w) = R(x,y,z,w) + R(z,y,x,w) + g(Q(x,y),Q(z,w)) + g(Q(z,y),Q(x,w))";
    "COR_2_2", KahlerRPrime, "P Kähler iff R Kähler";
    "EQ_3_1", KahlerRPrime, "3 tau' = 3 tau + tau(P)";
    "EQ_3_2", KahlerRPrime, "3 tau'* = 3 tau* + tau*(P)";
    "EQ_3_5", KahlerRPrime, "tau' = tau + 3/8 ||∇J||^2";
    "EQ_3_7", KahlerRPrime, "tau'* = tau* - 1/8 ||∇J||^2";
    "EQ_3_8", KahlerRPrime, "tau' + 3 tau'* = tau + 3 tau*";
    "EQ_3_10", KahlerRPrime, "tau' = tau + 3/16 tau(H)";
    "EQ_3_11", KahlerRPrime, "tau'* = tau* - 1/16 tau(H)";
    "THM_3_1_TAU_DIFF", KahlerRPrime, "||∇J||^2 = 0 iff tau - tau' = 0";
    "THM_3_1_TAU_STAR_DIFF", KahlerRPrime, "||∇J||^2 = 0 iff tau* - tau'* = 0";
    "THM_3_1_TAU_P", KahlerRPrime, "||∇J||^2 = 0 iff tau(P) = 0";
    "THM_3_1_TAU_STAR_P", KahlerRPrime, "||∇J||^2 = 0 iff tau*(P) = 0";
    "THM_3_1_TAU_H", KahlerRPrime, "||∇J||^2 = 0 iff tau(H) = 0";
    "THM_3_1_TAU_STAR_H", KahlerRPrime, "||∇J||^2 = 0 iff tau*(H) = 0";
    "EQ_3_12", KahlerRPrimeDim4, "R' = tau'/8 (pi1 - pi2) + tau'*/8 pi3";
    "EQ_3_13", KahlerRPrimeDim4, "R = 1/8{(tau + 3/8||∇J||^2)(pi1 - pi2) + (tau* - 1/8||∇J||^2) pi3} - P/3";
    "THM_3_2", KahlerRPrimeDim4, "||∇J||^2 = 0 iff R = 1/8{tau (pi1 - pi2) + tau* pi3} - P/3";
    "THM_3_3", KahlerRPrimeDim4, "R = 1/128{(16tau + tau(H))(pi1 - pi2) + (16tau* - tau(H)) pi3} - P/3";
}

pub fn find_check(id: &str) -> Option<&'static CheckSpec> {
    CATALOG.iter().find(|c| c.id == id)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable(String),
}

impl CheckStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::NotApplicable(_) => "NA",
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, CheckStatus::Fail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub check_id: String,
    pub paper_anchor: String,
    /// `None` when the ingredients do not exist (wrong class or dimension).
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub status: CheckStatus,
    pub elapsed: Duration,
}

/// Values reported next to the panel without an identity attached.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// `g^{ij} ρ*(e_i, e_j)` for the Levi-Civita curvature.
    pub tau_star_via_rho_star: f64,
    /// `‖∇J‖*²` with `g̃⁻¹` in the outer contractions.
    pub assoc_sq_norm_outer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub manifold_id: String,
    pub class_label: ClassLabel,
    pub scalar_panel: Option<ScalarPanel>,
    pub diagnostics: Diagnostics,
    pub checks: Vec<CheckResult>,
    pub suite_version: String,
}

impl VerificationReport {
    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check_id == id)
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| c.status.is_fail())
    }
}

/// Tensors derived from `Q`; present only for quasi-Kähler inputs.
#[derive(Debug, Clone)]
pub struct QuasiKahlerData {
    pub q: TorsionPotential,
    pub prime: ConnectionCoeffs,
    pub r_prime: CurvatureTensor,
    pub scalars_prime: RicciScalars,
    pub nabla_q: DenseTensor,
    pub qq: DenseTensor,
    pub p: CurvatureTensor,
    pub scalars_p: RicciScalars,
    pub h: CurvatureTensor,
    pub scalars_h: RicciScalars,
    pub panel: ScalarPanel,
}

/// Everything the checks read, computed once per manifold.
#[derive(Debug, Clone)]
pub struct Context {
    pub manifold: LieFrameManifold,
    pub tolerance: f64,
    pub lc: ConnectionCoeffs,
    pub nabla_j: DenseTensor,
    pub f: DenseTensor,
    pub label: ClassLabel,
    pub norms: SquareNorms,
    pub r: CurvatureTensor,
    pub scalars_r: RicciScalars,
    pub quasi: Option<QuasiKahlerData>,
    pub diagnostics: Diagnostics,
}

impl Context {
    /// Assumes `m` already validated.
    pub fn build(m: &LieFrameManifold, tolerance: f64) -> Result<Self> {
        let lc = levi_civita(m)?;
        let nabla_j = compute_nabla_j(m, &lc);
        let f = compute_f(m, &nabla_j);
        let label = classify(m, &f, &nabla_j, tolerance);
        let norms = square_norms(m, &nabla_j)?;
        let r = riemann(m, &lc, tolerance)?;
        let scalars_r = ricci_and_scalars(m, &r.t)?;
        let outer = square_norms_with(m, &nabla_j, AssocNormVariant::OuterAssociatedInverse)?;
        let diagnostics = Diagnostics {
            tau_star_via_rho_star: scalars_r.tau_star_via_rho_star,
            assoc_sq_norm_outer: outer.assoc_sq_norm,
        };

        let quasi = if label.class.is_quasi_kahler() {
            let q = compute_q(m, &nabla_j, &label)?;
            let prime = connection_prime(&lc, &q.vec)?;
            let r_prime = riemann(m, &prime, tolerance)?;
            let scalars_prime = ricci_and_scalars(m, &r_prime.t)?;
            let nabla_q = covariant_derivative(m, &lc, &q.cov)?;
            let qq = q_pairing(m, &q.vec);
            let p = tensor_p(m, &q.vec, tolerance)?;
            let scalars_p = ricci_and_scalars(m, &p.t)?;
            let h = tensor_h(m, &nabla_j, tolerance)?;
            let scalars_h = ricci_and_scalars(m, &h.t)?;
            let panel = ScalarPanel {
                tau: scalars_r.tau,
                tau_star: scalars_r.tau_star,
                tau_prime: scalars_prime.tau,
                tau_prime_star: scalars_prime.tau_star,
                tau_p: scalars_p.tau,
                tau_star_p: scalars_p.tau_star,
                tau_h: scalars_h.tau,
                tau_star_h: scalars_h.tau_star,
                sq_norm_nabla_j: norms.sq_norm,
                assoc_sq_norm_nabla_j: norms.assoc_sq_norm,
            };
            Some(QuasiKahlerData {
                q,
                prime,
                r_prime,
                scalars_prime,
                nabla_q,
                qq,
                p,
                scalars_p,
                h,
                scalars_h,
                panel,
            })
        } else {
            None
        };

        Ok(Context {
            manifold: m.clone(),
            tolerance,
            lc,
            nabla_j,
            f,
            label,
            norms,
            r,
            scalars_r,
            quasi,
            diagnostics,
        })
    }

    pub fn r_prime_is_kahler(&self) -> bool {
        self.quasi.as_ref().is_some_and(|q| q.r_prime.is_kahler)
    }

    fn is_zero(&self, v: f64) -> bool {
        scalar_residual(v, 0.0) <= self.tolerance
    }

    fn iff(&self, a: bool, b: bool) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }
}

fn tres(a: &DenseTensor, b: &DenseTensor) -> f64 {
    residual(a, b).expect("identity sides share a shape")
}

fn perm(t: &DenseTensor, p: &[usize]) -> DenseTensor {
    t.permute(p).expect("valid permutation")
}

/// `R(x,Jy,Jz,w) - R(x,Jy,z,Jw) + R(Jx,y,z,Jw) - R(Jx,y,Jz,w)` summed cyclically, and the
/// printed right-hand side `-S g((∇_xJ)y + (∇_yJ)x, (∇_zJ)w + (∇_wJ)z)`.
pub fn curvature_j_cyclic_sides(ctx: &Context) -> (DenseTensor, DenseTensor) {
    let m = &ctx.manifold;
    let j = m.complex_structure();
    let r = &ctx.r.t;
    let js = |t: &DenseTensor, a: usize, b: usize| {
        t.apply_matrix(a, j)
            .and_then(|t| t.apply_matrix(b, j))
            .expect("rank 4")
    };
    let inner = js(r, 1, 2)
        .sub(&js(r, 1, 3))
        .and_then(|t| t.add(&js(r, 0, 3)))
        .and_then(|t| t.sub(&js(r, 0, 2)))
        .expect("same shape");
    let lhs = cyclic_sum3(&inner, [0, 1, 2]).expect("rank 4");
    let nj = &ctx.nabla_j;
    let sym = nj.add(&perm(nj, &[0, 2, 1])).expect("same shape");
    let g = m.metric();
    let d = m.dim();
    let low = crate::norden::lower_vector_valued(g, &sym);
    let pairing = DenseTensor::from_fn(d, 4, |ix| {
        (0..d)
            .map(|p| low.get(&[ix[0], ix[1], p]) * sym.get(&[p, ix[2], ix[3]]))
            .sum()
    });
    let rhs = cyclic_sum3(&pairing, [0, 1, 2]).expect("rank 4").scale(-1.0);
    (lhs, rhs)
}

/// Residual of one catalog check, `None` when it cannot be formed.
fn evaluate(id: &str, ctx: &Context) -> Result<Option<f64>> {
    let m = &ctx.manifold;
    let j = m.complex_structure();
    let tol = ctx.tolerance;
    let f = &ctx.f;

    // class-independent checks
    match id {
        "EQ_1_3_SYM" => return Ok(Some(tres(f, &perm(f, &[0, 2, 1])))),
        "EQ_1_3_J" => {
            let fjj = f.apply_matrix(1, j)?.apply_matrix(2, j)?;
            return Ok(Some(tres(f, &fjj)));
        }
        "EQ_1_5" => {
            let nf = covariant_derivative(m, &ctx.lc, f)?;
            let lhs = nf.sub(&perm(&nf, &[1, 0, 2, 3]))?;
            let rhs = ctx.r.t.apply_matrix(2, j)?.sub(&ctx.r.t.apply_matrix(3, j)?)?;
            return Ok(Some(tres(&lhs, &rhs)));
        }
        _ => {}
    }

    let Some(qk) = ctx.quasi.as_ref() else {
        return Ok(None);
    };
    let g_inv = m.metric_inverse()?;
    let sq = ctx.norms.sq_norm;
    let panel = &qk.panel;
    let r = &ctx.r.t;
    let rp = &qk.r_prime.t;
    let qq = &qk.qq;

    let value = match id {
        "EQ_1_4" => ctx.label.w3_residual,
        "EQ_1_13" => ctx.label.jf_cyclic_residual,
        "EQ_1_14" => ctx.label.twisted_symmetric_residual,
        "F_TRACES" => {
            let t1 = contract(f, 0, 1, g_inv)?;
            let t2 = contract(&f.apply_matrix(1, j)?, 0, 1, g_inv)?;
            residual_to_zero(&t1).max(residual_to_zero(&t2))
        }
        "EQ_1_7" => scalar_residual(sq, sq_norm_cross_form(m, &ctx.nabla_j)?),
        "ASSOC_SQ_NORM_ZERO" => scalar_residual(ctx.norms.assoc_sq_norm, 0.0),
        "EQ_1_15" => {
            let (lhs, rhs) = curvature_j_cyclic_sides(ctx);
            tres(&lhs, &rhs)
        }
        "EQ_1_19" => tres(&qk.q.cov, &q_from_f(m, f)),
        "Q_SKEW" => {
            let neg = qk.q.cov.scale(-1.0);
            tres(&perm(&qk.q.cov, &[1, 0, 2]), &neg).max(tres(&perm(&qk.q.cov, &[0, 2, 1]), &neg))
        }
        "Q_TRACE" => residual_to_zero(&contract(&qk.q.vec, 1, 2, g_inv)?),
        "NATURAL_G" => residual_to_zero(&qk.prime.metric_derivative(m.metric())),
        "NATURAL_J" => residual_to_zero(&compute_nabla_j(m, &qk.prime)),
        "TORSION_2Q" => tres(&qk.prime.torsion(m), &qk.q.vec.scale(2.0)),
        "BIANCHI_R" => ctx.r.bianchi_residual,
        "PAIR_SYM_R" => tres(r, &perm(r, &[2, 3, 0, 1])),
        "ANTISYM_R_PRIME" => qk.r_prime.antisymmetry_residual,
        "KAHLER_R_PRIME" => qk.r_prime.kahler_residual,
        "EQ_2_3" => {
            let nq = &qk.nabla_q;
            let rhs = r
                .add(nq)?
                .sub(&perm(nq, &[1, 0, 2, 3]))?
                .sub(&perm(qq, &[1, 2, 0, 3]))?
                .add(&perm(qq, &[0, 2, 1, 3]))?;
            tres(rp, &rhs)
        }
        "BIANCHI_R_PRIME" => qk.r_prime.bianchi_residual,
        "EQ_2_8" => tres(&rp.scale(3.0), &r.combine(3.0, &qk.p.t, 1.0)?),
        "THM_2_1" => {
            let eq = tres(&rp.scale(3.0), &r.combine(3.0, &qk.p.t, 1.0)?);
            ctx.iff(qk.r_prime.bianchi_residual <= tol, eq <= tol)
        }
        "EQ_2_14" => qk.h.bianchi_residual,
        "THM_2_3" => ctx.iff(qk.r_prime.bianchi_residual <= tol, qk.h.bianchi_residual <= tol),
        "CURVATURE_LIKE_P" => qk.p.antisymmetry_residual.max(qk.p.bianchi_residual),
        "H_SYMMETRIES" => qk.h.antisymmetry_residual.max(qk.h.kahler_residual),
        "COR_2_4" => ctx.iff(
            qk.r_prime.bianchi_residual <= tol,
            qk.h.kahler_tensor_residual() <= tol,
        ),
        "EQ_3_3" => {
            // g^ij g^ks g(Q(e_i,e_k), Q(e_s,e_j)) = g^ij g^ks QQ[i][k][s][j]
            let inner = contract(qq, 1, 2, g_inv)?;
            let full = contract(&inner, 0, 1, g_inv)?.value();
            scalar_residual(panel.tau_p, 3.0 * full)
        }
        "TAU_STAR_P_CONTRACTION" => {
            let inner = contract(&qq.apply_matrix(2, j)?, 1, 2, g_inv)?;
            let full = contract(&inner, 0, 1, g_inv)?.value();
            scalar_residual(panel.tau_star_p, 3.0 * full)
        }
        "EQ_3_4" => scalar_residual(panel.tau_p, 9.0 / 8.0 * sq),
        "EQ_3_6" => scalar_residual(panel.tau_star_p, -3.0 / 8.0 * sq),
        "EQ_3_9_TAU_H" => scalar_residual(panel.tau_h, 2.0 * sq),
        "EQ_3_9_TAU_STAR_H" => scalar_residual(panel.tau_star_h, 2.0 * sq),
        "EQ_2_6" => {
            let rhs = r.sub(&perm(&qk.nabla_q, &[2, 0, 1, 3]))?.add(qq)?;
            tres(rp, &rhs)
        }
        "EQ_2_7" => {
            let swap = [2, 1, 0, 3];
            let lhs = rp.add(&perm(rp, &swap))?;
            let rhs = r.add(&perm(r, &swap))?.add(qq)?.add(&perm(qq, &swap))?;
            tres(&lhs, &rhs)
        }
        "COR_2_2" => ctx.iff(qk.p.kahler_residual <= tol, ctx.r.kahler_residual <= tol),
        "EQ_3_1" => scalar_residual(3.0 * panel.tau_prime, 3.0 * panel.tau + panel.tau_p),
        "EQ_3_2" => scalar_residual(
            3.0 * panel.tau_prime_star,
            3.0 * panel.tau_star + panel.tau_star_p,
        ),
        "EQ_3_5" => scalar_residual(panel.tau_prime, panel.tau + 3.0 / 8.0 * sq),
        "EQ_3_7" => scalar_residual(panel.tau_prime_star, panel.tau_star - sq / 8.0),
        "EQ_3_8" => scalar_residual(
            panel.tau_prime + 3.0 * panel.tau_prime_star,
            panel.tau + 3.0 * panel.tau_star,
        ),
        "EQ_3_10" => scalar_residual(panel.tau_prime, panel.tau + 3.0 / 16.0 * panel.tau_h),
        "EQ_3_11" => scalar_residual(panel.tau_prime_star, panel.tau_star - panel.tau_h / 16.0),
        "THM_3_1_TAU_DIFF" => ctx.iff(ctx.is_zero(sq), ctx.is_zero(panel.tau - panel.tau_prime)),
        "THM_3_1_TAU_STAR_DIFF" => ctx.iff(
            ctx.is_zero(sq),
            ctx.is_zero(panel.tau_star - panel.tau_prime_star),
        ),
        "THM_3_1_TAU_P" => ctx.iff(ctx.is_zero(sq), ctx.is_zero(panel.tau_p)),
        "THM_3_1_TAU_STAR_P" => ctx.iff(ctx.is_zero(sq), ctx.is_zero(panel.tau_star_p)),
        "THM_3_1_TAU_H" => ctx.iff(ctx.is_zero(sq), ctx.is_zero(panel.tau_h)),
        "THM_3_1_TAU_STAR_H" => ctx.iff(ctx.is_zero(sq), ctx.is_zero(panel.tau_star_h)),
        "EQ_3_12" | "EQ_3_13" | "THM_3_2" | "THM_3_3" => {
            if m.dim() != 4 {
                return Ok(None);
            }
            let pi = pi_forms(m);
            if id == "EQ_3_12" {
                decomposition_residual(&pi, rp, panel.tau_prime, panel.tau_prime_star)
            } else {
                let Dim4Reconstruction {
                    isotropic_form,
                    h_form,
                    norm_form,
                } = reconstruction_residuals(&pi, r, &qk.p.t, panel);
                match id {
                    "EQ_3_13" => norm_form,
                    "THM_3_3" => h_form,
                    _ => ctx.iff(ctx.is_zero(sq), isotropic_form <= tol),
                }
            }
        }
        other => return Err(Error::arg(format!("unknown check id {other:?}"))),
    };
    Ok(Some(value))
}

fn gate_reason(spec: &CheckSpec, ctx: &Context) -> Option<String> {
    let class_gate = || {
        (!ctx.label.class.is_quasi_kahler())
            .then(|| format!("class {} is not quasi-Kähler", ctx.label.class))
    };
    let kahler_gate = || {
        class_gate().or_else(|| {
            (!ctx.r_prime_is_kahler()).then(|| "curvature of ∇' is not Kähler".to_string())
        })
    };
    match spec.gate {
        Gate::Always => None,
        Gate::QuasiKahler => class_gate(),
        Gate::KahlerRPrime => kahler_gate(),
        Gate::KahlerRPrimeDim4 => {
            if ctx.manifold.dim() != 4 {
                Some("dimension ≠ 4".to_string())
            } else {
                kahler_gate()
            }
        }
    }
}

/// Runs a single catalog check against a prepared context.
pub fn check_identity(check_id: &str, ctx: &Context) -> Result<CheckResult> {
    let spec = find_check(check_id)
        .ok_or_else(|| Error::arg(format!("unknown check id {check_id:?}")))?;
    let start = Instant::now();
    let residual = evaluate(spec.id, ctx)?;
    let status = match (gate_reason(spec, ctx), residual) {
        (Some(reason), _) => CheckStatus::NotApplicable(reason),
        (None, Some(r)) if r <= ctx.tolerance => CheckStatus::Pass,
        (None, Some(_)) => CheckStatus::Fail,
        (None, None) => CheckStatus::NotApplicable("ingredients unavailable".into()),
    };
    Ok(CheckResult {
        check_id: spec.id.to_string(),
        paper_anchor: spec.anchor.to_string(),
        residual,
        tolerance: ctx.tolerance,
        status,
        elapsed: start.elapsed(),
    })
}

/// Validates `m`, then runs the whole catalog in order.
pub fn run_suite(manifold_id: &str, m: &LieFrameManifold, tolerance: f64) -> Result<VerificationReport> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::arg(format!("tolerance {tolerance} must be positive")));
    }
    let outcome = validate_manifold(m);
    if !outcome.is_ok() {
        return Err(Error::InvalidManifold(outcome));
    }
    let ctx = Context::build(m, tolerance)?;
    report_from_context(manifold_id, &ctx)
}

pub fn report_from_context(manifold_id: &str, ctx: &Context) -> Result<VerificationReport> {
    let checks = CATALOG
        .iter()
        .map(|spec| check_identity(spec.id, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport {
        manifold_id: manifold_id.to_string(),
        class_label: ctx.label.clone(),
        scalar_panel: ctx.quasi.as_ref().map(|q| q.panel),
        diagnostics: ctx.diagnostics,
        checks,
        suite_version: SUITE_VERSION.to_string(),
    })
}
