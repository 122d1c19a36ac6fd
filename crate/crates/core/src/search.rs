//! Seeded search for left-invariant W₃ examples on the canonical Norden pair.
//!
//! With `g` and `J` fixed, `F` is linear in the structure constants, so the
//! cyclic condition `S F = 0` cuts out a linear subspace of antisymmetric
//! brackets. Two candidate families are drawn from it:
//!
//! * two-step nilpotent brackets with a coordinate centre, where the Jacobi
//!   identity holds automatically and a random null-space vector is already a
//!   Lie algebra;
//! * a random null-space vector projected onto the Jacobi variety by
//!   Levenberg–Marquardt, with extra quadratic residuals for the stronger
//!   targets (Bianchi identity of `R'`, and `‖∇J‖² = 0`).
//!
//! Every residual involved is a homogeneous quadratic in the coefficients,
//! so central differences give the Jacobian exactly.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::riemann_components;
use crate::error::{Error, Result};
use crate::manifest::ManifoldManifest;
use crate::manifold::{
    canonical_norden_pair, jacobiator, levi_civita, validate_manifold_with, LieFrameManifold,
    JACOBI_TOLERANCE,
};
use crate::norden::{
    compute_f, compute_nabla_j, connection_prime, q_from_f, raise_vector_valued, square_norms,
    NordenClass,
};
use crate::suite::{check_identity, CheckStatus, Context};
use crate::tensor::{cyclic_sum3, scalar_residual, DenseTensor};
use crate::DEFAULT_TOLERANCE;

/// Accepted examples must have `max |F|` above this after normalisation.
pub const NONFLAT_THRESHOLD: f64 = 1e-6;

const NULL_EIGEN_TOLERANCE: f64 = 1e-10;
const LM_MAX_ITERATIONS: usize = 200;
const LM_TARGET: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchTarget {
    /// Non-flat quasi-Kähler examples.
    W3,
    /// W₃ examples whose `∇'` curvature is a Kähler tensor.
    W3KahlerRPrime,
    /// As above with `‖∇J‖² = 0`.
    W3KahlerRPrimeIsotropic,
}

impl SearchTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchTarget::W3 => "w3",
            SearchTarget::W3KahlerRPrime => "w3-kahler-rprime",
            SearchTarget::W3KahlerRPrimeIsotropic => "w3-kahler-rprime-isotropic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            SearchTarget::W3,
            SearchTarget::W3KahlerRPrime,
            SearchTarget::W3KahlerRPrimeIsotropic,
        ]
        .into_iter()
        .find(|t| t.as_str() == s)
    }

    fn wants_kahler(self) -> bool {
        self != SearchTarget::W3
    }

    fn wants_isotropic(self) -> bool {
        self == SearchTarget::W3KahlerRPrimeIsotropic
    }
}

impl fmt::Display for SearchTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub dim: usize,
    pub seed: u64,
    pub max_candidates: usize,
    pub jacobi_tolerance: f64,
    /// Suite tolerance used for classification and target filters.
    pub tolerance: f64,
    pub target: SearchTarget,
    /// Stop after this many accepted examples.
    pub max_results: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            dim: 4,
            seed: 0,
            max_candidates: 1000,
            jacobi_tolerance: JACOBI_TOLERANCE,
            tolerance: DEFAULT_TOLERANCE,
            target: SearchTarget::W3,
            max_results: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 || !self.dim.is_multiple_of(2) {
            return Err(Error::arg(format!("dimension must be even and positive, got {}", self.dim)));
        }
        if self.max_candidates < 1 {
            return Err(Error::arg("max_candidates must be at least 1"));
        }
        if self.max_results < 1 {
            return Err(Error::arg("max_results must be at least 1"));
        }
        for (name, t) in [("jacobi_tolerance", self.jacobi_tolerance), ("tolerance", self.tolerance)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::arg(format!("{name} must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub candidates: usize,
    pub nilpotent_candidates: usize,
    pub projected_candidates: usize,
    /// Dimension of the W₃ subspace of antisymmetric brackets.
    pub w3_nullity: usize,
    /// Nilpotent centres whose W₃ subspace is nonzero.
    pub nilpotent_families: usize,
    pub not_converged: usize,
    pub rejected_invalid: usize,
    pub rejected_flat: usize,
    pub rejected_target: usize,
    pub accepted: usize,
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "candidates {} (nilpotent {}, projected {}); W3 nullity {}, nilpotent families {}; \
             not converged {}, invalid {}, flat {}, off-target {}; accepted {}",
            self.candidates,
            self.nilpotent_candidates,
            self.projected_candidates,
            self.w3_nullity,
            self.nilpotent_families,
            self.not_converged,
            self.rejected_invalid,
            self.rejected_flat,
            self.rejected_target,
            self.accepted
        )
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub manifests: Vec<ManifoldManifest>,
    pub stats: SearchStats,
}

/// Antisymmetric bracket `e_k`-component of `[e_a, e_b]` for `a < b`.
fn bracket_basis(d: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for k in 0..d {
        for a in 0..d {
            for b in a + 1..d {
                out.push((k, a, b));
            }
        }
    }
    out
}

fn bracket_tensor(d: usize, params: &[(usize, usize, usize)], coeffs: &[f64]) -> DenseTensor {
    let mut data = vec![0.0; d * d * d];
    for (&(k, a, b), &x) in params.iter().zip(coeffs) {
        data[(k * d + a) * d + b] += x;
        data[(k * d + b) * d + a] -= x;
    }
    DenseTensor::from_vec(d, 3, data).expect("finite coefficients")
}

struct Model {
    d: usize,
    g: DMatrix<f64>,
    j: DMatrix<f64>,
    g_inv: DMatrix<f64>,
}

impl Model {
    fn new(d: usize) -> Self {
        let (g, j) = canonical_norden_pair(d / 2);
        // the canonical metric is its own inverse
        let g_inv = g.clone();
        Model { d, g, j, g_inv }
    }

    fn manifold(&self, c: DenseTensor) -> LieFrameManifold {
        LieFrameManifold::new(c, self.g.clone(), self.j.clone()).expect("canonical shapes")
    }

    fn cyclic_f(&self, c: DenseTensor) -> Vec<f64> {
        let m = self.manifold(c);
        let lc = levi_civita(&m).expect("canonical metric is invertible");
        let f = compute_f(&m, &compute_nabla_j(&m, &lc));
        cyclic_sum3(&f, [0, 1, 2]).expect("rank 3").into_vec()
    }

    /// Basis of the subspace of `params` coefficient vectors with `S F = 0`.
    fn w3_null_space(&self, params: &[(usize, usize, usize)]) -> Vec<DVector<f64>> {
        if params.is_empty() {
            return Vec::new();
        }
        let columns: Vec<Vec<f64>> = (0..params.len())
            .map(|p| {
                let mut e = vec![0.0; params.len()];
                e[p] = 1.0;
                self.cyclic_f(bracket_tensor(self.d, params, &e))
            })
            .collect();
        let rows = columns[0].len();
        let m = DMatrix::from_fn(rows, params.len(), |r, c| columns[c][r]);
        let eig = SymmetricEigen::new(m.transpose() * &m);
        let scale = eig.eigenvalues.amax().max(1.0);
        (0..params.len())
            .filter(|&i| eig.eigenvalues[i].abs() <= NULL_EIGEN_TOLERANCE * scale)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect()
    }

    /// Residuals the projection drives to zero; quadratic in `x` apart from the norm constraint.
    fn residuals(&self, basis: &[DenseTensor], x: &[f64], target: SearchTarget) -> Vec<f64> {
        let c = combine(self.d, basis, x);
        let mut out = jacobiator(&c).into_vec();
        if target.wants_kahler() {
            let m = self.manifold(c);
            let lc = levi_civita(&m).expect("invertible");
            let nj = compute_nabla_j(&m, &lc);
            let f = compute_f(&m, &nj);
            let q_vec = raise_vector_valued(&self.g_inv, &q_from_f(&m, &f));
            let prime = connection_prime(&lc, &q_vec).expect("matching shapes");
            let rp = riemann_components(&m, &prime);
            out.extend(cyclic_sum3(&rp, [0, 1, 2]).expect("rank 4").into_vec());
            if target.wants_isotropic() {
                out.push(square_norms(&m, &nj).expect("invertible").sq_norm);
            }
        }
        out.push(x.iter().map(|v| v * v).sum::<f64>() - 1.0);
        out
    }
}

fn combine(d: usize, basis: &[DenseTensor], x: &[f64]) -> DenseTensor {
    let mut data = vec![0.0; d * d * d];
    for (b, &xi) in basis.iter().zip(x) {
        for (o, v) in data.iter_mut().zip(b.as_slice()) {
            *o += xi * v;
        }
    }
    DenseTensor::from_vec(d, 3, data).expect("finite")
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Levenberg–Marquardt on the quadratic residual map; `None` if it stalls.
fn project(model: &Model, basis: &[DenseTensor], x0: Vec<f64>, target: SearchTarget) -> Option<Vec<f64>> {
    let n = x0.len();
    let mut x = x0;
    let mut r = model.residuals(basis, &x, target);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    for _ in 0..LM_MAX_ITERATIONS {
        if sup(&r) <= LM_TARGET {
            return Some(x);
        }
        let mut jac = DMatrix::zeros(r.len(), n);
        for a in 0..n {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[a] += 1.0;
            minus[a] -= 1.0;
            let rp = model.residuals(basis, &plus, target);
            let rm = model.residuals(basis, &minus, target);
            for (row, (p, m)) in rp.iter().zip(&rm).enumerate() {
                jac[(row, a)] = 0.5 * (p - m);
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * DVector::from_column_slice(&r);
        loop {
            let mut lhs = jtj.clone();
            for i in 0..n {
                lhs[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let step = lhs.cholesky().map(|ch| ch.solve(&(-&grad)))?;
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let tr = model.residuals(basis, &trial, target);
            let tc: f64 = tr.iter().map(|v| v * v).sum();
            if tc < cost {
                x = trial;
                r = tr;
                cost = tc;
                lambda = (lambda / 3.0).max(1e-15);
                break;
            }
            lambda *= 4.0;
            if lambda > 1e12 {
                return (sup(&r) <= LM_TARGET * 1e3).then_some(x);
            }
        }
    }
    (sup(&r) <= LM_TARGET * 1e3).then_some(x)
}

struct NilpotentFamily {
    centre: Vec<usize>,
    params: Vec<(usize, usize, usize)>,
    null: Vec<DVector<f64>>,
}

fn nilpotent_families(model: &Model) -> Vec<NilpotentFamily> {
    let d = model.d;
    let mut out = Vec::new();
    for mask in 1u32..(1 << d) - 1 {
        let in_centre = |i: usize| mask & (1 << i) != 0;
        let params: Vec<_> = bracket_basis(d)
            .into_iter()
            .filter(|&(k, a, b)| in_centre(k) && !in_centre(a) && !in_centre(b))
            .collect();
        let null = model.w3_null_space(&params);
        if !null.is_empty() {
            out.push(NilpotentFamily {
                centre: (0..d).filter(|&i| in_centre(i)).collect(),
                params,
                null,
            });
        }
    }
    out
}

fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn normalise(c: DenseTensor) -> Option<DenseTensor> {
    let s = c.max_abs();
    (s > 0.0).then(|| c.scale(1.0 / s))
}

enum Verdict {
    Accept,
    Invalid,
    Flat,
    OffTarget,
}

fn judge(m: &LieFrameManifold, cfg: &SearchConfig) -> Verdict {
    if !validate_manifold_with(m, cfg.jacobi_tolerance).is_ok() {
        return Verdict::Invalid;
    }
    let Ok(ctx) = Context::build(m, cfg.tolerance) else {
        return Verdict::Invalid;
    };
    if ctx.label.class != NordenClass::QuasiKahlerW3 {
        return if ctx.label.f_norm <= cfg.tolerance {
            Verdict::Flat
        } else {
            Verdict::OffTarget
        };
    }
    if ctx.label.f_norm <= NONFLAT_THRESHOLD {
        return Verdict::Flat;
    }
    if cfg.target.wants_kahler() {
        let passes = |id: &str| {
            check_identity(id, &ctx).is_ok_and(|r| r.status == CheckStatus::Pass)
        };
        if !passes("EQ_2_14") || !passes("BIANCHI_R_PRIME") {
            return Verdict::OffTarget;
        }
        if cfg.target.wants_isotropic() && scalar_residual(ctx.norms.sq_norm, 0.0) > cfg.tolerance {
            return Verdict::OffTarget;
        }
    }
    Verdict::Accept
}

/// Runs the seeded search. Finding nothing is not an error; see the stats.
pub fn search_w3_examples(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let d = cfg.dim;
    let model = Model::new(d);
    let params = bracket_basis(d);
    let null = model.w3_null_space(&params);
    let null_basis: Vec<DenseTensor> = null
        .iter()
        .map(|v| bracket_tensor(d, &params, v.as_slice()))
        .collect();
    let families = nilpotent_families(&model);
    let mut stats = SearchStats {
        w3_nullity: null.len(),
        nilpotent_families: families.len(),
        ..SearchStats::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut manifests = Vec::new();

    for index in 0..cfg.max_candidates {
        if manifests.len() >= cfg.max_results {
            break;
        }
        stats.candidates += 1;
        // alternate between the two families when the nilpotent one is available
        let use_nilpotent = !families.is_empty() && index % 2 == 0;
        let (c, how) = if use_nilpotent {
            stats.nilpotent_candidates += 1;
            let fam = &families[rng.random_range(0..families.len())];
            let coeffs = uniform(&mut rng, fam.null.len());
            let v = fam
                .null
                .iter()
                .zip(&coeffs)
                .fold(DVector::zeros(fam.params.len()), |acc, (n, &a)| acc + n * a);
            let centre: Vec<String> = fam.centre.iter().map(|i| format!("e{}", i + 1)).collect();
            (
                bracket_tensor(d, &fam.params, v.as_slice()),
                format!("two-step nilpotent bracket with centre {{{}}}", centre.join(", ")),
            )
        } else {
            stats.projected_candidates += 1;
            if null_basis.is_empty() {
                stats.not_converged += 1;
                continue;
            }
            let x0 = uniform(&mut rng, null_basis.len());
            match project(&model, &null_basis, x0, cfg.target) {
                Some(x) => (
                    combine(d, &null_basis, &x),
                    "W3 bracket projected onto the Jacobi variety".to_string(),
                ),
                None => {
                    stats.not_converged += 1;
                    continue;
                }
            }
        };
        let Some(c) = normalise(c) else {
            stats.rejected_flat += 1;
            continue;
        };
        let m = model.manifold(c);
        match judge(&m, cfg) {
            Verdict::Accept => {
                stats.accepted += 1;
                let id = format!("{}-d{}-s{}-c{}", cfg.target, d, cfg.seed, index);
                let description = format!("{how}; target {}, seed {}, candidate {index}", cfg.target, cfg.seed);
                manifests.push(ManifoldManifest::from_manifold(&id, &m, Some(description)));
            }
            Verdict::Invalid => stats.rejected_invalid += 1,
            Verdict::Flat => stats.rejected_flat += 1,
            Verdict::OffTarget => stats.rejected_target += 1,
        }
    }
    Ok(SearchOutcome { manifests, stats })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_candidates_is_an_argument_error() {
        let cfg = SearchConfig {
            max_candidates: 0,
            ..SearchConfig::default()
        };
        assert!(matches!(search_w3_examples(&cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn odd_dimension_is_rejected() {
        let cfg = SearchConfig {
            dim: 5,
            ..SearchConfig::default()
        };
        assert!(matches!(search_w3_examples(&cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn targets_round_trip() {
        for t in [
            SearchTarget::W3,
            SearchTarget::W3KahlerRPrime,
            SearchTarget::W3KahlerRPrimeIsotropic,
        ] {
            assert_eq!(SearchTarget::parse(t.as_str()), Some(t));
        }
        assert_eq!(SearchTarget::parse("w4"), None);
    }

    #[test]
    fn null_space_vectors_satisfy_the_cyclic_condition() {
        let model = Model::new(4);
        let params = bracket_basis(4);
        let null = model.w3_null_space(&params);
        assert!(!null.is_empty());
        for v in &null {
            let cyc = model.cyclic_f(bracket_tensor(4, &params, v.as_slice()));
            assert!(sup(&cyc) < 1e-12);
        }
    }

    #[test]
    fn dim4_search_finds_a_normalised_example() {
        let cfg = SearchConfig {
            seed: 7,
            max_candidates: 50,
            ..SearchConfig::default()
        };
        let out = search_w3_examples(&cfg).unwrap();
        assert_eq!(out.manifests.len(), 1, "{}", out.stats);
        let c = &out.manifests[0].structure_constants;
        assert!((c.max_abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn search_is_reproducible() {
        let cfg = SearchConfig {
            dim: 6,
            seed: 3,
            max_candidates: 4,
            max_results: 2,
            ..SearchConfig::default()
        };
        let a = search_w3_examples(&cfg).unwrap();
        let b = search_w3_examples(&cfg).unwrap();
        assert_eq!(a.manifests, b.manifests);
        assert_eq!(a.stats, b.stats);
    }
}
