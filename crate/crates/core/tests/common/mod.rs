//! Independent reference implementations used as oracles by the integration
//! tests. Everything here works on flat row-major buffers with explicit index
//! arithmetic and shares no code with the library's tensor engine.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use norden::manifold::{canonical_norden_pair, LieFrameManifold};
use norden::search::{search_w3_examples, SearchConfig, SearchTarget};
use norden::DenseTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn decode(mut flat: usize, d: usize, r: usize) -> Vec<usize> {
    let mut idx = vec![0; r];
    for s in (0..r).rev() {
        idx[s] = flat % d;
        flat /= d;
    }
    idx
}

pub fn encode(idx: &[usize], d: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * d + i)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, d: usize, r: usize) -> DenseTensor {
    let data = (0..d.pow(r as u32)).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseTensor::from_vec(d, r, data).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0))
}

/// `Σ_{p,q} M[p][q] t(.., p@a, .., q@b, ..)` by brute force over the full index space.
pub fn naive_contract(t: &DenseTensor, a: usize, b: usize, m: &DMatrix<f64>) -> Vec<f64> {
    let (d, r) = (t.dim(), t.rank());
    let mut out = vec![0.0; d.pow((r - 2) as u32)];
    let src = t.as_slice();
    for (flat, v) in src.iter().enumerate() {
        let idx = decode(flat, d, r);
        let rest: Vec<usize> = (0..r).filter(|&s| s != a && s != b).map(|s| idx[s]).collect();
        out[encode(&rest, d)] += m[(idx[a], idx[b])] * v;
    }
    out
}

/// Sum over the three cyclic rearrangements of the values in `slots`.
pub fn naive_cyclic(t: &DenseTensor, slots: [usize; 3]) -> Vec<f64> {
    let (d, r) = (t.dim(), t.rank());
    let src = t.as_slice();
    (0..src.len())
        .map(|flat| {
            let idx = decode(flat, d, r);
            let vals = [idx[slots[0]], idx[slots[1]], idx[slots[2]]];
            (0..3)
                .map(|shift| {
                    let mut j = idx.clone();
                    for (k, &s) in slots.iter().enumerate() {
                        j[s] = vals[(k + shift) % 3];
                    }
                    src[encode(&j, d)]
                })
                .sum()
        })
        .collect()
}

/// Covariant derivative of a covariant tensor with constant frame components,
/// `(∇_i t)(a_1..a_r) = -Σ_s t(.., ∇_{e_i} e_{a_s}, ..)`, derivative index first.
pub fn naive_covariant(gamma: &DenseTensor, t: &DenseTensor) -> Vec<f64> {
    let (d, r) = (t.dim(), t.rank());
    let g = gamma.as_slice();
    let src = t.as_slice();
    let mut out = vec![0.0; d.pow((r + 1) as u32)];
    for (flat, o) in out.iter_mut().enumerate() {
        let idx = decode(flat, d, r + 1);
        let i = idx[0];
        for s in 0..r {
            for m in 0..d {
                let mut j = idx[1..].to_vec();
                let a = j[s];
                j[s] = m;
                *o -= g[(m * d + i) * d + a] * src[encode(&j, d)];
            }
        }
    }
    out
}

/// Levi-Civita symbols as the unique solution of the linear system
/// "torsion-free and metric", solved densely.
pub fn koszul_by_linear_solve(m: &LieFrameManifold) -> Vec<f64> {
    let d = m.dim();
    let n = d * d * d;
    let c = m.structure_constants().as_slice();
    let g = m.metric();
    let var = |k: usize, i: usize, j: usize| (k * d + i) * d + j;
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                // Γ^k_ij - Γ^k_ji = C^k_ij
                rows.push((vec![(var(k, i, j), 1.0), (var(k, j, i), -1.0)], c[var(k, i, j)]));
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                // g(∇_i e_j, e_l) + g(e_j, ∇_i e_l) = 0
                let mut terms = Vec::new();
                for mm in 0..d {
                    terms.push((var(mm, i, j), g[(mm, l)]));
                    terms.push((var(mm, i, l), g[(mm, j)]));
                }
                rows.push((terms, 0.0));
            }
        }
    }
    let a = DMatrix::from_fn(rows.len(), n, |r, col| {
        rows[r].0.iter().filter(|(v, _)| *v == col).map(|(_, w)| w).sum()
    });
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let at = a.transpose();
    let x: DVector<f64> = (&at * &a).lu().solve(&(&at * b)).expect("unique Levi-Civita connection");
    x.iter().copied().collect()
}

/// `R(e_i,e_j,e_k,e_l) = g([A_i, A_j] e_k - Σ_m C^m_ij A_m e_k, e_l)` with `(A_i)_{kj} = Γ^k_ij`.
pub fn riemann_by_matrices(m: &LieFrameManifold, gamma: &[f64]) -> Vec<f64> {
    let d = m.dim();
    let c = m.structure_constants().as_slice();
    let a: Vec<DMatrix<f64>> = (0..d)
        .map(|i| DMatrix::from_fn(d, d, |k, j| gamma[(k * d + i) * d + j]))
        .collect();
    let g = m.metric();
    let mut out = vec![0.0; d.pow(4)];
    for i in 0..d {
        for j in 0..d {
            let mut op = &a[i] * &a[j] - &a[j] * &a[i];
            for mm in 0..d {
                op -= &a[mm] * c[(mm * d + i) * d + j];
            }
            let low = g.transpose() * op;
            for k in 0..d {
                for l in 0..d {
                    out[((i * d + j) * d + k) * d + l] = low[(l, k)];
                }
            }
        }
    }
    out
}

/// The same Lie algebra, metric and `J` written in the frame `f_a = Σ_i A[i][a] e_i`.
pub fn change_frame(m: &LieFrameManifold, a: &DMatrix<f64>) -> LieFrameManifold {
    let d = m.dim();
    let ainv = a.clone().try_inverse().expect("invertible frame change");
    let c = m.structure_constants();
    let mut data = vec![0.0; d * d * d];
    for cc in 0..d {
        for p in 0..d {
            for q in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            acc += ainv[(cc, k)] * a[(i, p)] * a[(j, q)] * c.get(&[k, i, j]);
                        }
                    }
                }
                data[(cc * d + p) * d + q] = acc;
            }
        }
    }
    let g = a.transpose() * m.metric() * a;
    let j = &ainv * m.complex_structure() * a;
    LieFrameManifold::new(DenseTensor::from_vec(d, 3, data).unwrap(), g, j).unwrap()
}

/// Well-conditioned random frame change close to the identity.
pub fn random_frame(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    DMatrix::identity(d, d) + random_matrix(rng, d) * 0.1
}

pub fn w3_examples(dim: usize, seed: u64, count: usize, target: SearchTarget) -> Vec<LieFrameManifold> {
    let cfg = SearchConfig {
        dim,
        seed,
        max_candidates: 40 * count + 40,
        max_results: count,
        target,
        ..SearchConfig::default()
    };
    search_w3_examples(&cfg)
        .unwrap()
        .manifests
        .iter()
        .map(|m| m.to_manifold().unwrap())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn canonical(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    canonical_norden_pair(n)
}
