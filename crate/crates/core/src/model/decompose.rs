//! Randomized search for an orthogonal splitting `V = V₁ ⊕ V₂` with
//! `A⁰ = A⁰₁ ⊕ A⁰₂`.
//!
//! Such a splitting exists iff some proper non-degenerate subspace is
//! invariant under every curvature operator `ℛ(u, v)`. Each trial seeds a
//! subspace from a random subset of basis directions, closes it under the
//! operators and tests non-degeneracy. Finding nothing is evidence, not
//! proof.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Model;
use crate::linalg::Matrix;
use crate::scalar::{ratio, Scalar};
use crate::tensor::{SparseTensor, Symmetry};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub trial: usize,
    /// Bases of the two summands, as coordinate vectors.
    pub v1: Vec<Vec<f64>>,
    pub v2: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DecompositionOutcome {
    Found(Decomposition),
    Exhausted { trials: usize },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Adds `v` to an orthonormal basis if it is not already in the span.
fn extend(basis: &mut Vec<Vec<f64>>, mut v: Vec<f64>) -> bool {
    let scale = dot(&v, &v).sqrt().max(1.0);
    for _ in 0..2 {
        for b in basis.iter() {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    let norm = dot(&v, &v).sqrt();
    if norm <= TOL * scale {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    basis.push(v);
    true
}

/// Rank of a small matrix by partially pivoted elimination.
fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[p][c].abs() <= TOL {
            continue;
        }
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            let f = rows[i][c] / rows[r][c];
            for j in c..cols {
                rows[i][j] -= f * rows[r][j];
            }
        }
        r += 1;
    }
    r
}

/// Null space of the `rows × n` matrix, as an orthonormal basis.
fn null_space(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut row_space = Vec::new();
    for r in rows {
        extend(&mut row_space, r.clone());
    }
    let mut full = row_space.clone();
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        if extend(&mut full, e) {
            out.push(full.last().unwrap().clone());
        }
    }
    out
}

struct Operators {
    n: usize,
    gram: Matrix<f64>,
    ops: Vec<Matrix<f64>>,
}

impl Operators {
    fn new(model: &Model) -> crate::Result<Self> {
        let n = model.dim();
        let to_f = |t: &SparseTensor<crate::scalar::Rational>| t.map(|r| r.to_f64()).expand();
        let inner = to_f(model.inner());
        let gram = Matrix::from_fn(n, n, |i, j| inner.get(&[i, j]).unwrap_or(0.0));
        let ginv = gram.inverse()?;
        let a0 = model.tensor(0).map(to_f).unwrap_or_else(|| SparseTensor::covariant(n, 4, Symmetry::None));
        let mut ops = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                // ℛ(e_i, e_j) e_k = Σ_l A(i, j, k, l) g^{lm} e_m.
                let m = Matrix::from_fn(n, n, |row, k| {
                    (0..n).fold(0.0, |acc, l| acc + a0.get(&[i, j, k, l]).unwrap_or(0.0) * ginv[(l, row)])
                });
                if !m.is_zero() {
                    ops.push(m);
                }
            }
        }
        Ok(Operators { n, gram, ops })
    }

    fn closure(&self, seeds: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let mut basis = Vec::new();
        for s in seeds {
            extend(&mut basis, s);
        }
        let mut next = 0;
        while next < basis.len() && basis.len() < self.n {
            let v = basis[next].clone();
            for op in &self.ops {
                extend(&mut basis, op.mul_vec(&v));
            }
            next += 1;
        }
        basis
    }

    fn is_nondegenerate(&self, basis: &[Vec<f64>]) -> bool {
        let rows: Vec<Vec<f64>> = basis
            .iter()
            .map(|u| basis.iter().map(|v| dot(u, &self.gram.mul_vec(v))).collect())
            .collect();
        rank(rows) == basis.len()
    }

    fn complement(&self, basis: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let rows: Vec<Vec<f64>> = basis.iter().map(|u| self.gram.mul_vec(u)).collect();
        null_space(&rows, self.n)
    }
}

/// Runs up to `trials` randomized attempts, deterministic in `seed`.
pub fn decomposition_search(model: &Model, trials: usize, seed: u64) -> crate::Result<DecompositionOutcome> {
    let ops = Operators::new(model)?;
    let n = ops.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        if n < 2 {
            break;
        }
        let size = rng.gen_range(1..n);
        let subset = sample(&mut rng, n, size).into_vec();
        let seeds: Vec<Vec<f64>> = if trial % 2 == 0 {
            subset
                .iter()
                .map(|&i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect()
        } else {
            let mut v = vec![0.0; n];
            for &i in &subset {
                v[i] = [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0][rng.gen_range(0..6)];
            }
            vec![v]
        };
        let v1 = ops.closure(seeds);
        if v1.len() == n || !ops.is_nondegenerate(&v1) {
            continue;
        }
        let v2 = ops.complement(&v1);
        return Ok(DecompositionOutcome::Found(Decomposition { trial, v1, v2 }));
    }
    Ok(DecompositionOutcome::Exhausted { trials })
}

/// Two hyperbolic planes at `x = 0`: `g = I₄` with `R(e₀, e₁, e₁, e₀) = R(e₂, e₃, e₃, e₂) = −1`.
/// Decomposable by construction.
pub fn split_planes_model() -> Model {
    let mut inner = SparseTensor::covariant(4, 2, Symmetry::PairSymmetric);
    for i in 0..4 {
        inner.insert(&[i, i], ratio(1, 1));
    }
    let mut a0 = SparseTensor::covariant(4, 4, Symmetry::CurvatureType);
    a0.insert(&[0, 1, 1, 0], ratio(-1, 1));
    a0.insert(&[2, 3, 3, 2], ratio(-1, 1));
    Model::from_parts(inner, vec![a0]).expect("consistent parts")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_model;

    #[test]
    fn zero_trials_is_immediate_exhaustion() {
        let m = build_model(1, 0).unwrap();
        assert_eq!(decomposition_search(&m, 0, 1).unwrap(), DecompositionOutcome::Exhausted { trials: 0 });
    }

    #[test]
    fn toy_model_splits() {
        let out = decomposition_search(&split_planes_model(), 50, 7).unwrap();
        let DecompositionOutcome::Found(d) = out else { panic!("{out:?}") };
        assert_eq!(d.v1.len() + d.v2.len(), 4);
        assert_eq!(d.v1.len(), 2);
    }

    #[test]
    fn model_zero_resists_short_search() {
        let m = build_model(1, 0).unwrap();
        assert_eq!(decomposition_search(&m, 500, 3).unwrap(), DecompositionOutcome::Exhausted { trials: 500 });
    }
}
