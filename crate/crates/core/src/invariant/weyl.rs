//! Scalar Weyl invariants: full metric contractions of products of
//! `∇^k R`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::manifold::{metric_inverse, nabla_r_closed, ManifoldConfig};
use crate::scalar::Scalar;
use crate::tensor::{Idx, SparseTensor};

/// Largest slot count accepted by [`enumerate_schemes`].
pub const MAX_SLOTS: usize = 12;

/// Factors `∇^{k_j} R` (listed by order, non-decreasing) and a perfect
/// matching of their concatenated slots. Factor `j` owns slots
/// `offset_j .. offset_j + 4 + k_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ContractionScheme {
    pub factors: Vec<usize>,
    pub matching: Vec<(usize, usize)>,
}

impl ContractionScheme {
    pub fn new(factors: Vec<usize>, matching: Vec<(usize, usize)>) -> Result<Self> {
        let slots: usize = factors.iter().map(|k| 4 + k).sum();
        let mut seen = vec![false; slots];
        for &(a, b) in &matching {
            for s in [a, b] {
                if s >= slots || seen[s] {
                    return Err(Error::Scheme(format!("slot {s} missing or matched twice")));
                }
                seen[s] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Scheme("matching does not cover every slot".into()));
        }
        Ok(ContractionScheme { factors, matching })
    }

    pub fn slots(&self) -> usize {
        self.factors.iter().map(|k| 4 + k).sum()
    }

    pub fn max_order(&self) -> usize {
        self.factors.iter().copied().max().unwrap_or(0)
    }

    fn owners(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.slots());
        for (f, k) in self.factors.iter().enumerate() {
            out.extend((0..4 + k).map(|l| (f, l)));
        }
        out
    }
}

/// Scalar curvature `τ = g^{ad} g^{bc} R_{abcd}`.
pub fn tau_scheme() -> ContractionScheme {
    ContractionScheme::new(vec![0], vec![(0, 3), (1, 2)]).expect("valid")
}

/// `|ρ|² = g^{i1j1} g^{i2j2} g^{i3j3} g^{i4j4} R_{i1i2i3j1} R_{i4j2j3j4}`.
pub fn rho_squared_scheme() -> ContractionScheme {
    ContractionScheme::new(vec![0, 0], vec![(0, 3), (1, 5), (2, 6), (4, 7)]).expect("valid")
}

fn matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for i in 0..free.len() {
            let b = free.remove(i);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(i, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

fn order_multisets(max_slots: usize) -> Vec<Vec<usize>> {
    fn rec(min: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() && cur.iter().map(|k| 4 + k).sum::<usize>() % 2 == 0 {
            out.push(cur.clone());
        }
        for k in min..=left.saturating_sub(4) {
            if 4 + k > left {
                break;
            }
            cur.push(k);
            rec(k, left - 4 - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, max_slots, &mut Vec::new(), &mut out);
    out
}

/// All permutations of factor positions that only swap equal orders.
fn factor_symmetries(factors: &[usize]) -> Vec<Vec<usize>> {
    fn rec(factors: &[usize], used: &mut Vec<bool>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == factors.len() {
            out.push(cur.clone());
            return;
        }
        let pos = cur.len();
        for j in 0..factors.len() {
            if !used[j] && factors[j] == factors[pos] {
                used[j] = true;
                cur.push(j);
                rec(factors, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(factors, &mut vec![false; factors.len()], &mut Vec::new(), &mut out);
    out
}

fn canonical(offsets: &[usize], perms: &[Vec<usize>], m: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let owner = |s: usize| offsets.iter().rposition(|&o| o <= s).expect("slot in range");
    perms
        .iter()
        .map(|perm| {
            let relabel = |s: usize| {
                let f = owner(s);
                offsets[perm[f]] + (s - offsets[f])
            };
            let mut pairs: Vec<(usize, usize)> = m
                .iter()
                .map(|&(a, b)| {
                    let (a, b) = (relabel(a), relabel(b));
                    (a.min(b), a.max(b))
                })
                .collect();
            pairs.sort_unstable();
            pairs
        })
        .min()
        .unwrap_or_default()
}

/// Every multiset of orders with `Σ(4 + k_j) ≤ max_slots` (even totals),
/// each with all perfect matchings, deduplicated under permutations of
/// equal-order factors.
pub fn enumerate_schemes(max_slots: usize) -> Result<Vec<ContractionScheme>> {
    if max_slots > MAX_SLOTS {
        return Err(Error::Scheme(format!("max_slots {max_slots} exceeds {MAX_SLOTS}")));
    }
    let mut out = Vec::new();
    let mut cache: BTreeMap<usize, Vec<Vec<(usize, usize)>>> = BTreeMap::new();
    for factors in order_multisets(max_slots) {
        let slots: usize = factors.iter().map(|k| 4 + k).sum();
        let all = cache.entry(slots).or_insert_with(|| matchings(slots));
        let mut offsets = Vec::with_capacity(factors.len());
        let mut acc = 0;
        for k in &factors {
            offsets.push(acc);
            acc += 4 + k;
        }
        let perms = factor_symmetries(&factors);
        let mut seen = BTreeSet::new();
        for m in all.iter() {
            seen.insert(canonical(&offsets, &perms, m));
        }
        out.extend(seen.into_iter().map(|matching| ContractionScheme {
            factors: factors.clone(),
            matching,
        }));
    }
    Ok(out)
}

/// Expanded curvature tensors and inverse metric at one point.
#[derive(Debug, Clone)]
pub struct CurvatureData<S> {
    dim: usize,
    ginv: BTreeMap<u8, Vec<(u8, S)>>,
    nabla: Vec<Vec<(Idx, S)>>,
}

impl<S: Scalar> CurvatureData<S> {
    /// `ginv` is the inverse metric, `nabla[k]` is `∇^k R` (covariant).
    pub fn from_parts(ginv: &SparseTensor<S>, nabla: &[SparseTensor<S>]) -> Self {
        let mut adj: BTreeMap<u8, Vec<(u8, S)>> = BTreeMap::new();
        for (idx, v) in ginv.expand().entries() {
            adj.entry(idx[0]).or_default().push((idx[1], v.clone()));
        }
        CurvatureData {
            dim: ginv.dim(),
            ginv: adj,
            nabla: nabla
                .iter()
                .map(|t| t.expand().entries().map(|(i, v)| (i.clone(), v.clone())).collect())
                .collect(),
        }
    }

    /// `g^{-1}` and `∇^k R` for `k ≤ max_order` on the family.
    pub fn for_config(config: &ManifoldConfig, point: &[S], max_order: usize) -> Result<Self> {
        let ginv = metric_inverse(config, point)?;
        let nabla = (0..=max_order)
            .map(|k| nabla_r_closed(config, point, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(&ginv, &nabla))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.nabla.len().saturating_sub(1)
    }

    /// Full contraction along the scheme's matching.
    pub fn evaluate(&self, scheme: &ContractionScheme) -> Result<S> {
        if scheme.max_order() > self.max_order() {
            return Err(Error::Scheme(format!(
                "scheme needs order {} but only {} is available",
                scheme.max_order(),
                self.max_order()
            )));
        }
        let factors: Vec<&[(Idx, S)]> = scheme.factors.iter().map(|&k| self.nabla[k].as_slice()).collect();
        if factors.iter().any(|f| f.is_empty()) {
            return Ok(S::zero());
        }
        let owners = scheme.owners();
        let pairs: Vec<((usize, usize), (usize, usize))> =
            scheme.matching.iter().map(|&(a, b)| (owners[a], owners[b])).collect();
        let cands: Vec<Vec<u32>> = factors.iter().map(|f| (0..f.len() as u32).collect()).collect();
        Ok(self.dfs(&factors, &pairs, 0, cands, S::one()))
    }

    fn dfs(
        &self,
        factors: &[&[(Idx, S)]],
        pairs: &[((usize, usize), (usize, usize))],
        depth: usize,
        cands: Vec<Vec<u32>>,
        weight: S,
    ) -> S {
        if depth == pairs.len() {
            return factors
                .iter()
                .zip(&cands)
                .fold(weight, |acc, (f, c)| acc * f[c[0] as usize].1.clone());
        }
        let ((f1, l1), (f2, l2)) = pairs[depth];
        let values: BTreeSet<u8> = cands[f1].iter().map(|&c| factors[f1][c as usize].0[l1]).collect();
        let mut total = S::zero();
        for a in values {
            let Some(row) = self.ginv.get(&a) else { continue };
            let c1: Vec<u32> = cands[f1]
                .iter()
                .copied()
                .filter(|&c| factors[f1][c as usize].0[l1] == a)
                .collect();
            for (b, g) in row {
                let source = if f1 == f2 { &c1 } else { &cands[f2] };
                let c2: Vec<u32> = source
                    .iter()
                    .copied()
                    .filter(|&c| factors[f2][c as usize].0[l2] == *b)
                    .collect();
                if c2.is_empty() {
                    continue;
                }
                let mut next = cands.clone();
                next[f1] = c1.clone();
                next[f2] = c2;
                total = total + self.dfs(factors, pairs, depth + 1, next, weight.clone() * g.clone());
            }
        }
        total
    }

    /// Values of many schemes, in input order.
    pub fn evaluate_all(&self, schemes: &[ContractionScheme], exec: Exec) -> Result<Vec<S>> {
        exec.map(schemes, |s| self.evaluate(s)).into_iter().collect()
    }

    /// Block-diagonal sum with a second manifold's data at a point, as for a
    /// product metric.
    pub fn direct_sum(&self, other: &CurvatureData<S>) -> Self {
        let shift = self.dim as u8;
        let mut ginv = self.ginv.clone();
        for (a, row) in &other.ginv {
            ginv.insert(a + shift, row.iter().map(|(b, v)| (b + shift, v.clone())).collect());
        }
        let orders = self.nabla.len().max(other.nabla.len());
        let nabla = (0..orders)
            .map(|k| {
                let mut v = self.nabla.get(k).cloned().unwrap_or_default();
                if let Some(o) = other.nabla.get(k) {
                    v.extend(o.iter().map(|(i, x)| (i.iter().map(|c| c + shift).collect(), x.clone())));
                }
                v
            })
            .collect();
        CurvatureData {
            dim: self.dim + other.dim,
            ginv,
            nabla,
        }
    }
}

/// One scheme at one point of the family.
pub fn evaluate_scheme<S: Scalar>(config: &ManifoldConfig, point: &[S], scheme: &ContractionScheme) -> Result<S> {
    CurvatureData::for_config(config, point, scheme.max_order())?.evaluate(scheme)
}

/// `R` of a round 2-sphere of radius `r` at colatitude `θ`, in coordinates
/// `(θ, φ)`: `g = diag(r², r² sin²θ)`, `R(∂θ, ∂φ, ∂φ, ∂θ) = r² sin²θ`.
/// Used only as a non-vanishing control.
pub fn sphere_block(r: f64, theta: f64) -> CurvatureData<f64> {
    let s2 = theta.sin().powi(2);
    let mut ginv = SparseTensor::new(2, vec![crate::tensor::Variance::Contra; 2], crate::tensor::Symmetry::None);
    ginv.insert(&[0, 0], 1.0 / (r * r));
    ginv.insert(&[1, 1], 1.0 / (r * r * s2));
    let mut riem = SparseTensor::covariant(2, 4, crate::tensor::Symmetry::CurvatureType);
    riem.insert(&[0, 1, 1, 0], r * r * s2);
    CurvatureData::from_parts(&ginv, &[riem])
}
