//! Sparse multi-index tensors over ℝ^{6+4p}.
//!
//! Entries are stored raw, keyed by index tuples. A [`Symmetry`] tag tells
//! the accessor which other tuples a stored entry stands for, so a
//! curvature-type tensor only needs one representative per orbit of
//! `R_{abcd} = −R_{bacd} = −R_{abdc} = R_{cdab}`. Algebraic operations work
//! on the [`expanded`](SparseTensor::expand) form.

mod chart;
mod frame;

use std::collections::BTreeMap;
use std::fmt::Debug;

use serde_json::{json, Value};
use smallvec::SmallVec;

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::expr::{Coord, Expression};
use crate::linalg::Matrix;
use crate::scalar::{Rational, Ring, Scalar};

pub use chart::Chart;
pub use frame::Frame;

/// Index tuple; components fit in a byte because dimensions stay ≤ 255.
pub type Idx = SmallVec<[u8; 16]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variance {
    Co,
    Contra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    None,
    /// Order-2 symmetric: `T_{ab} = T_{ba}`.
    PairSymmetric,
    /// Riemann symmetries on the first four slots; later slots untouched.
    CurvatureType,
}

/// Values a tensor can hold: scalars at a point, or expression fields.
pub trait Entry: Clone + Debug + Send + Sync {
    fn is_zero_entry(&self) -> bool;
    fn negated(&self) -> Self;
}

impl<S: Scalar> Entry for S {
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
    fn negated(&self) -> Self {
        -self.clone()
    }
}

impl Entry for Expression {
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
    fn negated(&self) -> Self {
        self.clone().neg()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseTensor<T> {
    dim: usize,
    variance: Vec<Variance>,
    symmetry: Symmetry,
    entries: BTreeMap<Idx, T>,
}

/// The orbit of `idx` under the declared symmetry, with signs.
fn images(symmetry: Symmetry, idx: &[u8]) -> SmallVec<[(Idx, bool); 8]> {
    let base: Idx = idx.iter().copied().collect();
    let mut out = SmallVec::new();
    match symmetry {
        Symmetry::None => out.push((base, false)),
        Symmetry::PairSymmetric => {
            out.push((base.clone(), false));
            let mut swapped = base;
            swapped.swap(0, 1);
            out.push((swapped, false));
        }
        Symmetry::CurvatureType => {
            let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
            let forms = [
                ([a, b, c, d], false),
                ([b, a, c, d], true),
                ([a, b, d, c], true),
                ([b, a, d, c], false),
                ([c, d, a, b], false),
                ([d, c, a, b], true),
                ([c, d, b, a], true),
                ([d, c, b, a], false),
            ];
            for (head, negate) in forms {
                let mut i = base.clone();
                i[..4].copy_from_slice(&head);
                out.push((i, negate));
            }
        }
    }
    out
}

impl<T: Entry> SparseTensor<T> {
    pub fn new(dim: usize, variance: Vec<Variance>, symmetry: Symmetry) -> Self {
        assert!(dim <= 255, "dimension exceeds packed index range");
        match symmetry {
            Symmetry::PairSymmetric => assert_eq!(variance.len(), 2),
            Symmetry::CurvatureType => assert!(variance.len() >= 4),
            Symmetry::None => {}
        }
        SparseTensor {
            dim,
            variance,
            symmetry,
            entries: BTreeMap::new(),
        }
    }

    pub fn covariant(dim: usize, order: usize, symmetry: Symmetry) -> Self {
        Self::new(dim, vec![Variance::Co; order], symmetry)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Number of stored (raw) entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Idx, &T)> {
        self.entries.iter()
    }

    fn check_idx(&self, idx: &[usize]) {
        assert_eq!(idx.len(), self.order(), "index length differs from tensor order");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
    }

    /// Stores a raw entry; zero values remove the key.
    pub fn insert(&mut self, idx: &[usize], value: T) {
        self.check_idx(idx);
        let key: Idx = idx.iter().map(|&i| i as u8).collect();
        if value.is_zero_entry() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }

    pub fn get_raw(&self, idx: &[usize]) -> Option<&T> {
        let key: Idx = idx.iter().map(|&i| i as u8).collect();
        self.entries.get(&key)
    }

    /// Symmetrised lookup: resolves `idx` through the declared symmetry.
    pub fn get(&self, idx: &[usize]) -> Option<T> {
        self.check_idx(idx);
        let key: Idx = idx.iter().map(|&i| i as u8).collect();
        for (image, negate) in images(self.symmetry, &key) {
            if let Some(v) = self.entries.get(&image) {
                return Some(if negate { v.negated() } else { v.clone() });
            }
        }
        None
    }

    /// Materialises every entry implied by the symmetry tag.
    pub fn expand(&self) -> SparseTensor<T> {
        if self.symmetry == Symmetry::None {
            return self.clone();
        }
        let mut out = SparseTensor::new(self.dim, self.variance.clone(), Symmetry::None);
        for (idx, v) in &self.entries {
            for (image, negate) in images(self.symmetry, idx) {
                let val = if negate { v.negated() } else { v.clone() };
                out.entries.insert(image, val);
            }
        }
        out
    }

    pub fn map<U: Entry>(&self, f: impl Fn(&T) -> U) -> SparseTensor<U> {
        let mut out = SparseTensor::new(self.dim, self.variance.clone(), self.symmetry);
        for (idx, v) in &self.entries {
            let u = f(v);
            if !u.is_zero_entry() {
                out.entries.insert(idx.clone(), u);
            }
        }
        out
    }

    pub fn try_map<U: Entry>(&self, f: impl Fn(&T) -> Result<U>) -> Result<SparseTensor<U>> {
        let mut out = SparseTensor::new(self.dim, self.variance.clone(), self.symmetry);
        for (idx, v) in &self.entries {
            let u = f(v)?;
            if !u.is_zero_entry() {
                out.entries.insert(idx.clone(), u);
            }
        }
        Ok(out)
    }

    fn check_slot(&self, slot: usize) -> Result<()> {
        if slot < self.order() {
            Ok(())
        } else {
            Err(Error::SlotOutOfRange {
                slot,
                order: self.order(),
            })
        }
    }
}

impl SparseTensor<Expression> {
    /// Evaluates a tensor field at a point.
    pub fn eval<R: Scalar>(&self, lookup: &dyn Fn(Coord) -> Option<R>) -> Result<SparseTensor<R>> {
        self.try_map(|e| e.eval_with(lookup))
    }
}

/// Adjacency lists of a symmetric order-2 tensor: `a ↦ [(b, g^{ab})]`.
fn adjacency<S: Scalar>(metric: &SparseTensor<S>) -> BTreeMap<u8, Vec<(u8, S)>> {
    let mut adj: BTreeMap<u8, Vec<(u8, S)>> = BTreeMap::new();
    for (idx, v) in metric.expand().entries {
        adj.entry(idx[0]).or_default().push((idx[1], v));
    }
    adj
}

fn without(idx: &[u8], slot: usize) -> Idx {
    idx.iter()
        .enumerate()
        .filter(|&(i, _)| i != slot)
        .map(|(_, &v)| v)
        .collect()
}

impl<S: Scalar> SparseTensor<S> {
    /// Adds `value` to the raw entry at `key`, dropping it if it cancels.
    pub fn accumulate(&mut self, key: Idx, value: S) {
        if value.is_zero() {
            return;
        }
        match self.entries.get_mut(&key) {
            Some(slot) => {
                *slot = slot.clone() + value;
                if slot.is_zero() {
                    self.entries.remove(&key);
                }
            }
            None => {
                self.entries.insert(key, value);
            }
        }
    }

    pub fn is_zero_tensor(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_metric(&self, metric: &SparseTensor<S>, variance: Variance) -> Result<()> {
        if metric.order() != 2 || metric.variance.iter().any(|&v| v != variance) {
            return Err(Error::Variance(format!(
                "expected an order-2 {variance:?} metric tensor"
            )));
        }
        if metric.dim != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: metric.dim,
            });
        }
        Ok(())
    }

    /// Contracts covariant `slot1` of `self` with covariant `slot2` of
    /// `other` through `metric_inverse`. Result slots: the remaining slots of
    /// `self`, then those of `other`.
    pub fn contract(
        &self,
        slot1: usize,
        other: &SparseTensor<S>,
        slot2: usize,
        metric_inverse: &SparseTensor<S>,
    ) -> Result<SparseTensor<S>> {
        self.check_slot(slot1)?;
        other.check_slot(slot2)?;
        if self.variance[slot1] != Variance::Co || other.variance[slot2] != Variance::Co {
            return Err(Error::Variance("contracted slots must be covariant".into()));
        }
        if other.dim != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        self.check_metric(metric_inverse, Variance::Contra)?;
        let adj = adjacency(metric_inverse);
        let mut groups: BTreeMap<u8, Vec<(Idx, S)>> = BTreeMap::new();
        for (idx, v) in other.expand().entries {
            groups
                .entry(idx[slot2])
                .or_default()
                .push((without(&idx, slot2), v));
        }
        let mut variance: Vec<Variance> = without_var(&self.variance, slot1);
        variance.extend(without_var(&other.variance, slot2));
        let mut out = SparseTensor::new(self.dim, variance, Symmetry::None);
        for (idx, v1) in self.expand().entries {
            let Some(neighbours) = adj.get(&idx[slot1]) else {
                continue;
            };
            let rest1 = without(&idx, slot1);
            for (b, g) in neighbours {
                let Some(group) = groups.get(b) else { continue };
                let scale = v1.clone() * g.clone();
                for (rest2, v2) in group {
                    let mut key = rest1.clone();
                    key.extend_from_slice(rest2);
                    out.accumulate(key, scale.clone() * v2.clone());
                }
            }
        }
        Ok(out)
    }

    /// Contracts two covariant slots of the same tensor with `metric_inverse`.
    pub fn trace(
        &self,
        slot1: usize,
        slot2: usize,
        metric_inverse: &SparseTensor<S>,
    ) -> Result<SparseTensor<S>> {
        self.check_slot(slot1)?;
        self.check_slot(slot2)?;
        if slot1 == slot2 {
            return Err(Error::Variance("cannot trace a slot with itself".into()));
        }
        if self.variance[slot1] != Variance::Co || self.variance[slot2] != Variance::Co {
            return Err(Error::Variance("traced slots must be covariant".into()));
        }
        self.check_metric(metric_inverse, Variance::Contra)?;
        let ginv = metric_inverse.expand();
        let (lo, hi) = (slot1.min(slot2), slot1.max(slot2));
        let variance: Vec<Variance> = self
            .variance
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != lo && i != hi)
            .map(|(_, v)| *v)
            .collect();
        let mut out = SparseTensor::new(self.dim, variance, Symmetry::None);
        for (idx, v) in self.expand().entries {
            let key: Idx = [idx[slot1], idx[slot2]].into_iter().collect();
            let Some(g) = ginv.entries.get(&key) else { continue };
            let rest = without(&without(&idx, hi), lo);
            out.accumulate(rest, v * g.clone());
        }
        Ok(out)
    }

    /// Evaluates a fully covariant tensor on the columns of `frame`:
    /// entry `(i_1..i_r)` of the result is `T(col_{i_1}, ..., col_{i_r})`.
    pub fn pullback(&self, frame: &Matrix<S>) -> Result<SparseTensor<S>> {
        if self.variance.iter().any(|&v| v != Variance::Co) {
            return Err(Error::Variance("pullback needs a fully covariant tensor".into()));
        }
        if frame.rows() != self.dim || frame.cols() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: frame.rows().max(frame.cols()),
            });
        }
        // Row lists: coordinate a contributes to frame vector j with weight M[a][j].
        let rows: Vec<Vec<(u8, S)>> = (0..self.dim)
            .map(|a| {
                (0..self.dim)
                    .filter(|&j| !frame[(a, j)].is_zero())
                    .map(|j| (j as u8, frame[(a, j)].clone()))
                    .collect()
            })
            .collect();
        let mut current = self.expand();
        for slot in 0..self.order() {
            let mut next = SparseTensor::new(self.dim, self.variance.clone(), Symmetry::None);
            for (idx, v) in &current.entries {
                for (j, m) in &rows[idx[slot] as usize] {
                    let mut key = idx.clone();
                    key[slot] = *j;
                    next.accumulate(key, v.clone() * m.clone());
                }
            }
            current = next;
        }
        Ok(current)
    }

    fn move_last_slot(&self, metric: &SparseTensor<S>, from: Variance, to: Variance) -> Result<SparseTensor<S>> {
        let last = self
            .order()
            .checked_sub(1)
            .ok_or(Error::SlotOutOfRange { slot: 0, order: 0 })?;
        if self.variance[last] != from {
            return Err(Error::Variance(format!("last slot is not {from:?}")));
        }
        self.check_metric(metric, to)?;
        let adj = adjacency(metric);
        let mut variance = self.variance.clone();
        variance[last] = to;
        let mut out = SparseTensor::new(self.dim, variance, Symmetry::None);
        for (idx, v) in self.expand().entries {
            let Some(neighbours) = adj.get(&idx[last]) else { continue };
            for (b, g) in neighbours {
                let mut key = idx.clone();
                key[last] = *b;
                out.accumulate(key, v.clone() * g.clone());
            }
        }
        Ok(out)
    }

    /// `T(..., ·) ↦ T(..., g^{-1}(·))`.
    pub fn raise_last_slot(&self, metric_inverse: &SparseTensor<S>) -> Result<SparseTensor<S>> {
        self.move_last_slot(metric_inverse, Variance::Co, Variance::Contra)
    }

    pub fn lower_last_slot(&self, metric: &SparseTensor<S>) -> Result<SparseTensor<S>> {
        self.move_last_slot(metric, Variance::Contra, Variance::Co)
    }

    /// Largest entrywise difference over the expanded supports.
    pub fn sup_distance(&self, other: &SparseTensor<S>) -> f64 {
        let a = self.expand();
        let b = other.expand();
        let zero = S::zero();
        let mut worst: f64 = 0.0;
        for (k, v) in &a.entries {
            worst = worst.max(crate::scalar::distance(v, b.entries.get(k).unwrap_or(&zero)));
        }
        for (k, v) in &b.entries {
            if !a.entries.contains_key(k) {
                worst = worst.max(crate::scalar::distance(v, &zero));
            }
        }
        worst
    }

    /// Entrywise [`Scalar::approx_eq`] over the expanded supports.
    pub fn approx_eq(&self, other: &SparseTensor<S>) -> bool {
        if self.order() != other.order() || self.dim != other.dim {
            return false;
        }
        let a = self.expand();
        let b = other.expand();
        let zero = S::zero();
        a.entries
            .iter()
            .all(|(k, v)| v.approx_eq(b.entries.get(k).unwrap_or(&zero)))
            && b.entries
                .iter()
                .all(|(k, v)| v.approx_eq(a.entries.get(k).unwrap_or(&zero)))
    }

    /// Dense copy (row-major over the index tuple), for small tensors.
    pub fn to_dense(&self) -> Vec<S> {
        let n = self.dim.pow(self.order() as u32);
        let mut out = vec![S::zero(); n];
        for (idx, v) in self.expand().entries {
            let flat = idx.iter().fold(0, |acc, &i| acc * self.dim + i as usize);
            out[flat] = v;
        }
        out
    }
}

fn without_var(v: &[Variance], slot: usize) -> Vec<Variance> {
    v.iter()
        .enumerate()
        .filter(|&(i, _)| i != slot)
        .map(|(_, x)| *x)
        .collect()
}

/// JSON encoding of tensor entries.
pub trait JsonEntry: Entry {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn bad_json(what: &str) -> Error {
    Error::Io(format!("malformed tensor JSON: {what}"))
}

impl JsonEntry for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        v.as_f64().ok_or_else(|| bad_json("expected a number"))
    }
}

impl JsonEntry for DoubleDouble {
    fn to_json(&self) -> Value {
        json!(self.to_f64())
    }
    fn from_json(v: &Value) -> Result<Self> {
        f64::from_json(v).map(DoubleDouble::from)
    }
}

impl JsonEntry for Rational {
    fn to_json(&self) -> Value {
        if self.is_integer() {
            json!(self.numer().to_string())
        } else {
            json!(format!("{}/{}", self.numer(), self.denom()))
        }
    }
    fn from_json(v: &Value) -> Result<Self> {
        let s = v.as_str().ok_or_else(|| bad_json("expected a rational string"))?;
        match crate::expr::parse(s)?.as_number() {
            Some(n) => Ok(Rational::from_number(n)),
            None => Err(bad_json("expected a rational literal")),
        }
    }
}

impl JsonEntry for Expression {
    fn to_json(&self) -> Value {
        json!(self.to_string())
    }
    fn from_json(v: &Value) -> Result<Self> {
        crate::expr::parse(v.as_str().ok_or_else(|| bad_json("expected an expression string"))?)
    }
}

impl<T: JsonEntry> SparseTensor<T> {
    /// `{"order", "dim", "variance", "symmetry", "entries": [[[i..], v], ..]}`.
    pub fn to_json(&self) -> Value {
        let variance: Vec<&str> = self
            .variance
            .iter()
            .map(|v| match v {
                Variance::Co => "co",
                Variance::Contra => "contra",
            })
            .collect();
        let symmetry = match self.symmetry {
            Symmetry::None => "none",
            Symmetry::PairSymmetric => "pair-symmetric",
            Symmetry::CurvatureType => "curvature-type",
        };
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(idx, v)| json!([idx.to_vec(), v.to_json()]))
            .collect();
        json!({
            "order": self.order(),
            "dim": self.dim,
            "variance": variance,
            "symmetry": symmetry,
            "entries": entries,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let variance = v["variance"]
            .as_array()
            .ok_or_else(|| bad_json("variance"))?
            .iter()
            .map(|s| match s.as_str() {
                Some("co") => Ok(Variance::Co),
                Some("contra") => Ok(Variance::Contra),
                _ => Err(bad_json("variance entry")),
            })
            .collect::<Result<Vec<_>>>()?;
        let symmetry = match v["symmetry"].as_str().unwrap_or("none") {
            "none" => Symmetry::None,
            "pair-symmetric" => Symmetry::PairSymmetric,
            "curvature-type" => Symmetry::CurvatureType,
            _ => return Err(bad_json("symmetry")),
        };
        let dim = v["dim"].as_u64().ok_or_else(|| bad_json("dim"))? as usize;
        if v["order"].as_u64() != Some(variance.len() as u64) {
            return Err(bad_json("order"));
        }
        let mut t = SparseTensor::new(dim, variance, symmetry);
        for e in v["entries"].as_array().ok_or_else(|| bad_json("entries"))? {
            let idx: Vec<usize> = e[0]
                .as_array()
                .ok_or_else(|| bad_json("entry index"))?
                .iter()
                .map(|i| i.as_u64().map(|i| i as usize).ok_or_else(|| bad_json("entry index")))
                .collect::<Result<_>>()?;
            if idx.len() != t.order() || idx.iter().any(|&i| i >= dim) {
                return Err(bad_json("entry index out of range"));
            }
            t.insert(&idx, T::from_json(&e[1])?);
        }
        Ok(t)
    }
}

/// Evaluates `T(v_1, ..., v_r)` for a fully covariant tensor.
pub fn apply<S: Scalar>(t: &SparseTensor<S>, vectors: &[&[S]]) -> S {
    let mut acc = S::zero();
    for (idx, v) in t.expand().entries {
        let mut term = v;
        for (slot, &i) in idx.iter().enumerate() {
            let c = &vectors[slot][i as usize];
            if c.is_zero() {
                term = S::zero();
                break;
            }
            term = term * c.clone();
        }
        acc = acc + term;
    }
    acc
}

/// Unit coordinate vector.
pub fn basis_vector<S: Ring>(dim: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); dim];
    v[i] = S::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_traits::Zero;

    fn curvature_sample() -> SparseTensor<Rational> {
        let mut t = SparseTensor::covariant(4, 4, Symmetry::CurvatureType);
        t.insert(&[0, 1, 2, 0], ratio(1, 1));
        t.insert(&[0, 1, 3, 0], ratio(-2, 3));
        t
    }

    #[test]
    fn symmetrised_accessor_follows_riemann_symmetries() {
        let t = curvature_sample();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = |i: [usize; 4]| t.get(&i).unwrap_or_else(Rational::zero);
                        let r = v([a, b, c, d]);
                        assert_eq!(r, -v([b, a, c, d]));
                        assert_eq!(r, -v([a, b, d, c]));
                        assert_eq!(r, v([c, d, a, b]));
                    }
                }
            }
        }
        assert_eq!(t.get(&[1, 0, 0, 2]), Some(ratio(1, 1)));
        assert_eq!(t.get(&[2, 0, 1, 0]), Some(ratio(-1, 1)));
    }

    #[test]
    fn expand_agrees_with_accessor() {
        let t = curvature_sample();
        let e = t.expand();
        assert_eq!(e.len(), 16);
        for (idx, v) in e.entries() {
            let i: Vec<usize> = idx.iter().map(|&x| x as usize).collect();
            assert_eq!(t.get(&i).as_ref(), Some(v));
        }
    }

    #[test]
    fn zero_entries_are_not_stored() {
        let mut t = SparseTensor::<f64>::covariant(3, 2, Symmetry::None);
        t.insert(&[0, 1], 0.0);
        assert!(t.is_empty());
        t.accumulate([0u8, 1].into_iter().collect(), 1.5);
        t.accumulate([0u8, 1].into_iter().collect(), -1.5);
        assert!(t.is_empty());
    }

    #[test]
    fn contraction_of_zero_tensor_is_zero() {
        let z = SparseTensor::<Rational>::covariant(4, 3, Symmetry::None);
        let mut ginv = SparseTensor::new(4, vec![Variance::Contra; 2], Symmetry::PairSymmetric);
        ginv.insert(&[0, 1], ratio(1, 1));
        let c = z.contract(0, &curvature_sample(), 2, &ginv).unwrap();
        assert!(c.is_zero_tensor());
        assert_eq!(c.order(), 5);
    }

    #[test]
    fn contraction_checks_variance_and_slots() {
        let t = curvature_sample();
        let ginv = SparseTensor::<Rational>::new(4, vec![Variance::Contra; 2], Symmetry::PairSymmetric);
        assert!(matches!(t.contract(7, &t, 0, &ginv), Err(Error::SlotOutOfRange { slot: 7, .. })));
        let raised = t.raise_last_slot(&ginv).unwrap();
        assert!(matches!(raised.contract(3, &t, 0, &ginv), Err(Error::Variance(_))));
    }

    #[test]
    fn json_round_trip() {
        let t = curvature_sample();
        let back = SparseTensor::<Rational>::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let text = t.to_json().to_string();
        assert!(text.contains("\"-2/3\""));
    }

    #[test]
    fn apply_matches_entry_lookup() {
        let t = curvature_sample();
        let e = |i: usize| basis_vector::<Rational>(4, i);
        let (a, b, c, d) = (e(1), e(0), e(0), e(2));
        assert_eq!(apply(&t, &[&a, &b, &c, &d]), ratio(1, 1));
    }
}
