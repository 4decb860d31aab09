//! Objects of a Krull-Schmidt window as multisets of indecomposables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of an indecomposable within one model. The index order is the
/// canonical order used for every enumeration.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IndecId(pub u32);

impl IndecId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for IndecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A finitely supported multiset of indecomposables; the empty multiset is
/// the zero object and direct sum is multiset union.
///
/// Ordering is lexicographic on the sorted `(index, multiplicity)` list,
/// which is the canonical tie-break for all enumerations.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Obj(BTreeMap<IndecId, u32>);

impl Obj {
    pub fn zero() -> Self {
        Obj(BTreeMap::new())
    }

    pub fn indec(id: IndecId) -> Self {
        Self::from_pairs([(id, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (IndecId, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (id, k) in pairs {
            if k > 0 {
                *m.entry(id).or_insert(0) += k;
            }
        }
        Obj(m)
    }

    /// Builds an object from a dense multiplicity vector.
    pub fn from_counts(counts: &[u32]) -> Self {
        Self::from_pairs(
            counts
                .iter()
                .enumerate()
                .map(|(i, &k)| (IndecId(i as u32), k)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mult(&self, id: IndecId) -> u32 {
        self.0.get(&id).copied().unwrap_or(0)
    }

    /// Total number of indecomposable summands.
    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn is_indecomposable(&self) -> bool {
        self.total() == 1
    }

    pub fn single(&self) -> Option<IndecId> {
        if self.is_indecomposable() {
            self.0.keys().next().copied()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (IndecId, u32)> + '_ {
        self.0.iter().map(|(k, v)| (*k, *v))
    }

    pub fn support(&self) -> impl Iterator<Item = IndecId> + '_ {
        self.0.keys().copied()
    }

    /// Summands listed with repetition in canonical order.
    pub fn summands(&self) -> Vec<IndecId> {
        self.iter()
            .flat_map(|(id, k)| std::iter::repeat_n(id, k as usize))
            .collect()
    }

    pub fn sum(&self, other: &Obj) -> Obj {
        let mut m = self.0.clone();
        for (id, k) in other.iter() {
            *m.entry(id).or_insert(0) += k;
        }
        Obj(m)
    }

    pub fn scaled(&self, k: u32) -> Obj {
        Obj::from_pairs(self.iter().map(|(id, m)| (id, m * k)))
    }

    /// Whether `other` is a direct summand (multiset inclusion).
    pub fn contains(&self, other: &Obj) -> bool {
        other.iter().all(|(id, k)| self.mult(id) >= k)
    }

    /// `self - other` when `other` is a summand.
    pub fn minus(&self, other: &Obj) -> Option<Obj> {
        if !self.contains(other) {
            return None;
        }
        Some(Obj::from_pairs(
            self.iter().map(|(id, k)| (id, k - other.mult(id))),
        ))
    }

    pub fn counts(&self, n: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        for (id, k) in self.iter() {
            v[id.index()] = k;
        }
        v
    }

    /// Relabels indices through `f`; summands mapped to `None` are an error
    /// reported as the first unmapped id.
    pub fn map_ids(&self, f: impl Fn(IndecId) -> Option<IndecId>) -> Result<Obj, IndecId> {
        let mut pairs = Vec::new();
        for (id, k) in self.iter() {
            pairs.push((f(id).ok_or(id)?, k));
        }
        Ok(Obj::from_pairs(pairs))
    }
}

/// Direct sum.
pub fn obj_sum(x: &Obj, y: &Obj) -> Obj {
    x.sum(y)
}

/// All objects over `n` indecomposables with total multiplicity in
/// `1..=max_total`, in canonical order.
pub fn objects_up_to(n: usize, max_total: u32) -> Vec<Obj> {
    let ids: Vec<IndecId> = (0..n as u32).map(IndecId).collect();
    objects_over(&ids, max_total)
}

/// All nonzero objects supported on `ids` with total multiplicity at most
/// `max_total`, in canonical order.
pub fn objects_over(ids: &[IndecId], max_total: u32) -> Vec<Obj> {
    let mut out = Vec::new();
    let mut counts = vec![0u32; ids.len()];
    fn rec(
        ids: &[IndecId],
        pos: usize,
        left: u32,
        counts: &mut Vec<u32>,
        out: &mut Vec<Obj>,
    ) {
        if pos == ids.len() {
            let o = Obj::from_pairs(ids.iter().copied().zip(counts.iter().copied()));
            if !o.is_zero() {
                out.push(o);
            }
            return;
        }
        for k in 0..=left {
            counts[pos] = k;
            rec(ids, pos + 1, left - k, counts, out);
        }
        counts[pos] = 0;
    }
    rec(ids, 0, max_total, &mut counts, &mut out);
    out.sort();
    out
}
