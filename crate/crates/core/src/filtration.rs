//! Filtrations by a fixed set of factors, found by repeated deflation onto a
//! factor: `M_{t-1} -> M_t -> X_t`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::Result;
use crate::model::{CategoryModel, Extriangle};
use crate::obj::{IndecId, Obj};

/// `steps[i] = (M_i, M_{i+1}, X_{i+1})` with `M_0 = 0`; `factors[i]` is the
/// indecomposable `X_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub steps: Vec<Extriangle>,
    pub factors: Vec<IndecId>,
}

impl Filtration {
    pub fn empty() -> Self {
        Filtration {
            steps: Vec::new(),
            factors: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn target(&self) -> Obj {
        self.steps.last().map(|s| s.mid.clone()).unwrap_or_default()
    }

    pub fn factor_counts(&self) -> BTreeMap<IndecId, u32> {
        let mut m = BTreeMap::new();
        for f in &self.factors {
            *m.entry(*f).or_insert(0) += 1;
        }
        m
    }

    /// Chain condition: consecutive steps share objects, starting at 0.
    pub fn is_chain(&self) -> bool {
        let mut prev = Obj::zero();
        for (s, f) in self.steps.iter().zip(&self.factors) {
            if s.a != prev || s.c != Obj::indec(*f) {
                return false;
            }
            prev = s.mid.clone();
        }
        self.steps.len() == self.factors.len()
    }

    fn sort_key(&self) -> (usize, Vec<IndecId>, Vec<(Obj, Obj, Obj)>) {
        (
            self.len(),
            self.factors.clone(),
            self.steps.iter().map(Extriangle::triple).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationSet {
    pub filtrations: Vec<Filtration>,
    /// Some chain was cut at the length cap while it could still continue.
    pub truncated: bool,
}

/// Kernel-end search bound for backends that search over candidates.
fn k_bound(m: &Obj, x: &Obj) -> u32 {
    m.total() + x.total()
}

/// Extriangles `(K, m, x)` with `x` a factor and `K` built from `within`.
fn last_steps(
    model: &CategoryModel,
    m: &Obj,
    factors: &[IndecId],
    within: Option<&[IndecId]>,
) -> Result<Vec<(IndecId, Extriangle)>> {
    let mut out = Vec::new();
    for &f in factors {
        let x = Obj::indec(f);
        for e in model.ending_at(m, &x, k_bound(m, &x))? {
            if within.is_none_or(|w| e.a.support().all(|i| w.contains(&i))) {
                out.push((f, e));
            }
        }
    }
    Ok(out)
}

/// Every filtration of `m` with factors in `factors` and length at most
/// `cap`, canonically ordered.
pub fn enumerate(
    model: &CategoryModel,
    m: &Obj,
    factors: &[IndecId],
    cap: u32,
) -> Result<FiltrationSet> {
    enumerate_in(model, m, factors, None, cap)
}

/// [`enumerate`] with every intermediate object a sum of `within`
/// (a full subcategory of the model).
pub fn enumerate_in(
    model: &CategoryModel,
    m: &Obj,
    factors: &[IndecId],
    within: Option<&[IndecId]>,
    cap: u32,
) -> Result<FiltrationSet> {
    let mut truncated = false;
    let mut out = Vec::new();
    rec(model, m, factors, within, cap, &mut truncated, &mut out)?;
    let mut filtrations: Vec<Filtration> = out
        .into_iter()
        .map(|mut steps: Vec<(IndecId, Extriangle)>| {
            steps.reverse();
            let factors = steps.iter().map(|(f, _)| *f).collect();
            Filtration {
                steps: steps.into_iter().map(|(_, e)| e).collect(),
                factors,
            }
        })
        .collect();
    filtrations.sort_by_key(Filtration::sort_key);
    filtrations.dedup_by(|x, y| x.sort_key() == y.sort_key());
    Ok(FiltrationSet {
        filtrations,
        truncated,
    })
}

// Chains are collected last step first.
fn rec(
    model: &CategoryModel,
    m: &Obj,
    factors: &[IndecId],
    within: Option<&[IndecId]>,
    left: u32,
    truncated: &mut bool,
    out: &mut Vec<Vec<(IndecId, Extriangle)>>,
) -> Result<()> {
    if m.is_zero() {
        out.push(Vec::new());
    }
    let steps = last_steps(model, m, factors, within)?;
    if left == 0 {
        if !steps.is_empty() {
            *truncated = true;
        }
        return Ok(());
    }
    for (f, e) in steps {
        let mut sub = Vec::new();
        rec(model, &e.a, factors, within, left - 1, truncated, &mut sub)?;
        for mut chain in sub {
            chain.insert(0, (f, e.clone()));
            out.push(chain);
        }
    }
    Ok(())
}

/// Lengths and factor multisets of all filtrations of an object, without
/// listing the chains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub shapes: BTreeSet<(u32, Vec<(IndecId, u32)>)>,
    pub truncated: bool,
}

/// Memoised [`Summary`] computation.
pub struct Summarizer<'a> {
    model: &'a CategoryModel,
    factors: Vec<IndecId>,
    within: Option<Vec<IndecId>>,
    memo: HashMap<(Obj, u32), Summary>,
}

impl<'a> Summarizer<'a> {
    pub fn new(model: &'a CategoryModel, factors: &[IndecId]) -> Self {
        Summarizer {
            model,
            factors: factors.to_vec(),
            within: None,
            memo: HashMap::new(),
        }
    }

    pub fn within(mut self, ids: &[IndecId]) -> Self {
        self.within = Some(ids.to_vec());
        self
    }

    pub fn summary(&mut self, m: &Obj, cap: u32) -> Result<Summary> {
        if let Some(s) = self.memo.get(&(m.clone(), cap)) {
            return Ok(s.clone());
        }
        let mut s = Summary::default();
        if m.is_zero() {
            s.shapes.insert((0, Vec::new()));
        }
        let steps = last_steps(self.model, m, &self.factors, self.within.as_deref())?;
        if cap == 0 {
            s.truncated = !steps.is_empty();
        } else {
            for (f, e) in steps {
                let sub = self.summary(&e.a, cap - 1)?;
                s.truncated |= sub.truncated;
                for (len, counts) in sub.shapes {
                    let mut c: BTreeMap<IndecId, u32> = counts.into_iter().collect();
                    *c.entry(f).or_insert(0) += 1;
                    s.shapes.insert((len + 1, c.into_iter().collect()));
                }
            }
        }
        self.memo.insert((m.clone(), cap), s.clone());
        Ok(s)
    }
}
