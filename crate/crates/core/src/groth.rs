//! Grothendieck monoid and group, simple objects, composition series and
//! the Jordan-Hölder verdicts.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filtration::{self, Filtration, Summarizer};
use crate::linalg::{QuotientCoords, Span};
use crate::model::{CategoryModel, Extriangle};
use crate::obj::{IndecId, Obj};
use crate::smith;

/// Total-multiplicity bound on window objects examined by the verdicts.
pub const DEFAULT_WINDOW_MULT: u32 = 2;
/// Vector-norm bound for rewrite searches: four times the window bound.
pub const DEFAULT_NORM_BOUND: u32 = 4 * DEFAULT_WINDOW_MULT;
/// Extriangles feeding the monoid relations have ends of this total.
pub const DEFAULT_ENDS_MULT: u32 = 1;
const STATE_CAP: usize = 200_000;

/// Three-valued answer; `Unknown` serialises as `null`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    pub fn and(self, o: Tri) -> Tri {
        match (self, o) {
            (Tri::False, _) | (_, Tri::False) => Tri::False,
            (Tri::True, Tri::True) => Tri::True,
            _ => Tri::Unknown,
        }
    }

    pub fn as_option(self) -> Option<bool> {
        match self {
            Tri::True => Some(true),
            Tri::False => Some(false),
            Tri::Unknown => None,
        }
    }
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

impl Serialize for Tri {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_option().serialize(s)
    }
}

// ---------------------------------------------------------------- simples

/// The first extriangle with zero middle term and nonzero ends, if any.
pub fn zero_middled_witness(model: &CategoryModel) -> Result<Option<Extriangle>> {
    Ok(model.zero_middled()?.into_iter().next())
}

/// Object-level simplicity test without the simple-like-zero gate: `S` is
/// simple when no extriangle `(A, S, C)` has both ends nonzero, for `C` up
/// to total multiplicity 2.
pub fn simples_unchecked(model: &CategoryModel) -> Result<Vec<IndecId>> {
    let cs = model.window_objects(DEFAULT_WINDOW_MULT);
    let mut out = Vec::new();
    'next: for s in model.ids() {
        let so = Obj::indec(s);
        for c in &cs {
            let found = model.ending_at(&so, c, so.total() + c.total() + 1)?;
            if found.iter().any(|e| !e.a.is_zero()) {
                continue 'next;
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Whether `0` is simple-like, cross-checked against the existence of
/// simples (a category with a simple object has simple-like zero).
pub fn zero_simple_like(model: &CategoryModel) -> Result<bool> {
    let zsl = zero_middled_witness(model)?.is_none();
    if !zsl && !simples_unchecked(model)?.is_empty() {
        return Err(Error::Consistency(
            "simple objects exist although 0 is not simple-like".into(),
        ));
    }
    Ok(zsl)
}

/// Simple objects; empty when `0` is not simple-like.
pub fn simples(model: &CategoryModel) -> Result<Vec<IndecId>> {
    if zero_middled_witness(model)?.is_some() {
        return Ok(Vec::new());
    }
    simples_unchecked(model)
}

// ------------------------------------------------------------ presentation

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidPresentation {
    pub generators: Vec<IndecId>,
    /// `(u, v)`: `u` the middle term, `v` the sum of the ends.
    pub relations: Vec<(Vec<u32>, Vec<u32>)>,
}

impl MonoidPresentation {
    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn unit(&self, i: usize) -> Vec<u32> {
        let mut v = vec![0; self.ngens()];
        v[i] = 1;
        v
    }

    pub fn vector(&self, x: &Obj) -> Vec<u32> {
        x.counts(self.ngens())
    }

    /// `"[P2] = [P3] + [S2]"` style rendering.
    pub fn fmt_relation(&self, r: usize, model: &CategoryModel) -> String {
        let (u, v) = &self.relations[r];
        format!(
            "[{}] = [{}]",
            model.fmt_obj(&Obj::from_counts(u)),
            model.fmt_obj(&Obj::from_counts(v))
        )
    }

    fn rational_rows(&self) -> Vec<Vec<Rational64>> {
        self.relations
            .iter()
            .map(|(u, v)| {
                u.iter()
                    .zip(v)
                    .map(|(&a, &b)| Rational64::from_integer(a as i64 - b as i64))
                    .collect()
            })
            .collect()
    }

    fn integer_rows(&self) -> Vec<Vec<i64>> {
        self.relations
            .iter()
            .map(|(u, v)| u.iter().zip(v).map(|(&a, &b)| a as i64 - b as i64).collect())
            .collect()
    }
}

/// One relation per non-split extriangle with ends of total at most
/// `ends_mult`, deduplicated by vector pair.
pub fn monoid_presentation(model: &CategoryModel, ends_mult: u32) -> Result<MonoidPresentation> {
    let n = model.len();
    let mut rels = BTreeSet::new();
    for e in model.nonsplit_extriangles(ends_mult)? {
        let u = e.mid.counts(n);
        let v = e.a.sum(&e.c).counts(n);
        if u != v {
            rels.insert((u, v));
        }
    }
    Ok(MonoidPresentation {
        generators: model.ids(),
        relations: rels.into_iter().collect(),
    })
}

// ---------------------------------------------------------- word problem

/// One rewrite: relation index, direction (`true` for `u -> v`) and the
/// resulting vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rewrite {
    pub relation: usize,
    pub forward: bool,
    pub result: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MonoidEq {
    Equal { chain: Vec<Rewrite> },
    NotEqual,
    Unknown,
}

fn ge(w: &[u32], u: &[u32]) -> bool {
    w.iter().zip(u).all(|(a, b)| a >= b)
}

fn rewrite(w: &[u32], from: &[u32], to: &[u32]) -> Vec<u32> {
    w.iter()
        .zip(from)
        .zip(to)
        .map(|((&a, &f), &t)| a - f + t)
        .collect()
}

fn neighbours<'a>(
    p: &'a MonoidPresentation,
    w: &'a [u32],
    bound: u32,
) -> impl Iterator<Item = Rewrite> + 'a {
    p.relations.iter().enumerate().flat_map(move |(i, (u, v))| {
        let mut out = Vec::new();
        if ge(w, u) {
            out.push(Rewrite {
                relation: i,
                forward: true,
                result: rewrite(w, u, v),
            });
        }
        if ge(w, v) {
            out.push(Rewrite {
                relation: i,
                forward: false,
                result: rewrite(w, v, u),
            });
        }
        out.into_iter()
            .filter(move |r| r.result.iter().sum::<u32>() <= bound)
    })
}

/// `x - y` lies outside the rational span of the relations, so the classes
/// differ already in `K0 ⊗ Q`.
pub fn separated_in_k0(p: &MonoidPresentation, x: &[u32], y: &[u32]) -> bool {
    let span = Span::of(p.ngens(), &p.rational_rows());
    let d: Vec<Rational64> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| Rational64::from_integer(a as i64 - b as i64))
        .collect();
    !span.contains(&d)
}

/// Bounded congruence search. `Equal` carries the rewrite chain from `x`
/// to `y`; `NotEqual` needs a separating `K0` image.
pub fn monoid_equal(p: &MonoidPresentation, x: &[u32], y: &[u32], bound: u32) -> MonoidEq {
    if x == y {
        return MonoidEq::Equal { chain: Vec::new() };
    }
    if separated_in_k0(p, x, y) {
        return MonoidEq::NotEqual;
    }
    let mut parent: HashMap<Vec<u32>, Option<(Vec<u32>, Rewrite)>> = HashMap::new();
    parent.insert(x.to_vec(), None);
    let mut queue = VecDeque::from([x.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for r in neighbours(p, &w, bound) {
            if parent.contains_key(&r.result) {
                continue;
            }
            let next = r.result.clone();
            parent.insert(next.clone(), Some((w.clone(), r)));
            if next == y {
                let mut chain = Vec::new();
                let mut cur = next;
                while let Some(Some((prev, r))) = parent.get(&cur) {
                    chain.push(r.clone());
                    cur = prev.clone();
                }
                chain.reverse();
                return MonoidEq::Equal { chain };
            }
            if parent.len() > STATE_CAP {
                return MonoidEq::Unknown;
            }
            queue.push_back(next);
        }
    }
    MonoidEq::Unknown
}

/// Vectors congruent to `x` under the bound, and whether the search was cut.
fn class_of(p: &MonoidPresentation, x: &[u32], bound: u32) -> (BTreeSet<Vec<u32>>, bool) {
    let mut seen = BTreeSet::from([x.to_vec()]);
    let mut queue = VecDeque::from([x.to_vec()]);
    let mut cut = false;
    while let Some(w) = queue.pop_front() {
        for r in neighbours(p, &w, bound) {
            if seen.insert(r.result.clone()) {
                if seen.len() > STATE_CAP {
                    return (seen, true);
                }
                queue.push_back(r.result);
            }
        }
        // a rewrite that left the bound means the class may be larger
        cut |= p.relations.iter().any(|(u, v)| {
            (ge(&w, u) && rewrite(&w, u, v).iter().sum::<u32>() > bound)
                || (ge(&w, v) && rewrite(&w, v, u).iter().sum::<u32>() > bound)
        });
    }
    (seen, cut)
}

/// Reduced (`x + y = 0` forces `x = y = 0`) exactly when no relation has a
/// zero side: rewrites between nonzero sides never reach `0`.
pub fn is_reduced(p: &MonoidPresentation) -> (bool, Option<usize>) {
    match p
        .relations
        .iter()
        .position(|(u, v)| u.iter().all(|&a| a == 0) || v.iter().all(|&a| a == 0))
    {
        Some(i) => (false, Some(i)),
        None => (true, None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atoms {
    /// Generators whose class is an atom.
    pub atoms: Vec<IndecId>,
    /// Some class search hit the norm bound.
    pub truncated: bool,
}

/// In a reduced monoid the class of a generator is an atom iff every
/// vector in its class has total 1. Non-reduced presentations report no
/// atoms.
pub fn atoms(p: &MonoidPresentation, bound: u32) -> Atoms {
    if !is_reduced(p).0 {
        return Atoms {
            atoms: Vec::new(),
            truncated: false,
        };
    }
    let mut out = Vec::new();
    let mut truncated = false;
    for i in 0..p.ngens() {
        let (class, cut) = class_of(p, &p.unit(i), bound);
        if class.iter().all(|w| w.iter().sum::<u32>() == 1) {
            truncated |= cut;
            out.push(p.generators[i]);
        }
    }
    Atoms {
        atoms: out,
        truncated,
    }
}

/// Whether the monoid is free on the classes of `sim`.
pub fn monoid_free_on_simples(p: &MonoidPresentation, sim: &[IndecId], bound: u32) -> Tri {
    let n = p.ngens();
    if sim.is_empty() {
        // free on nothing: every class must be 0
        let mut all = Tri::True;
        for i in 0..n {
            match monoid_equal(p, &p.unit(i), &vec![0; n], bound) {
                MonoidEq::Equal { .. } => {}
                MonoidEq::NotEqual => return Tri::False,
                MonoidEq::Unknown => all = Tri::Unknown,
            }
        }
        return all;
    }
    let sidx: Vec<usize> = sim
        .iter()
        .map(|s| p.generators.iter().position(|g| g == s).expect("simple is a generator"))
        .collect();
    // simple classes independent in K0 ⊗ Q
    let rows = p.rational_rows();
    let mut span = Span::of(n, &rows);
    for &i in &sidx {
        let e: Vec<Rational64> = (0..n)
            .map(|j| if j == i { Rational64::one() } else { Rational64::zero() })
            .collect();
        if !span.insert(&e) {
            return Tri::False;
        }
    }
    if span.dim() < n {
        // simples do not generate K0 ⊗ Q
        return Tri::False;
    }
    // decomposition φ of each generator into simples
    let mut phi: Vec<Option<Vec<u32>>> = vec![None; n];
    let mut verdict = Tri::True;
    for i in 0..n {
        let (class, _) = class_of(p, &p.unit(i), bound);
        phi[i] = class
            .into_iter()
            .find(|w| w.iter().enumerate().all(|(j, &a)| a == 0 || sidx.contains(&j)));
        if phi[i].is_none() {
            verdict = Tri::Unknown;
        }
    }
    if verdict == Tri::Unknown {
        return verdict;
    }
    let apply = |w: &[u32]| -> Vec<u32> {
        let mut out = vec![0; n];
        for (i, &a) in w.iter().enumerate() {
            for (j, &b) in phi[i].as_ref().unwrap().iter().enumerate() {
                out[j] += a * b;
            }
        }
        out
    };
    // φ is a monoid map M -> N^Sim splitting N^Sim -> M
    Tri::from(p.relations.iter().all(|(u, v)| apply(u) == apply(v)))
}

// ---------------------------------------------------------------------- K0

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K0Result {
    /// Nonzero diagonal of the Smith form of the relation matrix.
    pub invariant_factors: Vec<i64>,
    pub free_rank: usize,
    /// Rational coordinates of each simple class in `K0 ⊗ Q`.
    pub simple_images: Vec<(String, Vec<String>)>,
    pub basis_flag: bool,
}

impl K0Result {
    pub fn torsion(&self) -> Vec<i64> {
        self.invariant_factors.iter().copied().filter(|&d| d > 1).collect()
    }
}

pub fn k0(p: &MonoidPresentation, sim: &[IndecId], model: &CategoryModel) -> K0Result {
    let n = p.ngens();
    let rows = p.integer_rows();
    let diag = smith::invariant_factors(&rows, n);
    let free_rank = n - diag.len();
    let unit = |i: usize| -> Vec<Rational64> {
        (0..n)
            .map(|j| if j == i { Rational64::one() } else { Rational64::zero() })
            .collect()
    };
    let sidx: Vec<usize> = sim
        .iter()
        .map(|s| p.generators.iter().position(|g| g == s).expect("simple is a generator"))
        .collect();
    // quotient basis: simple classes first, so a basis shows as unit vectors
    let sub = Span::of(n, &p.rational_rows());
    let mut reps: Vec<Vec<Rational64>> = Vec::new();
    let mut grow = sub.clone();
    for i in sidx.iter().copied().chain(0..n) {
        let e = unit(i);
        if grow.insert(&e) {
            reps.push(e);
        }
    }
    let q = QuotientCoords::new(n, sub.basis(), &reps);
    let simple_images = sidx
        .iter()
        .map(|&i| {
            let c = q.coords(&unit(i)).expect("reps span the quotient");
            (
                model.name(p.generators[i]).to_string(),
                c.iter().map(|x| x.to_string()).collect(),
            )
        })
        .collect();
    let torsion_free = diag.iter().all(|&d| d == 1);
    let mut with_simples = rows.clone();
    for &i in &sidx {
        let mut e = vec![0i64; n];
        e[i] = 1;
        with_simples.push(e);
    }
    let gen_diag = smith::invariant_factors(&with_simples, n);
    let generate = gen_diag.len() == n && gen_diag.iter().all(|&d| d == 1);
    K0Result {
        invariant_factors: diag,
        free_rank,
        simple_images,
        basis_flag: torsion_free && generate && free_rank == sim.len(),
    }
}

// ------------------------------------------------------------------ series

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesVerdict {
    pub has_series: bool,
    pub lengths: BTreeSet<u32>,
    pub factor_multisets: BTreeSet<Vec<(String, u32)>>,
    pub jh_local: bool,
    pub truncated: bool,
}

fn verdict_from(summary: &filtration::Summary, model: &CategoryModel) -> SeriesVerdict {
    let lengths: BTreeSet<u32> = summary.shapes.iter().map(|(l, _)| *l).collect();
    let factor_multisets: BTreeSet<Vec<(String, u32)>> = summary
        .shapes
        .iter()
        .map(|(_, c)| c.iter().map(|&(i, k)| (model.name(i).to_string(), k)).collect())
        .collect();
    SeriesVerdict {
        has_series: !summary.shapes.is_empty(),
        jh_local: lengths.len() <= 1 && factor_multisets.len() <= 1,
        lengths,
        factor_multisets,
        truncated: summary.truncated,
    }
}

/// Filtrations of `m` by simple factors, up to length `cap`.
pub fn composition_series(
    m: &Obj,
    sim: &[IndecId],
    model: &CategoryModel,
    cap: u32,
) -> Result<SeriesVerdict> {
    let s = Summarizer::new(model, sim).summary(m, cap)?;
    Ok(verdict_from(&s, model))
}

/// `(jh, length)` over window objects up to total multiplicity `mult`.
pub fn jh_and_length_verdict(model: &CategoryModel, mult: u32) -> Result<(Tri, Tri)> {
    if zero_middled_witness(model)?.is_some() {
        // X -> 0 -> Y gives filtrations of every length, and no simples
        return Ok((Tri::False, Tri::False));
    }
    let sim = simples(model)?;
    let mut summ = Summarizer::new(model, &sim);
    let (mut length, mut unique) = (Tri::True, Tri::True);
    for m in model.window_objects(mult) {
        let v = verdict_from(&summ.summary(&m, 2 * m.total() + 4)?, model);
        if !v.has_series {
            length = length.and(if v.truncated { Tri::Unknown } else { Tri::False });
        } else if v.truncated {
            length = length.and(Tri::Unknown);
        }
        if !v.jh_local {
            unique = Tri::False;
        } else if v.truncated {
            unique = unique.and(Tri::Unknown);
        }
    }
    Ok((length.and(unique), length))
}

/// A composition series of `mid(ξ)` whose factors are those of `sa`
/// followed by those of `sc`.
pub fn merge_series(
    sa: &Filtration,
    sc: &Filtration,
    xi: &Extriangle,
    sim: &[IndecId],
    model: &CategoryModel,
) -> Result<Filtration> {
    if xi.c.is_zero() && xi.a == xi.mid {
        return Ok(sa.clone());
    }
    if xi.a.is_zero() && xi.c == xi.mid {
        return Ok(sc.clone());
    }
    let mut want: BTreeMap<IndecId, u32> = sa.factor_counts();
    for (k, v) in sc.factor_counts() {
        *want.entry(k).or_insert(0) += v;
    }
    let len = (sa.len() + sc.len()) as u32;
    let all = filtration::enumerate(model, &xi.mid, sim, len)?;
    all.filtrations
        .into_iter()
        .find(|f| f.len() as u32 == len && f.factor_counts() == want)
        .ok_or_else(|| {
            Error::Consistency(format!(
                "no composition series of {} with the merged factors",
                model.fmt_obj(&xi.mid)
            ))
        })
}

// ------------------------------------------------------------------ report

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub verdict_i: Tri,
    pub verdict_ii: Tri,
    pub verdict_iii: Tri,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonoidReport {
    pub relations: Vec<String>,
    pub reduced: bool,
    pub atoms: Vec<String>,
    pub free: Tri,
}

#[derive(Clone, Debug, Serialize)]
pub struct K0Report {
    pub rank: usize,
    pub invariant_factors: Vec<i64>,
    pub basis_flag: bool,
    pub simple_images: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrothReport {
    pub simples: Vec<String>,
    pub zero_simple_like: bool,
    pub zero_middled_witness: Option<String>,
    pub jh: Tri,
    pub length: Tri,
    pub monoid: MonoidReport,
    pub k0: K0Report,
    pub verdicts: Verdicts,
    pub agree: bool,
}

/// The full analysis, with the atom/simple agreement enforced on models
/// with simple-like zero.
pub fn groth_report(model: &CategoryModel) -> Result<GrothReport> {
    let zsl = zero_simple_like(model)?;
    let sim = simples(model)?;
    let p = monoid_presentation(model, DEFAULT_ENDS_MULT)?;
    let (reduced, _) = is_reduced(&p);
    let at = atoms(&p, DEFAULT_NORM_BOUND);
    if zsl && at.atoms != sim {
        return Err(Error::Consistency(format!(
            "atoms {:?} differ from simples {:?}",
            at.atoms, sim
        )));
    }
    let free = monoid_free_on_simples(&p, &sim, DEFAULT_NORM_BOUND);
    let k = k0(&p, &sim, model);
    let (jh, length) = jh_and_length_verdict(model, DEFAULT_WINDOW_MULT)?;
    let v1 = jh.and(length);
    let v3 = Tri::from(k.basis_flag);
    let agree = v1 != Tri::Unknown && v1 == free && free == v3;
    let names = |v: &[IndecId]| v.iter().map(|&i| model.name(i).to_string()).collect();
    Ok(GrothReport {
        simples: names(&sim),
        zero_simple_like: zsl,
        zero_middled_witness: zero_middled_witness(model)?.map(|e| model.fmt_ext(&e)),
        jh,
        length,
        monoid: MonoidReport {
            relations: (0..p.relations.len()).map(|r| p.fmt_relation(r, model)).collect(),
            reduced,
            atoms: names(&at.atoms),
            free,
        },
        k0: K0Report {
            rank: k.free_rank,
            invariant_factors: k.invariant_factors.clone(),
            basis_flag: k.basis_flag,
            simple_images: k.simple_images.clone(),
        },
        verdicts: Verdicts {
            verdict_i: v1,
            verdict_ii: free,
            verdict_iii: v3,
            agree,
        },
        agree,
    })
}
