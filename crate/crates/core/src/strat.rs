//! Stratifying systems: verification, filtered closure, filtrations,
//! projective systems and the multiplicity-matrix method.

use std::collections::BTreeSet;

use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{self, Filtration, FiltrationSet};
use crate::linalg::Matrix;
use crate::model::{star, CategoryModel, Extriangle};
use crate::obj::{objects_over, IndecId, Obj};

/// Default total-multiplicity bound for closure computations.
pub const DEFAULT_CLOSURE_MULT: u32 = 2;

/// `Φ = (Φ_1, ..., Φ_n)` with optional `Q` and extriangles `(K_i, Q_i, Φ_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratSystem {
    pub phi: Vec<IndecId>,
    pub q: Option<Vec<Obj>>,
    pub etas: Option<Vec<Extriangle>>,
}

impl StratSystem {
    pub fn new(phi: Vec<IndecId>) -> Self {
        StratSystem {
            phi,
            q: None,
            etas: None,
        }
    }

    pub fn with_q(mut self, q: Vec<Obj>) -> Self {
        assert_eq!(q.len(), self.phi.len(), "one Q_i per Φ_i");
        self.q = Some(q);
        self
    }

    /// Position of `id` in `Φ`, 1-based.
    pub fn index_of(&self, id: IndecId) -> Option<usize> {
        self.phi.iter().position(|&p| p == id).map(|i| i + 1)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    S1,
    S2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StratVerdict {
    pub pass: bool,
    /// First violation `(j, i, axiom)`, 1-based.
    pub violation: Option<(usize, usize, Axiom)>,
}

/// (S1) `Hom(Φ_j, Φ_i) = 0` for `j > i`; (S2) `E(Φ_j, Φ_i) = 0` for `j >= i`.
pub fn check_stratifying(phi: &[IndecId], model: &CategoryModel) -> Result<StratVerdict> {
    for &p in phi {
        if p.index() >= model.len() {
            return Err(Error::UnknownIndec(p.to_string()));
        }
    }
    for i in 0..phi.len() {
        for j in i..phi.len() {
            let (pi, pj) = (Obj::indec(phi[i]), Obj::indec(phi[j]));
            if j > i && phi[i] == phi[j] {
                return Err(Error::Consistency(format!(
                    "Φ lists {} twice",
                    model.name(phi[i])
                )));
            }
            let axiom = if j > i && model.hom_dim(&pj, &pi) != 0 {
                Some(Axiom::S1)
            } else if model.ext_dim(&pj, &pi) != 0 {
                Some(Axiom::S2)
            } else {
                None
            };
            if let Some(ax) = axiom {
                return Ok(StratVerdict {
                    pass: false,
                    violation: Some((j + 1, i + 1, ax)),
                });
            }
        }
    }
    Ok(StratVerdict {
        pass: true,
        violation: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    /// Filtered objects up to the multiplicity bound, zero included.
    pub objects: BTreeSet<Obj>,
    /// Indecomposable members.
    pub indecs: Vec<IndecId>,
    pub via_star_formula: bool,
}

impl Closure {
    /// Membership by summands (the closure is additive and summand-closed).
    pub fn contains(&self, x: &Obj) -> bool {
        x.support().all(|i| self.indecs.contains(&i))
    }
}

fn add_set(id: IndecId, mult: u32) -> BTreeSet<Obj> {
    (0..=mult).map(|k| Obj::from_pairs([(id, k)])).collect()
}

fn bounded(s: BTreeSet<Obj>, mult: u32) -> BTreeSet<Obj> {
    s.into_iter().filter(|o| o.total() <= mult).collect()
}

fn finish(objects: BTreeSet<Obj>, via_star_formula: bool) -> Closure {
    let indecs: BTreeSet<IndecId> = objects.iter().filter_map(Obj::single).collect();
    Closure {
        objects,
        indecs: indecs.into_iter().collect(),
        via_star_formula,
    }
}

/// `F(Φ)` inside the window up to total multiplicity `mult`: by the iterated
/// star product `add Φ_n ∗ ... ∗ add Φ_1` when Φ is stratifying, otherwise by
/// closing `add Φ` under extensions.
pub fn filtered_closure(phi: &[IndecId], model: &CategoryModel, mult: u32) -> Result<Closure> {
    if phi.is_empty() {
        return Ok(finish([Obj::zero()].into(), true));
    }
    if check_stratifying(phi, model)?.pass {
        let c = star_closure(phi, model, mult)?;
        // summand closure
        for o in &c.objects {
            if !o.support().all(|i| c.indecs.contains(&i)) {
                return Err(Error::Consistency(format!(
                    "filtered object {} has a summand outside F(Φ)",
                    model.fmt_obj(o)
                )));
            }
        }
        Ok(c)
    } else {
        fixed_point_closure(phi, model, mult)
    }
}

pub fn star_closure(phi: &[IndecId], model: &CategoryModel, mult: u32) -> Result<Closure> {
    let mut acc = add_set(phi[0], mult);
    for &p in &phi[1..] {
        acc = bounded(star(&add_set(p, mult), &acc, model)?, mult);
    }
    Ok(finish(acc, true))
}

pub fn fixed_point_closure(phi: &[IndecId], model: &CategoryModel, mult: u32) -> Result<Closure> {
    let mut acc: BTreeSet<Obj> = [Obj::zero()].into();
    acc.extend(objects_over(phi, mult));
    for _ in 0..64 {
        let next = bounded(star(&acc, &acc, model)?, mult);
        if next.is_subset(&acc) {
            return Ok(finish(acc, false));
        }
        acc.extend(next);
    }
    Err(Error::NonTermination("filtered closure".into()))
}

/// A filtration with the Φ-index (1-based) of each factor.
pub fn phi_indices(f: &Filtration, phi: &[IndecId]) -> Vec<usize> {
    f.factors
        .iter()
        .map(|x| phi.iter().position(|p| p == x).map(|i| i + 1).unwrap_or(0))
        .collect()
}

/// Default filtration length cap: twice the total multiplicity plus four.
pub fn default_cap(m: &Obj) -> u32 {
    2 * m.total() + 4
}

/// Φ-filtrations of `m` whose intermediate objects lie in `F(Φ)`.
pub fn enumerate_filtrations(
    m: &Obj,
    phi: &[IndecId],
    model: &CategoryModel,
    cap: u32,
) -> Result<FiltrationSet> {
    let within = filtered_closure(phi, model, DEFAULT_CLOSURE_MULT)?.indecs;
    filtration::enumerate_in(model, m, phi, Some(&within), cap)
}

fn non_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

/// A filtration of the same object with the same factors whose Φ-indices
/// are non-increasing.
pub fn reorder_filtration(
    f: &Filtration,
    phi: &[IndecId],
    model: &CategoryModel,
) -> Result<Filtration> {
    if non_increasing(&phi_indices(f, phi)) {
        return Ok(f.clone());
    }
    let want = f.factor_counts();
    let all = enumerate_filtrations(&f.target(), phi, model, f.len() as u32)?;
    all.filtrations
        .into_iter()
        .find(|g| {
            g.len() == f.len()
                && g.factor_counts() == want
                && non_increasing(&phi_indices(g, phi))
        })
        .ok_or_else(|| {
            Error::Consistency(format!(
                "no sorted filtration of {} with the same factors",
                model.fmt_obj(&f.target())
            ))
        })
}

/// Minimal projective system for a stratifying `Φ`, built from universal
/// extensions and right-minimal reduction.
pub fn build_projective_system(phi: &[IndecId], model: &CategoryModel) -> Result<StratSystem> {
    let v = check_stratifying(phi, model)?;
    if !v.pass {
        return Err(Error::Consistency(format!(
            "Φ is not stratifying: {:?}",
            v.violation
        )));
    }
    let mut qs = Vec::new();
    let mut etas = Vec::new();
    for (i, &p) in phi.iter().enumerate() {
        let ap = model.approximation(p, phi).map_err(|e| match e {
            Error::Unsupported(m) => Error::AnnotationMissing(m),
            e => e,
        })?;
        let tail = filtered_closure(&phi[i + 1..], model, DEFAULT_CLOSURE_MULT)?;
        if !tail.contains(&ap.k) {
            return Err(Error::Consistency(format!(
                "K_{} = {} is not filtered by Φ_j, j > {}",
                i + 1,
                model.fmt_obj(&ap.k),
                i + 1
            )));
        }
        qs.push(ap.q);
        etas.push(ap.eta);
    }
    Ok(StratSystem {
        phi: phi.to_vec(),
        q: Some(qs),
        etas: Some(etas),
    })
}

/// An extriangle `(K, Q_i, Φ_i)`, preferring `K` filtered by the tail.
fn find_eta(
    model: &CategoryModel,
    q: &Obj,
    target: IndecId,
    tail: &Closure,
) -> Result<Option<Extriangle>> {
    let x = Obj::indec(target);
    let list = model.ending_at(q, &x, q.total() + 2)?;
    Ok(list
        .iter()
        .find(|e| tail.contains(&e.a))
        .or_else(|| list.first())
        .cloned())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectiveReport {
    pub s1s2: bool,
    /// `E(Q_i, Φ_j) = 0` for all `i, j`.
    pub ps1: bool,
    /// `E(Q_i, X) = 0` for every indecomposable `X` of `F(Φ)`.
    pub relatively_projective: Vec<bool>,
    /// `K_i` filtered by `Φ_j`, `j > i`.
    pub ps2: Vec<bool>,
    pub minimal: Vec<bool>,
    /// `K_n = 0`, so `q_n` is an isomorphism.
    pub qn_iso: bool,
    pub is_minimal_projective_system: bool,
}

pub fn resolve_etas(sys: &StratSystem, model: &CategoryModel) -> Result<Vec<Extriangle>> {
    if let Some(e) = &sys.etas {
        return Ok(e.clone());
    }
    let q = sys
        .q
        .as_ref()
        .ok_or_else(|| Error::Consistency("projective system without Q".into()))?;
    let mut out = Vec::new();
    for (i, (&p, qi)) in sys.phi.iter().zip(q).enumerate() {
        let tail = filtered_closure(&sys.phi[i + 1..], model, DEFAULT_CLOSURE_MULT)?;
        let eta = find_eta(model, qi, p, &tail)?.ok_or_else(|| {
            Error::Consistency(format!(
                "no extriangle ending in Φ_{} with middle {}",
                i + 1,
                model.fmt_obj(qi)
            ))
        })?;
        out.push(eta);
    }
    Ok(out)
}

pub fn check_projective_system(sys: &StratSystem, model: &CategoryModel) -> Result<ProjectiveReport> {
    let q = sys
        .q
        .as_ref()
        .ok_or_else(|| Error::Consistency("projective system without Q".into()))?;
    let s1s2 = check_stratifying(&sys.phi, model)?.pass;
    let etas = resolve_etas(sys, model)?;
    let full = filtered_closure(&sys.phi, model, DEFAULT_CLOSURE_MULT)?;
    let ps1 = q.iter().all(|qi| {
        sys.phi
            .iter()
            .all(|&p| model.ext_dim(qi, &Obj::indec(p)) == 0)
    });
    let relatively_projective = q
        .iter()
        .map(|qi| {
            full.indecs
                .iter()
                .all(|&x| model.ext_dim(qi, &Obj::indec(x)) == 0)
        })
        .collect();
    let mut ps2 = Vec::new();
    let mut minimal = Vec::new();
    for (i, ((&p, qi), eta)) in sys.phi.iter().zip(q).zip(&etas).enumerate() {
        let tail = filtered_closure(&sys.phi[i + 1..], model, DEFAULT_CLOSURE_MULT)?;
        ps2.push(eta.mid == *qi && eta.c == Obj::indec(p) && tail.contains(&eta.a));
        let (q2, _) = model.right_minimal_reduce(qi, p, eta)?;
        minimal.push(q2 == *qi);
    }
    let qn_iso = etas.last().is_none_or(|e| e.a.is_zero());
    let ok = s1s2 && ps1 && ps2.iter().all(|&b| b) && minimal.iter().all(|&b| b);
    Ok(ProjectiveReport {
        s1s2,
        ps1,
        relatively_projective,
        ps2,
        minimal,
        qn_iso,
        is_minimal_projective_system: ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeftExactReport {
    pub left_exact: Vec<bool>,
    pub q_nonzero: Vec<bool>,
    /// For each failing `i`, the first extriangle with nonzero defect.
    pub witnesses: Vec<Option<String>>,
}

/// Left exactness of `Hom(Q_i, -)` on every non-split extriangle of `F(Φ)`
/// with indecomposable ends.
pub fn check_left_exact(sys: &StratSystem, model: &CategoryModel) -> Result<LeftExactReport> {
    let q = sys
        .q
        .as_ref()
        .ok_or_else(|| Error::Consistency("projective system without Q".into()))?;
    let etas = resolve_etas(sys, model)?;
    let full = filtered_closure(&sys.phi, model, DEFAULT_CLOSURE_MULT)?;
    let inside: Vec<Extriangle> = model
        .nonsplit_extriangles(1)?
        .into_iter()
        .filter(|e| full.contains(&e.a) && full.contains(&e.mid) && full.contains(&e.c))
        .collect();
    let mut left_exact = Vec::new();
    let mut witnesses = Vec::new();
    for qi in q {
        let mut hit = None;
        for e in &inside {
            if model.left_exact_defect(qi, e)? > 0 {
                hit = Some(model.fmt_ext(e));
                break;
            }
        }
        left_exact.push(hit.is_none());
        witnesses.push(hit);
    }
    let q_nonzero = etas
        .iter()
        .map(|e| model.deflation_is_zero(e).map(|z| !z))
        .collect::<Result<_>>()?;
    Ok(LeftExactReport {
        left_exact,
        q_nonzero,
        witnesses,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityData {
    /// `d[i][j] = dim Hom(Q_i, Φ_j)`.
    pub d: Vec<Vec<u32>>,
    pub upper_triangular: bool,
    pub nonzero_diagonal: bool,
    /// Some entry below the diagonal is nonzero.
    pub lower_nonzero: bool,
}

pub fn multiplicity_matrix(sys: &StratSystem, model: &CategoryModel) -> Result<MultiplicityData> {
    let q = sys
        .q
        .as_ref()
        .ok_or_else(|| Error::Consistency("projective system without Q".into()))?;
    let d: Vec<Vec<u32>> = q
        .iter()
        .map(|qi| {
            sys.phi
                .iter()
                .map(|&p| model.hom_dim(qi, &Obj::indec(p)))
                .collect()
        })
        .collect();
    let n = d.len();
    let lower_nonzero = (0..n).any(|i| (0..i).any(|j| d[i][j] != 0));
    Ok(MultiplicityData {
        upper_triangular: !lower_nonzero,
        nonzero_diagonal: (0..n).all(|i| d[i][i] != 0),
        lower_nonzero,
        d,
    })
}

/// `m = D^{-1} c` with `c_i = dim Hom(Q_i, M)`, solved exactly.
pub fn multiplicities(m: &Obj, sys: &StratSystem, model: &CategoryModel) -> Result<Vec<u32>> {
    let data = multiplicity_matrix(sys, model)?;
    let q = sys.q.as_ref().expect("checked by multiplicity_matrix");
    let n = data.d.len();
    let rows: Vec<Vec<Rational64>> = data
        .d
        .iter()
        .map(|r| r.iter().map(|&x| Rational64::from_integer(x as i64)).collect())
        .collect();
    let c: Vec<Rational64> = q
        .iter()
        .map(|qi| Rational64::from_integer(model.hom_dim(qi, m) as i64))
        .collect();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dm = Matrix::from_rows(&rows);
    if dm.rank() < n {
        return Err(Error::SingularMatrix);
    }
    let sol = dm.solve(&c).ok_or(Error::SingularMatrix)?;
    sol.iter()
        .map(|x| {
            if x.is_integer() && *x >= Rational64::zero() {
                Ok(x.to_integer() as u32)
            } else {
                Err(Error::NonIntegralSolution(format!(
                    "multiplicity {x} for {}",
                    model.fmt_obj(m)
                )))
            }
        })
        .collect()
}

/// Factor counts of `f` as a vector indexed by Φ.
pub fn factor_vector(f: &Filtration, phi: &[IndecId]) -> Vec<u32> {
    let mut v = vec![0; phi.len()];
    for i in phi_indices(f, phi) {
        if i > 0 {
            v[i - 1] += 1;
        }
    }
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct StratReport {
    pub phi: Vec<String>,
    pub q: Option<Vec<String>>,
    pub s1s2: StratVerdict,
    pub filtered: Vec<String>,
    pub projective: Option<ProjectiveReport>,
    pub left_exact: Option<Vec<bool>>,
    pub q_nonzero: Option<Vec<bool>>,
    #[serde(rename = "D")]
    pub d: Option<Vec<Vec<u32>>>,
    pub verdict: String,
}

/// Full report for `Φ` with an optional `Q` (constructed when absent and
/// `construct` is set).
pub fn strat_report(
    phi: &[IndecId],
    q: Option<Vec<Obj>>,
    construct: bool,
    model: &CategoryModel,
) -> Result<(StratReport, Option<StratSystem>)> {
    let s1s2 = check_stratifying(phi, model)?;
    let closure = filtered_closure(phi, model, DEFAULT_CLOSURE_MULT)?;
    let sys = match q {
        Some(q) => Some(StratSystem::new(phi.to_vec()).with_q(q)),
        None if construct && s1s2.pass => Some(build_projective_system(phi, model)?),
        None => None,
    };
    let mut report = StratReport {
        phi: phi.iter().map(|&p| model.name(p).to_string()).collect(),
        q: None,
        s1s2: s1s2.clone(),
        filtered: closure.indecs.iter().map(|&i| model.name(i).to_string()).collect(),
        projective: None,
        left_exact: None,
        q_nonzero: None,
        d: None,
        verdict: if s1s2.pass {
            "stratifying".into()
        } else {
            "not stratifying".into()
        },
    };
    if let Some(sys) = &sys {
        let proj = check_projective_system(sys, model)?;
        let le = check_left_exact(sys, model)?;
        let md = multiplicity_matrix(sys, model)?;
        report.q = sys
            .q
            .as_ref()
            .map(|q| q.iter().map(|o| model.fmt_obj(o)).collect());
        report.verdict = if proj.is_minimal_projective_system {
            "minimal projective stratifying system".into()
        } else {
            "not a minimal projective system".into()
        };
        report.projective = Some(proj);
        report.left_exact = Some(le.left_exact);
        report.q_nonzero = Some(le.q_nonzero);
        report.d = Some(md.d);
    }
    Ok((report, sys))
}

/// `D m = c`.
pub fn satisfies_matrix_equation(d: &[Vec<u32>], m: &[u32], c: &[u32]) -> bool {
    d.iter().zip(c).all(|(row, &ci)| {
        row.iter().zip(m).map(|(a, b)| a * b).sum::<u32>() == ci
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::build_window;

    fn a2() -> CategoryModel {
        build_window(2, 0..=0, "a2", 2).unwrap()
    }

    #[test]
    fn simples_of_a2_stratify_in_one_order() {
        let m = a2();
        let (s1, p2) = (m.id_of("I1").unwrap(), m.id_of("P2").unwrap());
        assert!(check_stratifying(&[s1, p2], &m).unwrap().pass);
        let sys = build_projective_system(&[s1, p2], &m).unwrap();
        assert_eq!(sys.q.as_ref().unwrap()[0], m.parse_obj("P1").unwrap());
        let md = multiplicity_matrix(&sys, &m).unwrap();
        assert!(md.upper_triangular && md.nonzero_diagonal);
        let x = m.parse_obj("P1+I1").unwrap();
        assert_eq!(multiplicities(&x, &sys, &m).unwrap(), [2, 1]);
    }

    #[test]
    fn closure_of_the_simples_is_everything() {
        let m = a2();
        let phi = [m.id_of("I1").unwrap(), m.id_of("P2").unwrap()];
        let c = filtered_closure(&phi, &m, 2).unwrap();
        assert_eq!(c.indecs.len(), 3);
        assert!(c.contains(&m.parse_obj("P1+P1").unwrap()));
    }

    #[test]
    fn helpers() {
        assert_eq!(default_cap(&Obj::from_counts(&[1, 2])), 10);
        assert!(satisfies_matrix_equation(&[vec![1, 1], vec![0, 1]], &[1, 2], &[3, 2]));
        assert!(!satisfies_matrix_equation(&[vec![1, 0]], &[1, 2], &[3]));
        let f = Filtration { steps: Vec::new(), factors: vec![IndecId(1), IndecId(0), IndecId(1)] };
        assert_eq!(phi_indices(&f, &[IndecId(0), IndecId(1)]), [2, 1, 2]);
        assert_eq!(factor_vector(&f, &[IndecId(0), IndecId(1)]), [1, 2]);
    }
}
