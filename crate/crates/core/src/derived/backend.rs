//! The derived-category engine behind windows of D^b(mod kA_n).

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FiniteField, Fp};
use crate::linalg::Matrix;
use crate::model::{
    dedup_by_triple, Approximation, Backend, CategoryModel, Extriangle, Meta, SPLIT,
};
use crate::obj::{IndecId, Obj};

use super::complex::{
    postcompose_rank, precompose_rank, realize_deflation, realize_extension, ChainMap, HomSpace,
    ProjComplex, Triangle,
};
use super::interval::{catalog, Interval};

/// Default bound on the number of scalar orbits enumerated per Hom space.
pub const DEFAULT_ORBIT_CAP: u64 = 64;

pub struct DerivedBackend<F> {
    n: usize,
    intervals: Vec<Interval>,
    index: HashMap<Interval, IndecId>,
    std: Vec<ProjComplex<F>>,
    orbit_cap: u64,
}

impl<F: FiniteField> DerivedBackend<F> {
    pub fn new(n: usize, intervals: Vec<Interval>) -> Self {
        let index = intervals
            .iter()
            .enumerate()
            .map(|(i, &iv)| (iv, IndecId(i as u32)))
            .collect();
        let std = intervals.iter().map(|iv| iv.complex(n)).collect();
        DerivedBackend {
            n,
            intervals,
            index,
            std,
            orbit_cap: DEFAULT_ORBIT_CAP,
        }
    }

    pub fn with_orbit_cap(mut self, cap: u64) -> Self {
        self.orbit_cap = cap;
        self
    }

    pub fn vertices(&self) -> usize {
        self.n
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn id_of(&self, iv: &Interval) -> Option<IndecId> {
        self.index.get(iv).copied()
    }

    /// Direct sum of the standard complexes of the summands, in canonical
    /// summand order.
    pub fn complex_of(&self, x: &Obj) -> ProjComplex<F> {
        x.summands()
            .iter()
            .fold(ProjComplex::zero(self.n), |acc, id| {
                acc.direct_sum(&self.std[id.index()])
            })
    }

    /// Krull-Schmidt decomposition of a complex inside the window.
    pub fn obj_of(&self, x: &ProjComplex<F>) -> Result<Obj> {
        let mut pairs = Vec::new();
        for (a, b, k, m) in x.decompose() {
            let iv = Interval::new(a as u8, b as u8, k);
            let id = self.index.get(&iv).ok_or_else(|| {
                Error::WindowOverflow(format!("{} ({iv})", iv.name(self.n)))
            })?;
            pairs.push((*id, m));
        }
        Ok(Obj::from_pairs(pairs))
    }

    fn try_obj_of(&self, x: &ProjComplex<F>) -> Option<Obj> {
        self.obj_of(x).ok()
    }

    pub fn hom_space(&self, x: &Obj, y: &Obj) -> HomSpace<F> {
        HomSpace::new(&self.complex_of(x), &self.complex_of(y))
    }

    pub fn hom_dim_indec(&self, x: IndecId, y: IndecId) -> u32 {
        HomSpace::new(&self.std[x.index()], &self.std[y.index()]).dim() as u32
    }

    /// `dim E(c, a) = dim Hom(c, a[1])`.
    pub fn ext_dim_indec(&self, c: IndecId, a: IndecId) -> u32 {
        HomSpace::new(&self.std[c.index()], &self.std[a.index()].shift(1)).dim() as u32
    }

    /// Representatives of the scalar orbits of `F^dim`: zero, then the
    /// vectors with leading coefficient 1, lexicographically.
    fn orbits(&self, dim: usize, what: &str) -> Result<Vec<Vec<F>>> {
        let p = F::CHARACTERISTIC as u64;
        let needed = if dim >= 40 {
            u64::MAX
        } else {
            (p.pow(dim as u32) - 1) / (p - 1) + 1
        };
        if needed > self.orbit_cap {
            return Err(Error::EnumerationCapExceeded {
                what: what.to_string(),
                needed,
                cap: self.orbit_cap,
            });
        }
        let mut out = vec![vec![F::zero(); dim]];
        for lead in (0..dim).rev() {
            let free = dim - lead - 1;
            for code in 0..p.pow(free as u32) {
                let mut v = vec![F::zero(); dim];
                v[lead] = F::one();
                let mut c = code;
                for slot in (lead + 1..dim).rev() {
                    v[slot] = F::from_u64(c % p);
                    c /= p;
                }
                out.push(v);
            }
        }
        Ok(out)
    }

    fn encode(tag: &str, coords: &[F]) -> String {
        let body: Vec<String> = coords.iter().map(|x| x.to_u32().to_string()).collect();
        format!("{tag}:{}", body.join(","))
    }

    fn decode(s: &str) -> Result<Vec<F>> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|t| {
                t.parse::<u64>()
                    .map(F::from_u64)
                    .map_err(|_| Error::Schema(format!("bad extension coordinate '{t}'")))
            })
            .collect()
    }

    /// Rebuilds the complexes and maps of a record produced by this backend.
    pub fn realize(&self, e: &Extriangle) -> Result<Triangle<F>> {
        let bad = || Error::Schema(format!("unrecognised ext_id '{}'", e.ext_id));
        if e.ext_id == SPLIT {
            let (c, a) = (self.complex_of(&e.c), self.complex_of(&e.a));
            let zero = ChainMap::zero(&c, &a.shift(1));
            return Ok(realize_extension(&c, &a, &zero));
        }
        let (tag, body) = e.ext_id.split_once(':').ok_or_else(bad)?;
        let coords = Self::decode(body)?;
        match tag {
            "d" => {
                let (c, a) = (self.complex_of(&e.c), self.complex_of(&e.a));
                let hs = HomSpace::new(&c, &a.shift(1));
                if hs.dim() != coords.len() {
                    return Err(bad());
                }
                Ok(realize_extension(&c, &a, &hs.element(&coords)))
            }
            "q" => {
                let (m, x) = (self.complex_of(&e.mid), self.complex_of(&e.c));
                let hs = HomSpace::new(&m, &x);
                if hs.dim() != coords.len() {
                    return Err(bad());
                }
                Ok(realize_deflation(&m, &x, &hs.element(&coords)))
            }
            _ => Err(bad()),
        }
    }

    /// Number of copies of each indecomposable `X` of `q_obj` that split off
    /// the middle term of `tri` inside the kernel of its deflation.
    fn strip_counts(&self, tri: &Triangle<F>, q_obj: &Obj) -> Vec<(IndecId, u32)> {
        let mut out = Vec::new();
        for (x, mult) in q_obj.iter() {
            let xc = &self.std[x.index()];
            let into_q = HomSpace::new(xc, &tri.b);
            let into_t = HomSpace::new(xc, &tri.c);
            let from_q = HomSpace::new(&tri.b, xc);
            let end = HomSpace::new(xc, xc);
            if into_q.dim() == 0 || from_q.dim() == 0 {
                continue;
            }
            let images: Vec<Vec<F>> = into_q
                .basis()
                .iter()
                .map(|s| into_t.coordinates(&s.then(&tri.deflation, xc, &tri.b, &tri.c)))
                .collect();
            let kernel: Vec<Vec<F>> = if into_t.dim() == 0 {
                (0..into_q.dim())
                    .map(|i| {
                        let mut v = vec![F::zero(); into_q.dim()];
                        v[i] = F::one();
                        v
                    })
                    .collect()
            } else {
                Matrix::from_cols(into_t.dim(), &images).kernel()
            };
            if kernel.is_empty() {
                continue;
            }
            let s_basis = into_q.basis();
            let pi_basis = from_q.basis();
            // pairing in End(X) = k
            let mut g = Matrix::zeros(into_q.dim(), from_q.dim());
            for (i, s) in s_basis.iter().enumerate() {
                for (j, p) in pi_basis.iter().enumerate() {
                    let c = end.coordinates(&s.then(p, xc, &tri.b, xc));
                    g[(i, j)] = c.first().copied().unwrap_or_else(F::zero);
                }
            }
            let k = Matrix::from_rows(&kernel);
            let strip = (&k * &g).rank() as u32;
            if strip > 0 {
                out.push((x, strip.min(mult)));
            }
        }
        out
    }

    /// First extriangle `(k, q, target)` found by deflation enumeration.
    fn find_eta(&self, q: &Obj, target: IndecId, k: &Obj) -> Result<Extriangle> {
        self.ending_at(q, &Obj::indec(target), 0)?
            .into_iter()
            .find(|e| e.a == *k)
            .ok_or_else(|| {
                Error::Consistency(format!(
                    "no deflation {q:?} -> {} with kernel end {k:?}",
                    self.intervals[target.index()].name(self.n)
                ))
            })
    }
}

impl<F: FiniteField> Backend for DerivedBackend<F> {
    fn kind(&self) -> &'static str {
        "derived"
    }

    fn middle_terms(&self, c: &Obj, a: &Obj) -> Result<Vec<Extriangle>> {
        let (cc, ac) = (self.complex_of(c), self.complex_of(a));
        let hs = HomSpace::new(&cc, &ac.shift(1));
        let mut out = Vec::new();
        for delta in self.orbits(hs.dim(), "extensions")? {
            let tri = realize_extension(&cc, &ac, &hs.element(&delta));
            let mid = self.obj_of(&tri.b)?;
            let ext_id = if delta.iter().all(|x| x.is_zero()) {
                SPLIT.to_string()
            } else {
                Self::encode("d", &delta)
            };
            out.push(Extriangle {
                a: a.clone(),
                mid,
                c: c.clone(),
                ext_id,
                annotations: None,
            });
        }
        Ok(dedup_by_triple(out))
    }

    fn ending_at(&self, mid: &Obj, c: &Obj, _max_k: u32) -> Result<Vec<Extriangle>> {
        let (mc, xc) = (self.complex_of(mid), self.complex_of(c));
        let hs = HomSpace::new(&mc, &xc);
        let mut out = Vec::new();
        for coords in self.orbits(hs.dim(), "deflations")? {
            let tri = realize_deflation(&mc, &xc, &hs.element(&coords));
            let Some(k) = self.try_obj_of(&tri.a) else {
                continue;
            };
            let split = HomSpace::new(&xc, &tri.a.shift(1)).is_null(&tri.connecting);
            out.push(Extriangle {
                a: k,
                mid: mid.clone(),
                c: c.clone(),
                ext_id: if split {
                    SPLIT.to_string()
                } else {
                    Self::encode("q", &coords)
                },
                annotations: None,
            });
        }
        Ok(dedup_by_triple(out))
    }

    fn universal_extension(&self, c: &Obj, a: IndecId) -> Result<Extriangle> {
        let cc = self.complex_of(c);
        let ac = &self.std[a.index()];
        let single = HomSpace::new(&cc, &ac.shift(1));
        let l = single.dim();
        if l == 0 {
            return Err(Error::NoExtension {
                c: format!("{c:?}"),
                a: self.intervals[a.index()].name(self.n),
            });
        }
        let a_obj = Obj::from_pairs([(a, l as u32)]);
        let al = self.complex_of(&a_obj);
        let al1 = al.shift(1);
        let basis = single.basis();
        let a1 = ac.shift(1);
        let delta = ChainMap::from_fn(&cc, &al1, |d| {
            let cols = cc.term(d).len();
            let rows = a1.term(d).len();
            let mut m = Matrix::zeros(rows * l, cols);
            for (k, b) in basis.iter().enumerate() {
                m.set_block(k * rows, 0, &b.comp(d, rows, cols));
            }
            m
        });
        let tri = realize_extension(&cc, &al, &delta);
        let mid = self.obj_of(&tri.b)?;

        // postcomposition Hom(A^l, A) -> E(C, A) must be onto
        let proj = HomSpace::new(&al, ac);
        let images: Vec<Vec<F>> = proj
            .basis()
            .iter()
            .map(|g| single.coordinates(&delta.then(&g.shift(1), &cc, &al1, &a1)))
            .collect();
        if Matrix::from_cols(l, &images).rank() != l {
            return Err(Error::Consistency(
                "universal extension is not surjective on E(C, A)".into(),
            ));
        }
        if HomSpace::new(ac, &a1).dim() == 0 && HomSpace::new(&tri.b, &a1).dim() != 0 {
            return Err(Error::Consistency(
                "E(A, A) = 0 but E(B, A) != 0 for the universal extension".into(),
            ));
        }
        let coords = HomSpace::new(&cc, &al1).coordinates(&delta);
        Ok(Extriangle {
            a: a_obj,
            mid,
            c: c.clone(),
            ext_id: Self::encode("d", &coords),
            annotations: None,
        })
    }

    fn left_exact_defect(&self, q: &Obj, xi: &Extriangle) -> Result<u32> {
        let tri = self.realize(xi)?;
        let qc = self.complex_of(q);
        let to_a = HomSpace::new(&qc, &tri.a);
        let to_b = HomSpace::new(&qc, &tri.b);
        Ok((to_a.dim() - postcompose_rank(&to_a, &to_b, &tri.inflation)) as u32)
    }

    fn epi_witness(&self, xi: &Extriangle, window: &[IndecId]) -> Result<Option<IndecId>> {
        let tri = self.realize(xi)?;
        for &t in window {
            let tc = &self.std[t.index()];
            let from_c = HomSpace::new(&tri.c, tc);
            let from_b = HomSpace::new(&tri.b, tc);
            if precompose_rank(&from_c, &from_b, &tri.deflation) < from_c.dim() {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    fn right_minimal_reduce(
        &self,
        q: &Obj,
        target: IndecId,
        xi: &Extriangle,
    ) -> Result<(Obj, Extriangle)> {
        if xi.mid != *q || xi.c != Obj::indec(target) {
            return Err(Error::Consistency(
                "right_minimal_reduce expects an extriangle (K, Q, target)".into(),
            ));
        }
        let tri = self.realize(xi)?;
        let strips = self.strip_counts(&tri, q);
        if strips.is_empty() {
            return Ok((q.clone(), xi.clone()));
        }
        let removed = Obj::from_pairs(strips);
        let q2 = q.minus(&removed).expect("strip within Q");
        let k2 = xi
            .a
            .minus(&removed)
            .ok_or_else(|| Error::Consistency("stripped summand missing from kernel end".into()))?;
        let eta = self.find_eta(&q2, target, &k2)?;
        Ok((q2, eta))
    }

    fn connecting_rank(&self, q: &Obj, xi: &Extriangle) -> Result<Option<u32>> {
        let tri = self.realize(xi)?;
        let qc = self.complex_of(q);
        let to_c = HomSpace::new(&qc, &tri.c);
        let to_a1 = HomSpace::new(&qc, &tri.a.shift(1));
        Ok(Some(postcompose_rank(&to_c, &to_a1, &tri.connecting) as u32))
    }

    fn deflation_is_zero(&self, xi: &Extriangle) -> Result<bool> {
        let tri = self.realize(xi)?;
        Ok(HomSpace::new(&tri.b, &tri.c).is_null(&tri.deflation))
    }

    fn approximation(&self, x: IndecId, phi: &[IndecId]) -> Result<Approximation> {
        let target = self.std[x.index()].clone();
        let mut cur = target.clone();
        let mut defl = ChainMap::from_fn(&cur, &target, |d| Matrix::identity(cur.term(d).len()));
        let mut steps: Vec<(usize, u32)> = Vec::new();
        for _ in 0..=phi.len() {
            let next = phi.iter().enumerate().find_map(|(i, p)| {
                let d = HomSpace::new(&cur, &self.std[p.index()].shift(1)).dim();
                (d > 0).then_some((i, d))
            });
            let Some((a, l)) = next else {
                break;
            };
            if steps.last().is_some_and(|&(prev, _)| a <= prev) {
                return Err(Error::Consistency(format!(
                    "approximation index did not increase ({} after {})",
                    a + 1,
                    steps.last().unwrap().0 + 1
                )));
            }
            let ac = &self.std[phi[a].index()];
            let single = HomSpace::new(&cur, &ac.shift(1));
            let basis = single.basis();
            let al = self.complex_of(&Obj::from_pairs([(phi[a], l as u32)]));
            let al1 = al.shift(1);
            let a1 = ac.shift(1);
            let delta = ChainMap::from_fn(&cur, &al1, |d| {
                let cols = cur.term(d).len();
                let rows = a1.term(d).len();
                let mut m = Matrix::zeros(rows * l, cols);
                for (k, b) in basis.iter().enumerate() {
                    m.set_block(k * rows, 0, &b.comp(d, rows, cols));
                }
                m
            });
            let tri = realize_extension(&cur, &al, &delta);
            if self.try_obj_of(&tri.b).is_none() {
                return Err(Error::WindowOverflow(format!(
                    "universal extension of step {} by {} for {}",
                    steps.len() + 1,
                    self.intervals[phi[a].index()].name(self.n),
                    self.intervals[x.index()].name(self.n)
                )));
            }
            defl = tri.deflation.then(&defl, &tri.b, &cur, &target);
            cur = tri.b;
            steps.push((a, l as u32));
        }
        if !phi.iter().all(|p| HomSpace::new(&cur, &self.std[p.index()].shift(1)).dim() == 0) {
            return Err(Error::NonTermination(format!(
                "approximation of {}",
                self.intervals[x.index()].name(self.n)
            )));
        }
        let raw_q = self.obj_of(&cur)?;
        let tri = realize_deflation(&cur, &target, &defl);
        let raw_k = self.obj_of(&tri.a).map_err(|e| {
            Error::WindowOverflow(format!(
                "kernel end for {}: {e}",
                self.intervals[x.index()].name(self.n)
            ))
        })?;
        let removed = Obj::from_pairs(self.strip_counts(&tri, &raw_q));
        let q = raw_q.minus(&removed).expect("strip within Q");
        let k = raw_k
            .minus(&removed)
            .ok_or_else(|| Error::Consistency("stripped summand missing from kernel".into()))?;
        let eta = self.find_eta(&q, x, &k)?;
        Ok(Approximation {
            raw_q,
            raw_k,
            q,
            k,
            steps,
            eta,
        })
    }

    fn ar_arrows(&self) -> Option<Vec<(IndecId, IndecId)>> {
        let n = self.n as u8;
        let mut out = Vec::new();
        for (i, iv) in self.intervals.iter().enumerate() {
            let mut targets = Vec::new();
            if iv.a > 1 {
                targets.push(Interval::new(iv.a - 1, iv.b, iv.shift));
            }
            if iv.b > iv.a {
                targets.push(Interval::new(iv.a, iv.b - 1, iv.shift));
            }
            if iv.a == 1 && iv.b < n {
                targets.push(Interval::new(iv.b + 1, n, iv.shift + 1));
            }
            for t in targets {
                if let Some(&j) = self.index.get(&t) {
                    out.push((IndecId(i as u32), j));
                }
            }
        }
        out.sort();
        Some(out)
    }
}

/// Window of D^b(mod kA_n) on the given shifts over the field `F`.
pub fn build_window_with<F: FiniteField>(
    n: usize,
    shifts: std::ops::RangeInclusive<i32>,
    label: &str,
) -> CategoryModel {
    assert!(n >= 1 && n < 250, "vertex count");
    let backend = DerivedBackend::<F>::new(n, catalog(n, shifts));
    let ids: Vec<IndecId> = (0..backend.intervals.len() as u32).map(IndecId).collect();
    let hom = ids
        .iter()
        .map(|&x| ids.iter().map(|&y| backend.hom_dim_indec(x, y)).collect())
        .collect();
    let ext = ids
        .iter()
        .map(|&c| ids.iter().map(|&a| backend.ext_dim_indec(c, a)).collect())
        .collect();
    let names = backend.intervals.iter().map(|iv| iv.name(n)).collect();
    CategoryModel::new(
        names,
        hom,
        ext,
        Meta::new(label, F::CHARACTERISTIC),
        Arc::new(backend),
    )
}

/// [`build_window_with`] with the prime chosen at run time.
pub fn build_window(
    n: usize,
    shifts: std::ops::RangeInclusive<i32>,
    label: &str,
    p: u32,
) -> Result<CategoryModel> {
    Ok(match p {
        2 => build_window_with::<Fp<2>>(n, shifts, label),
        3 => build_window_with::<Fp<3>>(n, shifts, label),
        5 => build_window_with::<Fp<5>>(n, shifts, label),
        7 => build_window_with::<Fp<7>>(n, shifts, label),
        _ => return Err(Error::UnsupportedCharacteristic(p)),
    })
}
