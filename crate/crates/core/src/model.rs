//! Object-level data model of a finite window and the backend contract.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::obj::{objects_up_to, IndecId, Obj};

/// Morphism-derived facts attached to an extriangle record.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotations {
    /// Left-exactness defect of `Hom(Q, -)` per indecomposable `Q`.
    pub defects: BTreeMap<IndecId, u32>,
    pub epi: Option<bool>,
    pub epi_witness: Option<IndecId>,
    pub deflation_zero: Option<bool>,
    pub right_minimal: Option<bool>,
}

impl Annotations {
    pub fn is_empty(&self) -> bool {
        *self == Annotations::default()
    }
}

/// A realized extriangle `a -> mid -> c` up to the triple and `ext_id`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extriangle {
    pub a: Obj,
    pub mid: Obj,
    pub c: Obj,
    pub ext_id: String,
    pub annotations: Option<Annotations>,
}

pub const SPLIT: &str = "split";

impl Extriangle {
    pub fn split(c: &Obj, a: &Obj) -> Self {
        Extriangle {
            a: a.clone(),
            mid: a.sum(c),
            c: c.clone(),
            ext_id: SPLIT.to_string(),
            annotations: None,
        }
    }

    pub fn is_split(&self) -> bool {
        self.ext_id == SPLIT
    }

    pub fn triple(&self) -> (Obj, Obj, Obj) {
        (self.a.clone(), self.mid.clone(), self.c.clone())
    }

    /// Same extriangle with both ends swapped, as seen in the opposite
    /// category. Annotations are dropped.
    pub fn reversed(&self) -> Self {
        Extriangle {
            a: self.c.clone(),
            mid: self.mid.clone(),
            c: self.a.clone(),
            ext_id: self.ext_id.clone(),
            annotations: None,
        }
    }
}

/// Output of the relative projective approximation of one `Φ_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Approximation {
    /// Middle term and kernel end before right-minimal reduction.
    pub raw_q: Obj,
    pub raw_k: Obj,
    pub q: Obj,
    pub k: Obj,
    /// `(index into phi, multiplicity l)` of each universal extension.
    pub steps: Vec<(usize, u32)>,
    /// The reduced extriangle `(k, q, Φ_i)`.
    pub eta: Extriangle,
}

/// Morphism-level operations a concrete engine provides. All objects are
/// expressed in the owning model's indecomposable ids.
pub trait Backend: Send + Sync {
    fn kind(&self) -> &'static str;

    /// All extriangles `(a, B, c)`, split entry first, one per triple.
    fn middle_terms(&self, c: &Obj, a: &Obj) -> Result<Vec<Extriangle>>;

    /// All extriangles `(K, mid, c)` with `K` in the window; `max_k` bounds
    /// the total multiplicity of `K` for search-based backends.
    fn ending_at(&self, mid: &Obj, c: &Obj, max_k: u32) -> Result<Vec<Extriangle>>;

    fn universal_extension(&self, c: &Obj, a: IndecId) -> Result<Extriangle>;

    fn left_exact_defect(&self, q: &Obj, xi: &Extriangle) -> Result<u32>;

    /// Some `T` in `window` for which `Hom(c, T) -> Hom(mid, T)` fails to be
    /// injective, or `None` when the deflation is epi relative to `window`.
    fn epi_witness(&self, xi: &Extriangle, window: &[IndecId]) -> Result<Option<IndecId>>;

    fn right_minimal_reduce(
        &self,
        q: &Obj,
        target: IndecId,
        xi: &Extriangle,
    ) -> Result<(Obj, Extriangle)>;

    fn connecting_rank(&self, q: &Obj, xi: &Extriangle) -> Result<Option<u32>>;

    fn deflation_is_zero(&self, xi: &Extriangle) -> Result<bool>;

    fn approximation(&self, _x: IndecId, _phi: &[IndecId]) -> Result<Approximation> {
        Err(Error::Unsupported(format!(
            "{}: relative projective approximation",
            self.kind()
        )))
    }

    /// Irreducible maps between indecomposables when the engine knows them.
    fn ar_arrows(&self) -> Option<Vec<(IndecId, IndecId)>> {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub label: String,
    pub exact_mode: bool,
    pub characteristic: u32,
    /// Standing assumption for every bundled model.
    pub weakly_idempotent_complete: bool,
    pub annotations_dropped: bool,
    pub notes: Vec<String>,
}

impl Meta {
    pub fn new(label: &str, characteristic: u32) -> Self {
        Meta {
            label: label.to_string(),
            exact_mode: false,
            characteristic,
            weakly_idempotent_complete: true,
            annotations_dropped: false,
            notes: Vec::new(),
        }
    }
}

type Cache = Mutex<HashMap<(Obj, Obj, u32), Vec<Extriangle>>>;

struct Inner {
    names: Vec<String>,
    hom: Vec<Vec<u32>>,
    ext: Vec<Vec<u32>>,
    meta: Meta,
    display: Option<Vec<IndecId>>,
    backend: Arc<dyn Backend>,
    opposite_of: Option<CategoryModel>,
    mids: Cache,
    ends: Cache,
}

/// A finite window: indecomposables, Hom/Ext dimension tables and a backend.
/// Cloning is cheap and shares caches.
#[derive(Clone)]
pub struct CategoryModel {
    inner: Arc<Inner>,
}

impl fmt::Debug for CategoryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CategoryModel")
            .field("label", &self.inner.meta.label)
            .field("backend", &self.inner.backend.kind())
            .field("indecs", &self.inner.names)
            .finish()
    }
}

impl CategoryModel {
    /// `hom[x][y] = dim Hom(x, y)`, `ext[c][a] = dim E(c, a)`.
    pub fn new(
        names: Vec<String>,
        hom: Vec<Vec<u32>>,
        ext: Vec<Vec<u32>>,
        meta: Meta,
        backend: Arc<dyn Backend>,
    ) -> Self {
        let n = names.len();
        assert!(hom.len() == n && hom.iter().all(|r| r.len() == n), "hom table shape");
        assert!(ext.len() == n && ext.iter().all(|r| r.len() == n), "ext table shape");
        CategoryModel {
            inner: Arc::new(Inner {
                names,
                hom,
                ext,
                meta,
                display: None,
                backend,
                opposite_of: None,
                mids: Mutex::default(),
                ends: Mutex::default(),
            }),
        }
    }

    fn rebuild(&self, f: impl FnOnce(&mut Inner)) -> Self {
        let i = &self.inner;
        let mut inner = Inner {
            names: i.names.clone(),
            hom: i.hom.clone(),
            ext: i.ext.clone(),
            meta: i.meta.clone(),
            display: i.display.clone(),
            backend: i.backend.clone(),
            opposite_of: i.opposite_of.clone(),
            mids: Mutex::default(),
            ends: Mutex::default(),
        };
        f(&mut inner);
        CategoryModel {
            inner: Arc::new(inner),
        }
    }

    pub fn with_display(&self, ids: Vec<IndecId>) -> Self {
        self.rebuild(|i| i.display = Some(ids))
    }

    pub fn with_meta(&self, meta: Meta) -> Self {
        self.rebuild(|i| i.meta = meta)
    }

    pub fn len(&self) -> usize {
        self.inner.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<IndecId> {
        (0..self.len() as u32).map(IndecId).collect()
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn name(&self, id: IndecId) -> &str {
        &self.inner.names[id.index()]
    }

    pub fn id_of(&self, name: &str) -> Result<IndecId> {
        self.inner
            .names
            .iter()
            .position(|n| n == name)
            .map(|i| IndecId(i as u32))
            .ok_or_else(|| Error::UnknownIndec(name.to_string()))
    }

    pub fn meta(&self) -> &Meta {
        &self.inner.meta
    }

    pub fn backend(&self) -> &Arc<dyn Backend> {
        &self.inner.backend
    }

    /// Display segment (defaults to every indecomposable).
    pub fn display(&self) -> Vec<IndecId> {
        self.inner.display.clone().unwrap_or_else(|| self.ids())
    }

    pub fn hom_table(&self) -> &[Vec<u32>] {
        &self.inner.hom
    }

    pub fn ext_table(&self) -> &[Vec<u32>] {
        &self.inner.ext
    }

    pub fn hom_dim(&self, x: &Obj, y: &Obj) -> u32 {
        let mut d = 0;
        for (i, m) in x.iter() {
            for (j, k) in y.iter() {
                d += m * k * self.inner.hom[i.index()][j.index()];
            }
        }
        d
    }

    /// `dim E(c, a)`.
    pub fn ext_dim(&self, c: &Obj, a: &Obj) -> u32 {
        let mut d = 0;
        for (i, m) in c.iter() {
            for (j, k) in a.iter() {
                d += m * k * self.inner.ext[i.index()][j.index()];
            }
        }
        d
    }

    pub fn parse_obj(&self, s: &str) -> Result<Obj> {
        let s = s.trim();
        if s.is_empty() || s == "0" {
            return Ok(Obj::zero());
        }
        let mut pairs = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (k, name) = match part.split_once('*') {
                Some((k, name)) => {
                    let k: u32 = k.trim().parse().map_err(|_| {
                        Error::Schema(format!("bad multiplicity in object term '{part}'"))
                    })?;
                    (k, name.trim())
                }
                None => (1, part),
            };
            pairs.push((self.id_of(name)?, k));
        }
        Ok(Obj::from_pairs(pairs))
    }

    pub fn fmt_obj(&self, x: &Obj) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        x.iter()
            .map(|(id, k)| {
                if k == 1 {
                    self.name(id).to_string()
                } else {
                    format!("{k}*{}", self.name(id))
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn fmt_ext(&self, e: &Extriangle) -> String {
        format!(
            "({}, {}, {})",
            self.fmt_obj(&e.a),
            self.fmt_obj(&e.mid),
            self.fmt_obj(&e.c)
        )
    }

    /// Every nonzero object of total multiplicity at most `max_total`.
    pub fn window_objects(&self, max_total: u32) -> Vec<Obj> {
        objects_up_to(self.len(), max_total)
    }

    pub fn middle_terms(&self, c: &Obj, a: &Obj) -> Result<Vec<Extriangle>> {
        let key = (c.clone(), a.clone(), 0);
        if let Some(v) = self.inner.mids.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.inner.backend.middle_terms(c, a)?;
        self.inner.mids.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    pub fn ending_at(&self, mid: &Obj, c: &Obj, max_k: u32) -> Result<Vec<Extriangle>> {
        let key = (mid.clone(), c.clone(), max_k);
        if let Some(v) = self.inner.ends.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.inner.backend.ending_at(mid, c, max_k)?;
        self.inner.ends.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Non-split extriangles whose ends are nonzero with total multiplicity
    /// at most `ends_mult`, in canonical order.
    pub fn nonsplit_extriangles(&self, ends_mult: u32) -> Result<Vec<Extriangle>> {
        let objs = self.window_objects(ends_mult);
        let mut out = Vec::new();
        for c in &objs {
            for a in &objs {
                if self.ext_dim(c, a) == 0 {
                    continue;
                }
                out.extend(self.middle_terms(c, a)?.into_iter().filter(|e| !e.is_split()));
            }
        }
        Ok(out)
    }

    /// Extriangles with a zero middle term and nonzero ends.
    pub fn zero_middled(&self) -> Result<Vec<Extriangle>> {
        Ok(self
            .nonsplit_extriangles(1)?
            .into_iter()
            .filter(|e| e.mid.is_zero())
            .collect())
    }

    pub fn universal_extension(&self, c: &Obj, a: IndecId) -> Result<Extriangle> {
        if self.ext_dim(c, &Obj::indec(a)) == 0 {
            return Err(Error::NoExtension {
                c: self.fmt_obj(c),
                a: self.name(a).to_string(),
            });
        }
        self.inner.backend.universal_extension(c, a)
    }

    pub fn left_exact_defect(&self, q: &Obj, xi: &Extriangle) -> Result<u32> {
        if xi.is_split() || q.is_zero() {
            return Ok(0);
        }
        self.inner.backend.left_exact_defect(q, xi)
    }

    pub fn epi_witness(&self, xi: &Extriangle, window: &[IndecId]) -> Result<Option<IndecId>> {
        if xi.is_split() {
            return Ok(None);
        }
        self.inner.backend.epi_witness(xi, window)
    }

    /// Whether the deflation of `xi` is epi relative to the whole window.
    pub fn is_epi(&self, xi: &Extriangle) -> Result<bool> {
        Ok(self.epi_witness(xi, &self.ids())?.is_none())
    }

    pub fn right_minimal_reduce(
        &self,
        q: &Obj,
        target: IndecId,
        xi: &Extriangle,
    ) -> Result<(Obj, Extriangle)> {
        self.inner.backend.right_minimal_reduce(q, target, xi)
    }

    pub fn connecting_rank(&self, q: &Obj, xi: &Extriangle) -> Result<Option<u32>> {
        self.inner.backend.connecting_rank(q, xi)
    }

    pub fn deflation_is_zero(&self, xi: &Extriangle) -> Result<bool> {
        if xi.mid.is_zero() || xi.c.is_zero() {
            return Ok(true);
        }
        self.inner.backend.deflation_is_zero(xi)
    }

    pub fn approximation(&self, x: IndecId, phi: &[IndecId]) -> Result<Approximation> {
        self.inner.backend.approximation(x, phi)
    }

    pub fn ar_arrows(&self) -> Option<Vec<(IndecId, IndecId)>> {
        self.inner.backend.ar_arrows()
    }

    /// Tables, flags and indecomposable-ended non-split extriangles, for
    /// object-level equality.
    pub fn object_level(&self) -> Result<ObjectLevel> {
        let mut records: Vec<(String, String, String)> = self
            .nonsplit_extriangles(1)?
            .iter()
            .map(|e| (self.fmt_obj(&e.a), self.fmt_obj(&e.mid), self.fmt_obj(&e.c)))
            .collect();
        records.sort();
        records.dedup();
        Ok(ObjectLevel {
            names: self.inner.names.clone(),
            hom: self.inner.hom.clone(),
            ext: self.inner.ext.clone(),
            exact_mode: self.inner.meta.exact_mode,
            records,
        })
    }
}

/// Object-level snapshot used for round-trip and involution checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectLevel {
    pub names: Vec<String>,
    pub hom: Vec<Vec<u32>>,
    pub ext: Vec<Vec<u32>>,
    pub exact_mode: bool,
    pub records: Vec<(String, String, String)>,
}

/// Keeps the first extriangle per `(a, mid, c)` triple; split entries first.
pub fn dedup_by_triple(list: Vec<Extriangle>) -> Vec<Extriangle> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<Extriangle> = Vec::new();
    for e in list {
        if seen.insert(e.triple()) {
            out.push(e);
        }
    }
    out.sort_by(|x, y| {
        (!x.is_split(), x.triple(), &x.ext_id).cmp(&(!y.is_split(), y.triple(), &y.ext_id))
    });
    out
}

/// `ending_at` by exhaustive search over kernel candidates.
pub fn search_ending_at(
    backend: &dyn Backend,
    n: usize,
    mid: &Obj,
    c: &Obj,
    max_k: u32,
) -> Result<Vec<Extriangle>> {
    let mut cands = vec![Obj::zero()];
    cands.extend(objects_up_to(n, max_k));
    let mut out = Vec::new();
    for k in cands {
        for e in backend.middle_terms(c, &k)? {
            if e.mid == *mid {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// `X ∗ Y`: middle terms of extriangles `x -> m -> y`.
pub fn star(xs: &BTreeSet<Obj>, ys: &BTreeSet<Obj>, model: &CategoryModel) -> Result<BTreeSet<Obj>> {
    let mut out = BTreeSet::new();
    for x in xs {
        for y in ys {
            for e in model.middle_terms(y, x)? {
                out.insert(e.mid);
            }
        }
    }
    Ok(out)
}

struct OppositeBackend {
    inner: CategoryModel,
}

impl OppositeBackend {
    fn missing(&self, op: &str) -> Error {
        Error::AnnotationMissing(format!("{op} is not available on an opposite model"))
    }
}

impl Backend for OppositeBackend {
    fn kind(&self) -> &'static str {
        "opposite"
    }

    fn middle_terms(&self, c: &Obj, a: &Obj) -> Result<Vec<Extriangle>> {
        Ok(dedup_by_triple(
            self.inner
                .middle_terms(a, c)?
                .iter()
                .map(Extriangle::reversed)
                .collect(),
        ))
    }

    fn ending_at(&self, mid: &Obj, c: &Obj, max_k: u32) -> Result<Vec<Extriangle>> {
        search_ending_at(self, self.inner.len(), mid, c, max_k)
    }

    fn universal_extension(&self, _c: &Obj, _a: IndecId) -> Result<Extriangle> {
        Err(self.missing("universal_extension"))
    }

    fn left_exact_defect(&self, _q: &Obj, _xi: &Extriangle) -> Result<u32> {
        Err(self.missing("left_exact_defect"))
    }

    fn epi_witness(&self, _xi: &Extriangle, _w: &[IndecId]) -> Result<Option<IndecId>> {
        Err(self.missing("is_epi"))
    }

    fn right_minimal_reduce(
        &self,
        _q: &Obj,
        _t: IndecId,
        _xi: &Extriangle,
    ) -> Result<(Obj, Extriangle)> {
        Err(self.missing("right_minimal_reduce"))
    }

    fn connecting_rank(&self, _q: &Obj, _xi: &Extriangle) -> Result<Option<u32>> {
        Ok(None)
    }

    fn deflation_is_zero(&self, _xi: &Extriangle) -> Result<bool> {
        Err(self.missing("deflation_is_zero"))
    }

    fn ar_arrows(&self) -> Option<Vec<(IndecId, IndecId)>> {
        self.inner
            .ar_arrows()
            .map(|v| v.into_iter().map(|(x, y)| (y, x)).collect())
    }
}

fn transpose(t: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = t.len();
    (0..n).map(|i| (0..n).map(|j| t[j][i]).collect()).collect()
}

/// The opposite window: Hom and Ext tables transposed, extriangle ends
/// swapped. Morphism-level annotations are dropped (flagged in the meta).
pub fn opposite(model: &CategoryModel) -> CategoryModel {
    if let Some(orig) = &model.inner.opposite_of {
        return orig.clone();
    }
    let mut meta = model.meta().clone();
    meta.label = format!("{}^op", meta.label);
    meta.annotations_dropped = true;
    let op = CategoryModel::new(
        model.names().to_vec(),
        transpose(model.hom_table()),
        transpose(model.ext_table()),
        meta,
        Arc::new(OppositeBackend {
            inner: model.clone(),
        }),
    );
    let display = model.inner.display.clone();
    let orig = model.clone();
    op.rebuild(|i| {
        i.display = display;
        i.opposite_of = Some(orig);
    })
}

struct RestrictedBackend {
    inner: CategoryModel,
    /// New id `i` is `ids[i]` in the ambient model.
    ids: Vec<IndecId>,
    back: HashMap<IndecId, IndecId>,
}

impl RestrictedBackend {
    fn up(&self, x: &Obj) -> Obj {
        x.map_ids(|i| self.ids.get(i.index()).copied())
            .expect("restricted id in range")
    }

    fn down(&self, x: &Obj) -> Option<Obj> {
        x.map_ids(|i| self.back.get(&i).copied()).ok()
    }

    fn down_ext(&self, e: &Extriangle) -> Option<Extriangle> {
        Some(Extriangle {
            a: self.down(&e.a)?,
            mid: self.down(&e.mid)?,
            c: self.down(&e.c)?,
            ext_id: e.ext_id.clone(),
            annotations: None,
        })
    }

    fn down_or_overflow(&self, e: &Extriangle) -> Result<Extriangle> {
        self.down_ext(e).ok_or_else(|| {
            Error::WindowOverflow(format!("{} in the restricted window", self.inner.fmt_ext(e)))
        })
    }

    fn up_ext(&self, e: &Extriangle) -> Extriangle {
        Extriangle {
            a: self.up(&e.a),
            mid: self.up(&e.mid),
            c: self.up(&e.c),
            ext_id: e.ext_id.clone(),
            annotations: None,
        }
    }
}

impl Backend for RestrictedBackend {
    fn kind(&self) -> &'static str {
        "restricted"
    }

    fn middle_terms(&self, c: &Obj, a: &Obj) -> Result<Vec<Extriangle>> {
        self.inner
            .middle_terms(&self.up(c), &self.up(a))?
            .iter()
            .map(|e| self.down_or_overflow(e))
            .collect()
    }

    fn ending_at(&self, mid: &Obj, c: &Obj, max_k: u32) -> Result<Vec<Extriangle>> {
        Ok(self
            .inner
            .ending_at(&self.up(mid), &self.up(c), max_k)?
            .iter()
            .filter_map(|e| self.down_ext(e))
            .collect())
    }

    fn universal_extension(&self, c: &Obj, a: IndecId) -> Result<Extriangle> {
        let e = self.inner.universal_extension(&self.up(c), self.ids[a.index()])?;
        self.down_or_overflow(&e)
    }

    fn left_exact_defect(&self, q: &Obj, xi: &Extriangle) -> Result<u32> {
        self.inner.left_exact_defect(&self.up(q), &self.up_ext(xi))
    }

    fn epi_witness(&self, xi: &Extriangle, window: &[IndecId]) -> Result<Option<IndecId>> {
        let w: Vec<IndecId> = window.iter().map(|i| self.ids[i.index()]).collect();
        Ok(self
            .inner
            .epi_witness(&self.up_ext(xi), &w)?
            .map(|t| self.back[&t]))
    }

    fn right_minimal_reduce(
        &self,
        q: &Obj,
        target: IndecId,
        xi: &Extriangle,
    ) -> Result<(Obj, Extriangle)> {
        let (q2, e2) =
            self.inner
                .right_minimal_reduce(&self.up(q), self.ids[target.index()], &self.up_ext(xi))?;
        let q2 = self
            .down(&q2)
            .ok_or_else(|| Error::WindowOverflow(self.inner.fmt_obj(&q2)))?;
        Ok((q2, self.down_or_overflow(&e2)?))
    }

    fn connecting_rank(&self, q: &Obj, xi: &Extriangle) -> Result<Option<u32>> {
        self.inner.connecting_rank(&self.up(q), &self.up_ext(xi))
    }

    fn deflation_is_zero(&self, xi: &Extriangle) -> Result<bool> {
        self.inner.deflation_is_zero(&self.up_ext(xi))
    }

    fn approximation(&self, x: IndecId, phi: &[IndecId]) -> Result<Approximation> {
        let phi_up: Vec<IndecId> = phi.iter().map(|i| self.ids[i.index()]).collect();
        let ap = self.inner.approximation(self.ids[x.index()], &phi_up)?;
        let down = |o: &Obj| {
            self.down(o)
                .ok_or_else(|| Error::WindowOverflow(self.inner.fmt_obj(o)))
        };
        Ok(Approximation {
            raw_q: down(&ap.raw_q)?,
            raw_k: down(&ap.raw_k)?,
            q: down(&ap.q)?,
            k: down(&ap.k)?,
            steps: ap.steps,
            eta: self.down_or_overflow(&ap.eta)?,
        })
    }

    fn ar_arrows(&self) -> Option<Vec<(IndecId, IndecId)>> {
        let all = self.inner.ar_arrows()?;
        Some(
            all.into_iter()
                .filter_map(|(x, y)| Some((*self.back.get(&x)?, *self.back.get(&y)?)))
                .collect(),
        )
    }
}

/// Full subcategory on `ids` (kept in ambient order). Extriangles are those
/// of the ambient model with all three terms inside.
pub fn restrict(model: &CategoryModel, ids: &[IndecId], label: &str) -> CategoryModel {
    let mut ids: Vec<IndecId> = ids.to_vec();
    ids.sort();
    ids.dedup();
    let back: HashMap<IndecId, IndecId> = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, IndecId(i as u32)))
        .collect();
    let sub = |t: &[Vec<u32>]| -> Vec<Vec<u32>> {
        ids.iter()
            .map(|x| ids.iter().map(|y| t[x.index()][y.index()]).collect())
            .collect()
    };
    let mut meta = model.meta().clone();
    meta.label = label.to_string();
    CategoryModel::new(
        ids.iter().map(|&i| model.name(i).to_string()).collect(),
        sub(model.hom_table()),
        sub(model.ext_table()),
        meta,
        Arc::new(RestrictedBackend {
            inner: model.clone(),
            ids: ids.clone(),
            back,
        }),
    )
}

/// Findings of [`validate_model`]; empty means consistent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Object-level consistency checks: split presence, Hom/Ext sanity, vanishing
/// at zero, sum closure of extriangles and zero-middled pairing.
pub fn validate_model(model: &CategoryModel) -> ValidationReport {
    let mut v = Vec::new();
    let ids = model.ids();
    let zero = Obj::zero();
    for &x in &ids {
        let xo = Obj::indec(x);
        if model.hom_dim(&xo, &xo) == 0 {
            v.push(format!("hom({0},{0}) = 0 for nonzero {0}", model.name(x)));
        }
        for (c, a) in [(&zero, &xo), (&xo, &zero)] {
            match model.middle_terms(c, a) {
                Ok(list) if list.len() == 1 && list[0].is_split() => {}
                Ok(_) => v.push(format!(
                    "E({}, {}) should vanish",
                    model.fmt_obj(c),
                    model.fmt_obj(a)
                )),
                Err(e) => v.push(format!("middle_terms failed: {e}")),
            }
        }
    }
    for &c in &ids {
        for &a in &ids {
            let (co, ao) = (Obj::indec(c), Obj::indec(a));
            let list = match model.middle_terms(&co, &ao) {
                Ok(l) => l,
                Err(e) => {
                    v.push(format!("middle_terms({}, {}) failed: {e}", model.name(c), model.name(a)));
                    continue;
                }
            };
            if !list.iter().any(|e| e.is_split() && e.mid == ao.sum(&co)) {
                v.push(format!("split extriangle missing for ({}, {})", model.name(a), model.name(c)));
            }
            if model.ext_dim(&co, &ao) == 0 && list.len() != 1 {
                v.push(format!(
                    "E({}, {}) = 0 but non-split extriangles are listed",
                    model.name(c),
                    model.name(a)
                ));
            }
            if model.ext_dim(&co, &ao) > 0 && list.iter().all(Extriangle::is_split) {
                v.push(format!(
                    "E({}, {}) != 0 but no non-split extriangle is realized",
                    model.name(c),
                    model.name(a)
                ));
            }
            for e in &list {
                if e.mid.is_zero() && (e.a.is_zero() != e.c.is_zero()) {
                    v.push(format!("zero-middled {} has one zero end", model.fmt_ext(e)));
                }
            }
        }
    }
    // sum closure over pairs of indecomposable-ended records
    match model.nonsplit_extriangles(1) {
        Ok(recs) => {
            for (i, r1) in recs.iter().enumerate() {
                for r2 in &recs[i..] {
                    let (a, c) = (r1.a.sum(&r2.a), r1.c.sum(&r2.c));
                    let b = r1.mid.sum(&r2.mid);
                    match model.middle_terms(&c, &a) {
                        Ok(list) if list.iter().any(|e| e.mid == b) => {}
                        Ok(_) => v.push(format!(
                            "sum of {} and {} is not an extriangle",
                            model.fmt_ext(r1),
                            model.fmt_ext(r2)
                        )),
                        Err(e) => v.push(format!("sum closure check failed: {e}")),
                    }
                }
            }
        }
        Err(e) => v.push(format!("extriangle enumeration failed: {e}")),
    }
    ValidationReport { violations: v }
}
