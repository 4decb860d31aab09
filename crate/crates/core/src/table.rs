//! Table-backed models and the `extcat-model/1` interchange format.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    dedup_by_triple, search_ending_at, validate_model, Annotations, Backend, CategoryModel,
    Extriangle, Meta, SPLIT,
};
use crate::obj::{IndecId, Obj};

pub const FORMAT: &str = "extcat-model/1";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General,
    Exact,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: String,
    pub label: String,
    pub mode: Mode,
    #[serde(default = "default_char")]
    pub characteristic: u32,
    pub indecs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<Vec<String>>,
    #[serde(default)]
    pub hom: Vec<HomEntry>,
    #[serde(default)]
    pub ext: Vec<ExtEntry>,
    #[serde(default)]
    pub extriangles: Vec<Record>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

fn default_char() -> u32 {
    2
}

/// `dim Hom(src, dst)`; decomposable entries are checked for additivity.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomEntry {
    pub src: String,
    pub dst: String,
    pub dim: u32,
}

/// `dim E(c, a)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtEntry {
    pub c: String,
    pub a: String,
    pub dim: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub a: String,
    pub mid: String,
    pub c: String,
    pub ext_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<RecordAnnotations>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordAnnotations {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub defects: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epi: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epi_witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deflation_zero: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_minimal: Option<bool>,
}

/// Serves the contract from explicit records. Extriangles with decomposable
/// ends are derived as direct sums of records and split pieces.
pub struct TableBackend {
    n: usize,
    exact: bool,
    records: Vec<Extriangle>,
}

impl TableBackend {
    pub fn new(n: usize, exact: bool, records: Vec<Extriangle>) -> Self {
        TableBackend { n, exact, records }
    }

    fn derive(&self, c: &Obj, a: &Obj, from: usize, out: &mut Vec<(Obj, Vec<usize>)>) {
        out.push((a.sum(c), Vec::new()));
        for (i, r) in self.records.iter().enumerate().skip(from) {
            let (Some(c2), Some(a2)) = (c.minus(&r.c), a.minus(&r.a)) else {
                continue;
            };
            let mut rest = Vec::new();
            self.derive(&c2, &a2, i, &mut rest);
            for (m, mut used) in rest {
                used.insert(0, i);
                out.push((r.mid.sum(&m), used));
            }
        }
    }

    fn parts(&self, xi: &Extriangle) -> Result<Vec<&Extriangle>> {
        if xi.is_split() {
            return Ok(Vec::new());
        }
        let body = xi
            .ext_id
            .strip_prefix("r:")
            .ok_or_else(|| Error::Schema(format!("ext_id '{}' is not a table id", xi.ext_id)))?;
        body.split('+')
            .map(|t| {
                t.parse::<usize>()
                    .ok()
                    .and_then(|i| self.records.get(i))
                    .ok_or_else(|| Error::Schema(format!("bad record reference '{t}'")))
            })
            .collect()
    }

    fn annotation<T>(
        &self,
        xi: &Extriangle,
        what: &str,
        get: impl Fn(&Annotations) -> Option<T>,
    ) -> Result<Vec<T>> {
        self.parts(xi)?
            .into_iter()
            .map(|r| {
                r.annotations.as_ref().and_then(&get).ok_or_else(|| {
                    Error::AnnotationMissing(format!("{what} for record {}", r.ext_id))
                })
            })
            .collect()
    }
}

impl Backend for TableBackend {
    fn kind(&self) -> &'static str {
        if self.exact {
            "table-exact"
        } else {
            "table"
        }
    }

    fn middle_terms(&self, c: &Obj, a: &Obj) -> Result<Vec<Extriangle>> {
        let mut raw = Vec::new();
        self.derive(c, a, 0, &mut raw);
        Ok(dedup_by_triple(
            raw.into_iter()
                .map(|(mid, used)| Extriangle {
                    a: a.clone(),
                    mid,
                    c: c.clone(),
                    ext_id: if used.is_empty() {
                        SPLIT.to_string()
                    } else {
                        let ids: Vec<String> = used.iter().map(usize::to_string).collect();
                        format!("r:{}", ids.join("+"))
                    },
                    annotations: None,
                })
                .collect(),
        ))
    }

    fn ending_at(&self, mid: &Obj, c: &Obj, max_k: u32) -> Result<Vec<Extriangle>> {
        search_ending_at(self, self.n, mid, c, max_k)
    }

    fn universal_extension(&self, c: &Obj, a: IndecId) -> Result<Extriangle> {
        let hits: Vec<&Extriangle> = self
            .records
            .iter()
            .filter(|r| r.c == *c && r.a == Obj::indec(a))
            .collect();
        // with E(c, a) one-dimensional any non-split record is universal
        match hits.as_slice() {
            [r] => Ok((*r).clone()),
            _ => Err(Error::AnnotationMissing(
                "universal extension needs a unique one-dimensional record".into(),
            )),
        }
    }

    fn left_exact_defect(&self, q: &Obj, xi: &Extriangle) -> Result<u32> {
        if self.exact {
            return Ok(0);
        }
        let mut total = 0;
        for (id, k) in q.iter() {
            let per = self.annotation(xi, "left-exactness defect", |a| a.defects.get(&id).copied())?;
            total += k * per.iter().sum::<u32>();
        }
        Ok(total)
    }

    fn epi_witness(&self, xi: &Extriangle, window: &[IndecId]) -> Result<Option<IndecId>> {
        if self.exact {
            return Ok(None);
        }
        let epis = self.annotation(xi, "epi flag", |a| a.epi)?;
        if epis.iter().all(|&e| e) {
            return Ok(None);
        }
        let witnesses = self.annotation(xi, "epi witness", |a| match a.epi {
            Some(true) => Some(None),
            _ => a.epi_witness.map(Some),
        })?;
        witnesses
            .into_iter()
            .flatten()
            .find(|t| window.contains(t))
            .map(Some)
            .ok_or_else(|| Error::AnnotationMissing("epi witness outside the queried window".into()))
    }

    fn right_minimal_reduce(
        &self,
        q: &Obj,
        _target: IndecId,
        xi: &Extriangle,
    ) -> Result<(Obj, Extriangle)> {
        let flags = self.annotation(xi, "right-minimality", |a| a.right_minimal)?;
        if !flags.is_empty() && flags.iter().all(|&f| f) {
            Ok((q.clone(), xi.clone()))
        } else {
            Err(Error::AnnotationMissing(
                "right-minimal reduction of a non-minimal table deflation".into(),
            ))
        }
    }

    fn connecting_rank(&self, _q: &Obj, _xi: &Extriangle) -> Result<Option<u32>> {
        Ok(None)
    }

    fn deflation_is_zero(&self, xi: &Extriangle) -> Result<bool> {
        if self.exact {
            return Ok(xi.c.is_zero());
        }
        Ok(self
            .annotation(xi, "deflation-zero flag", |a| a.deflation_zero)?
            .iter()
            .all(|&z| z))
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn check_name(n: &str) -> Result<()> {
    let bad = n.is_empty()
        || n == "0"
        || n.chars().any(|c| c.is_whitespace() || matches!(c, '+' | '*' | ',' | '"'));
    if bad {
        Err(Error::Schema(format!("invalid indecomposable name '{n}'")))
    } else {
        Ok(())
    }
}

struct Names<'a>(&'a [String]);

impl Names<'_> {
    fn id(&self, n: &str) -> Result<IndecId> {
        self.0
            .iter()
            .position(|x| x == n)
            .map(|i| IndecId(i as u32))
            .ok_or_else(|| Error::Schema(format!("unknown indecomposable '{n}'")))
    }

    fn obj(&self, s: &str) -> Result<Obj> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Obj::zero());
        }
        let mut pairs = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let (k, name) = match part.split_once('*') {
                Some((k, n)) => (
                    k.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Schema(format!("bad multiplicity in '{part}'")))?,
                    n.trim(),
                ),
                None => (1, part),
            };
            pairs.push((self.id(name)?, k));
        }
        Ok(Obj::from_pairs(pairs))
    }
}

fn additive(table: &[Vec<u32>], x: &Obj, y: &Obj) -> u32 {
    x.iter()
        .flat_map(|(i, m)| y.iter().map(move |(j, k)| m * k * table[i.index()][j.index()]))
        .sum()
}

/// Builds a model from a parsed document. `mode` overrides the declared one.
pub fn model_from_file(doc: &ModelFile, mode: Option<Mode>) -> Result<CategoryModel> {
    if doc.format != FORMAT {
        return Err(Error::Schema(format!("unsupported format '{}'", doc.format)));
    }
    for (i, n) in doc.indecs.iter().enumerate() {
        check_name(n)?;
        if doc.indecs[..i].contains(n) {
            return Err(Error::Schema(format!("duplicate indecomposable '{n}'")));
        }
    }
    let names = Names(&doc.indecs);
    let n = doc.indecs.len();
    let mut hom = vec![vec![0u32; n]; n];
    let mut ext = vec![vec![0u32; n]; n];
    let mut deferred_hom = Vec::new();
    let mut deferred_ext = Vec::new();
    for h in &doc.hom {
        let (x, y) = (names.obj(&h.src)?, names.obj(&h.dst)?);
        match (x.single(), y.single()) {
            (Some(i), Some(j)) => hom[i.index()][j.index()] = h.dim,
            _ => deferred_hom.push((x, y, h)),
        }
    }
    for e in &doc.ext {
        let (c, a) = (names.obj(&e.c)?, names.obj(&e.a)?);
        match (c.single(), a.single()) {
            (Some(i), Some(j)) => ext[i.index()][j.index()] = e.dim,
            _ => deferred_ext.push((c, a, e)),
        }
    }
    let mut violations = Vec::new();
    for (x, y, h) in deferred_hom {
        if additive(&hom, &x, &y) != h.dim {
            violations.push(format!(
                "hom additivity: dim Hom({}, {}) = {} but the indecomposable table gives {}",
                h.src,
                h.dst,
                h.dim,
                additive(&hom, &x, &y)
            ));
        }
    }
    for (c, a, e) in deferred_ext {
        if additive(&ext, &c, &a) != e.dim {
            violations.push(format!(
                "ext additivity: dim E({}, {}) = {} but the indecomposable table gives {}",
                e.c,
                e.a,
                e.dim,
                additive(&ext, &c, &a)
            ));
        }
    }
    let mut records = Vec::new();
    for r in &doc.extriangles {
        if r.ext_id == SPLIT {
            continue;
        }
        let annotations = match &r.annotations {
            None => None,
            Some(ann) => Some(Annotations {
                defects: ann
                    .defects
                    .iter()
                    .map(|(k, v)| Ok((names.id(k)?, *v)))
                    .collect::<Result<_>>()?,
                epi: ann.epi,
                epi_witness: ann.epi_witness.as_deref().map(|w| names.id(w)).transpose()?,
                deflation_zero: ann.deflation_zero,
                right_minimal: ann.right_minimal,
            }),
        };
        let a = names.obj(&r.a)?;
        let c = names.obj(&r.c)?;
        if a.is_zero() || c.is_zero() {
            violations.push(format!("record ({}, {}, {}) has a zero end", r.a, r.mid, r.c));
            continue;
        }
        records.push(Extriangle {
            a,
            mid: names.obj(&r.mid)?,
            c,
            ext_id: r.ext_id.clone(),
            annotations,
        });
    }
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    let exact = mode.unwrap_or(doc.mode) == Mode::Exact;
    let mut meta = Meta::new(&doc.label, doc.characteristic);
    meta.exact_mode = exact;
    meta.notes = doc.notes.clone();
    let mut model = CategoryModel::new(
        doc.indecs.clone(),
        hom,
        ext,
        meta,
        Arc::new(TableBackend::new(n, exact, records)),
    );
    if let Some(d) = &doc.display {
        let ids = d.iter().map(|x| names.id(x)).collect::<Result<Vec<_>>>()?;
        model = model.with_display(ids);
    }
    let report = validate_model(&model);
    if !report.is_ok() {
        return Err(Error::Validation(report.violations));
    }
    Ok(model)
}

pub fn parse_model(text: &str, mode: Option<Mode>) -> Result<CategoryModel> {
    let doc: ModelFile = serde_json::from_str(text).map_err(parse_err)?;
    model_from_file(&doc, mode)
}

pub fn load_model(path: &Path, mode: Option<Mode>) -> Result<CategoryModel> {
    parse_model(&std::fs::read_to_string(path)?, mode)
}

/// Interchange document for `model`. Records are the non-split extriangles
/// with indecomposable ends; annotations are filled from whatever
/// morphism-level operations the backend answers.
pub fn model_to_file(model: &CategoryModel) -> Result<ModelFile> {
    for n in model.names() {
        check_name(n)?;
    }
    let ids = model.ids();
    let mut hom = Vec::new();
    let mut ext = Vec::new();
    for &x in &ids {
        for &y in &ids {
            let h = model.hom_table()[x.index()][y.index()];
            if h > 0 {
                hom.push(HomEntry {
                    src: model.name(x).into(),
                    dst: model.name(y).into(),
                    dim: h,
                });
            }
            let e = model.ext_table()[x.index()][y.index()];
            if e > 0 {
                ext.push(ExtEntry {
                    c: model.name(x).into(),
                    a: model.name(y).into(),
                    dim: e,
                });
            }
        }
    }
    let mut extriangles = Vec::new();
    for (i, e) in model.nonsplit_extriangles(1)?.iter().enumerate() {
        let mut ann = RecordAnnotations::default();
        if !model.meta().exact_mode {
            for &q in &ids {
                if let Ok(d) = model.left_exact_defect(&Obj::indec(q), e) {
                    ann.defects.insert(model.name(q).into(), d);
                }
            }
            if let Ok(w) = model.epi_witness(e, &ids) {
                ann.epi = Some(w.is_none());
                ann.epi_witness = w.map(|t| model.name(t).to_string());
            }
            ann.deflation_zero = model.deflation_is_zero(e).ok();
            if let Some(t) = e.c.single() {
                if let Ok((q2, _)) = model.right_minimal_reduce(&e.mid, t, e) {
                    ann.right_minimal = Some(q2 == e.mid);
                }
            }
        }
        let empty = ann.defects.is_empty()
            && ann.epi.is_none()
            && ann.deflation_zero.is_none()
            && ann.right_minimal.is_none();
        extriangles.push(Record {
            a: model.fmt_obj(&e.a),
            mid: model.fmt_obj(&e.mid),
            c: model.fmt_obj(&e.c),
            ext_id: format!("r:{i}"),
            annotations: (!empty).then_some(ann),
        });
    }
    let display = model.display();
    Ok(ModelFile {
        format: FORMAT.to_string(),
        label: model.meta().label.clone(),
        mode: if model.meta().exact_mode {
            Mode::Exact
        } else {
            Mode::General
        },
        characteristic: model.meta().characteristic,
        indecs: model.names().to_vec(),
        display: (display.len() != model.len())
            .then(|| display.iter().map(|&i| model.name(i).to_string()).collect()),
        hom,
        ext,
        extriangles,
        notes: model.meta().notes.clone(),
    })
}

pub fn save_model_string(model: &CategoryModel) -> Result<String> {
    let doc = model_to_file(model)?;
    Ok(serde_json::to_string_pretty(&doc).expect("serializable") + "\n")
}

pub fn save_model(model: &CategoryModel, path: &Path) -> Result<()> {
    std::fs::write(path, save_model_string(model)?)?;
    Ok(())
}
