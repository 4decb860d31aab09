//! Bundled models: the three worked examples on the A4 window, the window
//! itself, and two module categories.

use crate::derived::build_window;
use crate::error::{Error, Result};
use crate::model::{restrict, CategoryModel, Meta};
use crate::obj::{IndecId, Obj};
use crate::strat::{filtered_closure, DEFAULT_CLOSURE_MULT};
use crate::table::parse_model;

pub const NAMES: [&str; 6] = ["ex5_1", "ex5_2", "ex5_3", "win4", "modA2", "modA4"];

/// The AR-quiver segment drawn for `win4`.
pub const WIN4_SEGMENT: [&str; 17] = [
    "I1", "I2", "I3", "P1", "S2", "N", "P2", "S3", "P3", "P4", "P4[1]", "S3[1]", "P3[1]",
    "N[1]", "P2[1]", "I3[1]", "P1[1]",
];

const MOD_A2: &str = r#"{
  "format": "extcat-model/1",
  "label": "modA2",
  "mode": "exact",
  "indecs": ["S1", "S2", "P1"],
  "hom": [
    {"src": "S1", "dst": "S1", "dim": 1},
    {"src": "S2", "dst": "S2", "dim": 1},
    {"src": "P1", "dst": "P1", "dim": 1},
    {"src": "S2", "dst": "P1", "dim": 1},
    {"src": "P1", "dst": "S1", "dim": 1}
  ],
  "ext": [{"c": "S1", "a": "S2", "dim": 1}],
  "extriangles": [{"a": "S2", "mid": "P1", "c": "S1", "ext_id": "e"}]
}"#;

/// Stratifying data living in an ambient window (ids are ambient ids).
#[derive(Clone, Debug)]
pub struct StratData {
    pub ambient: CategoryModel,
    pub phi: Vec<IndecId>,
    pub q: Vec<Obj>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    /// The category analysed by the monoid, group and series tools.
    pub model: CategoryModel,
    pub strat: Option<StratData>,
}

impl Fixture {
    /// The model that DOT renderings draw: the ambient window when present.
    pub fn drawn(&self) -> &CategoryModel {
        self.strat.as_ref().map_or(&self.model, |s| &s.ambient)
    }
}

/// `build_window(4, {0, 1})` with the 17-object display segment.
pub fn win4(p: u32) -> Result<CategoryModel> {
    let m = build_window(4, 0..=1, "win4", p)?;
    let seg = WIN4_SEGMENT
        .iter()
        .map(|s| m.id_of(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(m.with_display(seg))
}

fn example(name: &str, phi: &[&str], q: &[&str], p: u32) -> Result<Fixture> {
    let ambient = win4(p)?;
    let phi = phi
        .iter()
        .map(|s| ambient.id_of(s))
        .collect::<Result<Vec<_>>>()?;
    let q = q
        .iter()
        .map(|s| ambient.parse_obj(s))
        .collect::<Result<Vec<_>>>()?;
    let closure = filtered_closure(&phi, &ambient, DEFAULT_CLOSURE_MULT)?;
    let model = restrict(&ambient, &closure.indecs, name);
    Ok(Fixture {
        name: name.to_string(),
        model,
        strat: Some(StratData { ambient, phi, q }),
    })
}

pub fn fixture(name: &str, p: u32) -> Result<Fixture> {
    let plain = |model: CategoryModel| Fixture {
        name: name.to_string(),
        model,
        strat: None,
    };
    match name {
        "ex5_1" => example(name, &["S2", "P3", "S3[1]"], &["P2", "P3", "S3[1]"], p),
        "ex5_2" => example(name, &["P2[1]", "S2", "P3"], &["0", "P2", "P3"], p),
        "ex5_3" => example(name, &["N[1]", "S2", "P3"], &["S3[1]", "P2", "P3"], p),
        "win4" => Ok(plain(win4(p)?)),
        "modA2" => {
            let m = parse_model(MOD_A2, None)?;
            let meta = Meta {
                characteristic: p,
                ..m.meta().clone()
            };
            Ok(plain(m.with_meta(meta)))
        }
        "modA4" => Ok(plain(build_window(4, 0..=0, "modA4", p)?)),
        other => Err(Error::Schema(format!(
            "unknown fixture {other:?}; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}

pub fn all(p: u32) -> Result<Vec<Fixture>> {
    NAMES.iter().map(|n| fixture(n, p)).collect()
}
