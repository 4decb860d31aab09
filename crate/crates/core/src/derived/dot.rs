//! DOT rendering of a window's Auslander-Reiten quiver.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::model::CategoryModel;
use crate::obj::IndecId;

/// Vertices are the model's display segment in id order; arrows are the
/// irreducible maps among them, when the backend knows them. Members of
/// `highlight` are filled grey.
pub fn render_dot(model: &CategoryModel, highlight: &BTreeSet<IndecId>) -> String {
    let shown: BTreeSet<IndecId> = model.display().into_iter().collect();
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{}\" {{", model.meta().label);
    let _ = writeln!(s, "  rankdir=LR;");
    let _ = writeln!(s, "  node [shape=plaintext];");
    for &id in &shown {
        let style = if highlight.contains(&id) {
            " style=filled fillcolor=lightgrey shape=box"
        } else {
            ""
        };
        let _ = writeln!(s, "  v{} [label=\"{}\"{style}];", id.0, model.name(id));
    }
    for (x, y) in model.ar_arrows().unwrap_or_default() {
        if shown.contains(&x) && shown.contains(&y) {
            let _ = writeln!(s, "  v{} -> v{};", x.0, y.0);
        }
    }
    s.push_str("}\n");
    s
}
