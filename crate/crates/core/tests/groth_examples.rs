//! Simples, series, monoid and group on the bundled models.

use std::collections::BTreeSet;

use extcat::fixtures::{all, fixture};
use extcat::groth::{
    atoms, composition_series, is_reduced, jh_and_length_verdict, k0, merge_series,
    monoid_equal, monoid_free_on_simples, monoid_presentation, simples, simples_unchecked,
    zero_middled_witness, zero_simple_like, MonoidEq, Tri, DEFAULT_NORM_BOUND,
};
use extcat::strat::enumerate_filtrations;
use extcat::{filtration, CategoryModel, IndecId, Obj};

fn model(name: &str) -> CategoryModel {
    fixture(name, 2).unwrap().model
}

fn names(m: &CategoryModel, v: &[IndecId]) -> BTreeSet<String> {
    v.iter().map(|&i| m.name(i).to_string()).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn simple_objects() {
    let m = model("ex5_1");
    assert_eq!(names(&m, &simples(&m).unwrap()), set(&["S2", "P3", "S3[1]"]));
    let m = model("ex5_3");
    let all: BTreeSet<String> = m.names().iter().cloned().collect();
    let want: BTreeSet<String> = all.difference(&set(&["P2", "S3[1]"])).cloned().collect();
    assert_eq!(names(&m, &simples(&m).unwrap()), want);
    let m = model("modA2");
    assert_eq!(names(&m, &simples(&m).unwrap()), set(&["S1", "S2"]));
}

#[test]
fn simple_like_zero() {
    assert!(!zero_simple_like(&model("ex5_2")).unwrap());
    let m = model("ex5_2");
    let witnesses: BTreeSet<String> = m.zero_middled().unwrap().iter().map(|e| m.fmt_ext(e)).collect();
    assert!(witnesses.contains("(P3, 0, P3[1])"));
    assert!(zero_simple_like(&model("ex5_1")).unwrap());
    assert!(zero_simple_like(&model("modA2")).unwrap());
    assert!(zero_middled_witness(&model("modA4")).unwrap().is_none());
}

/// The object-level criterion finds no simples once 0 fails to be simple-like.
#[test]
fn no_simples_without_simple_like_zero() {
    for f in all(2).unwrap() {
        if !zero_simple_like(&f.model).unwrap() {
            assert!(simples_unchecked(&f.model).unwrap().is_empty(), "{}", f.name);
        }
    }
}

#[test]
fn composition_series_examples() {
    let m = model("ex5_1");
    let sim = simples(&m).unwrap();
    let v = composition_series(&m.parse_obj("P2").unwrap(), &sim, &m, 8).unwrap();
    assert_eq!(v.lengths, BTreeSet::from([2]));
    assert_eq!(v.factor_multisets.len(), 1);
    let f: Vec<String> = v.factor_multisets.iter().next().unwrap().iter().map(|(n, _)| n.clone()).collect();
    assert_eq!(BTreeSet::from_iter(f), set(&["P3", "S2"]));
    for &s in &sim {
        let v = composition_series(&Obj::indec(s), &sim, &m, 8).unwrap();
        assert_eq!(v.lengths, BTreeSet::from([1]), "{}", m.name(s));
    }
}

#[test]
fn filtrations_of_p3_in_the_second_example_have_many_lengths() {
    let d = fixture("ex5_2", 2).unwrap().strat.unwrap();
    let p3 = d.ambient.parse_obj("P3").unwrap();
    let fs = enumerate_filtrations(&p3, &d.phi, &d.ambient, 6).unwrap();
    let lengths: BTreeSet<usize> = fs.filtrations.iter().map(|f| f.len()).collect();
    assert!(lengths.len() >= 2, "{lengths:?}");
    assert!(fs.truncated);
}

#[test]
fn jh_verdicts() {
    assert_eq!(jh_and_length_verdict(&model("ex5_1"), 2).unwrap(), (Tri::True, Tri::True));
    assert_eq!(jh_and_length_verdict(&model("ex5_2"), 2).unwrap(), (Tri::False, Tri::False));
    assert_eq!(jh_and_length_verdict(&model("ex5_3"), 2).unwrap(), (Tri::True, Tri::True));
    assert_eq!(jh_and_length_verdict(&model("modA2"), 2).unwrap(), (Tri::True, Tri::True));
    assert_eq!(jh_and_length_verdict(&model("modA4"), 2).unwrap(), (Tri::True, Tri::True));
}

#[test]
fn presentations() {
    let m = model("ex5_1");
    let p = monoid_presentation(&m, 1).unwrap();
    assert_eq!(p.ngens(), 4);
    let rels: Vec<String> = (0..p.relations.len()).map(|r| p.fmt_relation(r, &m)).collect();
    assert_eq!(rels, ["[P2] = [S2+P3]"]);

    let m = model("ex5_2");
    let p = monoid_presentation(&m, 1).unwrap();
    let rels: BTreeSet<String> = (0..p.relations.len()).map(|r| p.fmt_relation(r, &m)).collect();
    assert!(rels.contains("[0] = [P3+P3[1]]"));
    assert!(rels.contains("[0] = [P2+P2[1]]"));

    let m = extcat::derived::build_window(1, 0..=0, "a1", 2).unwrap();
    assert!(monoid_presentation(&m, 2).unwrap().relations.is_empty());
}

#[test]
fn word_problem() {
    let m = model("ex5_1");
    let p = monoid_presentation(&m, 1).unwrap();
    let v = |s: &str| p.vector(&m.parse_obj(s).unwrap());
    match monoid_equal(&p, &v("P2"), &v("P3+S2"), DEFAULT_NORM_BOUND) {
        MonoidEq::Equal { chain } => assert_eq!(chain.len(), 1),
        other => panic!("{other:?}"),
    }
    assert_eq!(
        monoid_equal(&p, &v("S2+P2"), &v("S2+P2"), 8),
        MonoidEq::Equal { chain: vec![] }
    );
    assert_eq!(monoid_equal(&p, &v("S2"), &v("P3"), 8), MonoidEq::NotEqual);
}

#[test]
fn reducedness_and_atoms() {
    let m = model("ex5_1");
    let p = monoid_presentation(&m, 1).unwrap();
    assert!(is_reduced(&p).0);
    assert_eq!(names(&m, &atoms(&p, 8).atoms), set(&["S2", "P3", "S3[1]"]));

    let m = model("ex5_2");
    let p = monoid_presentation(&m, 1).unwrap();
    let (reduced, witness) = is_reduced(&p);
    assert!(!reduced);
    assert!(p.relations[witness.unwrap()].0.iter().all(|&a| a == 0));
    let zero = vec![0; p.ngens()];
    let pp = p.vector(&m.parse_obj("P3+P3[1]").unwrap());
    assert!(matches!(monoid_equal(&p, &pp, &zero, 8), MonoidEq::Equal { .. }));

    let a1 = extcat::derived::build_window(1, 0..=0, "a1", 2).unwrap();
    let p = monoid_presentation(&a1, 1).unwrap();
    assert!(is_reduced(&p).0);
    assert_eq!(atoms(&p, 8).atoms, a1.ids());
}

#[test]
fn freeness_on_simples() {
    let m = model("ex5_1");
    let p = monoid_presentation(&m, 1).unwrap();
    assert_eq!(monoid_free_on_simples(&p, &simples(&m).unwrap(), 8), Tri::True);
    let m = model("ex5_2");
    let p = monoid_presentation(&m, 1).unwrap();
    assert_eq!(monoid_free_on_simples(&p, &simples(&m).unwrap(), 8), Tri::False);
    let empty = extcat::table::parse_model(
        r#"{"format":"extcat-model/1","label":"zero","mode":"general","indecs":[]}"#,
        None,
    )
    .unwrap();
    let p = monoid_presentation(&empty, 1).unwrap();
    assert_eq!(monoid_free_on_simples(&p, &[], 8), Tri::True);
    let k = k0(&p, &[], &empty);
    assert_eq!((k.free_rank, k.basis_flag), (0, true));
    assert!(k.invariant_factors.is_empty());
}

#[test]
fn grothendieck_groups() {
    let m = model("ex5_1");
    let p = monoid_presentation(&m, 1).unwrap();
    let k = k0(&p, &simples(&m).unwrap(), &m);
    assert_eq!(k.free_rank, 3);
    assert!(k.basis_flag);
    assert!(k.torsion().is_empty());
    let m = model("win4");
    let p = monoid_presentation(&m, 1).unwrap();
    let k = k0(&p, &[], &m);
    assert_eq!(k.free_rank, 4);
    assert!(k.invariant_factors.iter().all(|&d| d == 1));
}

/// The relation set from indecomposable ends already generates the
/// relations of extriangles with ends of total 2.
#[test]
fn wider_relations_change_nothing() {
    for name in ["ex5_1", "ex5_2", "ex5_3", "modA2", "modA4"] {
        let m = model(name);
        let sim = simples(&m).unwrap();
        let (p1, p2) = (monoid_presentation(&m, 1).unwrap(), monoid_presentation(&m, 2).unwrap());
        let (k1, k2) = (k0(&p1, &sim, &m), k0(&p2, &sim, &m));
        assert_eq!((k1.free_rank, k1.basis_flag), (k2.free_rank, k2.basis_flag), "{name}");
        assert_eq!(k1.torsion(), k2.torsion(), "{name}");
        assert_eq!(
            monoid_free_on_simples(&p1, &sim, 8),
            monoid_free_on_simples(&p2, &sim, 8),
            "{name}"
        );
    }
}

#[test]
fn merging_series() {
    let m = model("ex5_1");
    let sim = simples(&m).unwrap();
    let series = |s: &str| {
        filtration::enumerate(&m, &m.parse_obj(s).unwrap(), &sim, 4)
            .unwrap()
            .filtrations
            .remove(0)
    };
    let xi = m
        .nonsplit_extriangles(1)
        .unwrap()
        .into_iter()
        .find(|e| m.fmt_ext(e) == "(P3, P2, S2)")
        .unwrap();
    let merged = merge_series(&series("P3"), &series("S2"), &xi, &sim, &m).unwrap();
    assert_eq!(merged.target(), m.parse_obj("P2").unwrap());
    assert_eq!(merged.len(), 2);

    let split = extcat::Extriangle::split(&m.parse_obj("S2").unwrap(), &m.parse_obj("P3").unwrap());
    let merged = merge_series(&series("P3"), &series("S2"), &split, &sim, &m).unwrap();
    assert_eq!(merged.target(), m.parse_obj("S2+P3").unwrap());

    let trivial = extcat::Extriangle::split(&Obj::zero(), &m.parse_obj("P3").unwrap());
    let empty = filtration::Filtration::empty();
    assert_eq!(merge_series(&series("P3"), &empty, &trivial, &sim, &m).unwrap(), series("P3"));
}
