//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are run in full and reported as FAIL
//! with their mismatches; only other failures make the target exit nonzero.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use extcat::derived::{build_window, catalog, Interval};
use extcat::fixtures::{all, fixture, win4, StratData};
use extcat::groth::{
    atoms, composition_series, groth_report, jh_and_length_verdict, k0, monoid_presentation,
    simples, zero_simple_like, Tri,
};
use extcat::linalg::Span;
use extcat::model::{opposite, star, validate_model};
use extcat::strat::{
    build_projective_system, check_left_exact, check_projective_system, default_cap,
    enumerate_filtrations, filtered_closure, multiplicities, phi_indices, reorder_filtration,
    resolve_etas, StratSystem, DEFAULT_CLOSURE_MULT,
};
use extcat::{CategoryModel, IndecId, Obj, F2, F3};
use num_rational::Rational64;

type Check = Result<(), String>;

const KNOWN_FAILURES: [u32; 1] = [5];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<T>(r: extcat::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn data(name: &str) -> Result<StratData, String> {
    e2s(fixture(name, 2))?.strat.ok_or_else(|| format!("{name} has no stratifying data"))
}

fn names(m: &CategoryModel, ids: &[IndecId]) -> BTreeSet<String> {
    ids.iter().map(|&i| m.name(i).to_string()).collect()
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn objs(m: &CategoryModel, xs: &[&str]) -> Result<Vec<Obj>, String> {
    xs.iter().map(|s| e2s(m.parse_obj(s))).collect()
}

fn ext_named(m: &CategoryModel, list: Vec<extcat::Extriangle>, s: &str) -> Result<extcat::Extriangle, String> {
    list.into_iter()
        .find(|e| m.fmt_ext(e) == s)
        .ok_or_else(|| format!("no extriangle {s}"))
}

/// Closure, Q and left exactness shared by the three worked examples.
fn example_core(name: &str, closure: &[&str], q: &[&str], left_exact: &[bool]) -> Result<StratData, String> {
    let d = data(name)?;
    let m = &d.ambient;
    let c = e2s(filtered_closure(&d.phi, m, DEFAULT_CLOSURE_MULT))?;
    ensure(names(m, &c.indecs) == set(closure), || {
        format!("closure {:?}", names(m, &c.indecs))
    })?;
    let want = objs(m, q)?;
    let sys = StratSystem::new(d.phi.clone()).with_q(want.clone());
    let r = e2s(check_projective_system(&sys, m))?;
    ensure(r.is_minimal_projective_system, || format!("{q:?} rejected: {r:?}"))?;
    let built = e2s(build_projective_system(&d.phi, m))?;
    ensure(built.q.as_ref() == Some(&want), || format!("built Q {:?}", built.q))?;
    let le = e2s(check_left_exact(&sys, m))?;
    ensure(le.left_exact == left_exact, || format!("left exact {:?}", le.left_exact))?;
    Ok(d)
}

fn criterion_1() -> Check {
    let d = example_core("ex5_1", &["S2", "P3", "S3[1]", "P2"], &["P2", "P3", "S3[1]"], &[true, true, true])?;
    let f = e2s(fixture("ex5_1", 2))?;
    let v = e2s(jh_and_length_verdict(&f.model, 2))?;
    ensure(v == (Tri::True, Tri::True), || format!("jh/length {v:?}"))?;
    let m = &d.ambient;
    let xi = ext_named(m, e2s(m.nonsplit_extriangles(1))?, "(P3, P2, S2)")?;
    ensure(!e2s(m.is_epi(&xi))?, || "P2 -> S2 is an epimorphism".into())
}

fn criterion_2() -> Check {
    example_core("ex5_2", &["P2[1]", "S2", "P3", "P2", "P3[1]"], &["0", "P2", "P3"], &[true, false, false])?;
    let m = e2s(fixture("ex5_2", 2))?.model;
    ensure(!e2s(zero_simple_like(&m))?, || "0 is simple-like".into())?;
    ext_named(&m, e2s(m.zero_middled())?, "(P3, 0, P3[1])")?;
    let v = e2s(jh_and_length_verdict(&m, 2))?;
    ensure(v == (Tri::False, Tri::False), || format!("jh/length {v:?}"))
}

fn criterion_3() -> Check {
    let d = example_core(
        "ex5_3",
        &["N[1]", "S2", "P3", "P2", "S3[1]"],
        &["S3[1]", "P2", "P3"],
        &[true, false, true],
    )?;
    let f = e2s(fixture("ex5_3", 2))?;
    let (jh, _) = e2s(jh_and_length_verdict(&f.model, 2))?;
    ensure(jh == Tri::True, || format!("jh {jh:?}"))?;
    let m = &d.ambient;
    let sys = StratSystem::new(d.phi.clone()).with_q(d.q.clone());
    let etas = e2s(resolve_etas(&sys, m))?;
    // k_1 : K_1 -> Q_1 is nonzero and dies on q_2
    let k1 = &etas[0];
    ensure(e2s(m.is_epi(&etas[1]))? == false, || "q_2 is an epimorphism".into())?;
    let w = e2s(m.epi_witness(&etas[1], &m.ids()))?;
    ensure(w.map(Obj::indec).as_ref() == Some(&k1.mid), || {
        format!("witness {:?}, Q_1 = {}", w.map(|i| m.name(i)), m.fmt_obj(&k1.mid))
    })?;
    ensure(k1.a == etas[1].c && m.hom_dim(&k1.a, &k1.mid) > 0, || {
        format!("k_1 : {} -> {}", m.fmt_obj(&k1.a), m.fmt_obj(&k1.mid))
    })
}

fn criterion_4() -> Check {
    for f in e2s(all(2))? {
        let r = e2s(groth_report(&f.model))?;
        let t = &r.verdicts;
        ensure(t.agree, || {
            format!("{}: ({:?}, {:?}, {:?})", f.name, t.verdict_i, t.verdict_ii, t.verdict_iii)
        })?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    let mut bad = Vec::new();
    let mut checked = 0;
    for name in ["ex5_1", "ex5_3"] {
        let d = data(name)?;
        let m = &d.ambient;
        let sys = StratSystem::new(d.phi.clone()).with_q(d.q.clone());
        let c = e2s(filtered_closure(&d.phi, m, DEFAULT_CLOSURE_MULT))?;
        for x in &c.objects {
            let mult = e2s(multiplicities(x, &sys, m))?;
            let fs = e2s(enumerate_filtrations(x, &d.phi, m, default_cap(x)))?;
            ensure(!fs.truncated && !fs.filtrations.is_empty(), || {
                format!("{name}: no complete filtration set for {}", m.fmt_obj(x))
            })?;
            let lengths: BTreeSet<usize> = fs.filtrations.iter().map(|f| f.len()).collect();
            if lengths.len() != 1 {
                bad.push(format!("{name} {}: lengths {lengths:?}", m.fmt_obj(x)));
            }
            for f in &fs.filtrations {
                let counts: Vec<u32> = d.phi.iter().map(|p| f.factor_counts().get(p).copied().unwrap_or(0)).collect();
                if counts != mult {
                    bad.push(format!("{name} {}: m = {mult:?}, filtration {counts:?}", m.fmt_obj(x)));
                    break;
                }
            }
            checked += 1;
        }
    }
    ensure(bad.is_empty(), || {
        format!("{} of {checked} objects disagree; {}", bad.len(), bad.iter().take(4).cloned().collect::<Vec<_>>().join("; "))
    })
}

// Interval oracle: dim Hom([a,b], [c,d]) = 1 iff c <= a <= d <= b.
fn hom_mod(x: (u8, u8), y: (u8, u8)) -> u32 {
    (y.0 <= x.0 && x.0 <= y.1 && y.1 <= x.1) as u32
}

fn tau(x: (u8, u8), n: u8) -> Option<(u8, u8)> {
    (x.1 < n).then_some((x.0 + 1, x.1 + 1))
}

fn hom_derived(x: &Interval, y: &Interval, n: u8) -> u32 {
    let (xm, ym) = ((x.a, x.b), (y.a, y.b));
    match y.shift - x.shift {
        0 => hom_mod(xm, ym),
        1 => tau(xm, n).map_or(0, |t| hom_mod(ym, t)),
        _ => 0,
    }
}

fn criterion_6() -> Check {
    let ivs = catalog(4, 0..=1);
    let mut tables = Vec::new();
    for p in [2, 3] {
        let m = e2s(build_window(4, 0..=1, "w", p))?;
        for (i, x) in ivs.iter().enumerate() {
            for (j, y) in ivs.iter().enumerate() {
                ensure(m.hom_table()[i][j] == hom_derived(x, y, 4), || format!("p = {p}: Hom({x}, {y})"))?;
                ensure(m.ext_table()[i][j] == hom_derived(x, &y.shifted(1), 4), || format!("p = {p}: E({x}, {y})"))?;
            }
        }
        tables.push((m.hom_table().to_vec(), m.ext_table().to_vec()));
        // meshes tau X -> E -> X: E is the sum of the common neighbours
        let id = |iv: &Interval| m.id_of(&iv.name(4));
        let inside: BTreeSet<Interval> = ivs.iter().copied().collect();
        let arrows: BTreeSet<(Interval, Interval)> = e2s(
            m.ar_arrows()
                .ok_or_else(|| extcat::Error::Schema("no arrows".into())),
        )?
        .into_iter()
        .map(|(x, y)| (ivs[x.index()], ivs[y.index()]))
        .collect();
        let mut meshes = 0;
        for x in &ivs {
            let t = match tau((x.a, x.b), 4) {
                Some((a, b)) => Interval::new(a, b, x.shift),
                None => Interval::new(1, x.a, x.shift - 1),
            };
            if !inside.contains(&t) {
                continue;
            }
            let mut mid = Obj::zero();
            for (s, e) in &arrows {
                if *s == t && arrows.contains(&(*e, *x)) {
                    mid = mid.sum(&Obj::indec(e2s(id(e))?));
                }
            }
            let list = e2s(m.middle_terms(&Obj::indec(e2s(id(x))?), &Obj::indec(e2s(id(&t))?)))?;
            ensure(list.iter().any(|e| !e.is_split() && e.mid == mid), || format!("p = {p}: mesh at {x}"))?;
            meshes += 1;
        }
        ensure(meshes == 16, || format!("p = {p}: {meshes} meshes"))?;
    }
    ensure(tables[0] == tables[1], || "tables differ between p = 2 and p = 3".into())
}

fn rank_of<F: extcat::Field>(rows: &[Vec<i64>], n: usize, conv: impl Fn(i64) -> F) -> usize {
    let rows: Vec<Vec<F>> = rows.iter().map(|r| r.iter().map(|&x| conv(x)).collect()).collect();
    Span::of(n, &rows).dim()
}

fn criterion_7() -> Check {
    let m = e2s(win4(2))?;
    let p = e2s(monoid_presentation(&m, 1))?;
    let k = k0(&p, &e2s(simples(&m))?, &m);
    ensure(k.free_rank == 4 && k.invariant_factors.iter().all(|&d| d == 1), || {
        format!("rank {}, factors {:?}", k.free_rank, k.invariant_factors)
    })?;
    // oracle: the signed dimension vector kills every relation, and the
    // relation lattice has corank 4 over Q, F2 and F3 (no 2- or 3-torsion)
    let ivs = catalog(4, 0..=1);
    let rows: Vec<Vec<i64>> = p
        .relations
        .iter()
        .map(|(u, v)| u.iter().zip(v).map(|(&a, &b)| a as i64 - b as i64).collect())
        .collect();
    for r in &rows {
        let mut dim = [0i64; 4];
        for (g, &c) in r.iter().enumerate() {
            let iv = ivs[p.generators[g].index()];
            let sign = if iv.shift % 2 == 0 { 1 } else { -1 };
            for v in iv.a..=iv.b {
                dim[v as usize - 1] += sign * c;
            }
        }
        ensure(dim == [0; 4], || format!("relation {r:?} has class {dim:?}"))?;
    }
    let n = p.ngens();
    let q = rank_of(&rows, n, Rational64::from_integer);
    let f2 = rank_of(&rows, n, |x| F2::from_i64(x));
    let f3 = rank_of(&rows, n, |x| F3::from_i64(x));
    ensure(n - q == 4 && q == f2 && q == f3, || format!("ranks Q {q}, F2 {f2}, F3 {f3} of {n}"))?;

    let m = e2s(fixture("ex5_1", 2))?.model;
    let p = e2s(monoid_presentation(&m, 1))?;
    let sim = e2s(simples(&m))?;
    let k = k0(&p, &sim, &m);
    ensure(k.free_rank == 3 && k.basis_flag && sim.len() == 3, || {
        format!("ex5_1: rank {}, basis {}", k.free_rank, k.basis_flag)
    })
}

fn star_associative(m: &CategoryModel) -> Check {
    let one = |x: IndecId| BTreeSet::from([Obj::indec(x)]);
    for x in m.ids() {
        for y in m.ids() {
            let xy = e2s(star(&one(x), &one(y), m))?;
            for z in m.ids() {
                let l = e2s(star(&xy, &one(z), m))?;
                let r = e2s(star(&one(x), &e2s(star(&one(y), &one(z), m))?, m))?;
                ensure(l == r, || format!("{}: ({}, {}, {})", m.meta().label, m.name(x), m.name(y), m.name(z)))?;
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    let fixtures = e2s(all(2))?;
    for f in &fixtures {
        let r = validate_model(&f.model);
        ensure(r.is_ok(), || format!("{}: {r:?}", f.name))?;
        star_associative(&f.model)?;
        let op = opposite(&f.model);
        let (a, b) = (e2s(f.model.object_level())?, e2s(op.object_level())?);
        let n = f.model.len();
        let transposed = (0..n).all(|i| (0..n).all(|j| a.hom[i][j] == b.hom[j][i] && a.ext[i][j] == b.ext[j][i]));
        ensure(transposed && e2s(opposite(&op).object_level())? == a, || format!("{}: opposite", f.name))?;
        if e2s(zero_simple_like(&f.model))? {
            let sim = e2s(simples(&f.model))?;
            let p = e2s(monoid_presentation(&f.model, 1))?;
            ensure(atoms(&p, 8).atoms == sim, || format!("{}: atoms differ from simples", f.name))?;
            for x in f.model.ids() {
                let v = e2s(composition_series(&Obj::indec(x), &sim, &f.model, 8))?;
                let one = v.has_series && v.lengths == BTreeSet::from([1]);
                ensure(one == sim.contains(&x), || format!("{}: length-1 test at {}", f.name, f.model.name(x)))?;
            }
        }
    }
    for name in ["ex5_1", "ex5_3"] {
        let d = data(name)?;
        let m = &d.ambient;
        for x in e2s(filtered_closure(&d.phi, m, DEFAULT_CLOSURE_MULT))?.objects {
            for f in e2s(enumerate_filtrations(&x, &d.phi, m, default_cap(&x)))?.filtrations {
                let r = e2s(reorder_filtration(&f, &d.phi, m))?;
                let idx = phi_indices(&r, &d.phi);
                let counts = |f: &extcat::filtration::Filtration| -> BTreeMap<IndecId, u32> { f.factor_counts() };
                ensure(
                    r.target() == x && r.len() == f.len() && counts(&r) == counts(&f) && idx.windows(2).all(|w| w[0] >= w[1]),
                    || format!("{name}: reorder of a filtration of {}", m.fmt_obj(&x)),
                )?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Check); 8] = [
        (1, "first worked example", Duration::from_secs(1), criterion_1),
        (2, "second worked example", Duration::from_secs(1), criterion_2),
        (3, "third worked example", Duration::from_secs(1), criterion_3),
        (4, "three-way agreement on all fixtures", Duration::from_secs(10), criterion_4),
        (5, "multiplicities equal filtration counts", Duration::from_secs(5), criterion_5),
        (6, "backend tables and meshes against the oracle", Duration::from_secs(5), criterion_6),
        (7, "Grothendieck group numerics", Duration::from_secs(1), criterion_7),
        (8, "structural property suites", Duration::from_secs(10), criterion_8),
    ];
    let mut unexpected = 0;
    for (k, title, budget, run) in criteria {
        let t = Instant::now();
        let mut r = run();
        let dt = t.elapsed();
        if r.is_ok() && dt > budget {
            r = Err(format!("took {dt:.2?}, budget {budget:?}"));
        }
        let known = KNOWN_FAILURES.contains(&k);
        match &r {
            Ok(()) => println!("PASS criterion {k}: {title} ({dt:.2?})"),
            Err(e) => println!("FAIL criterion {k}: {title} ({dt:.2?}){}: {e}", if known { " [known]" } else { "" }),
        }
        if r.is_err() != known {
            if known {
                println!("     criterion {k} was expected to fail and passed");
            }
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
