//! Property suites: object algebra, exact linear algebra, Smith form, model
//! structure, filtrations and the Grothendieck monoid.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use proptest::prelude::*;

use extcat::derived::build_window;
use extcat::fixtures::{all, fixture, win4};
use extcat::groth::{
    atoms, composition_series, merge_series, monoid_equal, monoid_presentation, simples,
    zero_simple_like, MonoidEq,
};
use extcat::linalg::Matrix;
use extcat::model::{opposite, star, validate_model};
use extcat::smith::invariant_factors;
use extcat::strat::{
    build_projective_system, enumerate_filtrations, filtered_closure, phi_indices,
    reorder_filtration,
};
use extcat::table::{parse_model, save_model_string};
use extcat::{filtration, CategoryModel, IndecId, Obj, F3};

fn counts(n: usize, max: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..=max, n)
}

// ------------------------------------------------------------ objects

proptest! {
    #[test]
    fn direct_sum_is_multiset_union(a in counts(6, 3), b in counts(6, 3), c in counts(6, 3)) {
        let (x, y, z) = (Obj::from_counts(&a), Obj::from_counts(&b), Obj::from_counts(&c));
        prop_assert_eq!(x.sum(&y), y.sum(&x));
        prop_assert_eq!(x.sum(&y).sum(&z), x.sum(&y.sum(&z)));
        prop_assert_eq!(x.sum(&Obj::zero()), x.clone());
        prop_assert_eq!(x.sum(&y).minus(&y), Some(x.clone()));
        prop_assert_eq!(x.sum(&y).total(), x.total() + y.total());
        let both: Vec<u32> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        prop_assert_eq!(x.sum(&y).counts(6), both);
        prop_assert_eq!(x.is_zero(), a.iter().all(|&k| k == 0));
    }
}

// ------------------------------------------------------------ linear algebra

fn f3_matrix(r: usize, c: usize) -> impl Strategy<Value = Matrix<F3>> {
    prop::collection::vec(0u32..3, r * c).prop_map(move |v| {
        let rows: Vec<Vec<F3>> = v.chunks(c).map(|row| row.iter().map(|&x| F3::new(x)).collect()).collect();
        Matrix::from_rows(&rows)
    })
}

proptest! {
    #[test]
    fn rank_nullity_over_f3(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| f3_matrix(r, c))) {
        let c = m.cols();
        let ker = m.kernel();
        prop_assert_eq!(m.rank() + ker.len(), c);
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(|x| *x == F3::new(0)));
        }
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rational_solve_solves(v in prop::collection::vec(-4i64..5, 9), b in prop::collection::vec(-4i64..5, 3)) {
        let rows: Vec<Vec<Rational64>> = v.chunks(3).map(|r| r.iter().map(|&x| Rational64::from_integer(x)).collect()).collect();
        let m = Matrix::from_rows(&rows);
        let b: Vec<Rational64> = b.into_iter().map(Rational64::from_integer).collect();
        match m.solve(&b) {
            Some(x) => prop_assert_eq!(m.mul_vec(&x), b),
            None => prop_assert!(m.rank() < 3),
        }
        if let Some(inv) = m.inverse() {
            prop_assert_eq!(&m * &inv, Matrix::identity(3));
        }
    }
}

// ------------------------------------------------------------ Smith form

fn det(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| (0..n).filter(|i| b >> i & 1 == 1).collect())
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// `d_k`: gcd of all k-by-k minors.
fn determinantal_divisor(m: &[Vec<i64>], ncols: usize, k: usize) -> i64 {
    let mut g = 0;
    for rs in subsets(m.len(), k) {
        for cs in subsets(ncols, k) {
            let sub: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
            g = gcd(g, det(&sub));
        }
    }
    g
}

proptest! {
    #[test]
    fn smith_factors_match_minors((r, c) in (1usize..4, 1usize..4), v in prop::collection::vec(-6i64..7, 16)) {
        let m: Vec<Vec<i64>> = (0..r).map(|i| v[i * c..i * c + c].to_vec()).collect();
        let f = invariant_factors(&m, c);
        prop_assert!(f.iter().all(|&d| d > 0));
        prop_assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
        let mut prod = 1;
        for k in 1..=r.min(c) {
            let dk = determinantal_divisor(&m, c, k);
            if k <= f.len() {
                prod *= f[k - 1];
                prop_assert_eq!(prod, dk, "k = {}", k);
            } else {
                prop_assert_eq!(dk, 0);
            }
        }
    }
}

// ------------------------------------------------------------ model structure

fn sampled(m: &CategoryModel) -> impl Strategy<Value = Obj> {
    counts(m.len(), 2).prop_map(|c| Obj::from_counts(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_and_ext_are_additive(
        (x, x2, y) in {
            let m = win4(2).unwrap();
            (sampled(&m), sampled(&m), sampled(&m))
        }
    ) {
        let m = win4(2).unwrap();
        let xx = x.sum(&x2);
        prop_assert_eq!(m.hom_dim(&xx, &y), m.hom_dim(&x, &y) + m.hom_dim(&x2, &y));
        prop_assert_eq!(m.hom_dim(&y, &xx), m.hom_dim(&y, &x) + m.hom_dim(&y, &x2));
        prop_assert_eq!(m.ext_dim(&xx, &y), m.ext_dim(&x, &y) + m.ext_dim(&x2, &y));
        prop_assert_eq!(m.ext_dim(&y, &xx), m.ext_dim(&y, &x) + m.ext_dim(&y, &x2));
    }

    #[test]
    fn windows_round_trip_through_files(n in 1usize..=4, hi in 0i32..=1, p in prop::sample::select(vec![2u32, 3])) {
        let m = build_window(n, 0..=hi, "w", p).unwrap();
        let back = parse_model(&save_model_string(&m).unwrap(), None).unwrap();
        prop_assert_eq!(back.object_level().unwrap(), m.object_level().unwrap());
    }
}

#[test]
fn bundled_models_validate_and_round_trip() {
    for f in all(2).unwrap() {
        let r = validate_model(&f.model);
        assert!(r.is_ok(), "{}: {r:?}", f.name);
        let back = parse_model(&save_model_string(&f.model).unwrap(), None).unwrap();
        assert_eq!(back.object_level().unwrap(), f.model.object_level().unwrap(), "{}", f.name);
    }
}

#[test]
fn opposite_is_an_involution() {
    for f in all(2).unwrap() {
        let m = &f.model;
        let op = opposite(m);
        let (a, b) = (m.object_level().unwrap(), op.object_level().unwrap());
        let n = m.len();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(a.hom[i][j], b.hom[j][i]);
                assert_eq!(a.ext[i][j], b.ext[j][i]);
            }
        }
        assert_eq!(opposite(&op).object_level().unwrap(), a, "{}", f.name);
    }
}

/// Ext-orthogonal pairs have only the split extriangle.
#[test]
fn no_extension_means_split_only() {
    let m = win4(2).unwrap();
    for x in m.ids() {
        for y in m.ids() {
            let (c, a) = (Obj::indec(x), Obj::indec(y));
            let list = m.middle_terms(&c, &a).unwrap();
            assert!(list.iter().any(|e| e.is_split() && e.mid == c.sum(&a)));
            if m.ext_dim(&c, &a) == 0 {
                assert_eq!(list.len(), 1);
            }
        }
    }
}

fn singleton(x: IndecId) -> BTreeSet<Obj> {
    BTreeSet::from([Obj::indec(x)])
}

fn star_associative(m: &CategoryModel, ids: &[IndecId]) {
    for &x in ids {
        for &y in ids {
            let xy = star(&singleton(x), &singleton(y), m).unwrap();
            for &z in ids {
                let yz = star(&singleton(y), &singleton(z), m).unwrap();
                let l = star(&xy, &singleton(z), m).unwrap();
                let r = star(&singleton(x), &yz, m).unwrap();
                assert_eq!(l, r, "({}, {}, {})", m.name(x), m.name(y), m.name(z));
            }
        }
    }
}

#[test]
fn star_is_associative_on_small_models() {
    for name in ["ex5_1", "ex5_2", "ex5_3", "modA2", "modA4"] {
        let m = fixture(name, 2).unwrap().model;
        star_associative(&m, &m.ids());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_is_associative_on_the_window(x in 0u32..20, y in 0u32..20, z in 0u32..20) {
        let m = win4(2).unwrap();
        let (x, y, z) = (IndecId(x), IndecId(y), IndecId(z));
        let l = star(&star(&singleton(x), &singleton(y), &m).unwrap(), &singleton(z), &m).unwrap();
        let r = star(&singleton(x), &star(&singleton(y), &singleton(z), &m).unwrap(), &m).unwrap();
        prop_assert_eq!(l, r);
    }
}

#[test]
fn enumeration_is_deterministic() {
    let m = win4(2).unwrap();
    assert_eq!(m.window_objects(2), m.window_objects(2));
    assert_eq!(m.nonsplit_extriangles(1).unwrap(), m.nonsplit_extriangles(1).unwrap());
    let a = win4(3).unwrap();
    assert_eq!(m.window_objects(2), a.window_objects(2));
}

// ------------------------------------------------------------ filtrations

fn strat_objects(name: &str) -> (CategoryModel, Vec<IndecId>, Vec<Obj>) {
    let d = fixture(name, 2).unwrap().strat.unwrap();
    let c = filtered_closure(&d.phi, &d.ambient, 2).unwrap();
    (d.ambient, d.phi, c.objects.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reordering_preserves_target_length_and_factors(
        name in prop::sample::select(vec!["ex5_1", "ex5_3"]),
        pick in any::<prop::sample::Index>(),
        which in any::<prop::sample::Index>(),
    ) {
        let (m, phi, objs) = strat_objects(name);
        let x = pick.get(&objs);
        let fs = enumerate_filtrations(x, &phi, &m, 12).unwrap();
        prop_assume!(!fs.filtrations.is_empty());
        let f = which.get(&fs.filtrations);
        let r = reorder_filtration(f, &phi, &m).unwrap();
        prop_assert_eq!(r.target(), f.target());
        prop_assert_eq!(r.len(), f.len());
        prop_assert_eq!(r.factor_counts(), f.factor_counts());
        prop_assert!(r.is_chain());
        let idx = phi_indices(&r, &phi);
        prop_assert!(idx.windows(2).all(|w| w[0] >= w[1]), "{:?}", idx);
    }
}

/// Hom(Φ_j, Φ_i) = 0 for j > i extends to Hom(F(Φ_{>i}), Φ_i) = 0.
#[test]
fn hom_vanishing_propagates_to_tails() {
    let d = fixture("ex5_1", 2).unwrap().strat.unwrap();
    let m = &d.ambient;
    for i in 0..d.phi.len() {
        let tail = filtered_closure(&d.phi[i + 1..], m, 2).unwrap();
        for x in &tail.objects {
            assert_eq!(m.hom_dim(x, &Obj::indec(d.phi[i])), 0, "{}", m.fmt_obj(x));
        }
    }
}

#[test]
fn projective_systems_do_not_depend_on_the_prime() {
    for name in ["ex5_1", "ex5_2", "ex5_3"] {
        let a = fixture(name, 2).unwrap().strat.unwrap();
        let b = fixture(name, 3).unwrap().strat.unwrap();
        let qa = build_projective_system(&a.phi, &a.ambient).unwrap().q;
        let qb = build_projective_system(&b.phi, &b.ambient).unwrap().q;
        assert_eq!(qa, qb, "{name}");
        assert_eq!(qa, build_projective_system(&a.phi, &a.ambient).unwrap().q);
    }
}

// ------------------------------------------------------------ monoid and series

fn simple_like_models() -> Vec<(String, CategoryModel)> {
    all(2)
        .unwrap()
        .into_iter()
        .filter(|f| zero_simple_like(&f.model).unwrap())
        .map(|f| (f.name, f.model))
        .collect()
}

#[test]
fn atoms_are_the_simples() {
    for (name, m) in simple_like_models() {
        let p = monoid_presentation(&m, 1).unwrap();
        let a = atoms(&p, 8);
        assert!(!a.truncated, "{name}");
        assert_eq!(a.atoms, simples(&m).unwrap(), "{name}");
    }
}

/// An indecomposable is simple exactly when all its series have length 1.
#[test]
fn simple_iff_every_series_has_length_one() {
    for (name, m) in simple_like_models() {
        let sim = simples(&m).unwrap();
        for x in m.ids() {
            let v = composition_series(&Obj::indec(x), &sim, &m, 8).unwrap();
            let one = v.has_series && v.lengths == BTreeSet::from([1]);
            assert_eq!(one, sim.contains(&x), "{name}: {}", m.name(x));
        }
    }
}

/// With 0 simple-like, only 0 has the class of 0.
#[test]
fn only_zero_is_zero_in_the_monoid() {
    for (name, m) in simple_like_models() {
        let p = monoid_presentation(&m, 1).unwrap();
        let zero = vec![0; p.ngens()];
        for x in m.window_objects(2) {
            let r = monoid_equal(&p, &p.vector(&x), &zero, 8);
            assert_eq!(matches!(r, MonoidEq::Equal { .. }), x.is_zero(), "{name}: {}", m.fmt_obj(&x));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monoid_equality_is_symmetric(
        name in prop::sample::select(vec!["ex5_1", "ex5_2", "ex5_3", "modA2"]),
        a in counts(6, 2),
        b in counts(6, 2),
    ) {
        let m = fixture(name, 2).unwrap().model;
        let p = monoid_presentation(&m, 1).unwrap();
        let n = p.ngens();
        let (x, y) = (&a[..n.min(6)], &b[..n.min(6)]);
        let pad = |v: &[u32]| { let mut v = v.to_vec(); v.resize(n, 0); v };
        let (x, y) = (pad(x), pad(y));
        let kind = |r: MonoidEq| match r {
            MonoidEq::Equal { .. } => 0,
            MonoidEq::NotEqual => 1,
            MonoidEq::Unknown => 2,
        };
        prop_assert_eq!(kind(monoid_equal(&p, &x, &y, 8)), kind(monoid_equal(&p, &y, &x, 8)));
    }
}

#[test]
fn merged_series_carry_both_factor_sets() {
    let m = fixture("ex5_1", 2).unwrap().model;
    let sim = simples(&m).unwrap();
    let first = |x: &Obj| {
        filtration::enumerate(&m, x, &sim, 8).unwrap().filtrations.into_iter().next().unwrap()
    };
    let mut seen = 0;
    for xi in m.nonsplit_extriangles(2).unwrap() {
        let (sa, sc) = (first(&xi.a), first(&xi.c));
        let merged = merge_series(&sa, &sc, &xi, &sim, &m).unwrap();
        let mut want: BTreeMap<IndecId, u32> = sa.factor_counts();
        for (k, v) in sc.factor_counts() {
            *want.entry(k).or_default() += v;
        }
        assert_eq!(merged.factor_counts(), want, "{}", m.fmt_ext(&xi));
        assert_eq!(merged.target(), xi.mid);
        assert!(merged.is_chain());
        seen += 1;
    }
    assert!(seen > 0);
}
