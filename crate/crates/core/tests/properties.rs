use floer_workbench::ainfty_core::{
    compose_functors, fixtures, verify_ainfty, verify_functor, verify_homotopy, AInftyCategory, AInftyHomotopy, Basis,
    ChordBasisElement, MapFamily, MultilinearMap,
};
use floer_workbench::chord_spectra::{
    action_gap, enumerate_loops_t2, model_lipschitz, CylindricalMetricModel, FlatTorusLattice,
};
use floer_workbench::maslov_grading::{
    check_symplectic, rs_index, Concatenated, Conjugated, FnPath, LagrangianFrame, Reversed,
};
use floer_workbench::moduli_trees::{
    boundary_facets_l, boundary_facets_n, enumerate_trees, partial_order, total_order, DecoratedTree, Rational,
};
use floer_workbench::sign_engine::{
    club, dagger, ddagger, identity_sides, spade, square_f, square_fprime, square_m, verify_identity, Identity,
    IdentityVariant, Parity, SplitData,
};
use floer_workbench::slit_domains::{build_slit_map, eval_beta, invert_slit_params, Weights};
use floer_workbench::workbench::random_smooth_path;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

fn slit_instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=4usize).prop_flat_map(|k| {
        (prop::collection::vec(0.2..3.0f64, k), prop::collection::vec(0.3..3.0f64, k - 1)).prop_map(|(w, gaps)| {
            let mut a = vec![0.0];
            for g in gaps {
                a.push(a.last().unwrap() + g);
            }
            (w, a)
        })
    })
}

/// `(inputs of a, i, inputs of b, j, inputs of c)` with `a` gluable into input `i` of `b` and
/// `b` into input `j` of `c`.
fn gluable_triple() -> impl Strategy<Value = (Vec<f64>, usize, Vec<f64>, usize, Vec<f64>)> {
    fn split(total: f64, fractions: &[f64]) -> Vec<f64> {
        let s: f64 = fractions.iter().sum();
        fractions.iter().map(|f| total * f / s).collect()
    }
    (
        prop::collection::vec(0.2..3.0f64, 1..4),
        prop::collection::vec(0.1..1.0f64, 1..4),
        prop::collection::vec(0.1..1.0f64, 1..4),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(c, fb, fa, j, i)| {
            let j = j.index(c.len()) + 1;
            let b = split(c[j - 1], &fb);
            let i = i.index(b.len()) + 1;
            let a = split(b[i - 1], &fa);
            (a, i, b, j, c)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_critical_point_per_gap((w, a) in slit_instance()) {
        let spec = build_slit_map(&Weights::new(w.clone()).unwrap(), &a).unwrap();
        let crit = spec.critical_points();
        prop_assert_eq!(crit.len(), w.len() - 1);
        for (j, c) in crit.iter().enumerate() {
            let (lo, hi) = (spec.punctures()[j], spec.punctures()[j + 1]);
            prop_assert!(lo < *c && *c < hi, "critical point {} outside ({}, {})", c, lo, hi);
        }
    }

    #[test]
    fn boundary_levels_and_tangential_beta((w, a) in slit_instance(), t in 0.05..0.95f64) {
        let weights = Weights::new(w.clone()).unwrap();
        let spec = build_slit_map(&weights, &a).unwrap();
        let mut xs = vec![a[0] - 1.5, a[a.len() - 1] + 1.5];
        xs.extend(a.windows(2).map(|p| p[0] + t * (p[1] - p[0])));
        for x in xs {
            let level = spec.boundary_level(x);
            let im = spec.map_value(Complex64::new(x, 0.0)).unwrap().im;
            prop_assert!((im - level).abs() < 1e-12, "Im F({}) = {}, level {}", x, im, level);
            let b = eval_beta(&spec, Complex64::new(x, 0.0)).unwrap().beta;
            prop_assert!(b[0].abs() < 1e-12, "i*β = {} at {}", b[0], x);
        }
        prop_assert!((spec.boundary_level(a[0] - 1.0) - weights.w0()).abs() < 1e-12);
        prop_assert_eq!(spec.boundary_level(a[a.len() - 1] + 1.0), 0.0);
    }

    #[test]
    fn slit_round_trip((w, a) in slit_instance()) {
        let weights = Weights::new(w).unwrap();
        let spec = build_slit_map(&weights, &a).unwrap();
        let back = invert_slit_params(&weights, spec.slit_params()).unwrap();
        for (x, y) in back.slit_params().iter().zip(spec.slit_params()) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn weight_gluing_is_associative((a, i, b, j, c) in gluable_triple()) {
        let (a, b, c) = (Weights::new(a).unwrap(), Weights::new(b).unwrap(), Weights::new(c).unwrap());
        let left = Weights::glue(&a, &Weights::glue(&b, &c, j).unwrap(), j + i - 1).unwrap();
        let right = Weights::glue(&Weights::glue(&a, &b, i).unwrap(), &c, j).unwrap();
        prop_assert_eq!(left.k(), right.k());
        for (x, y) in left.inputs().iter().zip(right.inputs()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

/// A tree on `k` leaves with allocations strictly decreasing away from the root.
fn strictly_decorated() -> impl Strategy<Value = DecoratedTree> {
    (2..=6usize, any::<prop::sample::Index>(), prop::collection::vec(1..6i64, 8), 1..=4i64).prop_map(
        |(k, pick, steps, root)| {
            let trees = enumerate_trees(k).unwrap();
            let tree = trees[pick.index(trees.len())].clone();
            let n = tree.vertex_count();
            let mut rho = vec![Rational::new(root, 4); n];
            for v in 0..n {
                if let Some(p) = tree.parent(v) {
                    let s = steps[v % steps.len()];
                    rho[v] = rho[p] * Rational::new(s, s + 1);
                }
            }
            DecoratedTree::new(tree, rho).unwrap()
        },
    )
}

fn loosely_decorated() -> impl Strategy<Value = DecoratedTree> {
    (2..=5usize, any::<prop::sample::Index>(), prop::collection::vec(0..=4i64, 8)).prop_map(|(k, pick, raw)| {
        let trees = enumerate_trees(k).unwrap();
        let tree = trees[pick.index(trees.len())].clone();
        let n = tree.vertex_count();
        let mut rho = vec![Rational::new(raw[0], 4); n];
        for v in 0..n {
            if let Some(p) = tree.parent(v) {
                rho[v] = rho[p].min(Rational::new(raw[v % raw.len()], 4));
            }
        }
        DecoratedTree::new(tree, rho).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_is_total_and_refines_leaf_paths(d in strictly_decorated()) {
        let order = total_order(&d).unwrap();
        prop_assert_eq!(order.len(), d.tree.vertex_count());
        let pos = |v: usize| order.iter().position(|x| *x == v).unwrap();
        let below = partial_order(&d.tree);
        for (a, b) in below.pairs() {
            if a == b {
                continue;
            }
            // a lies strictly between b and the leaves
            if d.tree.j_tm(a) == d.tree.j_tm(b) {
                prop_assert!(pos(a) < pos(b), "{} ≺ {} on the leftmost chain but ordered after", a, b);
            } else {
                prop_assert!(pos(b) < pos(a), "{} ≺ {} off the leftmost chain but ordered before", a, b);
            }
        }
    }

    #[test]
    fn order_degenerates_exactly_on_ties(d in loosely_decorated()) {
        let n = d.tree.vertex_count();
        let tie = (0..n).any(|a| (0..a).any(|b| d.tree.j_tm(a) == d.tree.j_tm(b) && d.rho[a] == d.rho[b]));
        prop_assert_eq!(total_order(&d).is_err(), tie);
        let below = partial_order(&d.tree);
        for (a, b) in below.pairs() {
            prop_assert!(d.rho[a] <= d.rho[b]);
        }
    }
}

#[test]
fn facet_term_bijection_at_arity_five() {
    let mut facets: Vec<String> = boundary_facets_n(5).unwrap().iter().map(|f| common::render(&f.term, 5)).collect();
    let mut terms = common::functor_expansion(5);
    facets.sort();
    terms.sort();
    assert_eq!(facets, terms);
    let mut facets: Vec<String> = boundary_facets_l(5).unwrap().iter().map(|f| common::render(&f.term, 5)).collect();
    let mut terms = common::homotopy_expansion(5);
    facets.sort();
    terms.sort();
    assert_eq!(facets, terms);
    assert_eq!(common::cut_compositions(5).len(), 16);
    assert_eq!(common::args(1, 2), "x1,x2");
}

fn degrees(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6..=6i64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn signs_depend_on_parity_only(mu in degrees(1..=6), shifts in prop::collection::vec(-3..=3i64, 6), k in 0..6usize) {
        let nu: Vec<i64> = mu.iter().zip(&shifts).map(|(x, s)| x + 2 * s).collect();
        let d = mu.len();
        prop_assert_eq!(dagger(&mu), dagger(&nu));
        prop_assert_eq!(spade(&mu, k), spade(&nu, k));
        for n in 0..=d {
            prop_assert_eq!(ddagger(&mu, n).unwrap(), ddagger(&nu, n).unwrap());
            for m in 1..=d - n {
                prop_assert_eq!(square_m(&mu, d, n, m).unwrap(), square_m(&nu, d, n, m).unwrap());
                prop_assert_eq!(square_f(&mu, d, n, m).unwrap(), square_f(&nu, d, n, m).unwrap());
                for which in [Identity::MComposition, Identity::FComposition] {
                    let split = SplitData::Insert { n, m };
                    let s = identity_sides(which, &mu, &split, IdentityVariant::Standard).unwrap();
                    let t = identity_sides(which, &nu, &split, IdentityVariant::Standard).unwrap();
                    prop_assert_eq!((s.lhs, s.rhs), (t.lhs, t.rhs));
                }
            }
        }
        for parts in floer_workbench::sign_engine::compositions(d) {
            prop_assert_eq!(square_fprime(&mu, &parts).unwrap(), square_fprime(&nu, &parts).unwrap());
            for i in 1..=parts.len() {
                prop_assert_eq!(club(&mu, &parts, i).unwrap(), club(&nu, &parts, i).unwrap());
            }
        }
    }

    #[test]
    fn spade_is_dagger_plus_arity(mu in degrees(0..=7), k in 0..20usize) {
        prop_assert_eq!(spade(&mu, k), dagger(&mu) ^ Parity::of(k as i64));
    }
}

#[test]
fn identity_search_is_deterministic() {
    for which in [Identity::MComposition, Identity::FComposition, Identity::FprimeComposition] {
        assert_eq!(verify_identity(which, &[-1, 0, 1, 2], 4), verify_identity(which, &[-1, 0, 1, 2], 4));
    }
}

/// One object, `x` in degree 0, `y₀, y₁` in degree 1, `z` in degree 2, and
/// `𝔪¹x = a y₀ + b y₁`, `𝔪¹yᵢ = cᵢ z`.
fn differential_only(a: i64, b: i64, c0: i64, c1: i64) -> AInftyCategory {
    let o = "P";
    let objects = vec![o.to_string()];
    let basis = Basis::new(
        &objects,
        vec![
            ChordBasisElement::new("x", o, o, 0),
            ChordBasisElement::new("y0", o, o, 1),
            ChordBasisElement::new("y1", o, o, 1),
            ChordBasisElement::new("z", o, o, 2),
        ],
    )
    .unwrap();
    let mut m1 = MultilinearMap::new(1);
    m1.add(vec![0], 1, a);
    m1.add(vec![0], 2, b);
    m1.add(vec![1], 3, c0);
    m1.add(vec![2], 3, c1);
    AInftyCategory::new("square-zero", objects, basis, MapFamily::from([(1, m1)])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn arity_one_relation_is_square_zero(a in -3..=3i64, b in -3..=3i64, c0 in -3..=3i64, c1 in -3..=3i64) {
        let r = verify_ainfty(&differential_only(a, b, c0, c1), 1).unwrap();
        let square = a * c0 + b * c1;
        prop_assert_eq!(r.pass, square == 0);
        prop_assert_eq!(r.max_abs(), square.abs());
    }

    #[test]
    fn arity_one_homotopy_is_classical(c in -3..=3i64) {
        // F = id, G = 0 on x → y: F − G = 𝔪¹𝔥¹ + 𝔥¹𝔪¹ forces 𝔥¹(y) = x
        let (cat, f, g, _) = fixtures::chain_homotopy_fixture();
        let mut h1 = MultilinearMap::new(1);
        h1.add(vec![1], 0, c);
        let h = AInftyHomotopy::new(MapFamily::from([(1, h1)]), &f, &g, &cat, &cat).unwrap();
        prop_assert_eq!(verify_homotopy(&h, &f, &g, &cat, &cat, 1).unwrap().pass, c == 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn composition_preserves_functor_relation(s1 in any::<u64>(), s2 in any::<u64>()) {
        for cat in [fixtures::interval_dga(), fixtures::two_term_complex()] {
            let f1 = fixtures::random_derived_functor(&cat, 3, s1).unwrap();
            let f2 = fixtures::random_derived_functor(&cat, 3, s2).unwrap();
            prop_assume!(verify_functor(&f1, &cat, &cat, 3).unwrap().pass);
            prop_assume!(verify_functor(&f2, &cat, &cat, 3).unwrap().pass);
            let c = compose_functors(&f2, &f1, &cat, &cat, &cat, 3).unwrap();
            prop_assert!(verify_functor(&c, &cat, &cat, 3).unwrap().pass);
        }
    }
}

fn gram2() -> impl Strategy<Value = DMatrix<f64>> {
    (0.3..3.0f64, -1.0..1.0f64, 0.3..3.0f64).prop_map(|(a, b, c)| {
        let l = DMatrix::from_row_slice(2, 2, &[a, 0.0, b, c]);
        &l * l.transpose()
    })
}

fn unimodular() -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec((0..4usize, -2..=2i64), 1..5).prop_map(|moves| {
        let mut p = DMatrix::<f64>::identity(2, 2);
        for (kind, t) in moves {
            let e = match kind {
                0 => DMatrix::from_row_slice(2, 2, &[1.0, t as f64, 0.0, 1.0]),
                1 => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, t as f64, 1.0]),
                2 => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
                _ => DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]),
            };
            p *= e;
        }
        p
    })
}

fn lattice(g: &DMatrix<f64>) -> FlatTorusLattice {
    FlatTorusLattice::new(&[vec![g[(0, 0)], g[(0, 1)]], vec![g[(1, 0)], g[(1, 1)]]]).unwrap()
}

fn sorted_energies(g: &DMatrix<f64>, cutoff: f64) -> Vec<f64> {
    let mut e: Vec<f64> = enumerate_loops_t2(&lattice(g), cutoff).unwrap().classes.iter().map(|c| c.energy).collect();
    e.sort_by(f64::total_cmp);
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_is_minus_energy_and_gap_positive(g in gram2(), cutoff in -6.0..-0.1f64) {
        let s = enumerate_loops_t2(&lattice(&g), cutoff).unwrap();
        for c in &s.classes {
            prop_assert_eq!(c.action, -c.energy);
            prop_assert_eq!(c.constant_family, c.length == 0.0);
        }
        if let Ok(gap) = action_gap(&s) {
            prop_assert!(gap > 0.0);
            prop_assert!(s.nonconstant().all(|c| c.action <= -gap));
        } else {
            prop_assert_eq!(s.nonconstant().count(), 0);
        }
    }

    #[test]
    fn spectrum_grows_with_cutoff(g in gram2(), c1 in 0.1..6.0f64, extra in 0.0..4.0f64) {
        let small = enumerate_loops_t2(&lattice(&g), -c1).unwrap().classes.len();
        let large = enumerate_loops_t2(&lattice(&g), -c1 - extra).unwrap().classes.len();
        prop_assert!(small <= large);
    }

    #[test]
    fn spectrum_invariant_under_basis_change(g in gram2(), p in unimodular(), cutoff in -5.0..-0.2f64) {
        let h = p.transpose() * &g * &p;
        let (a, b) = (sorted_energies(&g, cutoff), sorted_energies(&h, cutoff));
        prop_assume!(a.iter().chain(&b).all(|e| (e + cutoff).abs() > 1e-9));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn adjusted_lipschitz_independent_of_depth(
        s1 in 0.5..2.0f64, s2 in 0.5..2.0f64, w1 in 0.2..1.5f64, w2 in 0.2..1.5f64, d1 in 2.0..5.0f64, d2 in 5.0..9.0f64,
    ) {
        let offsets: Vec<f64> = (0..=60).map(|i| -3.0 + 0.1 * i as f64).collect();
        let at = |d: f64| {
            let a: Vec<f64> = offsets.iter().map(|o| d + o).collect();
            let m1 = CylindricalMetricModel::new(d, w1, s1).unwrap();
            let m2 = CylindricalMetricModel::new(d, w2, s2).unwrap();
            model_lipschitz(&m1, &m2, &a).unwrap()
        };
        let (l1, l2) = (at(d1), at(d2));
        prop_assert!((l1 - l2).abs() <= 1e-9 * l1, "depth {} gives {}, depth {} gives {}", d1, l1, d2, l2);
    }
}

/// `[[I, A], [0, I]]·[[I, 0], [B, I]]` with `A`, `B` symmetric.
fn shear_product(n: usize, a: &[f64], b: &[f64]) -> DMatrix<f64> {
    let sym = |v: &[f64]| {
        let m = DMatrix::from_fn(n, n, |i, j| v[i * n + j]);
        (&m + m.transpose()) * 0.5
    };
    let mut upper = DMatrix::identity(2 * n, 2 * n);
    upper.view_mut((0, n), (n, n)).copy_from(&sym(a));
    let mut lower = DMatrix::identity(2 * n, 2 * n);
    lower.view_mut((n, 0), (n, n)).copy_from(&sym(b));
    upper * lower
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rs_index_half_integral_additive_and_odd(seed in any::<u64>(), n in 1..=3usize, split in 0.2..0.8f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_smooth_path(&mut rng, n);
        let reference = LagrangianFrame::from_unitary(&random_smooth_path(&mut rng, n)(0.5));
        let first = FnPath::new(n, |t| f(split * t));
        let second = FnPath::new(n, |t| f(split + (1.0 - split) * t));
        let whole = rs_index(&Concatenated(&first, &second), &reference).unwrap().index;
        let parts = rs_index(&first, &reference).unwrap().index + rs_index(&second, &reference).unwrap().index;
        prop_assert_eq!(whole, parts);
        prop_assert_eq!(whole.twice() as f64 / 2.0, whole.value());
        let back = rs_index(&Reversed(&FnPath::new(n, &f)), &reference).unwrap().index;
        prop_assert_eq!(back, -rs_index(&FnPath::new(n, &f), &reference).unwrap().index);
    }

    #[test]
    fn rs_index_invariant_under_conjugation(
        seed in any::<u64>(), n in 1..=2usize, a in prop::collection::vec(-1.5..1.5f64, 4), b in prop::collection::vec(-1.5..1.5f64, 4),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_smooth_path(&mut rng, n);
        let reference = LagrangianFrame::from_unitary(&random_smooth_path(&mut rng, n)(0.5));
        let phi = shear_product(n, &a, &b);
        check_symplectic(&phi).unwrap();
        let path = FnPath::new(n, &f);
        let moved = Conjugated { path: &path, phi: phi.clone() };
        let before = rs_index(&path, &reference).unwrap().index;
        let after = rs_index(&moved, &reference.transformed(&phi).unwrap()).unwrap().index;
        prop_assert_eq!(before, after);
    }

    #[test]
    fn rejects_non_lagrangian_and_non_symplectic(x in 0.1..2.0f64, c in 1.1..3.0f64) {
        // span{e₁, f₁} pairs to x ≠ 0
        let rows = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, x, 0.0]);
        prop_assert!(LagrangianFrame::new(rows).is_err());
        prop_assert!(check_symplectic(&(DMatrix::identity(4, 4) * c)).is_err());
    }
}
