//! Small hand-built and seeded random A∞ data.

use super::{
    functor_from_homotopy, AInftyCategory, AInftyFunctor, AInftyHomotopy, Basis, ChordBasisElement, HomotopySigns,
    MapFamily, MultilinearMap,
};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Cochains of the interval: `v₀, v₁` in degree 0 and `e` in degree 1, with
/// `d v₀ = −e`, `d v₁ = e`, cup products `v₀v₀ = v₀`, `v₁v₁ = v₁`, `v₀e = e = ev₁`, and
/// `𝔪²(a, b) = (−1)^{|a|} ab`.
pub fn interval_dga() -> AInftyCategory {
    let o = "L";
    let objects = vec![o.to_string()];
    let basis = Basis::new(
        &objects,
        vec![
            ChordBasisElement::new("v0", o, o, 0),
            ChordBasisElement::new("v1", o, o, 0),
            ChordBasisElement::new("e", o, o, 1),
        ],
    )
    .expect("fixed basis");
    let (v0, v1, e) = (0, 1, 2);
    let mut m1 = MultilinearMap::new(1);
    m1.add(vec![v0], e, -1);
    m1.add(vec![v1], e, 1);
    let mut m2 = MultilinearMap::new(2);
    let degree = |i: usize| basis.get(i).degree;
    for (a, b, c) in [(v0, v0, v0), (v1, v1, v1), (v0, e, e), (e, v1, e)] {
        let s = if degree(a) % 2 == 0 { 1 } else { -1 };
        m2.add(vec![a, b], c, s);
    }
    AInftyCategory::new("interval", objects, basis.clone(), MapFamily::from([(1, m1), (2, m2)]))
        .expect("fixture is well formed")
}

/// `x` in degree 0, `y` in degree 1, `𝔪¹x = y`.
pub fn two_term_complex() -> AInftyCategory {
    let o = "X";
    let objects = vec![o.to_string()];
    let basis = Basis::new(&objects, vec![ChordBasisElement::new("x", o, o, 0), ChordBasisElement::new("y", o, o, 1)])
        .expect("fixed basis");
    let mut m1 = MultilinearMap::new(1);
    m1.add(vec![0], 1, 1);
    AInftyCategory::new("two-term", objects, basis, MapFamily::from([(1, m1)])).expect("fixture is well formed")
}

/// On the two-term complex: `F = id`, `G = 0` and `𝔥¹(y) = x`, a classical chain homotopy.
pub fn chain_homotopy_fixture() -> (AInftyCategory, AInftyFunctor, AInftyFunctor, AInftyHomotopy) {
    let cat = two_term_complex();
    let f = AInftyFunctor::identity(&cat);
    let g = AInftyFunctor::new(f.object_map().clone(), MapFamily::new(), &cat, &cat).expect("zero functor");
    let mut h1 = MultilinearMap::new(1);
    h1.add(vec![1], 0, 1);
    let h = AInftyHomotopy::new(MapFamily::from([(1, h1)]), &f, &g, &cat, &cat).expect("degree -1");
    (cat, f, g, h)
}

/// A homotopy with coefficients in `−2..=2` on every admissible entry up to arity `k_max`,
/// over the identity object map.
pub fn random_homotopy(cat: &AInftyCategory, k_max: usize, seed: u64) -> Result<AInftyHomotopy> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = AInftyFunctor::identity(cat);
    let basis = cat.basis();
    let mut maps = MapFamily::new();
    for k in 1..=k_max {
        let mut table = MultilinearMap::new(k);
        for xs in basis.composable_tuples(k) {
            let degree: i64 = xs.iter().map(|&i| basis.get(i).degree).sum::<i64>() - k as i64;
            let (s, t) = (&basis.get(xs[0]).source, &basis.get(xs[k - 1]).target);
            for (o, b) in basis.elements().iter().enumerate() {
                if b.degree == degree && &b.source == s && &b.target == t {
                    let c: i64 = rng.random_range(-2..=2);
                    table.add(xs.clone(), o, c);
                }
            }
        }
        maps.insert(k, table);
    }
    AInftyHomotopy::new(maps, &id, &id, cat, cat)
}

/// The functor obtained from the identity through a random homotopy.
pub fn random_derived_functor(cat: &AInftyCategory, k_max: usize, seed: u64) -> Result<AInftyFunctor> {
    let h = random_homotopy(cat, k_max, seed)?;
    functor_from_homotopy(&AInftyFunctor::identity(cat), &h, cat, cat, k_max, HomotopySigns::default())
}

/// Object map sending every object to itself.
pub fn identity_objects(cat: &AInftyCategory) -> BTreeMap<String, String> {
    cat.objects().iter().map(|o| (o.clone(), o.clone())).collect()
}
