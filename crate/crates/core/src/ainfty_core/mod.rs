//! A∞ categories, functors and homotopies as finite tables over `ℤ`, and the relations they
//! must satisfy.
//!
//! A tuple `(x¹, …, xᵏ)` is composable when `target(xⁱ) = source(xⁱ⁺¹)`; a map applied to it
//! lands in the hom module from `source(x¹)` to `target(xᵏ)` (after the object map, for
//! functors and homotopies).  Degree shifts: `𝔪ᵏ` by `2 − k`, `𝔣ᵏ` by `1 − k`, `𝔥ᵏ` by `−k`.
//!
//! Relations, with `‡ₙ = Σ_{i≤n} μ(xⁱ) − n`:
//!
//! ```text
//! Σ (−1)^‡ₙ 𝔪(x¹…xⁿ, 𝔪^m(…), …) = 0
//! Σ (−1)^{‡ₙ+1} 𝔣(x¹…xⁿ, 𝔪^m(…), …) + Σ 𝔪^r(𝔣^{s₁}(…), …, 𝔣^{s_r}(…)) = 0
//! 𝔣ᵈ − 𝔤ᵈ = Σ (−1)^‡ₙ 𝔥(…, 𝔪^m(…), …) + Σ (−1)^♣ 𝔪^r(𝔣…, 𝔥^{s_i}, 𝔤…)
//! ```

pub mod fixtures;
mod morse_bott;

pub use morse_bott::{build_morse_bott_complex, MorseBottComplex};

use crate::error::{Error, Result};
use crate::sign_engine::{club_with, compositions, dagger, ddagger, ClubReading, Parity};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// A generator of a hom module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordBasisElement {
    pub id: String,
    pub source: String,
    pub target: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ChordBasisElement {
    pub fn new(id: &str, source: &str, target: &str, degree: i64) -> Self {
        ChordBasisElement {
            id: id.to_string(),
            source: source.to_string(),
            target: target.to_string(),
            degree,
            action: None,
            label: None,
        }
    }
}

/// The hom module between two objects with its ordered basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradedHom {
    pub source: String,
    pub target: String,
    pub basis: Vec<ChordBasisElement>,
}

impl GradedHom {
    pub fn by_degree(&self) -> BTreeMap<i64, Vec<&ChordBasisElement>> {
        let mut out: BTreeMap<i64, Vec<&ChordBasisElement>> = BTreeMap::new();
        for b in &self.basis {
            out.entry(b.degree).or_default().push(b);
        }
        out
    }

    pub fn ranks(&self) -> BTreeMap<i64, usize> {
        self.by_degree().into_iter().map(|(d, v)| (d, v.len())).collect()
    }
}

/// A sparse integer vector over basis indices.
pub type Chain = BTreeMap<usize, i64>;

fn add_to(chain: &mut Chain, key: usize, coeff: i64) {
    if coeff == 0 {
        return;
    }
    let e = chain.entry(key).or_insert(0);
    *e += coeff;
    if *e == 0 {
        chain.remove(&key);
    }
}

fn add_chain(into: &mut Chain, from: &Chain, scale: i64) {
    for (k, v) in from {
        add_to(into, *k, scale * v);
    }
}

fn basis_chain(i: usize) -> Chain {
    Chain::from([(i, 1)])
}

/// Table of a `k`-linear map on basis tuples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultilinearMap {
    arity: usize,
    entries: BTreeMap<Vec<usize>, Chain>,
}

impl MultilinearMap {
    pub fn new(arity: usize) -> Self {
        MultilinearMap { arity, entries: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, inputs: &[usize]) -> Option<&Chain> {
        self.entries.get(inputs)
    }

    pub fn set(&mut self, inputs: Vec<usize>, mut value: Chain) {
        value.retain(|_, c| *c != 0);
        if value.is_empty() {
            self.entries.remove(&inputs);
        } else {
            self.entries.insert(inputs, value);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Chain)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Add `coeff · output` to the value on `inputs`.
    pub fn add(&mut self, inputs: Vec<usize>, output: usize, coeff: i64) {
        let e = self.entries.entry(inputs.clone()).or_default();
        add_to(e, output, coeff);
        if e.is_empty() {
            self.entries.remove(&inputs);
        }
    }
}

/// Map families indexed by arity.
pub type MapFamily = BTreeMap<usize, MultilinearMap>;

fn family_value(fam: &MapFamily, inputs: &[usize]) -> Chain {
    fam.get(&inputs.len()).and_then(|m| m.get(inputs)).cloned().unwrap_or_default()
}

/// Extend a map on basis tuples multilinearly to chains.
fn eval_multilinear<F: Fn(&[usize]) -> Chain>(f: F, args: &[Chain]) -> Chain {
    let mut out = Chain::new();
    let mut idx = vec![0usize; args.len()];
    let items: Vec<Vec<(usize, i64)>> = args.iter().map(|c| c.iter().map(|(k, v)| (*k, *v)).collect()).collect();
    if items.iter().any(|v| v.is_empty()) {
        return out;
    }
    let mut tuple = vec![0usize; args.len()];
    loop {
        let mut coeff = 1;
        for (j, &i) in idx.iter().enumerate() {
            tuple[j] = items[j][i].0;
            coeff *= items[j][i].1;
        }
        add_chain(&mut out, &f(&tuple), coeff);
        let mut pos = args.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < items[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Basis with id lookup.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    elements: Vec<ChordBasisElement>,
    index: HashMap<String, usize>,
}

impl Basis {
    pub fn new(objects: &[String], elements: Vec<ChordBasisElement>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, b) in elements.iter().enumerate() {
            if index.insert(b.id.clone(), i).is_some() {
                return Err(Error::Composability(format!("duplicate basis id {:?}", b.id)));
            }
            for o in [&b.source, &b.target] {
                if !objects.contains(o) {
                    return Err(Error::Composability(format!("basis element {:?} uses unknown object {o:?}", b.id)));
                }
            }
        }
        Ok(Basis { elements, index })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, i: usize) -> &ChordBasisElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[ChordBasisElement] {
        &self.elements
    }

    pub fn lookup(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::Composability(format!("unknown basis id {id:?}")))
    }

    fn degree_sum(&self, xs: &[usize]) -> i64 {
        xs.iter().map(|&i| self.elements[i].degree).sum()
    }

    fn degrees(&self, xs: &[usize]) -> Vec<i64> {
        xs.iter().map(|&i| self.elements[i].degree).collect()
    }

    fn composable(&self, xs: &[usize]) -> bool {
        xs.windows(2).all(|w| self.elements[w[0]].target == self.elements[w[1]].source)
    }

    fn ids(&self, xs: &[usize]) -> Vec<String> {
        xs.iter().map(|&i| self.elements[i].id.clone()).collect()
    }

    fn chain_ids(&self, c: &Chain) -> Vec<(String, i64)> {
        c.iter().map(|(k, v)| (self.elements[*k].id.clone(), *v)).collect()
    }

    /// Every composable tuple of the given arity, in lexicographic index order.
    pub fn composable_tuples(&self, arity: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(arity);
        self.extend_tuples(arity, &mut cur, &mut out);
        out
    }

    fn extend_tuples(&self, arity: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for i in 0..self.elements.len() {
            if let Some(&last) = cur.last() {
                if self.elements[last].target != self.elements[i].source {
                    continue;
                }
            }
            cur.push(i);
            self.extend_tuples(arity, cur, out);
            cur.pop();
        }
    }
}

/// JSON form of one table entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapEntrySpec {
    pub inputs: Vec<String>,
    pub output: Vec<(String, i64)>,
}

/// JSON form of a category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategorySpec {
    #[serde(default)]
    pub name: String,
    pub objects: Vec<String>,
    pub basis: Vec<ChordBasisElement>,
    #[serde(default)]
    pub maps: BTreeMap<usize, Vec<MapEntrySpec>>,
}

/// JSON form of a functor between two categories.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctorSpec {
    pub object_map: BTreeMap<String, String>,
    #[serde(default)]
    pub maps: BTreeMap<usize, Vec<MapEntrySpec>>,
}

/// JSON form of a homotopy; its functors are given separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopySpec {
    #[serde(default)]
    pub maps: BTreeMap<usize, Vec<MapEntrySpec>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Structure,
    Functor,
    Homotopy,
}

impl Kind {
    fn shift(self, k: usize) -> i64 {
        let k = k as i64;
        match self {
            Kind::Structure => 2 - k,
            Kind::Functor => 1 - k,
            Kind::Homotopy => -k,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Kind::Structure => "m",
            Kind::Functor => "f",
            Kind::Homotopy => "h",
        }
    }
}

/// Check composability, object boundary conditions and degree shift of every entry.
fn check_family(
    kind: Kind,
    fam: &MapFamily,
    src: &Basis,
    dst: &Basis,
    object_map: &dyn Fn(&str) -> String,
) -> Result<()> {
    for (&k, map) in fam {
        if map.arity != k {
            return Err(Error::Composability(format!("table of arity {} filed under {k}", map.arity)));
        }
        for (xs, out) in map.entries() {
            if xs.len() != k {
                return Err(Error::Composability(format!("{}{k} entry with {} inputs", kind.name(), xs.len())));
            }
            if !src.composable(xs) {
                return Err(Error::Composability(format!("{}{k} defined on non-composable {:?}", kind.name(), src.ids(xs))));
            }
            let s = object_map(&src.get(xs[0]).source);
            let t = object_map(&src.get(xs[k - 1]).target);
            let want = src.degree_sum(xs) + kind.shift(k);
            for &o in out.keys() {
                let b = dst.get(o);
                if b.source != s || b.target != t {
                    return Err(Error::Composability(format!(
                        "{}{k}{:?} has output {:?} in hom({}, {}), expected hom({s}, {t})",
                        kind.name(),
                        src.ids(xs),
                        b.id,
                        b.source,
                        b.target
                    )));
                }
                if b.degree != want {
                    return Err(Error::DegreeShift(format!(
                        "{}{k}{:?} has output {:?} of degree {}, expected {want}",
                        kind.name(),
                        src.ids(xs),
                        b.id,
                        b.degree
                    )));
                }
            }
        }
    }
    Ok(())
}

fn family_from_spec(spec: &BTreeMap<usize, Vec<MapEntrySpec>>, src: &Basis, dst: &Basis) -> Result<MapFamily> {
    let mut fam = MapFamily::new();
    for (&k, entries) in spec {
        if k == 0 {
            return Err(Error::Composability("arity 0 maps are not allowed".into()));
        }
        let mut map = MultilinearMap::new(k);
        for e in entries {
            if e.inputs.len() != k {
                return Err(Error::Composability(format!("entry {:?} listed under arity {k}", e.inputs)));
            }
            let xs = e.inputs.iter().map(|id| src.lookup(id)).collect::<Result<Vec<_>>>()?;
            for (id, c) in &e.output {
                map.add(xs.clone(), dst.lookup(id)?, *c);
            }
        }
        fam.insert(k, map);
    }
    Ok(fam)
}

fn family_to_spec(fam: &MapFamily, src: &Basis, dst: &Basis) -> BTreeMap<usize, Vec<MapEntrySpec>> {
    fam.iter()
        .map(|(&k, map)| {
            let entries = map
                .entries()
                .map(|(xs, out)| MapEntrySpec { inputs: src.ids(xs), output: dst.chain_ids(out) })
                .collect();
            (k, entries)
        })
        .collect()
}

/// A finite A∞ category.
#[derive(Clone, Debug, PartialEq)]
pub struct AInftyCategory {
    pub name: String,
    objects: Vec<String>,
    basis: Basis,
    maps: MapFamily,
}

impl AInftyCategory {
    pub fn from_spec(spec: &CategorySpec) -> Result<Self> {
        let basis = Basis::new(&spec.objects, spec.basis.clone())?;
        let maps = family_from_spec(&spec.maps, &basis, &basis)?;
        AInftyCategory::new(&spec.name, spec.objects.clone(), basis, maps)
    }

    pub fn new(name: &str, objects: Vec<String>, basis: Basis, maps: MapFamily) -> Result<Self> {
        check_family(Kind::Structure, &maps, &basis, &basis, &|o| o.to_string())?;
        Ok(AInftyCategory { name: name.to_string(), objects, basis, maps })
    }

    pub fn to_spec(&self) -> CategorySpec {
        CategorySpec {
            name: self.name.clone(),
            objects: self.objects.clone(),
            basis: self.basis.elements.clone(),
            maps: family_to_spec(&self.maps, &self.basis, &self.basis),
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn maps(&self) -> &MapFamily {
        &self.maps
    }

    pub fn hom(&self, source: &str, target: &str) -> GradedHom {
        GradedHom {
            source: source.to_string(),
            target: target.to_string(),
            basis: self.basis.elements.iter().filter(|b| b.source == source && b.target == target).cloned().collect(),
        }
    }

    fn structure(&self, xs: &[usize]) -> Chain {
        family_value(&self.maps, xs)
    }

    /// Replace one table; the result is validated.
    pub fn with_map(&self, map: MultilinearMap) -> Result<Self> {
        let mut maps = self.maps.clone();
        maps.insert(map.arity, map);
        AInftyCategory::new(&self.name, self.objects.clone(), self.basis.clone(), maps)
    }
}

/// A functor between finite A∞ categories.
#[derive(Clone, Debug, PartialEq)]
pub struct AInftyFunctor {
    object_map: BTreeMap<String, String>,
    maps: MapFamily,
}

fn check_object_map(map: &BTreeMap<String, String>, src: &AInftyCategory, dst: &AInftyCategory) -> Result<()> {
    for o in &src.objects {
        match map.get(o) {
            None => return Err(Error::ObjectMismatch(format!("object {o:?} is not mapped"))),
            Some(t) if !dst.objects.contains(t) => {
                return Err(Error::ObjectMismatch(format!("object {o:?} maps to unknown {t:?}")))
            }
            _ => {}
        }
    }
    Ok(())
}

impl AInftyFunctor {
    pub fn from_spec(spec: &FunctorSpec, src: &AInftyCategory, dst: &AInftyCategory) -> Result<Self> {
        let maps = family_from_spec(&spec.maps, &src.basis, &dst.basis)?;
        AInftyFunctor::new(spec.object_map.clone(), maps, src, dst)
    }

    pub fn new(
        object_map: BTreeMap<String, String>,
        maps: MapFamily,
        src: &AInftyCategory,
        dst: &AInftyCategory,
    ) -> Result<Self> {
        check_object_map(&object_map, src, dst)?;
        let f = AInftyFunctor { object_map, maps };
        check_family(Kind::Functor, &f.maps, &src.basis, &dst.basis, &|o| f.object(o))?;
        Ok(f)
    }

    /// The identity functor: `𝔣¹ = id`, `𝔣^{≥2} = 0`.
    pub fn identity(cat: &AInftyCategory) -> Self {
        let mut f1 = MultilinearMap::new(1);
        for i in 0..cat.basis.len() {
            f1.add(vec![i], i, 1);
        }
        AInftyFunctor {
            object_map: cat.objects.iter().map(|o| (o.clone(), o.clone())).collect(),
            maps: MapFamily::from([(1, f1)]),
        }
    }

    pub fn to_spec(&self, src: &AInftyCategory, dst: &AInftyCategory) -> FunctorSpec {
        FunctorSpec { object_map: self.object_map.clone(), maps: family_to_spec(&self.maps, &src.basis, &dst.basis) }
    }

    pub fn object(&self, o: &str) -> String {
        self.object_map.get(o).cloned().unwrap_or_default()
    }

    pub fn object_map(&self) -> &BTreeMap<String, String> {
        &self.object_map
    }

    pub fn maps(&self) -> &MapFamily {
        &self.maps
    }

    fn value(&self, xs: &[usize]) -> Chain {
        family_value(&self.maps, xs)
    }

    pub fn with_map(&self, map: MultilinearMap, src: &AInftyCategory, dst: &AInftyCategory) -> Result<Self> {
        let mut maps = self.maps.clone();
        maps.insert(map.arity, map);
        AInftyFunctor::new(self.object_map.clone(), maps, src, dst)
    }
}

/// A homotopy between two functors with the same object map.
#[derive(Clone, Debug, PartialEq)]
pub struct AInftyHomotopy {
    maps: MapFamily,
}

impl AInftyHomotopy {
    pub fn from_spec(
        spec: &HomotopySpec,
        f: &AInftyFunctor,
        g: &AInftyFunctor,
        src: &AInftyCategory,
        dst: &AInftyCategory,
    ) -> Result<Self> {
        let maps = family_from_spec(&spec.maps, &src.basis, &dst.basis)?;
        AInftyHomotopy::new(maps, f, g, src, dst)
    }

    pub fn new(
        maps: MapFamily,
        f: &AInftyFunctor,
        g: &AInftyFunctor,
        src: &AInftyCategory,
        dst: &AInftyCategory,
    ) -> Result<Self> {
        if f.object_map != g.object_map {
            return Err(Error::ObjectMismatch("the two functors have different object maps".into()));
        }
        check_family(Kind::Homotopy, &maps, &src.basis, &dst.basis, &|o| f.object(o))?;
        Ok(AInftyHomotopy { maps })
    }

    pub fn zero() -> Self {
        AInftyHomotopy { maps: MapFamily::new() }
    }

    pub fn to_spec(&self, src: &AInftyCategory, dst: &AInftyCategory) -> HomotopySpec {
        HomotopySpec { maps: family_to_spec(&self.maps, &src.basis, &dst.basis) }
    }

    pub fn maps(&self) -> &MapFamily {
        &self.maps
    }

    fn value(&self, xs: &[usize]) -> Chain {
        family_value(&self.maps, xs)
    }

    pub fn with_map(
        &self,
        map: MultilinearMap,
        f: &AInftyFunctor,
        g: &AInftyFunctor,
        src: &AInftyCategory,
        dst: &AInftyCategory,
    ) -> Result<Self> {
        let mut maps = self.maps.clone();
        maps.insert(map.arity, map);
        AInftyHomotopy::new(maps, f, g, src, dst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationKind {
    AInfty,
    Functor,
    Homotopy,
}

/// A composable tuple on which a relation fails, with the nonzero residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub inputs: Vec<String>,
    pub residual: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub relation: RelationKind,
    pub k_max: usize,
    pub tuples_checked: usize,
    pub failures: Vec<ResidualEntry>,
    pub pass: bool,
}

impl ResidualReport {
    fn new(relation: RelationKind, k_max: usize) -> Self {
        ResidualReport { relation, k_max, tuples_checked: 0, failures: Vec::new(), pass: true }
    }

    fn record(&mut self, basis_in: &Basis, basis_out: &Basis, xs: &[usize], residual: Chain) {
        self.tuples_checked += 1;
        if !residual.is_empty() {
            self.pass = false;
            self.failures.push(ResidualEntry { inputs: basis_in.ids(xs), residual: basis_out.chain_ids(&residual) });
        }
    }

    /// Largest absolute residual coefficient.
    pub fn max_abs(&self) -> i64 {
        self.failures.iter().flat_map(|f| f.residual.iter().map(|(_, c)| c.abs())).max().unwrap_or(0)
    }
}

fn sign(p: Parity) -> i64 {
    p.sign()
}

/// Arguments `(x¹, …, xⁿ, inner, xⁿ⁺ᵐ⁺¹, …)` as chains.
fn insert_args(xs: &[usize], n: usize, m: usize, inner: Chain) -> Vec<Chain> {
    let mut args: Vec<Chain> = xs[..n].iter().map(|&i| basis_chain(i)).collect();
    args.push(inner);
    args.extend(xs[n + m..].iter().map(|&i| basis_chain(i)));
    args
}

fn inserted_sum<F: Fn(&[usize]) -> Chain, G: Fn(&[usize]) -> Chain>(
    xs: &[usize],
    degrees: &[i64],
    outer: F,
    inner: G,
    sign_of: &dyn Fn(&[i64], usize, usize) -> Parity,
) -> Chain {
    let d = xs.len();
    let mut total = Chain::new();
    for m in 1..=d {
        for n in 0..=d - m {
            let mid = inner(&xs[n..n + m]);
            if mid.is_empty() {
                continue;
            }
            let value = eval_multilinear(&outer, &insert_args(xs, n, m, mid));
            add_chain(&mut total, &value, sign(sign_of(degrees, n, m)));
        }
    }
    total
}

fn ddagger_sign(degrees: &[i64], n: usize, _m: usize) -> Parity {
    ddagger(degrees, n).expect("n is within the tuple")
}

fn check_k_max(k_max: usize) -> Result<()> {
    if k_max == 0 {
        return Err(Error::InvalidArity(0));
    }
    Ok(())
}

/// `Σ (−1)^‡ 𝔪(…, 𝔪(…), …)` on every composable tuple up to arity `k_max`.
pub fn verify_ainfty(cat: &AInftyCategory, k_max: usize) -> Result<ResidualReport> {
    check_k_max(k_max)?;
    let mut report = ResidualReport::new(RelationKind::AInfty, k_max);
    for d in 1..=k_max {
        for xs in cat.basis.composable_tuples(d) {
            let degrees = cat.basis.degrees(&xs);
            let total = inserted_sum(&xs, &degrees, |t| cat.structure(t), |t| cat.structure(t), &ddagger_sign);
            report.record(&cat.basis, &cat.basis, &xs, total);
        }
    }
    Ok(report)
}

/// `Σ 𝔪^r(𝔣^{s₁}(…), …)` over compositions of the tuple.
fn product_after_functors(xs: &[usize], dst: &AInftyCategory, f: &AInftyFunctor) -> Chain {
    let mut total = Chain::new();
    for parts in compositions(xs.len()) {
        let mut args = Vec::with_capacity(parts.len());
        let mut pos = 0;
        for s in &parts {
            args.push(f.value(&xs[pos..pos + s]));
            pos += s;
        }
        add_chain(&mut total, &eval_multilinear(|t| dst.structure(t), &args), 1);
    }
    total
}

/// Residual of the functor relation on every composable tuple up to arity `k_max`.
pub fn verify_functor(
    f: &AInftyFunctor,
    src: &AInftyCategory,
    dst: &AInftyCategory,
    k_max: usize,
) -> Result<ResidualReport> {
    check_k_max(k_max)?;
    check_object_map(&f.object_map, src, dst)?;
    let mut report = ResidualReport::new(RelationKind::Functor, k_max);
    let plus_one = |deg: &[i64], n: usize, m: usize| ddagger_sign(deg, n, m) ^ Parity::ODD;
    for d in 1..=k_max {
        for xs in src.basis.composable_tuples(d) {
            let degrees = src.basis.degrees(&xs);
            let mut total = inserted_sum(&xs, &degrees, |t| f.value(t), |t| src.structure(t), &plus_one);
            add_chain(&mut total, &product_after_functors(&xs, dst, f), 1);
            report.record(&src.basis, &dst.basis, &xs, total);
        }
    }
    Ok(report)
}

/// Readings of the sign on the `𝔥(…, 𝔪(…), …)` terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomotopyFirstSign {
    /// `Σ_{i≤n} μ(aⁱ) − n`.
    Ddagger,
    /// `Σ i·μ(aⁱ)` over the whole tuple.
    Dagger,
    /// `Σ i·μ(aⁱ) + d`.
    DaggerPlusArity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomotopySigns {
    pub first: HomotopyFirstSign,
    pub club: ClubReading,
}

impl Default for HomotopySigns {
    fn default() -> Self {
        HomotopySigns { first: HomotopyFirstSign::Ddagger, club: ClubReading::PartialSum }
    }
}

impl HomotopySigns {
    pub fn all() -> Vec<HomotopySigns> {
        let mut out = Vec::new();
        for first in [HomotopyFirstSign::Ddagger, HomotopyFirstSign::Dagger, HomotopyFirstSign::DaggerPlusArity] {
            for club in [ClubReading::PartialSum, ClubReading::LastPart] {
                out.push(HomotopySigns { first, club });
            }
        }
        out
    }

    fn first_sign(&self, degrees: &[i64], n: usize) -> Parity {
        match self.first {
            HomotopyFirstSign::Ddagger => ddagger(degrees, n).expect("n is within the tuple"),
            HomotopyFirstSign::Dagger => dagger(degrees),
            HomotopyFirstSign::DaggerPlusArity => dagger(degrees) ^ Parity::of(degrees.len() as i64),
        }
    }
}

/// Right-hand side of the homotopy relation on one tuple.  Only `g` of arity below
/// `xs.len()` is used.
fn homotopy_rhs(
    xs: &[usize],
    src: &AInftyCategory,
    dst: &AInftyCategory,
    f: &dyn Fn(&[usize]) -> Chain,
    g: &dyn Fn(&[usize]) -> Chain,
    h: &dyn Fn(&[usize]) -> Chain,
    signs: HomotopySigns,
) -> Chain {
    let d = xs.len();
    let degrees = src.basis.degrees(xs);
    let first = |deg: &[i64], n: usize, _m: usize| signs.first_sign(deg, n);
    let mut total = inserted_sum(xs, &degrees, h, |t| src.structure(t), &first);
    for parts in compositions(d) {
        let r = parts.len();
        for i in 1..=r {
            let mut args = Vec::with_capacity(r);
            let mut pos = 0;
            for (j, s) in parts.iter().enumerate() {
                let seg = &xs[pos..pos + s];
                pos += s;
                args.push(match (j + 1).cmp(&i) {
                    std::cmp::Ordering::Less => f(seg),
                    std::cmp::Ordering::Equal => h(seg),
                    std::cmp::Ordering::Greater => g(seg),
                });
            }
            let e = club_with(&degrees, &parts, i, signs.club).expect("valid partition");
            add_chain(&mut total, &eval_multilinear(|t| dst.structure(t), &args), sign(e));
        }
    }
    total
}

/// Residual `𝔣ᵈ − 𝔤ᵈ − (right-hand side)` of the homotopy relation.
pub fn verify_homotopy(
    h: &AInftyHomotopy,
    f: &AInftyFunctor,
    g: &AInftyFunctor,
    src: &AInftyCategory,
    dst: &AInftyCategory,
    k_max: usize,
) -> Result<ResidualReport> {
    verify_homotopy_with(h, f, g, src, dst, k_max, HomotopySigns::default())
}

pub fn verify_homotopy_with(
    h: &AInftyHomotopy,
    f: &AInftyFunctor,
    g: &AInftyFunctor,
    src: &AInftyCategory,
    dst: &AInftyCategory,
    k_max: usize,
    signs: HomotopySigns,
) -> Result<ResidualReport> {
    check_k_max(k_max)?;
    if f.object_map != g.object_map {
        return Err(Error::ObjectMismatch("the two functors have different object maps".into()));
    }
    check_object_map(&f.object_map, src, dst)?;
    let mut report = ResidualReport::new(RelationKind::Homotopy, k_max);
    for d in 1..=k_max {
        for xs in src.basis.composable_tuples(d) {
            let rhs = homotopy_rhs(&xs, src, dst, &|t| f.value(t), &|t| g.value(t), &|t| h.value(t), signs);
            let mut total = f.value(&xs);
            add_chain(&mut total, &g.value(&xs), -1);
            add_chain(&mut total, &rhs, -1);
            report.record(&src.basis, &dst.basis, &xs, total);
        }
    }
    Ok(report)
}

/// The functor `G` determined by `F` and `H` through the homotopy relation, up to arity
/// `k_max`: `𝔤ᵈ = 𝔣ᵈ − (right-hand side)`, solved by increasing arity.
pub fn functor_from_homotopy(
    f: &AInftyFunctor,
    h: &AInftyHomotopy,
    src: &AInftyCategory,
    dst: &AInftyCategory,
    k_max: usize,
    signs: HomotopySigns,
) -> Result<AInftyFunctor> {
    check_k_max(k_max)?;
    let mut g_maps = MapFamily::new();
    for d in 1..=k_max {
        let mut table = MultilinearMap::new(d);
        for xs in src.basis.composable_tuples(d) {
            let g_lower = |t: &[usize]| family_value(&g_maps, t);
            let rhs = homotopy_rhs(&xs, src, dst, &|t| f.value(t), &g_lower, &|t| h.value(t), signs);
            let mut value = f.value(&xs);
            add_chain(&mut value, &rhs, -1);
            table.set(xs, value);
        }
        g_maps.insert(d, table);
    }
    AInftyFunctor::new(f.object_map.clone(), g_maps, src, dst)
}

/// `(F₂ ∘ F₁)ᵈ = Σ 𝔣₂^r(𝔣₁^{s₁}(…), …, 𝔣₁^{s_r}(…))`, up to arity `k_max`.
pub fn compose_functors(
    f2: &AInftyFunctor,
    f1: &AInftyFunctor,
    a: &AInftyCategory,
    b: &AInftyCategory,
    c: &AInftyCategory,
    k_max: usize,
) -> Result<AInftyFunctor> {
    check_k_max(k_max)?;
    check_object_map(&f1.object_map, a, b).map_err(|e| Error::Composability(e.to_string()))?;
    check_object_map(&f2.object_map, b, c).map_err(|e| Error::Composability(e.to_string()))?;
    let object_map: BTreeMap<String, String> =
        f1.object_map.iter().map(|(o, p)| (o.clone(), f2.object(p))).collect();
    let mut maps = MapFamily::new();
    for d in 1..=k_max {
        let mut table = MultilinearMap::new(d);
        for xs in a.basis.composable_tuples(d) {
            let mut value = Chain::new();
            for parts in compositions(d) {
                let mut args = Vec::with_capacity(parts.len());
                let mut pos = 0;
                for s in &parts {
                    args.push(f1.value(&xs[pos..pos + s]));
                    pos += s;
                }
                add_chain(&mut value, &eval_multilinear(|t| f2.value(t), &args), 1);
            }
            table.set(xs, value);
        }
        maps.insert(d, table);
    }
    AInftyFunctor::new(object_map, maps, a, c)
}

/// Outcome of deriving functors from random homotopies under one sign reading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignProbe {
    pub signs: HomotopySigns,
    pub derived_functors_valid: bool,
}

/// For each sign reading, derive `G` from `F = id` and the given homotopies and report
/// whether every `G` satisfies the functor relation.  Only a consistent reading can pass.
pub fn probe_homotopy_signs(
    cat: &AInftyCategory,
    homotopies: &[AInftyHomotopy],
    k_max: usize,
) -> Result<Vec<SignProbe>> {
    let id = AInftyFunctor::identity(cat);
    let mut out = Vec::new();
    for signs in HomotopySigns::all() {
        let mut ok = true;
        for h in homotopies {
            let g = functor_from_homotopy(&id, h, cat, cat, k_max, signs)?;
            if !verify_functor(&g, cat, cat, k_max)?.pass {
                ok = false;
                break;
            }
        }
        out.push(SignProbe { signs, derived_functors_valid: ok });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn interval_dga_is_ainfty() {
        let cat = interval_dga();
        let r = verify_ainfty(&cat, 4).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert_eq!(r.tuples_checked, 3 + 9 + 27 + 81);
    }

    #[test]
    fn flipped_product_fails_locally() {
        let cat = interval_dga();
        let v0 = cat.basis().lookup("v0").unwrap();
        let mut m2 = cat.maps()[&2].clone();
        m2.set(vec![v0, v0], Chain::from([(v0, -1)]));
        let bad = cat.with_map(m2).unwrap();
        let r = verify_ainfty(&bad, 3).unwrap();
        assert!(!r.pass);
        for f in &r.failures {
            assert!(f.inputs.iter().filter(|x| *x == "v0").count() >= 2, "{f:?}");
        }
    }

    #[test]
    fn arity_one_is_square_zero() {
        let cat = two_term_complex();
        let r = verify_ainfty(&cat, 1).unwrap();
        assert!(r.pass);
        let x = cat.basis().lookup("x").unwrap();
        let y = cat.basis().lookup("y").unwrap();
        // a second differential y -> x of degree 1 is rejected by the degree check
        let mut m1 = MultilinearMap::new(1);
        m1.add(vec![y], x, 1);
        assert!(matches!(cat.with_map(m1), Err(Error::DegreeShift(_))));
    }

    #[test]
    fn identity_functor_passes() {
        let cat = interval_dga();
        let id = AInftyFunctor::identity(&cat);
        assert!(verify_functor(&id, &cat, &cat, 3).unwrap().pass);
    }

    #[test]
    fn chain_homotopy_fixture_passes() {
        let (cat, f, g, h) = chain_homotopy_fixture();
        let r = verify_homotopy(&h, &f, &g, &cat, &cat, 3).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        let zero = AInftyHomotopy::zero();
        let r = verify_homotopy(&zero, &f, &g, &cat, &cat, 1).unwrap();
        assert!(!r.pass);
        let same = verify_homotopy(&zero, &f, &f, &cat, &cat, 3).unwrap();
        assert!(same.pass);
    }

    #[test]
    fn composition_with_identity() {
        let cat = interval_dga();
        let g = random_derived_functor(&cat, 3, 7).unwrap();
        let id = AInftyFunctor::identity(&cat);
        let left = compose_functors(&id, &g, &cat, &cat, &cat, 3).unwrap();
        let right = compose_functors(&g, &id, &cat, &cat, &cat, 3).unwrap();
        assert_eq!(left.maps(), g.maps());
        assert_eq!(right.maps(), g.maps());
    }

    #[test]
    fn only_one_homotopy_sign_reading_is_consistent() {
        let cat = interval_dga();
        let hs: Vec<_> = (0..4).map(|s| random_homotopy(&cat, 3, s).unwrap()).collect();
        let probes = probe_homotopy_signs(&cat, &hs, 3).unwrap();
        let good: Vec<_> = probes.iter().filter(|p| p.derived_functors_valid).map(|p| p.signs).collect();
        assert_eq!(good, vec![HomotopySigns::default()]);
    }

    #[test]
    fn category_spec_roundtrip() {
        let cat = interval_dga();
        let text = serde_json::to_string(&cat.to_spec()).unwrap();
        let back = AInftyCategory::from_spec(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, cat);
    }

    #[test]
    fn rejects_non_composable_entry() {
        let spec: CategorySpec = serde_json::from_value(serde_json::json!({
            "objects": ["A", "B"],
            "basis": [
                {"id": "p", "source": "A", "target": "B", "degree": 0},
                {"id": "q", "source": "A", "target": "B", "degree": 0}
            ],
            "maps": {"2": [{"inputs": ["p", "q"], "output": [["p", 1]]}]}
        }))
        .unwrap();
        assert!(matches!(AInftyCategory::from_spec(&spec), Err(Error::Composability(_))));
    }

    #[test]
    fn object_map_must_be_total() {
        let cat = interval_dga();
        let spec = FunctorSpec { object_map: BTreeMap::new(), maps: BTreeMap::new() };
        assert!(matches!(AInftyFunctor::from_spec(&spec, &cat, &cat), Err(Error::ObjectMismatch(_))));
    }
}
