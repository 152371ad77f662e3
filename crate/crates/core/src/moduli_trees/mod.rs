//! Ribbon trees, time allocations and the strata of the functor space `N` and the homotopy
//! space `L`.
//!
//! A stable rooted ribbon tree with leaves `1..=k` in planar order is stored with its
//! interior vertices numbered in preorder (root = 0).  Trees are written in the
//! parenthesised leaf-sequence normal form, e.g. `((1,2),3)`.

mod facets;

pub use facets::{
    boundary_facets_l, boundary_facets_n, functor_relation_terms, homotopy_relation_terms, Facet, FacetFactor,
    FacetType, RelationTerm,
};

use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

pub type Rational = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Leaf(usize),
    Vertex(Vec<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Child {
    Leaf(usize),
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct VertexData {
    parent: Option<usize>,
    children: Vec<Child>,
    /// Smallest and largest leaf label below the vertex.
    span: (usize, usize),
    depth: usize,
}

/// A stable rooted ribbon tree with `k` incoming leaves.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RibbonTree {
    k: usize,
    root: Node,
    vertices: Vec<VertexData>,
}

impl RibbonTree {
    pub fn from_node(root: Node) -> Result<Self> {
        let mut vertices = Vec::new();
        let mut next_leaf = 1;
        match &root {
            Node::Leaf(_) => return Err(Error::InvalidTree("the root must be an interior vertex".into())),
            Node::Vertex(_) => {
                flatten(&root, None, 0, &mut vertices, &mut next_leaf)?;
            }
        }
        let k = next_leaf - 1;
        if k < 2 {
            return Err(Error::InvalidArity(k));
        }
        Ok(RibbonTree { k, root, vertices })
    }

    /// The tree with a single interior vertex.
    pub fn corolla(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArity(k));
        }
        RibbonTree::from_node(Node::Vertex((1..=k).map(Node::Leaf).collect()))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.vertices[v].parent
    }

    pub fn children(&self, v: usize) -> &[Child] {
        &self.vertices[v].children
    }

    /// Leaf labels `(min, max)` below `v`; the leaves below a vertex are consecutive.
    pub fn leaf_span(&self, v: usize) -> (usize, usize) {
        self.vertices[v].span
    }

    pub fn depth(&self, v: usize) -> usize {
        self.vertices[v].depth
    }

    /// `j_tm(α) = min { j : α lies on the path from leaf j to the root }`.
    pub fn j_tm(&self, v: usize) -> usize {
        self.vertices[v].span.0
    }

    /// Dimension `k − 1 − |V|` of the stratum of the associahedron `M^{k+1}`.
    pub fn m_dimension(&self) -> i64 {
        self.k as i64 - 1 - self.vertices.len() as i64
    }

    pub fn encode(&self) -> String {
        encode_node(&self.root)
    }
}

fn flatten(
    node: &Node,
    parent: Option<usize>,
    depth: usize,
    out: &mut Vec<VertexData>,
    next_leaf: &mut usize,
) -> Result<Option<usize>> {
    match node {
        Node::Leaf(j) => {
            if *j != *next_leaf {
                return Err(Error::InvalidTree(format!("leaf {j} out of order, expected {next_leaf}")));
            }
            *next_leaf += 1;
            Ok(None)
        }
        Node::Vertex(children) => {
            if children.len() < 2 {
                return Err(Error::InvalidTree("interior vertex with fewer than two inputs".into()));
            }
            let id = out.len();
            let first = *next_leaf;
            out.push(VertexData { parent, children: Vec::new(), span: (0, 0), depth });
            let mut kids = Vec::with_capacity(children.len());
            for c in children {
                match flatten(c, Some(id), depth + 1, out, next_leaf)? {
                    Some(v) => kids.push(Child::Vertex(v)),
                    None => kids.push(Child::Leaf(*next_leaf - 1)),
                }
            }
            out[id].children = kids;
            out[id].span = (first, *next_leaf - 1);
            Ok(Some(id))
        }
    }
}

fn encode_node(n: &Node) -> String {
    match n {
        Node::Leaf(j) => j.to_string(),
        Node::Vertex(c) => format!("({})", c.iter().map(encode_node).collect::<Vec<_>>().join(",")),
    }
}

impl fmt::Display for RibbonTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl From<RibbonTree> for String {
    fn from(t: RibbonTree) -> String {
        t.encode()
    }
}

impl TryFrom<String> for RibbonTree {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for RibbonTree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let node = parse_node(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::InvalidTree(format!("trailing input in {s:?}")));
        }
        RibbonTree::from_node(node)
    }
}

fn parse_node(c: &[char], pos: &mut usize) -> Result<Node> {
    match c.get(*pos) {
        Some('(') => {
            *pos += 1;
            let mut kids = vec![parse_node(c, pos)?];
            loop {
                match c.get(*pos) {
                    Some(',') => {
                        *pos += 1;
                        kids.push(parse_node(c, pos)?);
                    }
                    Some(')') => {
                        *pos += 1;
                        return Ok(Node::Vertex(kids));
                    }
                    other => return Err(Error::InvalidTree(format!("unexpected {other:?} at {}", *pos))),
                }
            }
        }
        Some(d) if d.is_ascii_digit() => {
            let start = *pos;
            while c.get(*pos).is_some_and(|d| d.is_ascii_digit()) {
                *pos += 1;
            }
            let s: String = c[start..*pos].iter().collect();
            s.parse().map(Node::Leaf).map_err(|_| Error::InvalidTree(format!("bad leaf {s}")))
        }
        other => Err(Error::InvalidTree(format!("unexpected {other:?} at {}", *pos))),
    }
}

/// All trees on the consecutive leaves `lo..=hi`; a single leaf is returned as a leaf.
fn subtrees(lo: usize, hi: usize) -> Vec<Node> {
    if lo == hi {
        return vec![Node::Leaf(lo)];
    }
    let mut out = Vec::new();
    // children as a composition of the interval into at least two blocks
    let mut stack: Vec<(usize, Vec<Node>)> = vec![(lo, Vec::new())];
    while let Some((start, acc)) = stack.pop() {
        if start > hi {
            if acc.len() >= 2 {
                out.push(Node::Vertex(acc));
            }
            continue;
        }
        for end in start..=hi {
            if start == lo && end == hi {
                continue;
            }
            for t in subtrees(start, end) {
                let mut next = acc.clone();
                next.push(t);
                stack.push((end + 1, next));
            }
        }
    }
    out
}

/// Every stable ribbon tree with `k` leaves, ordered by vertex count and then encoding.
pub fn enumerate_trees(k: usize) -> Result<Vec<RibbonTree>> {
    if k < 2 {
        return Err(Error::InvalidArity(k));
    }
    let mut trees = subtrees(1, k)
        .into_iter()
        .map(RibbonTree::from_node)
        .collect::<Result<Vec<_>>>()?;
    trees.sort_by_cached_key(|t| (t.vertex_count(), t.encode()));
    Ok(trees)
}

/// The root-path order: `α ≺ β` iff every path from `α` to the root passes `β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrder {
    leq: Vec<Vec<bool>>,
}

impl PartialOrder {
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    /// Pairs `(α, β)` with `α ≺ β`, reflexive pairs included.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|a| (0..n).filter(move |&b| self.leq[a][b]).map(move |b| (a, b))).collect()
    }
}

pub fn partial_order(tree: &RibbonTree) -> PartialOrder {
    let n = tree.vertex_count();
    let mut leq = vec![vec![false; n]; n];
    for (a, row) in leq.iter_mut().enumerate() {
        let mut v = Some(a);
        while let Some(b) = v {
            row[b] = true;
            v = tree.parent(b);
        }
    }
    PartialOrder { leq }
}

/// `𝔪` (allocation 0), `𝔣` (strictly between) or `𝔪′` (allocation 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexClass {
    #[serde(rename = "m")]
    M,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "m'")]
    MPrime,
}

impl VertexClass {
    pub fn of(rho: Rational) -> VertexClass {
        if rho.is_zero() {
            VertexClass::M
        } else if rho.is_one() {
            VertexClass::MPrime
        } else {
            VertexClass::F
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            VertexClass::M => "m",
            VertexClass::F => "f",
            VertexClass::MPrime => "m'",
        }
    }
}

/// A tree with a time allocation, optionally a distinguished vertex and a parameter `s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedTree {
    pub tree: RibbonTree,
    pub rho: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinguished: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_value: Option<Rational>,
}

impl DecoratedTree {
    pub fn new(tree: RibbonTree, rho: Vec<Rational>) -> Result<Self> {
        let d = DecoratedTree { tree, rho, distinguished: None, s_value: None };
        d.validate()?;
        Ok(d)
    }

    pub fn with_distinguished(mut self, delta: usize, s: Option<Rational>) -> Result<Self> {
        self.distinguished = Some(delta);
        self.s_value = s;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tree.vertex_count();
        if self.rho.len() != n {
            return Err(Error::InvalidTree(format!("{} allocation values for {n} vertices", self.rho.len())));
        }
        let zero = Rational::zero();
        let one = Rational::one();
        for (v, r) in self.rho.iter().enumerate() {
            if *r < zero || *r > one {
                return Err(Error::InvalidTree(format!("allocation {r} at vertex {v} outside [0,1]")));
            }
            if let Some(p) = self.tree.parent(v) {
                if self.rho[p] < *r {
                    return Err(Error::InvalidTree(format!("allocation decreases from vertex {v} to its parent {p}")));
                }
            }
        }
        if let Some(d) = self.distinguished {
            if d >= n {
                return Err(Error::IndexRange(format!("distinguished vertex {d} of {n}")));
            }
            if self.classes()[d] != VertexClass::F {
                return Err(Error::InvalidTree(format!("distinguished vertex {d} has allocation 0 or 1")));
            }
        }
        if let Some(s) = self.s_value {
            if s < zero || s > one {
                return Err(Error::InvalidTree(format!("parameter s = {s} outside [0,1]")));
            }
        }
        Ok(())
    }

    pub fn classes(&self) -> Vec<VertexClass> {
        self.rho.iter().map(|r| VertexClass::of(*r)).collect()
    }
}

/// `⊴` as a weak order: blocks of vertices sorted by `(j_tm, ρ)`; a block with more than
/// one vertex is a tie.
pub fn weak_total_order(tree: &DecoratedTree) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..tree.tree.vertex_count()).collect();
    let key = |v: &usize| (tree.tree.j_tm(*v), tree.rho[*v]);
    idx.sort_by(|a, b| key(a).cmp(&key(b)).then(a.cmp(b)));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for v in idx {
        match blocks.last_mut() {
            Some(last) if key(&last[0]) == key(&v) => last.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    blocks
}

/// The total order `⊴`; equal `(j_tm, ρ)` is reported instead of being broken.
pub fn total_order(tree: &DecoratedTree) -> Result<Vec<usize>> {
    let blocks = weak_total_order(tree);
    if let Some(b) = blocks.iter().find(|b| b.len() > 1) {
        return Err(Error::OrderDegenerate(format!(
            "vertices {b:?} share j_tm = {} and allocation {}",
            tree.tree.j_tm(b[0]),
            tree.rho[b[0]]
        )));
    }
    Ok(blocks.into_iter().map(|b| b[0]).collect())
}

/// `𝔰(α) = 1` for `α ◁ δ`, `s` at `δ`, `0` otherwise.
pub fn s_parametrization(tree: &DecoratedTree, delta: usize, s: Rational) -> Result<Vec<Rational>> {
    let n = tree.tree.vertex_count();
    if delta >= n {
        return Err(Error::IndexRange(format!("vertex {delta} of {n}")));
    }
    if s < Rational::zero() || s > Rational::one() {
        return Err(Error::InvalidTree(format!("parameter s = {s} outside [0,1]")));
    }
    let blocks = weak_total_order(tree);
    let pos = blocks.iter().position(|b| b.contains(&delta)).expect("every vertex is ordered");
    if blocks[pos].len() > 1 {
        return Err(Error::OrderDegenerate(format!("distinguished vertex {delta} is tied with {:?}", blocks[pos])));
    }
    let mut out = vec![Rational::zero(); n];
    for b in &blocks[..pos] {
        for &v in b {
            out[v] = Rational::one();
        }
    }
    out[delta] = s;
    Ok(out)
}

/// Which parameter space a stratum belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    M,
    N,
    L,
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" | "m" => Ok(Space::M),
            "N" | "n" => Ok(Space::N),
            "L" | "l" => Ok(Space::L),
            _ => Err(Error::Config(format!("unknown space {s:?}, expected M, N or L"))),
        }
    }
}

/// A combinatorial stratum: a tree, a class per vertex and, for `L`, a distinguished
/// `𝔣`-vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stratum {
    pub space: Space,
    pub tree: RibbonTree,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<VertexClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distinguished: Option<usize>,
    pub dimension: i64,
}

impl Stratum {
    /// Build and validate a stratum; the dimension is computed.
    pub fn new(space: Space, tree: RibbonTree, classes: Vec<VertexClass>, distinguished: Option<usize>) -> Result<Self> {
        let mut s = Stratum { space, tree, classes, distinguished, dimension: 0 };
        s.check_shape()?;
        s.dimension = s.formula_dimension();
        Ok(s)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.tree.vertex_count();
        match self.space {
            Space::M => {
                if !self.classes.is_empty() || self.distinguished.is_some() {
                    return Err(Error::InvalidTree("associahedron strata carry no decorations".into()));
                }
                return Ok(());
            }
            Space::N if self.distinguished.is_some() => {
                return Err(Error::InvalidTree("N strata carry no distinguished vertex".into()));
            }
            Space::L if self.distinguished.is_none() => {
                return Err(Error::InvalidTree("L strata need a distinguished vertex".into()));
            }
            _ => {}
        }
        if self.classes.len() != n {
            return Err(Error::InvalidTree(format!("{} classes for {n} vertices", self.classes.len())));
        }
        for v in 0..n {
            if let Some(p) = self.tree.parent(v) {
                if self.classes[v] > self.classes[p] {
                    return Err(Error::InvalidTree(format!("class decreases from vertex {v} to parent {p}")));
                }
                if self.classes[v] == VertexClass::F && self.classes[p] == VertexClass::F {
                    return Err(Error::InvalidTree(format!("f-vertices {v} and {p} are adjacent")));
                }
            }
        }
        if let Some(d) = self.distinguished {
            if d >= n {
                return Err(Error::IndexRange(format!("distinguished vertex {d} of {n}")));
            }
            if self.classes[d] != VertexClass::F {
                return Err(Error::InvalidTree(format!("distinguished vertex {d} is not an f-vertex")));
            }
        }
        Ok(())
    }

    /// `|Γ| = k − 1 − |V ∖ V^𝔣|`, plus one on `L`; `k − 1 − |V|` on `M`.
    pub fn formula_dimension(&self) -> i64 {
        let k = self.tree.k() as i64;
        match self.space {
            Space::M => self.tree.m_dimension(),
            Space::N | Space::L => {
                let non_f = self.classes.iter().filter(|c| **c != VertexClass::F).count() as i64;
                let base = k - 1 - non_f;
                if self.space == Space::L {
                    base + 1
                } else {
                    base
                }
            }
        }
    }

    /// A time allocation in the stratum: `0` on `𝔪`, `1` on `𝔪′`, `1/2` on `𝔣`.
    pub fn representative(&self) -> Result<DecoratedTree> {
        if self.space == Space::M {
            return Err(Error::InvalidTree("associahedron strata have no allocation".into()));
        }
        let rho = self
            .classes
            .iter()
            .map(|c| match c {
                VertexClass::M => Rational::zero(),
                VertexClass::F => Rational::new(1, 2),
                VertexClass::MPrime => Rational::one(),
            })
            .collect();
        let d = DecoratedTree::new(self.tree.clone(), rho)?;
        match self.distinguished {
            Some(delta) => d.with_distinguished(delta, None),
            None => Ok(d),
        }
    }

    pub fn label(&self) -> String {
        let mut s = self.tree.encode();
        if !self.classes.is_empty() {
            let cls: Vec<&str> = self.classes.iter().map(|c| c.symbol()).collect();
            s.push_str(&format!(" [{}]", cls.join(",")));
        }
        if let Some(d) = self.distinguished {
            s.push_str(&format!(" δ={d}"));
        }
        s
    }
}

fn class_assignments(tree: &RibbonTree) -> Vec<Vec<VertexClass>> {
    const ALL: [VertexClass; 3] = [VertexClass::M, VertexClass::F, VertexClass::MPrime];
    let n = tree.vertex_count();
    let mut out = Vec::new();
    let mut current = vec![VertexClass::M; n];
    fn rec(tree: &RibbonTree, v: usize, cur: &mut Vec<VertexClass>, out: &mut Vec<Vec<VertexClass>>) {
        if v == cur.len() {
            out.push(cur.clone());
            return;
        }
        // preorder numbering: the parent of v is already assigned
        for c in ALL {
            if let Some(p) = tree.parent(v) {
                if c > cur[p] || (c == VertexClass::F && cur[p] == VertexClass::F) {
                    continue;
                }
            }
            cur[v] = c;
            rec(tree, v + 1, cur, out);
        }
    }
    rec(tree, 0, &mut current, &mut out);
    out
}

/// Strata of the associahedron, one per tree.
pub fn enumerate_strata_m(k: usize) -> Result<Vec<Stratum>> {
    enumerate_trees(k)?
        .into_iter()
        .map(|t| Stratum::new(Space::M, t, Vec::new(), None))
        .collect()
}

/// Strata of `N̄^{k+1}`: trees with allocation classes monotone along `≺` and no two
/// comparable `𝔣`-vertices.
pub fn enumerate_strata_n(k: usize) -> Result<Vec<Stratum>> {
    let mut out = Vec::new();
    for t in enumerate_trees(k)? {
        for cls in class_assignments(&t) {
            out.push(Stratum::new(Space::N, t.clone(), cls, None)?);
        }
    }
    Ok(out)
}

/// Strata of `L̄^{k+1}`: `N`-strata together with a distinguished `𝔣`-vertex.
pub fn enumerate_strata_l(k: usize) -> Result<Vec<Stratum>> {
    let mut out = Vec::new();
    for s in enumerate_strata_n(k)? {
        for (v, c) in s.classes.iter().enumerate() {
            if *c == VertexClass::F {
                out.push(Stratum::new(Space::L, s.tree.clone(), s.classes.clone(), Some(v))?);
            }
        }
    }
    Ok(out)
}

pub fn enumerate_strata(space: Space, k: usize) -> Result<Vec<Stratum>> {
    match space {
        Space::M => enumerate_strata_m(k),
        Space::N => enumerate_strata_n(k),
        Space::L => enumerate_strata_l(k),
    }
}

/// Endpoint faces `(δ, s)` with `s ∈ {0, 1}` that survive after identifying faces with equal
/// `𝔰`-maps (`(δ, 1)` meets `(δ′, 0)` when `δ′` follows `δ` directly in `⊴`).
pub fn endpoint_faces(tree: &DecoratedTree) -> Result<Vec<(usize, Rational)>> {
    let classes = tree.classes();
    let mut faces: Vec<(usize, Rational, Vec<Rational>)> = Vec::new();
    for (v, c) in classes.iter().enumerate() {
        if *c != VertexClass::F {
            continue;
        }
        for s in [Rational::zero(), Rational::one()] {
            faces.push((v, s, s_parametrization(tree, v, s)?));
        }
    }
    let mut alive = vec![true; faces.len()];
    for i in 0..faces.len() {
        for j in 0..faces.len() {
            if i != j && alive[i] && alive[j] && faces[i].1 != faces[j].1 && faces[i].2 == faces[j].2 {
                alive[i] = false;
                alive[j] = false;
            }
        }
    }
    let mut out: Vec<(usize, Rational)> =
        faces.into_iter().zip(alive).filter(|(_, a)| *a).map(|((v, s, _), _)| (v, s)).collect();
    let order = weak_total_order(tree).concat();
    out.sort_by(|a, b| {
        let pa = order.iter().position(|v| *v == a.0);
        let pb = order.iter().position(|v| *v == b.0);
        pa.cmp(&pb).then(a.1.cmp(&b.1)).then(Ordering::Equal)
    });
    Ok(out)
}
