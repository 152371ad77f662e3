//! Codimension-one facets of `N̄^{k+1}` and `L̄^{k+1}`, each labelled by the relation term it
//! produces.
//!
//! Factor dimensions follow `dim M^{a+1} = a − 2`, `dim N̄^{a+1} = a − 1`,
//! `dim L̄^{a+1} = a`.  With these conventions the strip-breaking facets (an `𝔪¹` applied to
//! an input or the output, `M^{1+1}` of dimension `−1`) have codimension one as well, and the
//! facet list matches the relation terms one to one.

use super::{RibbonTree, Space, Stratum, VertexClass, Node};
use crate::error::{Error, Result};
use crate::sign_engine::compositions;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacetType {
    /// `M × N̄`: an `𝔪` bubble below an `𝔣` component.
    NType1,
    /// `∏ N̄ × M`: `𝔣` components below an `𝔪′` root.
    NType2,
    /// `M # (N̄ × … × L̄ × … × N̄)`.
    LType1,
    /// `L̄ # M`.
    LType2,
    /// `{0, 1} × N̄`.
    LType3,
}

/// A term of the functor relation or of the homotopy relation, with index data.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "term")]
pub enum RelationTerm {
    /// `𝔣^{k−m+1}(x¹, …, xⁿ, 𝔪^m(xⁿ⁺¹, …), …)`.
    FunctorAfterProduct { n: usize, m: usize },
    /// `𝔪^r(𝔣^{s₁}(…), …, 𝔣^{s_r}(…))`.
    ProductAfterFunctors { parts: Vec<usize> },
    /// `𝔥^{k−m+1}(x¹, …, xⁿ, 𝔪^m(…), …)`.
    HomotopyAfterProduct { n: usize, m: usize },
    /// `𝔪^r(𝔣^{s₁}, …, 𝔥^{s_i}, 𝔤^{s_{i+1}}, …)` with `marked = i` (1-based).
    ProductAfterHomotopy { parts: Vec<usize>, marked: usize },
    /// `−𝔣^k`.
    EndpointSource,
    /// `𝔤^k`.
    EndpointTarget,
}

impl fmt::Display for RelationTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationTerm::FunctorAfterProduct { n, m } => write!(f, "f(n={n}, m^{m})"),
            RelationTerm::ProductAfterFunctors { parts } => write!(f, "m^{}(f{:?})", parts.len(), parts),
            RelationTerm::HomotopyAfterProduct { n, m } => write!(f, "h(n={n}, m^{m})"),
            RelationTerm::ProductAfterHomotopy { parts, marked } => {
                write!(f, "m^{}(f..h..g{:?}, h at {marked})", parts.len(), parts)
            }
            RelationTerm::EndpointSource => f.write_str("-f"),
            RelationTerm::EndpointTarget => f.write_str("g"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FacetFactor {
    pub space: Space,
    pub arity: usize,
    pub dimension: i64,
}

impl FacetFactor {
    fn new(space: Space, arity: usize) -> Self {
        let a = arity as i64;
        let dimension = match space {
            Space::M => a - 2,
            Space::N => a - 1,
            Space::L => a,
        };
        FacetFactor { space, arity, dimension }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub facet_type: FacetType,
    pub term: RelationTerm,
    pub factors: Vec<FacetFactor>,
    pub dimension: i64,
    pub parent_dimension: i64,
    /// The stratum of the parent space realising the facet; absent for strip breakings.
    pub child: Option<Stratum>,
}

impl Facet {
    fn new(
        facet_type: FacetType,
        term: RelationTerm,
        factors: Vec<FacetFactor>,
        parent_dimension: i64,
        child: Option<Stratum>,
    ) -> Self {
        let dimension = factors.iter().map(|f| f.dimension).sum();
        Facet { facet_type, term, factors, dimension, parent_dimension, child }
    }

    pub fn codimension(&self) -> i64 {
        self.parent_dimension - self.dimension
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArity(k));
    }
    Ok(())
}

fn leaves(lo: usize, hi: usize) -> Vec<Node> {
    (lo..=hi).map(Node::Leaf).collect()
}

/// Root with leaves `1..=n`, a vertex over `n+1..=n+m`, then the remaining leaves.
fn bubble_tree(k: usize, n: usize, m: usize) -> Result<RibbonTree> {
    let mut kids = leaves(1, n);
    kids.push(Node::Vertex(leaves(n + 1, n + m)));
    kids.extend(leaves(n + m + 1, k));
    RibbonTree::from_node(Node::Vertex(kids))
}

/// Root whose children are the blocks of `parts`; blocks of size one are leaves.
/// Returns the tree and the vertex id of each block (`None` for leaves).
fn block_tree(parts: &[usize]) -> Result<(RibbonTree, Vec<Option<usize>>)> {
    let mut kids = Vec::with_capacity(parts.len());
    let mut ids = Vec::with_capacity(parts.len());
    let mut next = 1;
    let mut next_id = 1;
    for &s in parts {
        if s == 1 {
            kids.push(Node::Leaf(next));
            ids.push(None);
        } else {
            kids.push(Node::Vertex(leaves(next, next + s - 1)));
            ids.push(Some(next_id));
            next_id += 1;
        }
        next += s;
    }
    Ok((RibbonTree::from_node(Node::Vertex(kids))?, ids))
}

fn block_classes(ids: &[Option<usize>]) -> Vec<VertexClass> {
    let mut c = vec![VertexClass::MPrime];
    c.extend(ids.iter().flatten().map(|_| VertexClass::F));
    c
}

/// Terms of the arity-`k` functor relation
/// `Σ ±𝔣(…, 𝔪^m(…), …) + Σ 𝔪^r(𝔣^{s₁}, …, 𝔣^{s_r}) = 0`.
pub fn functor_relation_terms(k: usize) -> Result<Vec<RelationTerm>> {
    check_k(k)?;
    let mut out = Vec::new();
    for m in 1..=k {
        for n in 0..=k - m {
            out.push(RelationTerm::FunctorAfterProduct { n, m });
        }
    }
    for parts in compositions(k) {
        out.push(RelationTerm::ProductAfterFunctors { parts });
    }
    Ok(out)
}

/// Terms of the arity-`k` homotopy relation, endpoint terms included.
pub fn homotopy_relation_terms(k: usize) -> Result<Vec<RelationTerm>> {
    check_k(k)?;
    let mut out = vec![RelationTerm::EndpointSource, RelationTerm::EndpointTarget];
    for m in 1..=k {
        for n in 0..=k - m {
            out.push(RelationTerm::HomotopyAfterProduct { n, m });
        }
    }
    for parts in compositions(k) {
        for marked in 1..=parts.len() {
            out.push(RelationTerm::ProductAfterHomotopy { parts: parts.clone(), marked });
        }
    }
    Ok(out)
}

/// Codimension-one facets of `N̄^{k+1}`.
pub fn boundary_facets_n(k: usize) -> Result<Vec<Facet>> {
    check_k(k)?;
    let top = k as i64 - 1;
    let mut out = Vec::new();
    for m in 1..=k {
        for n in 0..=k - m {
            let child = if m == 1 {
                None
            } else if m == k {
                // allocation 0 on the whole disk
                Some(Stratum::new(Space::N, RibbonTree::corolla(k)?, vec![VertexClass::M], None)?)
            } else {
                Some(Stratum::new(Space::N, bubble_tree(k, n, m)?, vec![VertexClass::F, VertexClass::M], None)?)
            };
            out.push(Facet::new(
                FacetType::NType1,
                RelationTerm::FunctorAfterProduct { n, m },
                vec![FacetFactor::new(Space::M, m), FacetFactor::new(Space::N, k - m + 1)],
                top,
                child,
            ));
        }
    }
    for parts in compositions(k) {
        let r = parts.len();
        let child = if r == 1 {
            None
        } else {
            // r = k gives allocation 1 on the whole disk
            let (tree, ids) = block_tree(&parts)?;
            Some(Stratum::new(Space::N, tree, block_classes(&ids), None)?)
        };
        let mut factors: Vec<FacetFactor> = parts.iter().map(|s| FacetFactor::new(Space::N, *s)).collect();
        factors.push(FacetFactor::new(Space::M, r));
        out.push(Facet::new(FacetType::NType2, RelationTerm::ProductAfterFunctors { parts }, factors, top, child));
    }
    Ok(out)
}

/// Codimension-one facets of `L̄^{k+1}`.
pub fn boundary_facets_l(k: usize) -> Result<Vec<Facet>> {
    check_k(k)?;
    let top = k as i64;
    let corolla_f = Stratum::new(Space::N, RibbonTree::corolla(k)?, vec![VertexClass::F], None)?;
    let mut out = Vec::new();
    for term in [RelationTerm::EndpointSource, RelationTerm::EndpointTarget] {
        let mut f = Facet::new(FacetType::LType3, term, vec![FacetFactor::new(Space::N, k)], top, Some(corolla_f.clone()));
        // the {0,1} factor is zero dimensional
        f.dimension = k as i64 - 1;
        out.push(f);
    }
    for m in 1..=k {
        for n in 0..=k - m {
            let child = if m == 1 || m == k {
                None
            } else {
                Some(Stratum::new(Space::L, bubble_tree(k, n, m)?, vec![VertexClass::F, VertexClass::M], Some(0))?)
            };
            out.push(Facet::new(
                FacetType::LType2,
                RelationTerm::HomotopyAfterProduct { n, m },
                vec![FacetFactor::new(Space::M, m), FacetFactor::new(Space::L, k - m + 1)],
                top,
                child,
            ));
        }
    }
    for parts in compositions(k) {
        let r = parts.len();
        for marked in 1..=r {
            let child = if r == 1 || parts[marked - 1] == 1 {
                None
            } else {
                let (tree, ids) = block_tree(&parts)?;
                Some(Stratum::new(Space::L, tree, block_classes(&ids), ids[marked - 1])?)
            };
            let mut factors: Vec<FacetFactor> = parts
                .iter()
                .enumerate()
                .map(|(j, s)| FacetFactor::new(if j + 1 == marked { Space::L } else { Space::N }, *s))
                .collect();
            factors.push(FacetFactor::new(Space::M, r));
            out.push(Facet::new(
                FacetType::LType1,
                RelationTerm::ProductAfterHomotopy { parts: parts.clone(), marked },
                factors,
                top,
                child,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k2_functor_facets() {
        let f = boundary_facets_n(2).unwrap();
        let terms: Vec<RelationTerm> = f.iter().map(|x| x.term.clone()).collect();
        assert_eq!(
            terms,
            vec![
                RelationTerm::FunctorAfterProduct { n: 0, m: 1 },
                RelationTerm::FunctorAfterProduct { n: 1, m: 1 },
                RelationTerm::FunctorAfterProduct { n: 0, m: 2 },
                RelationTerm::ProductAfterFunctors { parts: vec![1, 1] },
                RelationTerm::ProductAfterFunctors { parts: vec![2] },
            ]
        );
        assert!(f.iter().all(|x| x.codimension() == 1));
    }

    #[test]
    fn constant_allocation_facets_appear_once() {
        for k in 2..=5 {
            let f = boundary_facets_n(k).unwrap();
            let all_one: Vec<_> = f
                .iter()
                .filter(|x| x.child.as_ref().is_some_and(|c| c.classes == vec![VertexClass::MPrime]))
                .collect();
            assert_eq!(all_one.len(), 1);
            assert_eq!(all_one[0].term, RelationTerm::ProductAfterFunctors { parts: vec![1; k] });
            let all_zero: Vec<_> = f
                .iter()
                .filter(|x| x.child.as_ref().is_some_and(|c| c.classes == vec![VertexClass::M]))
                .collect();
            assert_eq!(all_zero.len(), 1);
            assert_eq!(all_zero[0].term, RelationTerm::FunctorAfterProduct { n: 0, m: k });
        }
    }

    #[test]
    fn k2_homotopy_facet_count() {
        assert_eq!(boundary_facets_l(2).unwrap().len(), 8);
        let endpoints = boundary_facets_l(3)
            .unwrap()
            .into_iter()
            .filter(|f| f.facet_type == FacetType::LType3)
            .count();
        assert_eq!(endpoints, 2);
    }

    #[test]
    fn facet_children_are_codimension_one_strata() {
        for k in 2..=5 {
            for f in boundary_facets_n(k).unwrap().into_iter().chain(boundary_facets_l(k).unwrap()) {
                assert_eq!(f.codimension(), 1, "{f:?}");
                if let Some(c) = &f.child {
                    if f.facet_type != FacetType::LType3 {
                        assert_eq!(c.dimension, f.dimension, "{f:?}");
                    }
                }
            }
        }
    }
}
