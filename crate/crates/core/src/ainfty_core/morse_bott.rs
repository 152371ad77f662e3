//! Morse–Bott cochain model: cellular cochains of the square 2-torus plus one generator
//! per nonconstant chord.

use super::{AInftyCategory, Basis, ChordBasisElement, GradedHom, MapFamily, MultilinearMap};
use crate::chord_spectra::{ChordClass, ChordDatum, ChordSpectrum};
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Cells of the square torus with a single vertex, two edges and one face.
const TORUS_CELLS: [(&str, i64); 4] = [("pt", 0), ("a", 1), ("b", 1), ("T", 2)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorseBottComplex {
    pub object: String,
    pub hom: GradedHom,
    /// Indices of the constant-family elements; they span a subcomplex.
    pub constant_subcomplex: Vec<usize>,
    /// `(index, action)` sorted by decreasing action.
    pub filtration: Vec<(usize, f64)>,
}

impl MorseBottComplex {
    pub fn ranks(&self) -> std::collections::BTreeMap<i64, usize> {
        self.hom.ranks()
    }

    pub fn nonconstant_len(&self) -> usize {
        self.hom.basis.len() - self.constant_subcomplex.len()
    }

    /// The complex as a one-object category with `𝔪¹ = 0`: the cellular differential of
    /// the one-vertex torus vanishes and no chord generator is reached from the constants.
    pub fn as_category(&self) -> Result<AInftyCategory> {
        let objects = vec![self.object.clone()];
        let basis = Basis::new(&objects, self.hom.basis.clone())?;
        AInftyCategory::new(&self.object, objects, basis, MapFamily::from([(1, MultilinearMap::new(1))]))
    }
}

fn chord_id(c: &ChordClass) -> String {
    match &c.datum {
        ChordDatum::ConstantFamily => "const".into(),
        ChordDatum::Wrap { k } => format!("c[{k}]"),
        ChordDatum::Lattice { vector } => {
            format!("c[{}]", vector.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        }
    }
}

/// Build `C*(T²) ⊕ ℤ⟨nonconstant chords⟩` on the object `object`, grading each chord by
/// `degree_of`.
pub fn build_morse_bott_complex<D: Fn(&ChordClass) -> i64>(
    spectrum: &ChordSpectrum,
    object: &str,
    degree_of: D,
) -> MorseBottComplex {
    let mut basis: Vec<ChordBasisElement> = TORUS_CELLS
        .iter()
        .map(|(id, d)| {
            let mut e = ChordBasisElement::new(id, object, object, *d);
            e.action = Some(0.0);
            e.label = Some("constant".into());
            e
        })
        .collect();
    let constant_subcomplex = (0..basis.len()).collect();
    for c in spectrum.nonconstant() {
        let mut e = ChordBasisElement::new(&chord_id(c), object, object, degree_of(c));
        e.action = Some(c.action);
        e.label = Some("chord".into());
        basis.push(e);
    }
    let mut filtration: Vec<(usize, f64)> =
        basis.iter().enumerate().map(|(i, e)| (i, e.action.unwrap_or(0.0))).collect();
    filtration.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    MorseBottComplex {
        object: object.to_string(),
        hom: GradedHom { source: object.into(), target: object.into(), basis },
        constant_subcomplex,
        filtration,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty_core::verify_ainfty;
    use crate::chord_spectra::{action_gap, enumerate_cords_t3};

    #[test]
    fn torus_alone() {
        let s = enumerate_cords_t3(10.0, -1.0).unwrap();
        let c = build_morse_bott_complex(&s, "T", |_| 0);
        assert_eq!(c.ranks().into_iter().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 1)]);
        assert_eq!(c.nonconstant_len(), 0);
        assert!(verify_ainfty(&c.as_category().unwrap(), 3).unwrap().pass);
    }

    #[test]
    fn t3_generators() {
        let s = enumerate_cords_t3(1.0, -8.0).unwrap();
        let c = build_morse_bott_complex(&s, "T", |_| 0);
        assert_eq!(c.constant_subcomplex.len(), 4);
        assert_eq!(c.nonconstant_len(), 8);
        let gap = action_gap(&s).unwrap();
        for e in &c.hom.basis[4..] {
            assert!(e.action.unwrap() <= -gap);
        }
        assert!(c.filtration.windows(2).all(|w| w[0].1 >= w[1].1));
    }
}
