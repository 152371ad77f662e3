//! Finite verification machinery for wrapped Floer theory of conormal bundles.
//!
//! The crate is organised by concern:
//!
//! * [`slit_domains`]: closed-form slit maps on the upper half-plane, the one-form
//!   `beta = d Im F`, inversion of slit parameters and gluing.
//! * [`moduli_trees`]: ribbon trees, time allocations, strata of the functor and
//!   homotopy parameter spaces, and their codimension-one facets.
//! * [`sign_engine`]: mod-2 sign exponents and exhaustive identity checks.
//! * [`ainfty_core`]: A-infinity categories, functors and homotopies over the integers.
//! * [`chord_spectra`]: geodesic chord spectra of flat tori, metric comparison and
//!   Hamiltonian vector fields on cylindrical ends.
//! * [`maslov_grading`]: Robbin-Salamon index via crossing forms.
//! * [`workbench`]: configurable verification suite and run reports.

pub mod ainfty_core;
pub mod chord_spectra;
pub mod error;
pub mod maslov_grading;
pub mod moduli_trees;
pub mod sign_engine;
pub mod slit_domains;
pub mod workbench;

pub use error::{Error, Result};
