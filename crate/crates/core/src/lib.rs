//! Exact analysis of one-row Gomory-Johnson cut-generating functions.
//!
//! The crate tests minimality of piecewise linear functions with irrational
//! breakpoints, computes covered components, tests extremality relative to
//! piecewise continuous perturbations and verifies certificates of
//! non-extremality given as locally quasimicroperiodic perturbations.

pub mod compendium;
pub mod complexes;
pub mod covering;
pub mod error;
pub mod exactfield;
pub mod lattice;
pub mod microperturb;
pub mod minimality;
pub mod perturbation_space;
pub mod pwfunction;

pub use error::{Error, Result};
pub use exactfield::{QuadraticElement, Rational};
