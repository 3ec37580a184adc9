//! Exact hom-Lie algebras of twisted derivations.
//!
//! Scalars live in [`exactnum`]; [`laurent`] provides the Laurent polynomial
//! rings and monomial endomorphisms; [`twistder`] builds the bracket of
//! `a * (id - sigma)` and verifies the hom-Lie axioms. The remaining modules
//! specialise the construction to Galois modules of units ([`galmod`]),
//! Dirichlet L-values ([`lfunc`]) and p-adic power series ([`padicseries`]).

pub mod error;
pub mod exactnum;
pub mod laurent;
pub mod report;
pub mod twistder;
pub mod galmod;
pub mod lfunc;
pub mod padicseries;

pub use error::{Error, Result};
pub use exactnum::{CycloNumber, PadicInt, Rational};
pub use laurent::{ExponentVector, LaurentPoly, MonomialEndo};
pub use padicseries::PiSeries;
pub use report::VerificationReport;
