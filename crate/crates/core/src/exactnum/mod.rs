//! Exact scalars: rationals, cyclotomic numbers and capped p-adic numbers.

pub mod cyclo;
pub mod padic;
pub mod rational;

pub use cyclo::{cyclotomic_poly, lcm, totient, CycloNumber};
pub use padic::{PadicInt, DEFAULT_PRECISION};
pub use rational::{rat, rat_int, rational_from_text, rational_to_text, Rational};
