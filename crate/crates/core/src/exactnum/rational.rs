//! Arbitrary-precision rationals and their text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Reduced fraction with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Text form `num/den`; integers print without a denominator.
pub fn rational_to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_text(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}
