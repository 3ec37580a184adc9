//! Capped-precision p-adic numbers.
//!
//! A value is p^v * u with u a unit known modulo p^(M - v), where M is the
//! absolute precision. Integral elements (v >= 0) are the p-adic integers of
//! the desk-scale model; negative valuations appear after dividing by p.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: i64 = 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicInt {
    prime: u64,
    precision: i64,
    /// None encodes zero to the stated precision.
    valuation: Option<i64>,
    unit: BigInt,
}

fn ppow(p: u64, e: i64) -> BigInt {
    debug_assert!(e >= 0);
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Split off the p-part of a nonzero integer.
fn split_p(p: u64, mut n: BigInt) -> (i64, BigInt) {
    let bp = BigInt::from(p);
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&bp);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

impl PadicInt {
    pub fn zero(prime: u64, precision: i64) -> Self {
        PadicInt {
            prime,
            precision,
            valuation: None,
            unit: BigInt::zero(),
        }
    }

    pub fn one(prime: u64, precision: i64) -> Self {
        Self::from_int(prime, precision, 1)
    }

    pub fn from_int(prime: u64, precision: i64, n: i64) -> Self {
        Self::from_bigint(prime, precision, BigInt::from(n))
    }

    pub fn from_bigint(prime: u64, precision: i64, n: BigInt) -> Self {
        Self::from_scaled(prime, precision, 0, n)
    }

    /// p^shift * n, known modulo p^precision.
    fn from_scaled(prime: u64, precision: i64, shift: i64, n: BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(prime, precision);
        }
        let (v, u) = split_p(prime, n);
        let val = v + shift;
        let rel = precision - val;
        if rel <= 0 {
            return Self::zero(prime, precision);
        }
        PadicInt {
            prime,
            precision,
            valuation: Some(val),
            unit: u.mod_floor(&ppow(prime, rel)),
        }
    }

    /// A rational whose denominator is a power of p times a p-adic unit.
    pub fn from_rational(prime: u64, precision: i64, r: &Rational) -> Result<Self> {
        if r.is_zero() {
            return Ok(Self::zero(prime, precision));
        }
        let (vn, un) = split_p(prime, r.numer().clone());
        let (vd, ud) = split_p(prime, r.denom().clone());
        let val = vn - vd;
        let rel = precision - val;
        if rel <= 0 {
            return Ok(Self::zero(prime, precision));
        }
        let modulus = ppow(prime, rel);
        let inv = mod_inverse(&ud, &modulus).ok_or(Error::DivisionByZero)?;
        Ok(PadicInt {
            prime,
            precision,
            valuation: Some(val),
            unit: (un * inv).mod_floor(&modulus),
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// None for zero.
    pub fn valuation(&self) -> Option<i64> {
        self.valuation
    }

    pub fn unit_part(&self) -> &BigInt {
        &self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.valuation.is_none()
    }

    pub fn is_integral(&self) -> bool {
        self.valuation.is_none_or(|v| v >= 0)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation == Some(0)
    }

    /// True when the value is known to lie in p^t Z_p.
    pub fn is_zero_mod(&self, t: i64) -> bool {
        match self.valuation {
            None => self.precision >= t,
            Some(v) => v >= t,
        }
    }

    /// Residue in [0, p^M) of an integral value.
    pub fn residue(&self) -> Option<BigInt> {
        match self.valuation {
            None => Some(BigInt::zero()),
            Some(v) if v >= 0 => Some((&self.unit * ppow(self.prime, v)).mod_floor(&ppow(self.prime, self.precision.max(0)))),
            Some(_) => None,
        }
    }

    /// Exact rational value of the stored representative.
    pub fn to_rational(&self) -> Rational {
        match self.valuation {
            None => Rational::zero(),
            Some(v) if v >= 0 => Rational::from_integer(&self.unit * ppow(self.prime, v)),
            Some(v) => Rational::new(self.unit.clone(), ppow(self.prime, -v)),
        }
    }

    pub fn with_precision(&self, precision: i64) -> Self {
        let precision = precision.min(self.precision);
        match self.valuation {
            None => Self::zero(self.prime, precision),
            Some(v) => Self::from_scaled(self.prime, precision, v, self.unit.clone()),
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "p-adic numbers over different primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let prec = self.precision.min(other.precision);
        match (self.valuation, other.valuation) {
            (None, None) => Self::zero(self.prime, prec),
            (Some(_), None) => self.with_precision(prec),
            (None, Some(_)) => other.with_precision(prec),
            (Some(va), Some(vb)) => {
                let s = va.min(vb);
                let n = &self.unit * ppow(self.prime, va - s) + &other.unit * ppow(self.prime, vb - s);
                Self::from_scaled(self.prime, prec, s, n)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self.valuation {
            None => self.clone(),
            Some(v) => Self::from_scaled(self.prime, self.precision, v, -self.unit.clone()),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Weight used in precision propagation: valuation, or precision for zero.
    fn weight(&self) -> i64 {
        self.valuation.unwrap_or(self.precision)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let prec = (self.precision + other.weight()).min(other.precision + self.weight());
        match (self.valuation, other.valuation) {
            (Some(va), Some(vb)) => Self::from_scaled(self.prime, prec, va + vb, &self.unit * &other.unit),
            _ => Self::zero(self.prime, prec),
        }
    }

    /// Multiply by the exact power p^k (k may be negative); shifts precision by k.
    pub fn mul_p_pow(&self, k: i64) -> Self {
        match self.valuation {
            None => Self::zero(self.prime, self.precision + k),
            Some(v) => PadicInt {
                prime: self.prime,
                precision: self.precision + k,
                valuation: Some(v + k),
                unit: self.unit.clone(),
            },
        }
    }

    /// Divide by the exact power p^k: precision drops by exactly k.
    pub fn div_p_pow(&self, k: i64) -> Self {
        self.mul_p_pow(-k)
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.valuation.ok_or(Error::DivisionByZero)?;
        let rel = self.precision - v;
        let modulus = ppow(self.prime, rel);
        let u = mod_inverse(&self.unit, &modulus).ok_or(Error::DivisionByZero)?;
        Ok(PadicInt {
            prime: self.prime,
            precision: rel - v,
            valuation: Some(-v),
            unit: u,
        })
    }

    /// Division; a unit divisor leaves the dividend's precision unchanged.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other);
        let vb = other.valuation.ok_or(Error::DivisionByZero)?;
        let rel_b = other.precision - vb;
        match self.valuation {
            None => Ok(Self::zero(self.prime, self.precision - vb)),
            Some(va) => {
                let rel = (self.precision - va).min(rel_b);
                let modulus = ppow(self.prime, rel);
                let ub = mod_inverse(&other.unit, &modulus).ok_or(Error::DivisionByZero)?;
                Ok(Self::from_scaled(self.prime, va - vb + rel, va - vb, &self.unit * ub))
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::one(self.prime, self.precision);
        }
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Text form `p^M:residue`, with `/p^s` appended for negative valuation.
    pub fn to_text(&self) -> String {
        match self.valuation {
            Some(v) if v < 0 => format!(
                "{}^{}:{}/p^{}",
                self.prime,
                self.precision,
                self.unit.mod_floor(&ppow(self.prime, self.precision - v)),
                -v
            ),
            _ => format!("{}^{}:{}", self.prime, self.precision, self.residue().unwrap()),
        }
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a p-adic number: {s:?}"));
        let (head, body) = s.split_once(':').ok_or_else(bad)?;
        let (p, m) = head.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let m: i64 = m.trim().parse().map_err(|_| bad())?;
        if p < 2 {
            return Err(bad());
        }
        let (r, shift) = match body.split_once("/p^") {
            Some((r, k)) => (r, -k.trim().parse::<i64>().map_err(|_| bad())?),
            None => (body, 0),
        };
        let r: BigInt = r.trim().parse().map_err(|_| bad())?;
        if r.is_negative() {
            return Err(bad());
        }
        Ok(Self::from_scaled(p, m, shift, r))
    }
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Serialize for PadicInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for PadicInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PadicInt::from_text(&s).map_err(serde::de::Error::custom)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let g = a.extended_gcd(m);
    g.gcd.is_one().then(|| g.x.mod_floor(m))
}
