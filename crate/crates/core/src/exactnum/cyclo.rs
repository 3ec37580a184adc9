//! Elements of the cyclotomic field Q(zeta_m), stored in the power basis of
//! Q[x]/Phi_m(x).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{rational_from_text, rational_to_text, Rational};
use crate::error::{Error, Result};

/// Euler's totient.
pub fn totient(m: u64) -> u64 {
    let mut n = m;
    let mut out = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

pub fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Coefficients (low to high) of the m-th cyclotomic polynomial, obtained by
/// dividing x^m - 1 by Phi_d for every proper divisor d of m.
pub fn cyclotomic_poly(m: u64) -> Vec<BigInt> {
    assert!(m >= 1, "cyclotomic order must be positive");
    let mut table: Vec<(u64, Vec<BigInt>)> = Vec::new();
    for d in divisors(m) {
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = BigInt::from(-1);
        num[d as usize] = BigInt::one();
        for (e, phi_e) in &table {
            if d % e == 0 {
                num = div_monic_exact(&num, phi_e);
            }
        }
        table.push((d, num));
    }
    table.pop().unwrap().1
}

fn div_monic_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        q[i - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            r[i - dd + j] -= &c * dj;
        }
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    q
}

#[derive(Debug, PartialEq, Eq)]
struct Field {
    order: u64,
    phi: Vec<BigInt>,
}

impl Field {
    fn new(order: u64) -> Arc<Field> {
        Arc::new(Field {
            order,
            phi: cyclotomic_poly(order),
        })
    }

    fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    /// Reduce an arbitrary-length coefficient vector modulo Phi_m.
    fn reduce(&self, mut c: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        if c.len() > d {
            for i in (d..c.len()).rev() {
                if c[i].is_zero() {
                    continue;
                }
                let lead = std::mem::replace(&mut c[i], Rational::zero());
                for (j, pj) in self.phi[..d].iter().enumerate() {
                    if !pj.is_zero() {
                        c[i - d + j] -= &lead * Rational::from_integer(pj.clone());
                    }
                }
            }
        }
        c.resize(d, Rational::zero());
        c
    }
}

/// Exact element of Q(zeta_m).
#[derive(Clone)]
pub struct CycloNumber {
    field: Arc<Field>,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl CycloNumber {
    pub fn zero(order: u64) -> Self {
        let field = Field::new(order);
        let d = field.degree();
        CycloNumber {
            field,
            coeffs: vec![Rational::zero(); d],
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational_in(order, Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_rational_in(1, r)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational_in(order: u64, r: Rational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = r;
        z
    }

    /// Build from power-basis coefficients; longer inputs are reduced mod Phi_m.
    pub fn from_coeffs(order: u64, coeffs: Vec<Rational>) -> Self {
        let field = Field::new(order);
        let coeffs = field.reduce(coeffs);
        CycloNumber { field, coeffs }
    }

    /// zeta_m^k for any integer k.
    pub fn root_of_unity(order: u64, k: i64) -> Self {
        let e = k.rem_euclid(order as i64) as usize;
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = Rational::one();
        Self::from_coeffs(order, c)
    }

    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.normalize_order();
        (n.order() <= 2).then(|| n.coeffs[0].clone())
    }

    /// Returns (m, k) with self = zeta_m^k, m minimal, when self is a root of unity.
    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        let m = self.order();
        let big = if m % 2 == 1 { 2 * m } else { m };
        let me = self.embed(big);
        let k = (0..big).find(|&k| me == CycloNumber::root_of_unity(big, k as i64))?;
        let g = big.gcd(&k);
        let ord = if k == 0 { 1 } else { big / g };
        Some((ord, if k == 0 { 0 } else { k / g }))
    }

    /// Image under Q(zeta_m) -> Q(zeta_big), zeta_m -> zeta_big^(big/m).
    pub fn embed(&self, big: u64) -> Self {
        let m = self.order();
        assert!(big.is_multiple_of(m), "cannot embed order {m} into {big}");
        if big == m {
            return self.clone();
        }
        let step = (big / m) as usize;
        let mut c = vec![Rational::zero(); step * self.coeffs.len().max(1)];
        for (i, ci) in self.coeffs.iter().enumerate() {
            c[i * step] = ci.clone();
        }
        Self::from_coeffs(big, c)
    }

    fn unify(&self, other: &Self) -> (Self, Self) {
        if self.order() == other.order() {
            return (self.clone(), other.clone());
        }
        let l = lcm(self.order(), other.order());
        (self.embed(l), other.embed(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.order() == other.order() {
            let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
            return CycloNumber { field: self.field.clone(), coeffs };
        }
        let (a, b) = self.unify(other);
        a.add(&b)
    }

    pub fn neg(&self) -> Self {
        CycloNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.order() != other.order() {
            let (a, b) = self.unify(other);
            return a.mul(&b);
        }
        if self.order() <= 2 {
            return CycloNumber {
                field: self.field.clone(),
                coeffs: vec![&self.coeffs[0] * &other.coeffs[0]],
            };
        }
        let d = self.coeffs.len();
        let mut c = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        CycloNumber {
            field: self.field.clone(),
            coeffs: self.field.reduce(c),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CycloNumber {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm against Phi_m.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.order() <= 2 {
            return Ok(CycloNumber {
                field: self.field.clone(),
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        let phi: Vec<Rational> = self.field.phi.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let s = poly_inverse_mod(&trim(self.coeffs.clone()), &phi);
        Ok(Self::from_coeffs(self.order(), s))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order());
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// The automorphism zeta -> zeta^j.
    pub fn galois(&self, j: i64) -> Result<Self> {
        let m = self.order();
        if (j.rem_euclid(m as i64) as u64).gcd(&m) != 1 {
            return Err(Error::InvalidGaloisIndex { j, m });
        }
        if m <= 2 {
            return Ok(self.clone());
        }
        let j = j.rem_euclid(m as i64) as usize;
        let mut c = vec![Rational::zero(); m as usize];
        for (i, ci) in self.coeffs.iter().enumerate() {
            if !ci.is_zero() {
                c[(i * j) % m as usize] += ci;
            }
        }
        Ok(Self::from_coeffs(m, c))
    }

    /// Rewrite in the smallest cyclotomic field containing the value.
    pub fn normalize_order(&self) -> Self {
        let m = self.order();
        for d in divisors(m) {
            if d == m {
                break;
            }
            if let Some(c) = self.descend(d) {
                return c;
            }
        }
        self.clone()
    }

    fn descend(&self, d: u64) -> Option<Self> {
        let m = self.order();
        let big_deg = self.coeffs.len();
        let small_deg = totient(d) as usize;
        // columns: images of zeta_d^i in the power basis of Q(zeta_m)
        let cols: Vec<Vec<Rational>> = (0..small_deg)
            .map(|i| CycloNumber::root_of_unity(d, i as i64).embed(m).coeffs)
            .collect();
        let mut rows: Vec<Vec<Rational>> = (0..big_deg)
            .map(|r| {
                let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let sol = solve_augmented(&mut rows, small_deg)?;
        Some(Self::from_coeffs(d, sol))
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(rational_to_text).collect();
        format!("{}:[{}]", self.order(), parts.join(","))
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a cyclotomic number: {s:?}"));
        let Some((m, rest)) = s.split_once(':') else {
            return Ok(Self::from_rational(rational_from_text(s)?));
        };
        let order: u64 = m.trim().parse().map_err(|_| bad())?;
        if order == 0 {
            return Err(bad());
        }
        let inner = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let coeffs = if inner.trim().is_empty() {
            vec![]
        } else {
            inner.split(',').map(rational_from_text).collect::<Result<Vec<_>>>()?
        };
        if coeffs.len() != totient(order) as usize {
            return Err(Error::Parse(format!(
                "order {order} needs {} coefficients, got {}",
                totient(order),
                coeffs.len()
            )));
        }
        Ok(Self::from_coeffs(order, coeffs))
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order() == other.order() {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.unify(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNumber {}

impl Serialize for CycloNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CycloNumber::from_text(&s).map_err(serde::de::Error::custom)
    }
}

// ---- Private helpers ----

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn deg(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn poly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let db = deg(b).expect("division by zero polynomial");
    let mut r = a.to_vec();
    let mut q = vec![Rational::zero(); a.len().max(1)];
    let lead = b[db].clone();
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        for j in 0..=db {
            r[dr - db + j] -= &c * &b[j];
        }
        q[dr - db] = c;
    }
    (trim(q), trim(r))
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    trim(c)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let z = Rational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// s with s*a = 1 mod m, assuming gcd(a, m) = 1.
fn poly_inverse_mod(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1) = (vec![Rational::zero()], vec![Rational::one()]);
    while deg(&r1).is_some_and(|d| d > 0) {
        let (q, r) = poly_divmod(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    let c = r1[0].clone();
    assert!(!c.is_zero(), "element not invertible modulo Phi_m");
    s1.iter().map(|x| x / &c).collect()
}

/// Solve an overdetermined consistent system given as augmented rows; None if
/// inconsistent.
fn solve_augmented(rows: &mut [Vec<Rational>], n: usize) -> Option<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = &*x / &lead;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..=n {
                    let v = &rows[r][k] * &f;
                    rows[i][k] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = rows[i][n].clone();
    }
    Some(sol)
}
