//! Truncated Laurent series in pi with capped p-adic coefficients, and the
//! substitutions pi -> (1 + pi)^e - 1 that realise phi and gamma.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{rational_to_text, PadicInt, Rational};

/// Precision carried by structural zeros. Nonzero values never use it.
pub(crate) const EXACT: i64 = 1 << 40;

pub(crate) fn exact_zero(p: u64) -> PadicInt {
    PadicInt::zero(p, EXACT)
}

pub(crate) fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The representative of `c` in (-p^M/2, p^M/2], M its absolute precision.
pub fn padic_balanced(c: &PadicInt) -> Rational {
    let r = c.to_rational();
    if c.precision() <= 0 || c.precision() >= EXACT / 2 {
        return r;
    }
    let modulus = Rational::from_integer(num_traits::pow(BigInt::from(c.prime()), c.precision() as usize));
    if r > &modulus / Rational::from_integer(BigInt::from(2)) {
        r - modulus
    } else {
        r
    }
}

/// pi^min_degree * sum_i coeffs[i] pi^i, known modulo pi^(min_degree + len).
///
/// Coefficients live in Q_p: every nonzero leading coefficient is invertible,
/// and the p-adic precision of each coefficient records what division cost.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiSeries {
    prime: u64,
    min_degree: i64,
    coeffs: Vec<PadicInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl PiSeries {
    pub fn from_coeffs(prime: u64, min_degree: i64, coeffs: Vec<PadicInt>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| c.prime() != prime) {
            return Err(Error::Invalid(format!("coefficient {c} is not {prime}-adic")));
        }
        Ok(PiSeries {
            prime,
            min_degree,
            coeffs,
        })
    }

    /// Integer coefficients of pi^0, pi^1, ...; missing ones are zero.
    pub fn from_ints(prime: u64, pi_precision: usize, p_precision: i64, ints: &[i64]) -> Self {
        let coeffs = (0..pi_precision)
            .map(|d| PadicInt::from_int(prime, p_precision, ints.get(d).copied().unwrap_or(0)))
            .collect();
        PiSeries {
            prime,
            min_degree: 0,
            coeffs,
        }
    }

    pub fn zero(prime: u64, pi_precision: usize, p_precision: i64) -> Self {
        Self::from_ints(prime, pi_precision, p_precision, &[])
    }

    pub fn one(prime: u64, pi_precision: usize, p_precision: i64) -> Self {
        Self::from_ints(prime, pi_precision, p_precision, &[1])
    }

    pub fn pi(prime: u64, pi_precision: usize, p_precision: i64) -> Self {
        Self::monomial(PadicInt::one(prime, p_precision), 1, pi_precision)
    }

    pub fn constant(c: PadicInt, pi_precision: usize) -> Self {
        let zero = PadicInt::zero(c.prime(), c.precision());
        let mut coeffs = vec![zero; pi_precision.max(1)];
        coeffs[0] = c.clone();
        PiSeries {
            prime: c.prime(),
            min_degree: 0,
            coeffs,
        }
    }

    /// c * pi^degree with `pi_precision` known coefficients.
    pub fn monomial(c: PadicInt, degree: i64, pi_precision: usize) -> Self {
        Self::constant(c, pi_precision).shift(degree)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    /// Number of known coefficients (relative pi-precision).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degrees below this are known.
    pub fn abs_precision(&self) -> i64 {
        self.min_degree + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    /// Coefficient of pi^d, or None beyond the known range.
    pub fn coeff(&self, d: i64) -> Option<PadicInt> {
        if d >= self.abs_precision() {
            None
        } else if d < self.min_degree {
            Some(PadicInt::zero(self.prime, self.work_precision()))
        } else {
            Some(self.coeffs[(d - self.min_degree) as usize].clone())
        }
    }

    fn coeff_or_zero(&self, d: i64) -> PadicInt {
        if d < self.min_degree || d >= self.abs_precision() {
            exact_zero(self.prime)
        } else {
            self.coeffs[(d - self.min_degree) as usize].clone()
        }
    }

    /// Smallest p-adic precision among the coefficients.
    pub fn p_precision(&self) -> i64 {
        self.coeffs.iter().map(PadicInt::precision).min().unwrap_or(EXACT)
    }

    /// Largest finite coefficient precision; used for exact auxiliary series.
    pub(crate) fn work_precision(&self) -> i64 {
        self.coeffs
            .iter()
            .map(PadicInt::precision)
            .filter(|&m| m < EXACT / 2)
            .max()
            .unwrap_or(1)
    }

    /// Every known coefficient lies in p^t Z_p. An empty series proves nothing.
    pub fn vanishes(&self, t: i64) -> bool {
        !self.coeffs.is_empty() && self.coeffs.iter().all(|c| c.is_zero_mod(t))
    }

    pub fn agrees(&self, other: &Self, t: i64) -> bool {
        self.prime == other.prime && self.sub(other).vanishes(t)
    }

    pub fn with_p_precision(&self, t: i64) -> Self {
        self.map(|c| c.with_precision(t))
    }

    /// Forget every degree >= `abs`.
    pub fn truncate(&self, abs: i64) -> Self {
        let keep = (abs - self.min_degree).clamp(0, self.coeffs.len() as i64) as usize;
        PiSeries {
            prime: self.prime,
            min_degree: self.min_degree,
            coeffs: self.coeffs[..keep].to_vec(),
        }
    }

    fn map(&self, f: impl Fn(&PadicInt) -> PadicInt) -> Self {
        PiSeries {
            prime: self.prime,
            min_degree: self.min_degree,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "series over different primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.abs_precision().min(other.abs_precision()).max(lo);
        let coeffs = (lo..hi)
            .map(|d| self.coeff_or_zero(d).add(&other.coeff_or_zero(d)))
            .collect();
        PiSeries {
            prime: self.prime,
            min_degree: lo,
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        self.map(PadicInt::neg)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let n = self.len().min(other.len());
        let coeffs = (0..n)
            .map(|k| {
                (0..=k).fold(exact_zero(self.prime), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&other.coeffs[k - i]))
                })
            })
            .collect();
        PiSeries {
            prime: self.prime,
            min_degree: self.min_degree + other.min_degree,
            coeffs,
        }
    }

    pub fn scale(&self, c: &PadicInt) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Multiply by p^k (k may be negative).
    pub fn scale_p_pow(&self, k: i64) -> Self {
        self.map(|x| x.mul_p_pow(k))
    }

    /// Multiply by pi^k.
    pub fn shift(&self, k: i64) -> Self {
        PiSeries {
            prime: self.prime,
            min_degree: self.min_degree + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Drop leading coefficients that vanish to working precision.
    pub fn normalized(&self) -> Self {
        let skip = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        PiSeries {
            prime: self.prime,
            min_degree: self.min_degree + skip as i64,
            coeffs: self.coeffs[skip..].to_vec(),
        }
    }

    /// pi-adic valuation, None when every known coefficient vanishes.
    pub fn valuation(&self) -> Option<i64> {
        let g = self.normalized();
        (!g.coeffs.is_empty()).then_some(g.min_degree)
    }

    pub fn inv(&self) -> Result<Self> {
        let g = self.normalized();
        let c0 = g
            .coeffs
            .first()
            .ok_or_else(|| Error::NonUnitDivisor(format!("{self} vanishes to working precision")))?;
        let c0inv = c0.inv()?;
        let mut d: Vec<PadicInt> = Vec::with_capacity(g.len());
        d.push(c0inv.clone());
        for k in 1..g.len() {
            let s = (1..=k).fold(exact_zero(self.prime), |acc, j| acc.add(&g.coeffs[j].mul(&d[k - j])));
            d.push(s.mul(&c0inv).neg());
        }
        Ok(PiSeries {
            prime: self.prime,
            min_degree: -g.min_degree,
            coeffs: d,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut result = Self::one(self.prime, self.len(), self.work_precision());
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// f(s) for s of positive pi-adic valuation.
    pub fn compose(&self, s: &PiSeries) -> Result<Self> {
        self.check(s);
        let s = s.normalized();
        let v = s.min_degree;
        if s.coeffs.is_empty() || v < 1 {
            return Err(Error::Invalid(format!("cannot substitute {s}: valuation must be positive")));
        }
        let len = ((self.len() as i64) * v).min(s.len() as i64) as usize;
        let start = self.min_degree * v;
        let end = start + len as i64;
        let s = s.truncate(v + len as i64);
        let mut acc = PiSeries {
            prime: self.prime,
            min_degree: start,
            coeffs: vec![exact_zero(self.prime); len],
        };
        let mut pw = s.pow(self.min_degree)?;
        for c in &self.coeffs {
            if pw.min_degree >= end {
                break;
            }
            acc = acc.add(&pw.scale(c));
            pw = pw.mul(&s);
        }
        Ok(acc.truncate(end))
    }

    /// Value at pi = 0 of a series without negative powers.
    pub fn at_zero(&self) -> Option<PadicInt> {
        self.coeff(0)
    }
}

pub fn ps_arith(f: &PiSeries, g: &PiSeries, op: ArithOp) -> Result<PiSeries> {
    if f.prime != g.prime {
        return Err(Error::ContextMismatch);
    }
    match op {
        ArithOp::Add => Ok(f.add(g)),
        ArithOp::Sub => Ok(f.sub(g)),
        ArithOp::Mul => Ok(f.mul(g)),
        ArithOp::Div => f.div(g),
    }
}

/// (1 + pi)^e - 1 to `len` coefficients past pi^1, integer coefficients at precision `prec`.
pub fn binomial_shift(p: u64, e: u64, len: usize, prec: i64) -> PiSeries {
    let coeffs = (0..len.max(1))
        .map(|d| PadicInt::from_bigint(p, prec, binom(e, d as u64 + 1)))
        .collect();
    PiSeries {
        prime: p,
        min_degree: 1,
        coeffs,
    }
}

/// pi -> (1 + pi)^p - 1; coefficients in Z_p are Frobenius-fixed.
pub fn phi_sub(f: &PiSeries) -> Result<PiSeries> {
    f.compose(&binomial_shift(f.prime, f.prime, f.len(), f.work_precision()))
}

/// pi -> (1 + pi)^chi - 1 for a positive integer chi.
pub fn gamma_sub(f: &PiSeries, chi_gamma: i64) -> Result<PiSeries> {
    if chi_gamma < 1 {
        return Err(Error::NonIntegralChi(chi_gamma));
    }
    f.compose(&binomial_shift(f.prime, chi_gamma as u64, f.len(), f.work_precision()))
}

/// q = phi(pi)/pi = ((1 + pi)^p - 1)/pi.
pub fn q_element(p: u64, pi_precision: usize, p_precision: i64) -> PiSeries {
    binomial_shift(p, p, pi_precision, p_precision).shift(-1)
}

impl fmt::Display for PiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let d = self.min_degree + i as i64;
            let r = rational_to_text(&padic_balanced(c));
            parts.push(match d {
                0 => r,
                1 => format!("{r}*pi"),
                _ => format!("{r}*pi^{d}"),
            });
        }
        parts.push(format!("O(pi^{})", self.abs_precision()));
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const N: usize = 10;
    const M: i64 = 20;

    fn series(p: u64, ints: &[i64]) -> PiSeries {
        PiSeries::from_ints(p, N, M, ints)
    }

    /// Coefficients of (1 + x)^e - 1 by repeated multiplication of integer polynomials.
    fn int_poly_shift(e: u32, len: usize) -> Vec<i64> {
        let mut acc = vec![1i64];
        for _ in 0..e {
            let mut next = vec![0i64; acc.len() + 1];
            for (i, c) in acc.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c;
            }
            acc = next;
        }
        acc[0] -= 1;
        acc.resize(len, 0);
        acc
    }

    #[test]
    fn unit_laws_and_geometric_inverse() {
        let f = series(3, &[2, -1, 5, 0, 7]);
        let one = PiSeries::one(3, N, M);
        assert!(f.mul(&one).agrees(&f, M));
        let onepi = series(3, &[1, 1]);
        let geo: Vec<i64> = (0..N).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        assert!(onepi.mul(&series(3, &geo)).agrees(&one, M));
        assert!(onepi.inv().unwrap().agrees(&series(3, &geo), M));
    }

    #[test]
    fn q_times_pi_is_phi_of_pi() {
        for p in [2u64, 3, 5, 7] {
            let q = q_element(p, N, M);
            let phi_pi = phi_sub(&PiSeries::pi(p, N, M)).unwrap();
            assert!(q.shift(1).agrees(&phi_pi, M), "p = {p}");
            assert_eq!(q.coeff(0).unwrap(), PadicInt::from_int(p, M, p as i64));
        }
    }

    #[test]
    fn q_element_small_primes() {
        assert!(q_element(2, N, M).agrees(&series(2, &[2, 1]), M));
        assert!(q_element(3, N, M).agrees(&series(3, &[3, 3, 1]), M));
    }

    #[test]
    fn phi_of_pi_is_binomial_expansion() {
        for p in [2u64, 3, 5] {
            let expect = int_poly_shift(p as u32, N);
            let got = phi_sub(&PiSeries::pi(p, N, M)).unwrap();
            for (d, &c) in expect.iter().enumerate().skip(1) {
                assert_eq!(got.coeff(d as i64).unwrap(), PadicInt::from_int(p, M, c), "p = {p}, degree {d}");
            }
        }
    }

    #[test]
    fn phi_fixes_constants() {
        let c = PiSeries::constant(PadicInt::from_int(5, M, 17), N);
        assert!(phi_sub(&c).unwrap().agrees(&c, M));
    }

    #[test]
    fn gamma_identity_and_binomial() {
        let f = series(3, &[1, 4, -2, 9]);
        assert!(gamma_sub(&f, 1).unwrap().agrees(&f, M));
        let g = gamma_sub(&PiSeries::pi(3, N, M), 4).unwrap();
        let expect = int_poly_shift(4, N);
        for (d, &c) in expect.iter().enumerate() {
            assert_eq!(g.coeff(d as i64).unwrap(), PadicInt::from_int(3, M, c));
        }
        assert_eq!(gamma_sub(&f, 0), Err(Error::NonIntegralChi(0)));
        assert_eq!(gamma_sub(&f, -3), Err(Error::NonIntegralChi(-3)));
    }

    #[test]
    fn phi_and_gamma_commute_on_pi() {
        for p in [2u64, 3, 5] {
            let pi = PiSeries::pi(p, N, M);
            let chi = 1 + p as i64;
            let a = gamma_sub(&phi_sub(&pi).unwrap(), chi).unwrap();
            let b = phi_sub(&gamma_sub(&pi, chi).unwrap()).unwrap();
            // both orders equal (1 + pi)^(p chi) - 1
            let direct = int_poly_shift((p as u32) * (chi as u32), N);
            assert!(a.agrees(&b, M));
            assert!(a.agrees(&series(p, &direct), M));
        }
    }

    #[test]
    fn division_tracks_precision() {
        // q has constant term p: inverting costs one digit per step at most
        let q = q_element(3, N, M);
        let qi = q.inv().unwrap();
        assert!(q.mul(&qi).agrees(&PiSeries::one(3, N, M), M - 2 * N as i64));
        assert!(qi.p_precision() < M);
        let z = PiSeries::zero(3, N, M);
        assert!(matches!(z.inv(), Err(Error::NonUnitDivisor(_))));
        let f = series(3, &[0, 0, 2, 1]);
        assert_eq!(f.valuation(), Some(2));
        let quo = ps_arith(&f, &series(3, &[0, 1]), ArithOp::Div).unwrap();
        assert_eq!(quo.valuation(), Some(1));
    }

    #[test]
    fn laurent_shift_and_negative_powers() {
        let pi = PiSeries::pi(5, N, M);
        let inv = pi.pow(-3).unwrap();
        assert_eq!(inv.valuation(), Some(-3));
        assert!(inv.mul(&pi.pow(3).unwrap()).agrees(&PiSeries::one(5, N, M), M));
    }

    #[test]
    fn display_uses_balanced_digits() {
        let f = series(3, &[-1, 0, 2]);
        assert_eq!(f.to_string(), "-1 + 2*pi^2 + O(pi^10)");
    }

    fn small_series() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-20i64..20, 1..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn phi_is_multiplicative(a in small_series(), b in small_series()) {
            let (f, g) = (series(3, &a), series(3, &b));
            let lhs = phi_sub(&f.mul(&g)).unwrap();
            let rhs = phi_sub(&f).unwrap().mul(&phi_sub(&g).unwrap());
            prop_assert!(lhs.agrees(&rhs, M));
        }

        #[test]
        fn phi_gamma_commute(a in small_series()) {
            let f = series(2, &a);
            let x = gamma_sub(&phi_sub(&f).unwrap(), 3).unwrap();
            let y = phi_sub(&gamma_sub(&f, 3).unwrap()).unwrap();
            prop_assert!(x.agrees(&y, M));
        }

        #[test]
        fn unit_inverse(a in small_series()) {
            let mut a = a;
            a[0] = 1 + 5 * a[0];
            let f = series(5, &a);
            prop_assert!(f.mul(&f.inv().unwrap()).agrees(&PiSeries::one(5, N, M), M));
        }
    }
}
