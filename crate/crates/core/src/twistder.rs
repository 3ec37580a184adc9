//! Twisted derivations `a * (id - sigma)`, their hom-Lie bracket, axiom
//! verification, the UFD generator and difference/derivation operator bases.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{CycloNumber, Rational};
use crate::laurent::{ExponentVector, LaurentPoly, MonomialEndo};
use crate::report::VerificationReport;

/// The operator x -> a * (x - sigma(x)) / g, with g dividing every image of
/// id - sigma (g = 1 unless built by [`ufd_generator`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedDerivation {
    scale: LaurentPoly,
    divisor: LaurentPoly,
    endo: MonomialEndo,
}

impl TwistedDerivation {
    pub fn new(scale: LaurentPoly, endo: MonomialEndo) -> Result<Self> {
        if scale.nvars() != endo.nvars() {
            return Err(Error::ArityMismatch {
                left: endo.nvars(),
                right: scale.nvars(),
            });
        }
        let divisor = LaurentPoly::one(endo.nvars());
        Ok(TwistedDerivation { scale, divisor, endo })
    }

    /// id - sigma.
    pub fn unscaled(endo: MonomialEndo) -> Self {
        TwistedDerivation {
            scale: LaurentPoly::one(endo.nvars()),
            divisor: LaurentPoly::one(endo.nvars()),
            endo,
        }
    }

    pub fn with_divisor(mut self, divisor: LaurentPoly) -> Result<Self> {
        if divisor.nvars() != self.nvars() {
            return Err(Error::ArityMismatch {
                left: self.nvars(),
                right: divisor.nvars(),
            });
        }
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.divisor = divisor;
        Ok(self)
    }

    pub fn scale(&self) -> &LaurentPoly {
        &self.scale
    }

    pub fn divisor(&self) -> &LaurentPoly {
        &self.divisor
    }

    pub fn endo(&self) -> &MonomialEndo {
        &self.endo
    }

    pub fn nvars(&self) -> usize {
        self.endo.nvars()
    }

    pub fn apply(&self, f: &LaurentPoly) -> Result<LaurentPoly> {
        td_apply(self, f)
    }

    pub fn sigma(&self, f: &LaurentPoly) -> Result<LaurentPoly> {
        self.endo.apply(f)
    }
}

pub fn td_apply(d: &TwistedDerivation, f: &LaurentPoly) -> Result<LaurentPoly> {
    let mut diff = f.sub(&d.endo.apply(f)?)?;
    if d.divisor != LaurentPoly::one(d.nvars()) {
        diff = exact_quotient(&diff, &d.divisor)
            .ok_or_else(|| Error::NonUnitDivisor(format!("{} does not divide {diff}", d.divisor)))?;
    }
    d.scale.mul(&diff)
}

/// q with d o sigma = q * sigma o d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistFactor {
    pub q: LaurentPoly,
}

fn probe_points(n: usize) -> Vec<LaurentPoly> {
    let mut pts: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::var(n, i)).collect();
    let all = LaurentPoly::monomial(CycloNumber::one(1), ExponentVector(vec![1; n]));
    let mixed = LaurentPoly::monomial(CycloNumber::from_int(2), ExponentVector((0..n as i64).map(|i| i - 1).collect()));
    pts.push(all.mul(&all.add(&mixed).expect("same arity")).expect("same arity"));
    pts
}

/// q = (a/g) / sigma(a/g), confirmed on the generators and a mixed product.
pub fn twist_factor(d: &TwistedDerivation) -> Result<TwistFactor> {
    let (a, g) = (&d.scale, &d.divisor);
    if a.is_zero() {
        return Err(Error::NoTwistFactor("scale is zero".into()));
    }
    let num = a.mul(&d.endo.apply(g)?)?;
    let den = g.mul(&d.endo.apply(a)?)?;
    let q = exact_quotient(&num, &den)
        .ok_or_else(|| Error::NoTwistFactor(format!("({num}) / ({den}) is not a Laurent polynomial")))?;
    for x in probe_points(d.nvars()) {
        let lhs = td_apply(d, &d.endo.apply(&x)?)?;
        let rhs = q.mul(&d.endo.apply(&td_apply(d, &x)?)?)?;
        if lhs != rhs {
            return Err(Error::NoTwistFactor(format!("relation fails on {x}")));
        }
    }
    Ok(TwistFactor { q })
}

/// a / b when b divides a in the Laurent ring, by long division on
/// lex-leading terms. Degrees in each variable are additive, so every
/// quotient exponent lies in a box fixed by a and b; leaving it means b does
/// not divide a.
pub fn exact_quotient(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    if b.is_zero() || a.nvars() != b.nvars() {
        return None;
    }
    let n = a.nvars();
    if a.is_zero() {
        return Some(LaurentPoly::zero(n));
    }
    let (a_lo, a_hi) = (a.min_exponents()?, a.max_exponents()?);
    let (b_lo, b_hi) = (b.min_exponents()?, b.max_exponents()?);
    let (lo, hi) = (a_lo.sub(&b_lo), a_hi.sub(&b_hi));
    let bt = b.sorted_terms();
    let (b_top, b_lead) = (bt[bt.len() - 1].0.clone(), bt[bt.len() - 1].1.clone());
    let mut rem = a.clone();
    let mut quot = LaurentPoly::zero(n);
    while !rem.is_zero() {
        let (k, c) = {
            let t = rem.sorted_terms();
            let (k, c) = t[t.len() - 1];
            (k.clone(), c.clone())
        };
        let e = k.sub(&b_top);
        if e.0.iter().zip(lo.0.iter().zip(&hi.0)).any(|(x, (l, h))| x < l || x > h) {
            return None;
        }
        let term = LaurentPoly::monomial(c.div(&b_lead).ok()?, e);
        rem = rem.sub(&term.mul(b).ok()?).ok()?;
        quot = quot.add(&term).ok()?;
    }
    Some(quot)
}

/// Result of the generator search: the normalized gcd g and
/// delta = (id - sigma) / g.
#[derive(Clone, Debug)]
pub struct UfdGenerator {
    pub g: LaurentPoly,
    pub delta: TwistedDerivation,
}

fn monomials_up_to(n: usize, degree: i64) -> Vec<ExponentVector> {
    let mut out = vec![ExponentVector::zero(n)];
    for i in 0..n {
        let mut next = Vec::new();
        for k in &out {
            for e in -degree..=degree {
                let mut v = k.clone();
                v.0[i] = e;
                if v.degree() <= degree {
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Exact rank of a list of integer vectors, by fraction-free elimination.
fn int_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let (p, f) = (m[rank][col].clone(), m[r][col].clone());
                for c in 0..ncols {
                    m[r][c] = &m[r][c] * &p - &m[rank][c] * &f;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Scalar multiple of x^u and unit factors removed: minimal exponents 0 and
/// the lex-smallest coefficient 1.
pub fn normalize_up_to_units(f: &LaurentPoly) -> LaurentPoly {
    let Some(min) = f.min_exponents() else {
        return f.clone();
    };
    let shifted = f.shift(&ExponentVector(min.0.iter().map(|x| -x).collect()));
    let lead = shifted.sorted_terms()[0].1.clone();
    shifted.scale(&lead.inv().expect("nonzero coefficient"))
}

/// gcd of the images (id - sigma)(x) over monomials x of degree <= probe,
/// up to units; None when every image vanishes.
///
/// Each image is x * (1 - h(x)) with h(x) = m(k) e^(k(Sigma - I)). The h(x)
/// form a subgroup H of the unit group, and the gcd over a generating set of
/// H equals the gcd over H. Binomials along independent directions are
/// coprime, so g is a unit unless all exponents lie on one line and H has
/// no nontrivial constant element; then g = 1 - h0 for a generator h0.
pub fn probe_gcd(sigma: &MonomialEndo, probe: i64) -> Result<Option<LaurentPoly>> {
    let n = sigma.nvars();
    let unit = LaurentPoly::one(n);
    let scalars_move = sigma.coeff_galois() != 1;
    let mut gens: Vec<(ExponentVector, CycloNumber)> = Vec::new();
    let mut any_nonzero = false;
    for k in monomials_up_to(n, probe.max(0)) {
        let w = k.times_matrix(sigma.matrix()).sub(&k);
        let c = sigma.multiplier(&k)?;
        if w == ExponentVector::zero(n) && c.is_one() {
            continue;
        }
        any_nonzero = true;
        gens.push((w, c));
    }
    if scalars_move {
        return Ok(Some(unit));
    }
    if !any_nonzero {
        return Ok(None);
    }
    let rows: Vec<Vec<i64>> = gens.iter().map(|(w, _)| w.0.clone()).collect();
    match int_rank(&rows) {
        0 => Ok(Some(unit)),
        1 => {
            let dir = rows.iter().find(|r| r.iter().any(|&x| x != 0)).expect("rank one");
            let g0 = dir.iter().fold(0i64, |acc, &x| acc.gcd(&x));
            let w0: Vec<i64> = dir.iter().map(|x| x / g0).collect();
            let lead = w0.iter().position(|&x| x != 0).expect("nonzero direction");
            // Running generator (t, c) of the projection to Z * w0.
            let (mut t, mut c) = (0i64, CycloNumber::one(1));
            for (w, ck) in &gens {
                let tk = w.0[lead] / w0[lead];
                if tk == 0 {
                    if !ck.is_one() {
                        return Ok(Some(unit));
                    }
                    continue;
                }
                if t == 0 {
                    (t, c) = (tk, ck.clone());
                    continue;
                }
                let e = t.extended_gcd(&tk);
                let (g, u, v) = (e.gcd, e.x, e.y);
                let kernel = c.pow(tk / g)?.div(&ck.pow(t / g)?)?;
                if !kernel.is_one() {
                    return Ok(Some(unit));
                }
                c = c.pow(u)?.mul(&ck.pow(v)?);
                t = g;
            }
            let h0 = LaurentPoly::monomial(c, ExponentVector(w0.iter().map(|x| x * t).collect()));
            Ok(Some(normalize_up_to_units(&unit.sub(&h0)?)))
        }
        _ => Ok(Some(unit)),
    }
}

pub fn ufd_generator(sigma: &MonomialEndo, probe_degree: i64) -> Result<UfdGenerator> {
    let here = probe_gcd(sigma, probe_degree)?;
    let next = probe_gcd(sigma, probe_degree + 1)?;
    let g = match (here, next) {
        (None, None) => return Err(Error::DegenerateEndo),
        (Some(a), Some(b)) if a == b => a,
        (a, b) => {
            let show = |x: Option<LaurentPoly>| x.map_or("undefined".to_string(), |p| p.to_text());
            return Err(Error::NotStabilized(format!(
                "probe {probe_degree} gives {}, probe {} gives {}",
                show(a),
                probe_degree + 1,
                show(b)
            )));
        }
    };
    let delta = TwistedDerivation::unscaled(sigma.clone()).with_divisor(g.clone())?;
    Ok(UfdGenerator { g, delta })
}

/// Element a * delta of the left module A * delta.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomLieElement {
    pub coeff: LaurentPoly,
    pub context: TwistedDerivation,
}

impl HomLieElement {
    pub fn new(coeff: LaurentPoly, context: &TwistedDerivation) -> Result<Self> {
        if coeff.nvars() != context.nvars() {
            return Err(Error::ArityMismatch {
                left: context.nvars(),
                right: coeff.nvars(),
            });
        }
        Ok(HomLieElement {
            coeff,
            context: context.clone(),
        })
    }

    fn with_coeff(&self, coeff: LaurentPoly) -> Self {
        HomLieElement {
            coeff,
            context: self.context.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.context != other.context {
            return Err(Error::ContextMismatch);
        }
        Ok(self.with_coeff(self.coeff.add(&other.coeff)?))
    }

    pub fn scale(&self, q: &LaurentPoly) -> Result<Self> {
        Ok(self.with_coeff(q.mul(&self.coeff)?))
    }

    /// (a * delta)(m) = a * delta(m).
    pub fn act(&self, m: &LaurentPoly) -> Result<LaurentPoly> {
        self.coeff.mul(&self.context.apply(m)?)
    }
}

/// <<a d, b d>> = (sigma(a) d(b) - sigma(b) d(a)) d.
pub fn hl_bracket(x: &HomLieElement, y: &HomLieElement) -> Result<HomLieElement> {
    if x.context != y.context {
        return Err(Error::ContextMismatch);
    }
    let d = &x.context;
    let (a, b) = (&x.coeff, &y.coeff);
    let left = d.sigma(a)?.mul(&d.apply(b)?)?;
    let right = d.sigma(b)?.mul(&d.apply(a)?)?;
    Ok(x.with_coeff(left.sub(&right)?))
}

/// sigma(a) d(b d(m)) - sigma(b) d(a d(m)), the bracket read as an operator.
pub fn bracket_operator_oracle(x: &HomLieElement, y: &HomLieElement, m: &LaurentPoly) -> Result<LaurentPoly> {
    if x.context != y.context {
        return Err(Error::ContextMismatch);
    }
    let d = &x.context;
    let (a, b) = (&x.coeff, &y.coeff);
    let t1 = d.sigma(a)?.mul(&d.apply(&b.mul(&d.apply(m)?)?)?)?;
    let t2 = d.sigma(b)?.mul(&d.apply(&a.mul(&d.apply(m)?)?)?)?;
    t1.sub(&t2)
}

/// Residual of the six-term identity for one triple.
pub fn hl2_residual(a: &HomLieElement, b: &HomLieElement, c: &HomLieElement, q: &TwistFactor) -> Result<LaurentPoly> {
    let d = a.context.clone();
    let mut acc = LaurentPoly::zero(d.nvars());
    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
        let inner = hl_bracket(y, z)?;
        let sx = x.with_coeff(d.sigma(&x.coeff)?);
        let t1 = hl_bracket(&sx, &inner)?;
        let t2 = hl_bracket(x, &inner)?.scale(&q.q)?;
        acc = acc.add(&t1.coeff)?.add(&t2.coeff)?;
    }
    Ok(acc)
}

/// Checks hL1 on every generator and hL2 on every triple i < j < k.
pub fn verify_homlie(gens: &[HomLieElement], q: &TwistFactor) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("hom-Lie axioms");
    let label = |x: &HomLieElement| x.coeff.to_text();
    for x in gens {
        let r = hl_bracket(x, x)?.coeff;
        report.push(format!("hL1 ({})", label(x)), r.to_text(), r.is_zero());
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            for k in j + 1..gens.len() {
                let r = hl2_residual(&gens[i], &gens[j], &gens[k], q)?;
                let lab = format!("hL2 ({},{},{})", label(&gens[i]), label(&gens[j]), label(&gens[k]));
                report.push(lab, r.to_text(), r.is_zero());
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    PowersOfSigma,
    PowersOfDelta,
}

/// sum_i a_i B^i with B = sigma or B = id - sigma; coefficients act on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorPoly {
    pub basis: BasisKind,
    pub coeffs: BTreeMap<u32, LaurentPoly>,
    pub endo: MonomialEndo,
}

impl OperatorPoly {
    pub fn new(basis: BasisKind, endo: MonomialEndo) -> Self {
        OperatorPoly {
            basis,
            coeffs: BTreeMap::new(),
            endo,
        }
    }

    /// The single basis power B^n with coefficient 1.
    pub fn basis_power(basis: BasisKind, endo: MonomialEndo, n: u32) -> Self {
        let mut f = Self::new(basis, endo.clone());
        f.coeffs.insert(n, LaurentPoly::one(endo.nvars()));
        f
    }

    pub fn with_term(mut self, n: u32, c: LaurentPoly) -> Result<Self> {
        let cur = self.coeffs.remove(&n).unwrap_or_else(|| LaurentPoly::zero(c.nvars()));
        let s = cur.add(&c)?;
        if !s.is_zero() {
            self.coeffs.insert(n, s);
        }
        Ok(self)
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn int_scalar(n: BigInt) -> CycloNumber {
    CycloNumber::from_rational(Rational::from_integer(n))
}

/// Change of basis using sigma^n = sum_i (-1)^i C(n,i) (id - sigma)^i and its
/// inverse (id - sigma)^i = sum_n (-1)^n C(i,n) sigma^n.
pub fn op_convert(f: &OperatorPoly, target: BasisKind) -> Result<OperatorPoly> {
    if f.basis == target {
        return Ok(f.clone());
    }
    let mut out = OperatorPoly::new(target, f.endo.clone());
    for (&n, a) in &f.coeffs {
        for i in 0..=n {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let c = int_scalar(binom(n, i) * sign);
            out = out.with_term(i, a.scale(&c))?;
        }
    }
    Ok(out)
}

/// Conversion sigma-powers to delta-powers using the unsigned expansion
/// sigma^n = sum_{i<n} C(n,i) (id - sigma)^i + (-1)^n (id - sigma)^n, kept only
/// to demonstrate that it disagrees with the operators it claims to expand.
pub fn op_convert_unsigned(f: &OperatorPoly) -> Result<OperatorPoly> {
    if f.basis != BasisKind::PowersOfSigma {
        return Err(Error::Invalid("unsigned expansion starts from powers of sigma".into()));
    }
    let mut out = OperatorPoly::new(BasisKind::PowersOfDelta, f.endo.clone());
    for (&n, a) in &f.coeffs {
        for i in 0..n {
            out = out.with_term(i, a.scale(&int_scalar(binom(n, i))))?;
        }
        let sign = if n % 2 == 0 { 1 } else { -1 };
        out = out.with_term(n, a.scale(&CycloNumber::from_int(sign)))?;
    }
    Ok(out)
}

pub fn op_apply(f: &OperatorPoly, x: &LaurentPoly) -> Result<LaurentPoly> {
    if x.nvars() != f.endo.nvars() {
        return Err(Error::ArityMismatch {
            left: f.endo.nvars(),
            right: x.nvars(),
        });
    }
    let d = TwistedDerivation::unscaled(f.endo.clone());
    let mut acc = LaurentPoly::zero(x.nvars());
    let mut power = x.clone();
    let mut at = 0u32;
    for (&n, a) in &f.coeffs {
        while at < n {
            power = match f.basis {
                BasisKind::PowersOfSigma => f.endo.apply(&power)?,
                BasisKind::PowersOfDelta => d.apply(&power)?,
            };
            at += 1;
        }
        acc = acc.add(&a.mul(&power)?)?;
    }
    Ok(acc)
}

/// Compares sigma^n with its unsigned expansion on the given points.
pub fn unsigned_expansion_report(endo: &MonomialEndo, max_n: u32, points: &[LaurentPoly]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("unsigned expansion of sigma^n");
    for n in 0..=max_n {
        let f = OperatorPoly::basis_power(BasisKind::PowersOfSigma, endo.clone(), n);
        let g = op_convert_unsigned(&f)?;
        for (idx, x) in points.iter().enumerate() {
            let r = op_apply(&f, x)?.sub(&op_apply(&g, x)?)?;
            report.push(format!("sigma^{n} at point {idx}"), r.to_text(), r.is_zero());
        }
    }
    Ok(report)
}

/// The first n whose unsigned expansion disagrees with sigma^n on some point.
pub fn first_unsigned_failure(endo: &MonomialEndo, max_n: u32, points: &[LaurentPoly]) -> Result<Option<u32>> {
    for n in 0..=max_n {
        let f = OperatorPoly::basis_power(BasisKind::PowersOfSigma, endo.clone(), n);
        let g = op_convert_unsigned(&f)?;
        for x in points {
            if op_apply(&f, x)? != op_apply(&g, x)? {
                return Ok(Some(n));
            }
        }
    }
    Ok(None)
}
