//! The nabla operators (id - sigma)/t on Laurent polynomials in t, their
//! commutation relations, and the pi-adic brackets.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::series::{binomial_shift, gamma_sub, is_prime, phi_sub, q_element, PiSeries};
use crate::error::{Error, Result};
use crate::exactnum::{rat_int, CycloNumber, Rational};
use crate::laurent::{ExponentVector, LaurentPoly, MonomialEndo};
use crate::report::VerificationReport;
use crate::twistder::{bracket_operator_oracle, hl_bracket, twist_factor, HomLieElement, TwistedDerivation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NablaKind {
    Phi,
    Gamma,
}

impl fmt::Display for NablaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NablaKind::Phi => "phi",
            NablaKind::Gamma => "gamma",
        })
    }
}

/// `Paper` divides by (1 - lambda); `Raw` keeps t^-1 (id - sigma).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Paper,
    Raw,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Paper => "paper",
            Normalization::Raw => "raw",
        })
    }
}

/// phi(t) = p t and gamma(t) = chi t on Q[t, 1/t].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TContext {
    p: u64,
    chi_gamma: i64,
}

impl TContext {
    pub fn new(p: u64, chi_gamma: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if chi_gamma < 1 {
            return Err(Error::NonIntegralChi(chi_gamma));
        }
        if chi_gamma == 1 {
            return Err(Error::Invalid("chi(gamma) = 1 makes nabla_gamma undefined".into()));
        }
        Ok(TContext { p, chi_gamma })
    }

    /// chi(gamma) = 1 + p.
    pub fn standard(p: u64) -> Result<Self> {
        Self::new(p, 1 + p as i64)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn chi_gamma(&self) -> i64 {
        self.chi_gamma
    }

    pub fn lambda(&self, kind: NablaKind) -> i64 {
        match kind {
            NablaKind::Phi => self.p as i64,
            NablaKind::Gamma => self.chi_gamma,
        }
    }

    pub fn endo(&self, kind: NablaKind) -> MonomialEndo {
        MonomialEndo::new(vec![vec![1]], vec![CycloNumber::from_int(self.lambda(kind))], 1)
            .expect("1x1 endomorphism with nonzero multiplier")
    }

    pub fn sigma(&self, kind: NablaKind, f: &LaurentPoly) -> Result<LaurentPoly> {
        self.endo(kind).apply(f)
    }
}

pub fn t_monomial(c: &Rational, i: i64) -> LaurentPoly {
    LaurentPoly::monomial(CycloNumber::from_rational(c.clone()), ExponentVector(vec![i]))
}

fn t_shift(f: &LaurentPoly, k: i64) -> LaurentPoly {
    f.shift(&ExponentVector(vec![k]))
}

fn t_scale(f: &LaurentPoly, r: &Rational) -> LaurentPoly {
    f.scale(&CycloNumber::from_rational(r.clone()))
}

/// c * t^-1 * (id - sigma), c = 1/(1 - lambda) or 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NablaOperator {
    kind: NablaKind,
    normalization: Normalization,
    factor: Rational,
    derivation: TwistedDerivation,
}

impl NablaOperator {
    pub fn new(ctx: &TContext, kind: NablaKind, normalization: Normalization) -> Result<Self> {
        let factor = match normalization {
            Normalization::Paper => Rational::new(BigInt::one(), BigInt::from(1 - ctx.lambda(kind))),
            Normalization::Raw => Rational::one(),
        };
        let derivation = TwistedDerivation::new(t_monomial(&factor, -1), ctx.endo(kind))?;
        Ok(NablaOperator {
            kind,
            normalization,
            factor,
            derivation,
        })
    }

    pub fn kind(&self) -> NablaKind {
        self.kind
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn factor(&self) -> &Rational {
        &self.factor
    }

    pub fn derivation(&self) -> &TwistedDerivation {
        &self.derivation
    }

    pub fn apply(&self, f: &LaurentPoly) -> Result<LaurentPoly> {
        self.derivation.apply(f)
    }
}

/// Bracket of a t^i nabla and b t^j nabla.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TBracket {
    pub kind: NablaKind,
    pub normalization: Normalization,
    /// Always i + j - 1.
    pub exponent: i64,
    pub coefficient: Rational,
    pub closed: LaurentPoly,
    pub matches_formula: bool,
    pub matches_oracle: bool,
}

fn t_test_points() -> Vec<LaurentPoly> {
    let r = |n: i64, d: i64| Rational::new(BigInt::from(n), BigInt::from(d));
    let sum = |a: LaurentPoly, b: LaurentPoly| a.add(&b).expect("one variable");
    vec![
        t_monomial(&r(1, 1), -2),
        sum(t_monomial(&r(1, 1), 0), t_monomial(&r(1, 1), 1)),
        sum(t_monomial(&r(3, 1), 3), t_monomial(&r(-1, 2), -1)),
        sum(t_monomial(&r(1, 1), 5), t_monomial(&r(7, 1), 0)),
    ]
}

/// Closed form c * t^(i+j-1) (lambda^i a b - lambda^j b a), checked against
/// the bracket formula and the operator composition on test points.
/// Scalars are rational, so the coefficient Frobenius is the identity.
pub fn t_bracket(
    kind: NablaKind,
    a: &Rational,
    i: i64,
    b: &Rational,
    j: i64,
    ctx: &TContext,
    normalization: Normalization,
) -> Result<TBracket> {
    let nabla = NablaOperator::new(ctx, kind, normalization)?;
    let lam = rat_int(ctx.lambda(kind));
    let pow = |e: i64| -> Result<Rational> {
        i32::try_from(e).map(|e| lam.pow(e)).map_err(|_| Error::Invalid(format!("exponent {e} out of range")))
    };
    let coefficient = nabla.factor() * (pow(i)? * a * b - pow(j)? * b * a);
    let exponent = i + j - 1;
    let closed = t_monomial(&coefficient, exponent);
    let x = HomLieElement::new(t_monomial(a, i), nabla.derivation())?;
    let y = HomLieElement::new(t_monomial(b, j), nabla.derivation())?;
    let matches_formula = hl_bracket(&x, &y)?.coeff == closed;
    let mut matches_oracle = true;
    for m in t_test_points() {
        let lhs = bracket_operator_oracle(&x, &y, &m)?;
        let rhs = closed.mul(&nabla.apply(&m)?)?;
        matches_oracle &= lhs == rhs;
    }
    Ok(TBracket {
        kind,
        normalization,
        exponent,
        coefficient,
        closed,
        matches_formula,
        matches_oracle,
    })
}

/// A residual for one relation; the closure returns lhs - rhs on f.
type Relation<'a> = (String, Box<dyn Fn(&LaurentPoly) -> Result<LaurentPoly> + 'a>);

fn random_t_element<R: Rng>(rng: &mut R) -> LaurentPoly {
    let mut f = LaurentPoly::zero(1);
    for d in -4..=4 {
        let n: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=5);
        if n != 0 {
            f = f
                .add(&t_monomial(&Rational::new(BigInt::from(n), BigInt::from(den)), d))
                .expect("one variable");
        }
    }
    f
}

/// The commutation relations between phi, gamma and the two nabla operators,
/// on t^d for d in [-4, 4] and `draws` random elements.
///
/// Relations 1-6 are checked as printed. Relation 5n scales the right side
/// by the normalization factor of nabla_phi; relation 6c uses chi^-1 and the
/// factor of nabla_gamma, which is what composing the operators gives.
pub fn nabla_relations_verify<R: Rng>(
    ctx: &TContext,
    normalization: Normalization,
    draws: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let nphi = NablaOperator::new(ctx, NablaKind::Phi, normalization)?;
    let ngam = NablaOperator::new(ctx, NablaKind::Gamma, normalization)?;
    let p = rat_int(ctx.p as i64);
    let chi = rat_int(ctx.chi_gamma);
    let phi = |f: &LaurentPoly| ctx.sigma(NablaKind::Phi, f);
    let gamma = |f: &LaurentPoly| ctx.sigma(NablaKind::Gamma, f);
    let np = |f: &LaurentPoly| nphi.apply(f);
    let ng = |f: &LaurentPoly| ngam.apply(f);
    let pinv = p.recip();
    let chiinv = chi.recip();

    let r5 = move |f: &LaurentPoly, c: &Rational| -> Result<LaurentPoly> {
        let lhs = np(&ng(f)?)?;
        let rhs = t_shift(&ng(f)?, -1).sub(&t_scale(&t_shift(&ng(&phi(f)?)?, -1), &pinv))?;
        lhs.sub(&t_scale(&rhs, c))
    };
    let r6 = move |f: &LaurentPoly, c: &Rational, coeff: &Rational| -> Result<LaurentPoly> {
        let lhs = ng(&np(f)?)?;
        let rhs = t_shift(&np(f)?, -1).sub(&t_scale(&t_shift(&np(&gamma(f)?)?, -1), coeff))?;
        lhs.sub(&t_scale(&rhs, c))
    };
    let one = Rational::one();
    let relations: Vec<Relation> = vec![
        (
            "R1 nabla_phi o phi = p phi o nabla_phi".into(),
            Box::new(|f| np(&phi(f)?)?.sub(&t_scale(&phi(&np(f)?)?, &p))),
        ),
        (
            "R2 nabla_gamma o gamma = chi gamma o nabla_gamma".into(),
            Box::new(|f| ng(&gamma(f)?)?.sub(&t_scale(&gamma(&ng(f)?)?, &chi))),
        ),
        (
            "R3 nabla_gamma o phi = p phi o nabla_gamma".into(),
            Box::new(|f| ng(&phi(f)?)?.sub(&t_scale(&phi(&ng(f)?)?, &p))),
        ),
        (
            "R4 nabla_phi o gamma = chi gamma o nabla_phi".into(),
            Box::new(|f| np(&gamma(f)?)?.sub(&t_scale(&gamma(&np(f)?)?, &chi))),
        ),
        (
            "R5 nabla_phi o nabla_gamma = t^-1 nabla_gamma - p^-1 t^-1 nabla_gamma o phi".into(),
            Box::new(|f| r5(f, &one)),
        ),
        (
            "R6 nabla_gamma o nabla_phi = t^-1 nabla_phi - chi t^-1 nabla_phi o gamma".into(),
            Box::new(|f| r6(f, &one, &chi)),
        ),
        (
            "R5n nabla_phi o nabla_gamma = c_phi (t^-1 nabla_gamma - p^-1 t^-1 nabla_gamma o phi)".into(),
            Box::new(|f| r5(f, nphi.factor())),
        ),
        (
            "R6c nabla_gamma o nabla_phi = c_gamma (t^-1 nabla_phi - chi^-1 t^-1 nabla_phi o gamma)".into(),
            Box::new(|f| r6(f, ngam.factor(), &chiinv)),
        ),
    ];

    let mut samples: Vec<LaurentPoly> = (-4..=4).map(|d| t_monomial(&Rational::one(), d)).collect();
    samples.extend((0..draws).map(|_| random_t_element(rng)));

    let mut report = VerificationReport::new(format!(
        "nabla relations (p = {}, chi = {}, {normalization} normalization)",
        ctx.p, ctx.chi_gamma
    ));
    for (label, rel) in &relations {
        let mut first_bad = None;
        for f in &samples {
            let r = rel(f)?;
            if !r.is_zero() {
                first_bad = Some(format!("{r} on {f}"));
                break;
            }
        }
        let pass = first_bad.is_none();
        report.push(label.clone(), first_bad.unwrap_or_else(|| "0".into()), pass);
    }
    Ok(report)
}

/// The twist factor of each nabla, computed by the generic machinery, against p and chi.
pub fn nabla_twist_factors(ctx: &TContext, normalization: Normalization) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(format!("nabla twist factors ({normalization} normalization)"));
    for kind in [NablaKind::Phi, NablaKind::Gamma] {
        let nabla = NablaOperator::new(ctx, kind, normalization)?;
        let q = twist_factor(nabla.derivation())?.q;
        let expect = LaurentPoly::constant(1, CycloNumber::from_int(ctx.lambda(kind)));
        let diff = q.sub(&expect)?;
        report.push(format!("q(nabla_{kind}) - {}", ctx.lambda(kind)), diff.to_text(), diff.is_zero());
    }
    Ok(report)
}

/// Precision data for brackets over K[[pi]][1/pi].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiContext {
    pub p: u64,
    pub chi_gamma: i64,
    pub pi_precision: usize,
    pub p_precision: i64,
}

impl PiContext {
    pub fn new(p: u64, chi_gamma: i64, pi_precision: usize, p_precision: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if chi_gamma < 1 {
            return Err(Error::NonIntegralChi(chi_gamma));
        }
        if pi_precision < 2 || p_precision < 1 {
            return Err(Error::Invalid("pi precision must be at least 2 and p precision positive".into()));
        }
        Ok(PiContext {
            p,
            chi_gamma,
            pi_precision,
            p_precision,
        })
    }

    pub fn standard(p: u64, pi_precision: usize, p_precision: i64) -> Result<Self> {
        Self::new(p, 1 + p as i64, pi_precision, p_precision)
    }

    /// Guard digits absorb the losses of dividing by q and by pi-shifted terms.
    pub fn working_precision(&self) -> i64 {
        self.p_precision + 2 * self.pi_precision as i64 + 4
    }

    pub fn series(&self, ints: &[i64]) -> PiSeries {
        PiSeries::from_ints(self.p, self.pi_precision, self.working_precision(), ints)
    }

    pub fn sigma(&self, kind: NablaKind, f: &PiSeries) -> Result<PiSeries> {
        match kind {
            NablaKind::Phi => phi_sub(f),
            NablaKind::Gamma => gamma_sub(f, self.chi_gamma),
        }
    }

    /// pi^-1 (f - sigma(f)).
    pub fn nabla(&self, kind: NablaKind, f: &PiSeries) -> Result<PiSeries> {
        Ok(f.sub(&self.sigma(kind, f)?).shift(-1))
    }

    /// sigma(pi): q pi for phi, theta = (1 + pi)^chi - 1 for gamma.
    pub fn sigma_pi(&self, kind: NablaKind) -> PiSeries {
        let e = match kind {
            NablaKind::Phi => self.p,
            NablaKind::Gamma => self.chi_gamma as u64,
        };
        binomial_shift(self.p, e, self.pi_precision, self.working_precision())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiBracket {
    pub kind: NablaKind,
    /// Coefficient of nabla_pi in the bracket.
    pub closed: PiSeries,
    pub matches_formula: bool,
    pub matches_oracle: bool,
}

fn pi_test_points(ctx: &PiContext) -> Vec<PiSeries> {
    vec![
        ctx.series(&[1, 2, 3]),
        ctx.series(&[0, 1, 0, -1, 5]),
        ctx.series(&[7, 0, 0, 2, 0, 0, 1]),
    ]
}

/// Bracket of a pi^i nabla_pi and b pi^j nabla_pi.
///
/// phi: pi^(i+j-1) (q^i phi(a) b - q^j phi(b) a).
/// gamma: pi^-1 (theta^i pi^j gamma(a) b - theta^j pi^i gamma(b) a), theta = gamma(pi).
pub fn pi_bracket(a: &PiSeries, i: i64, b: &PiSeries, j: i64, kind: NablaKind, ctx: &PiContext) -> Result<PiBracket> {
    let (sa, sb) = (ctx.sigma(kind, a)?, ctx.sigma(kind, b)?);
    let closed = match kind {
        NablaKind::Phi => {
            let q = q_element(ctx.p, ctx.pi_precision, ctx.working_precision());
            let left = q.pow(i)?.mul(&sa).mul(b);
            let right = q.pow(j)?.mul(&sb).mul(a);
            left.sub(&right).shift(i + j - 1)
        }
        NablaKind::Gamma => {
            let theta = ctx.sigma_pi(NablaKind::Gamma);
            let left = theta.pow(i)?.shift(j).mul(&sa).mul(b);
            let right = theta.pow(j)?.shift(i).mul(&sb).mul(a);
            left.sub(&right).shift(-1)
        }
    };
    let (x, y) = (a.shift(i), b.shift(j));
    let t = ctx.p_precision;
    let formula = ctx
        .sigma(kind, &x)?
        .mul(&ctx.nabla(kind, &y)?)
        .sub(&ctx.sigma(kind, &y)?.mul(&ctx.nabla(kind, &x)?));
    let matches_formula = closed.agrees(&formula, t);
    let mut matches_oracle = true;
    for m in pi_test_points(ctx) {
        let dm = ctx.nabla(kind, &m)?;
        let lhs = ctx
            .sigma(kind, &x)?
            .mul(&ctx.nabla(kind, &y.mul(&dm))?)
            .sub(&ctx.sigma(kind, &y)?.mul(&ctx.nabla(kind, &x.mul(&dm))?));
        matches_oracle &= lhs.agrees(&closed.mul(&dm), t);
    }
    Ok(PiBracket {
        kind,
        closed,
        matches_formula,
        matches_oracle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, PadicInt};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(p: u64) -> TContext {
        TContext::standard(p).unwrap()
    }

    #[test]
    fn degenerate_chi_is_rejected() {
        assert!(TContext::new(3, 1).is_err());
        assert_eq!(TContext::new(3, 0), Err(Error::NonIntegralChi(0)));
        assert!(TContext::new(4, 5).is_err());
    }

    #[test]
    fn nabla_on_monomials() {
        // raw: t^i -> (1 - lambda^i) t^(i-1); Paper divides by 1 - lambda
        let c = ctx(3);
        for i in -3..=4i64 {
            let ti = t_monomial(&Rational::one(), i);
            for (kind, lam) in [(NablaKind::Phi, 3i64), (NablaKind::Gamma, 4)] {
                let l = rat_int(lam);
                let raw = NablaOperator::new(&c, kind, Normalization::Raw).unwrap().apply(&ti).unwrap();
                let expect = Rational::one() - l.pow(i as i32);
                assert_eq!(raw, t_monomial(&expect, i - 1));
                let paper = NablaOperator::new(&c, kind, Normalization::Paper).unwrap().apply(&ti).unwrap();
                assert_eq!(paper, t_monomial(&(expect / (Rational::one() - &l)), i - 1));
            }
        }
    }

    #[test]
    fn t_bracket_closed_form() {
        let c = ctx(5);
        let one = Rational::one();
        for (i, j) in [(0, 1), (2, -3), (4, 4), (-1, 2)] {
            let br = t_bracket(NablaKind::Phi, &one, i, &one, j, &c, Normalization::Raw).unwrap();
            assert_eq!(br.exponent, i + j - 1);
            assert_eq!(br.coefficient, rat_int(5).pow(i as i32) - rat_int(5).pow(j as i32));
            assert!(br.matches_formula && br.matches_oracle);
            let br = t_bracket(NablaKind::Gamma, &rat(2, 3), i, &rat(-1, 1), j, &c, Normalization::Paper).unwrap();
            let expect = (rat_int(6).pow(i as i32) - rat_int(6).pow(j as i32)) * rat(-2, 3) / rat_int(-5);
            assert_eq!(br.coefficient, expect);
            assert!(br.matches_formula && br.matches_oracle);
        }
        let z = t_bracket(NablaKind::Phi, &rat(7, 2), 3, &rat(7, 2), 3, &c, Normalization::Paper).unwrap();
        assert!(z.closed.is_zero());
    }

    /// Both sides of each relation on t^i, expanded by hand.
    #[test]
    fn relations_on_monomials_match_expansion() {
        let (p, chi) = (rat_int(3), rat_int(4));
        let one = Rational::one();
        let cp = |i: i64| &one - p.pow(i as i32);
        let cg = |i: i64| &one - chi.pow(i as i32);
        let c3 = ctx(3);
        let np = NablaOperator::new(&c3, NablaKind::Phi, Normalization::Raw).unwrap();
        let ng = NablaOperator::new(&c3, NablaKind::Gamma, Normalization::Raw).unwrap();
        for i in -4..=4i64 {
            // nabla_phi nabla_gamma t^i = cg(i) cp(i-1) t^(i-2)
            let got = np.apply(&ng.apply(&t_monomial(&one, i)).unwrap()).unwrap();
            assert_eq!(got, t_monomial(&(cg(i) * cp(i - 1)), i - 2));
            // R6 as printed: rhs cp(i) (1 - chi^(i+1)) differs from lhs cp(i) cg(i-1) unless p^i = 1
            let lhs = cp(i) * cg(i - 1);
            let printed = cp(i) * (&one - chi.pow((i + 1) as i32));
            assert_eq!(lhs == printed, i == 0);
        }
        let c = ctx(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = nabla_relations_verify(&c, Normalization::Raw, 0, &mut rng).unwrap();
        let pass: Vec<bool> = rep.entries.iter().map(|e| e.pass).collect();
        assert_eq!(pass, vec![true, true, true, true, true, false, true, true]);
    }

    #[test]
    fn relations_under_both_normalizations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [2u64, 3, 5] {
            let c = ctx(p);
            let raw = nabla_relations_verify(&c, Normalization::Raw, 10, &mut rng).unwrap();
            let failing: Vec<&str> = raw.failures().map(|e| &e.label[..2]).collect();
            assert_eq!(failing, vec!["R6"]);
            let paper = nabla_relations_verify(&c, Normalization::Paper, 10, &mut rng).unwrap();
            let failing: Vec<&str> = paper.failures().map(|e| &e.label[..3]).collect();
            assert_eq!(failing, vec!["R5 ", "R6 "]);
        }
    }

    #[test]
    fn twist_factors_are_p_and_chi() {
        for p in [2u64, 3, 5] {
            for n in [Normalization::Raw, Normalization::Paper] {
                assert!(nabla_twist_factors(&ctx(p), n).unwrap().all_pass());
            }
        }
    }

    fn pctx(p: u64) -> PiContext {
        PiContext::standard(p, 10, 20).unwrap()
    }

    #[test]
    fn nabla_pi_on_powers() {
        for p in [2u64, 3] {
            let c = pctx(p);
            let q = q_element(p, c.pi_precision, c.working_precision());
            for i in 0..5 {
                let pi_i = PiSeries::pi(p, c.pi_precision, c.working_precision()).pow(i).unwrap();
                let got = c.nabla(NablaKind::Phi, &pi_i).unwrap();
                let one = PiSeries::one(p, c.pi_precision, c.working_precision());
                let expect = one.sub(&q.pow(i).unwrap()).shift(i - 1);
                assert!(got.agrees(&expect, c.p_precision));
            }
        }
    }

    #[test]
    fn pi_bracket_vanishes_on_diagonal() {
        let c = pctx(3);
        let a = c.series(&[2, 1, -1]);
        for kind in [NablaKind::Phi, NablaKind::Gamma] {
            let br = pi_bracket(&a, 2, &a, 2, kind, &c).unwrap();
            assert!(br.closed.vanishes(c.p_precision));
        }
    }

    #[test]
    fn pi_bracket_gamma_pattern() {
        let c = pctx(5);
        let one = c.series(&[1]);
        let theta = c.sigma_pi(NablaKind::Gamma);
        for (i, j) in [(1, 3), (0, 2), (4, 1)] {
            let br = pi_bracket(&one, i, &one, j, NablaKind::Gamma, &c).unwrap();
            let expect = theta.pow(i).unwrap().shift(j - 1).sub(&theta.pow(j).unwrap().shift(i - 1));
            assert!(br.closed.agrees(&expect, c.p_precision));
            assert!(br.matches_formula && br.matches_oracle);
        }
    }

    #[test]
    fn pi_bracket_matches_oracle_for_series_coefficients() {
        for p in [2u64, 3, 5] {
            let c = pctx(p);
            let a = c.series(&[1, -2, 0, 3]);
            let b = c.series(&[4, 0, 1]);
            for kind in [NablaKind::Phi, NablaKind::Gamma] {
                for (i, j) in [(0, 1), (2, 3), (-1, 2)] {
                    let br = pi_bracket(&a, i, &b, j, kind, &c).unwrap();
                    assert!(br.matches_formula, "p={p} {kind} ({i},{j}) formula");
                    assert!(br.matches_oracle, "p={p} {kind} ({i},{j}) oracle");
                }
            }
        }
    }

    #[test]
    fn scalar_coefficients_reduce_to_printed_form() {
        // a, b constants: phi fixes them, so q^i a b - q^j b a
        let c = pctx(3);
        let a = PiSeries::constant(PadicInt::from_int(3, c.working_precision(), 2), c.pi_precision);
        let b = PiSeries::constant(PadicInt::from_int(3, c.working_precision(), 5), c.pi_precision);
        let br = pi_bracket(&a, 1, &b, 2, NablaKind::Phi, &c).unwrap();
        let q = q_element(3, c.pi_precision, c.working_precision());
        let expect = q.sub(&q.pow(2).unwrap()).scale(&PadicInt::from_int(3, c.working_precision(), 10)).shift(2);
        assert!(br.closed.agrees(&expect, c.p_precision));
    }
}
