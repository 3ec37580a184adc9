//! Hom-Lie algebras built from a monomial action on a unit lattice: the
//! admissibility vector, the graded bracket on D_l = -e^l delta, the Witt-type
//! rank-one bracket and the deformed sl2 basis change.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::CycloNumber;
use crate::laurent::{ExponentVector, LaurentPoly, MonomialEndo};
use crate::report::VerificationReport;
use crate::twistder::{HomLieElement, TwistedDerivation};

/// sigma(e_i) = zeta_m^{zeta_powers[i]} e^(row i of sigma), delta = omega e^-g (id - sigma).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitAlgebraSpec {
    pub n: usize,
    pub m: u64,
    pub sigma: Vec<Vec<i64>>,
    pub zeta_powers: Vec<i64>,
    pub g: ExponentVector,
    pub omega: CycloNumber,
}

impl UnitAlgebraSpec {
    pub fn new(m: u64, sigma: Vec<Vec<i64>>, zeta_powers: Vec<i64>, g: Vec<i64>, omega: CycloNumber) -> Result<Self> {
        let n = sigma.len();
        for len in sigma.iter().map(Vec::len).chain([zeta_powers.len(), g.len()]) {
            if len != n {
                return Err(Error::ArityMismatch { left: n, right: len });
            }
        }
        if m == 0 {
            return Err(Error::Invalid("root-of-unity order must be positive".into()));
        }
        if omega.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(UnitAlgebraSpec {
            n,
            m,
            sigma,
            zeta_powers,
            g: ExponentVector(g),
            omega,
        })
    }

    /// omega = 1, g = 0.
    pub fn plain(m: u64, sigma: Vec<Vec<i64>>, zeta_powers: Vec<i64>) -> Result<Self> {
        let n = sigma.len();
        Self::new(m, sigma, zeta_powers, vec![0; n], CycloNumber::one(1))
    }

    pub fn endo(&self) -> Result<MonomialEndo> {
        MonomialEndo::from_roots(self.sigma.clone(), &vec![self.m; self.n], &self.zeta_powers, 1)
    }

    pub fn derivation(&self) -> Result<TwistedDerivation> {
        let neg_g = ExponentVector(self.g.0.iter().map(|x| -x).collect());
        TwistedDerivation::new(LaurentPoly::monomial(self.omega.clone(), neg_g), self.endo()?)
    }

    /// (y)_r = sum_i s_ir y_i.
    pub fn act_index(&self, y: &ExponentVector) -> ExponentVector {
        y.times_matrix(&self.sigma)
    }

    /// zeta^y = prod zeta_i^{y_i}.
    pub fn zeta_power(&self, y: &ExponentVector) -> CycloNumber {
        let e: i64 = self.zeta_powers.iter().zip(&y.0).map(|(a, b)| a * b).sum();
        CycloNumber::root_of_unity(self.m, e)
    }
}

/// D_l = -e^l delta.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GradedGenerator {
    pub index: ExponentVector,
}

impl GradedGenerator {
    pub fn new(index: Vec<i64>) -> Self {
        GradedGenerator {
            index: ExponentVector(index),
        }
    }

    pub fn coefficient(&self) -> LaurentPoly {
        LaurentPoly::monomial(CycloNumber::from_int(-1), self.index.clone())
    }

    pub fn element(&self, spec: &UnitAlgebraSpec) -> Result<HomLieElement> {
        HomLieElement::new(self.coefficient(), &spec.derivation()?)
    }
}

/// (Sigma - id)^t g^t, written as the row vector g (Sigma - id).
pub fn d_vector(spec: &UnitAlgebraSpec) -> ExponentVector {
    spec.act_index(&spec.g).sub(&spec.g)
}

pub fn is_admissible(spec: &UnitAlgebraSpec) -> bool {
    d_vector(spec).0.iter().all(|&x| x == 0)
}

/// <<D_k, D_l>> as a combination of graded generators:
/// omega (zeta^l D_{(l)+k-g} - zeta^k D_{(k)+l-g}).
pub fn graded_bracket_terms(spec: &UnitAlgebraSpec, k: &ExponentVector, l: &ExponentVector) -> Result<Vec<(CycloNumber, GradedGenerator)>> {
    let d = d_vector(spec);
    if !is_admissible(spec) {
        return Err(Error::InadmissibleSpec(d.0));
    }
    let first = (
        spec.omega.mul(&spec.zeta_power(l)),
        GradedGenerator {
            index: spec.act_index(l).add(k).sub(&spec.g),
        },
    );
    let second = (
        spec.omega.mul(&spec.zeta_power(k)).neg(),
        GradedGenerator {
            index: spec.act_index(k).add(l).sub(&spec.g),
        },
    );
    let mut out = if first.1 == second.1 {
        vec![(first.0.add(&second.0), first.1)]
    } else {
        vec![first, second]
    };
    out.retain(|(c, _)| !c.is_zero());
    out.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(out)
}

pub fn graded_bracket(spec: &UnitAlgebraSpec, k: &ExponentVector, l: &ExponentVector) -> Result<HomLieElement> {
    let mut coeff = LaurentPoly::zero(spec.n);
    for (c, gen) in graded_bracket_terms(spec, k, l)? {
        coeff = coeff.add(&gen.coefficient().scale(&c))?;
    }
    HomLieElement::new(coeff, &spec.derivation()?)
}

/// <<D_k, D_l>> = (zeta^l - zeta^k) D_{k+l} on a stable axis.
pub fn witt_bracket(zeta: &CycloNumber, k: i64, l: i64) -> Result<(CycloNumber, i64)> {
    Ok((zeta.pow(l)?.sub(&zeta.pow(k)?), k + l))
}

/// Axes i with sigma(R e_i) inside R e_i, i.e. row i of the matrix is the i-th
/// unit vector. Indices are 0-based.
pub fn stable_rank_one(spec: &UnitAlgebraSpec) -> Vec<usize> {
    (0..spec.n)
        .filter(|&i| spec.sigma[i].iter().enumerate().all(|(j, &s)| s == i64::from(i == j)))
        .collect()
}

/// B_0 = a D_0, B_1 = b D_1, B_-1 = c D_-1 with target relations
/// <<B_1,B_0>> = 2 B_1, <<B_-1,B_0>> = -2q B_-1, <<B_1,B_-1>> = (q+1)/2 B_0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sl2Change {
    pub a: CycloNumber,
    pub b: CycloNumber,
    pub c: CycloNumber,
    pub q: CycloNumber,
}

impl Sl2Change {
    pub fn identity() -> Self {
        let one = CycloNumber::one(1);
        Sl2Change {
            a: one.clone(),
            b: one.clone(),
            c: one.clone(),
            q: one,
        }
    }
}

fn check_zeta(zeta: &CycloNumber) -> Result<()> {
    if zeta.is_one() || zeta.mul(zeta).is_one() {
        return Err(Error::SingularZeta);
    }
    Ok(())
}

/// Solves the three target relations against the Witt bracket, with b = 1:
/// a from the first, q from the second, c from the third.
pub fn sl2_extract(zeta: &CycloNumber) -> Result<Sl2Change> {
    check_zeta(zeta)?;
    let two = CycloNumber::from_int(2);
    let (w10, _) = witt_bracket(zeta, 1, 0)?;
    let (wm0, _) = witt_bracket(zeta, -1, 0)?;
    let (w1m, _) = witt_bracket(zeta, 1, -1)?;
    let a = two.div(&w10)?;
    let q = a.mul(&wm0).div(&two)?.neg();
    let bc = q.add(&CycloNumber::one(1)).mul(&a).div(&two.mul(&w1m))?;
    Ok(Sl2Change {
        a,
        b: CycloNumber::one(1),
        c: bc,
        q,
    })
}

/// The closed forms a = -2/(zeta-1), q = (zeta^-1 - 1)/(zeta - 1),
/// bc = 1/(1 - zeta^2) with b = 1. These carry sign slips in q and bc and do
/// not satisfy the target relations; kept so [`verify_sl2`] can show it.
pub fn sl2_sign_flipped_closed_form(zeta: &CycloNumber) -> Result<Sl2Change> {
    check_zeta(zeta)?;
    let one = CycloNumber::one(1);
    let zm1 = zeta.sub(&one);
    Ok(Sl2Change {
        a: CycloNumber::from_int(-2).div(&zm1)?,
        b: one.clone(),
        c: one.sub(&zeta.mul(zeta)).inv()?,
        q: zeta.inv()?.sub(&one).div(&zm1)?,
    })
}

/// Element sum c_k D_k of the rank-one Witt algebra, keyed by k.
type WittElem = std::collections::BTreeMap<i64, CycloNumber>;

fn witt_elem(terms: &[(i64, CycloNumber)]) -> WittElem {
    let mut out = WittElem::new();
    for (k, c) in terms {
        let s = out.remove(k).map_or(c.clone(), |x| x.add(c));
        if !s.is_zero() {
            out.insert(*k, s);
        }
    }
    out
}

fn witt_bilinear(zeta: &CycloNumber, x: &WittElem, y: &WittElem) -> Result<WittElem> {
    let mut terms = Vec::new();
    for (k, a) in x {
        for (l, b) in y {
            let (c, idx) = witt_bracket(zeta, *k, *l)?;
            terms.push((idx, a.mul(b).mul(&c)));
        }
    }
    Ok(witt_elem(&terms))
}

fn witt_text(x: &WittElem) -> String {
    if x.is_empty() {
        return "0".into();
    }
    x.iter().map(|(k, c)| format!("{c} * D[{k}]")).collect::<Vec<_>>().join(" + ")
}

pub fn verify_sl2(change: &Sl2Change, zeta: &CycloNumber) -> Result<VerificationReport> {
    let two = CycloNumber::from_int(2);
    let b0 = witt_elem(&[(0, change.a.clone())]);
    let b1 = witt_elem(&[(1, change.b.clone())]);
    let bm = witt_elem(&[(-1, change.c.clone())]);
    let scaled = |x: &WittElem, s: &CycloNumber| witt_elem(&x.iter().map(|(k, c)| (*k, c.mul(s))).collect::<Vec<_>>());
    let half_q1 = change.q.add(&CycloNumber::one(1)).div(&two)?;
    let cases = [
        ("<<B1,B0>> - 2 B1", witt_bilinear(zeta, &b1, &b0)?, scaled(&b1, &two)),
        ("<<B-1,B0>> + 2q B-1", witt_bilinear(zeta, &bm, &b0)?, scaled(&bm, &two.mul(&change.q).neg())),
        ("<<B1,B-1>> - (q+1)/2 B0", witt_bilinear(zeta, &b1, &bm)?, scaled(&b0, &half_q1)),
    ];
    let mut report = VerificationReport::new("deformed sl2 relations");
    for (label, lhs, rhs) in cases {
        let diff: Vec<(i64, CycloNumber)> = lhs.into_iter().chain(rhs.into_iter().map(|(k, c)| (k, c.neg()))).collect();
        let r = witt_elem(&diff);
        report.push(label, witt_text(&r), r.is_empty());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rational;
    use crate::twistder::hl_bracket;
    use proptest::prelude::*;

    fn rotation_spec() -> UnitAlgebraSpec {
        UnitAlgebraSpec::plain(12, vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 1]], vec![3, 6, 4]).unwrap()
    }

    fn ev(v: &[i64]) -> ExponentVector {
        ExponentVector(v.to_vec())
    }

    #[test]
    fn d_vector_examples() {
        assert_eq!(d_vector(&rotation_spec()), ev(&[0, 0, 0]));
        let id = UnitAlgebraSpec::new(5, vec![vec![1, 0], vec![0, 1]], vec![1, 2], vec![4, -3], CycloNumber::one(1)).unwrap();
        assert_eq!(d_vector(&id), ev(&[0, 0]));
        let bad = UnitAlgebraSpec::new(1, vec![vec![2, 0], vec![0, 1]], vec![0, 0], vec![1, 0], CycloNumber::one(1)).unwrap();
        assert_eq!(d_vector(&bad), ev(&[1, 0]));
        assert!(matches!(graded_bracket(&bad, &ev(&[0, 0]), &ev(&[1, 0])), Err(Error::InadmissibleSpec(v)) if v == vec![1, 0]));
    }

    #[test]
    fn rotation_bracket_matches_derivation() {
        let spec = rotation_spec();
        let d = spec.derivation().unwrap();
        for k in [[1, 0, 2], [0, -1, 1], [2, 2, -1]] {
            for l in [[0, 1, 0], [-1, 1, 3], [1, 0, 2]] {
                let x = GradedGenerator::new(k.to_vec()).element(&spec).unwrap();
                let y = GradedGenerator::new(l.to_vec()).element(&spec).unwrap();
                assert_eq!(graded_bracket(&spec, &ev(&k), &ev(&l)).unwrap(), hl_bracket(&x, &y).unwrap());
                assert_eq!(x.context, d);
            }
        }
        // Closed form with (x)_1 = -x_2, (x)_2 = x_1, (x)_3 = x_3.
        let (k, l) = (ev(&[1, 2, 0]), ev(&[3, -1, 1]));
        let terms = graded_bracket_terms(&spec, &k, &l).unwrap();
        let zl = spec.zeta_power(&l);
        let zk = spec.zeta_power(&k);
        let mut expect = vec![
            (zl, GradedGenerator::new(vec![1 + 1, 3 + 2, 1])),
            (zk.neg(), GradedGenerator::new(vec![-2 + 3, 1 - 1, 1])),
        ];
        expect.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(terms, expect);
        assert!(graded_bracket_terms(&spec, &k, &k).unwrap().is_empty());
    }

    #[test]
    fn witt_examples() {
        let z3 = CycloNumber::root_of_unity(3, 1);
        let one = CycloNumber::one(1);
        assert_eq!(witt_bracket(&z3, -1, 0).unwrap(), (one.sub(&z3.inv().unwrap()), -1));
        assert_eq!(witt_bracket(&z3, 0, 1).unwrap(), (z3.sub(&one), 1));
        assert_eq!(witt_bracket(&z3, 1, -1).unwrap(), (z3.inv().unwrap().sub(&z3), 0));
        let (c, i) = witt_bracket(&CycloNumber::root_of_unity(7, 2), 5, 5).unwrap();
        assert!(c.is_zero());
        assert_eq!(i, 10);
    }

    #[test]
    fn witt_is_axis_restriction() {
        let spec = rotation_spec();
        let z3 = CycloNumber::root_of_unity(3, 1);
        for k in -4..=4 {
            for l in -4..=4 {
                let (c, idx) = witt_bracket(&z3, k, l).unwrap();
                let terms = graded_bracket_terms(&spec, &ev(&[0, 0, k]), &ev(&[0, 0, l])).unwrap();
                if c.is_zero() {
                    assert!(terms.is_empty());
                } else {
                    assert_eq!(terms, vec![(c, GradedGenerator::new(vec![0, 0, idx]))]);
                }
            }
        }
    }

    #[test]
    fn span_closure() {
        let z3 = CycloNumber::root_of_unity(3, 1);
        for (k, l) in [(-1, 0), (0, 1), (1, -1), (0, -1), (1, 0), (-1, 1)] {
            let (_, idx) = witt_bracket(&z3, k, l).unwrap();
            assert!((-1..=1).contains(&idx));
        }
    }

    #[test]
    fn stable_axes() {
        assert_eq!(stable_rank_one(&rotation_spec()), vec![2]);
        let id = UnitAlgebraSpec::plain(1, vec![vec![1, 0], vec![0, 1]], vec![0, 0]).unwrap();
        assert_eq!(stable_rank_one(&id), vec![0, 1]);
        let swap = UnitAlgebraSpec::plain(1, vec![vec![0, 1], vec![1, 0]], vec![0, 0]).unwrap();
        assert!(stable_rank_one(&swap).is_empty());
    }

    #[test]
    fn sl2_values_for_zeta3() {
        let z = CycloNumber::root_of_unity(3, 1);
        let one = CycloNumber::one(1);
        let ch = sl2_extract(&z).unwrap();
        assert_eq!(ch.a, CycloNumber::from_int(-2).div(&z.sub(&one)).unwrap());
        // Solving the relations gives q = zeta^-1 and bc = 1/(1 - zeta)^2.
        assert_eq!(ch.q, z.inv().unwrap());
        assert_eq!(ch.b.mul(&ch.c), one.sub(&z).pow(-2).unwrap());
        assert!(verify_sl2(&ch, &z).unwrap().all_pass());
    }

    #[test]
    fn sign_flipped_closed_form_fails_relations() {
        let z = CycloNumber::root_of_unity(3, 1);
        let printed = sl2_sign_flipped_closed_form(&z).unwrap();
        assert_eq!(printed.a, sl2_extract(&z).unwrap().a);
        let r = verify_sl2(&printed, &z).unwrap();
        let fails: Vec<_> = r.failures().map(|e| e.label.clone()).collect();
        assert_eq!(fails, vec!["<<B-1,B0>> + 2q B-1", "<<B1,B-1>> - (q+1)/2 B0"]);
    }

    #[test]
    fn sl2_constraints_for_zeta4() {
        let z = CycloNumber::root_of_unity(4, 1);
        let one = CycloNumber::one(1);
        let two = CycloNumber::from_int(2);
        let ch = sl2_extract(&z).unwrap();
        // -b(2 + a(zeta - 1)) = 0.
        assert!(ch.b.mul(&two.add(&ch.a.mul(&z.sub(&one)))).is_zero());
        // c(2q + a(1 - zeta^-1)) = 0.
        let zi = z.inv().unwrap();
        assert!(ch.c.mul(&two.mul(&ch.q).add(&ch.a.mul(&one.sub(&zi)))).is_zero());
        // bc(zeta^-1 - zeta) = (q+1)/2 a.
        let lhs = ch.b.mul(&ch.c).mul(&zi.sub(&z));
        let rhs = ch.q.add(&one).div(&two).unwrap().mul(&ch.a);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn singular_and_identity_change() {
        assert!(matches!(sl2_extract(&CycloNumber::from_int(-1)), Err(Error::SingularZeta)));
        assert!(matches!(sl2_extract(&CycloNumber::one(5)), Err(Error::SingularZeta)));
        let z = CycloNumber::root_of_unity(3, 1);
        let r = verify_sl2(&Sl2Change::identity(), &z).unwrap();
        assert!(!r.all_pass());
        assert!(r.failures().all(|e| e.residual != "0"));
    }

    fn arb_admissible() -> impl Strategy<Value = UnitAlgebraSpec> {
        // Matrices with a fixed vector g: either identity-like blocks or the
        // rotation plus a free axis.
        let mats = [(vec![vec![0, 1, 0], vec![-1, 0, 0], vec![0, 0, 1]], vec![0, 0, 1]),
            (vec![vec![0, 1], vec![1, 0]], vec![1, 1]),
            (vec![vec![2, 1], vec![1, 1]], vec![0, 0]),
            (vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 0, 1]], vec![1, 0, 2])];
        (0..mats.len(), prop::collection::vec(0i64..12, 3), -2i64..=2, 0i64..12).prop_map(move |(i, zp, s, w)| {
            let (m, g) = mats[i].clone();
            let n = m.len();
            let g: Vec<i64> = g.iter().map(|x| x * s).collect();
            UnitAlgebraSpec::new(12, m, zp[..n].to_vec(), g, CycloNumber::root_of_unity(12, w).scale(&Rational::from_integer(2.into()))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn graded_matches_twisted_bracket(spec in arb_admissible(), k in prop::collection::vec(-3i64..=3, 3), l in prop::collection::vec(-3i64..=3, 3)) {
            prop_assert!(is_admissible(&spec));
            let k = ev(&k[..spec.n]);
            let l = ev(&l[..spec.n]);
            let x = HomLieElement::new(GradedGenerator { index: k.clone() }.coefficient(), &spec.derivation().unwrap()).unwrap();
            let y = HomLieElement::new(GradedGenerator { index: l.clone() }.coefficient(), &spec.derivation().unwrap()).unwrap();
            prop_assert_eq!(graded_bracket(&spec, &k, &l).unwrap(), hl_bracket(&x, &y).unwrap());
        }

        #[test]
        fn sl2_solution_verifies(m in 3u64..=12, k in 1i64..12) {
            let z = CycloNumber::root_of_unity(m, k);
            prop_assume!(!z.is_one() && !z.mul(&z).is_one());
            prop_assert!(verify_sl2(&sl2_extract(&z).unwrap(), &z).unwrap().all_pass());
        }
    }
}
