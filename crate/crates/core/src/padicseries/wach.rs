//! The rank-two Wach-module family: phi-matrix [[0, -1], [q^(k-1), alpha z]],
//! its gamma-matrix, reduction mod pi, filtration and nabla actions.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::nabla::{pi_bracket, NablaKind, PiContext};
use super::series::{binom, gamma_sub, is_prime, phi_sub, q_element, PiSeries};
use crate::error::{Error, Result};
use crate::exactnum::{rational_to_text, PadicInt, Rational};
use crate::report::VerificationReport;

pub type SeriesMatrix = Vec<Vec<PiSeries>>;

fn mat_mul(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| {
                    let mut acc = a[i][0].mul(&b[0][j]);
                    for k in 1..b.len() {
                        acc = acc.add(&a[i][k].mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_sub(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

fn mat_map(a: &SeriesMatrix, f: impl Fn(&PiSeries) -> Result<PiSeries>) -> Result<SeriesMatrix> {
    a.iter().map(|r| r.iter().map(&f).collect()).collect()
}

fn mat_vanishes(a: &SeriesMatrix, t: i64) -> bool {
    a.iter().flatten().all(|x| x.vanishes(t))
}

pub fn matrix_to_text(a: &SeriesMatrix) -> String {
    let rows: Vec<String> = a
        .iter()
        .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn vector_to_text(v: &[PiSeries]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

/// Basis images: column i of `phi_matrix` is phi(e_i), likewise for gamma.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiGammaModule {
    pub prime: u64,
    pub rank: usize,
    pub chi_gamma: i64,
    pub phi_matrix: SeriesMatrix,
    pub gamma_matrix: SeriesMatrix,
}

impl PhiGammaModule {
    fn apply_semilinear(&self, m: &SeriesMatrix, x: &[PiSeries], f: impl Fn(&PiSeries) -> Result<PiSeries>) -> Result<Vec<PiSeries>> {
        if x.len() != self.rank {
            return Err(Error::ArityMismatch {
                left: self.rank,
                right: x.len(),
            });
        }
        let fx: Vec<PiSeries> = x.iter().map(f).collect::<Result<_>>()?;
        Ok((0..self.rank)
            .map(|i| {
                let mut acc = m[i][0].mul(&fx[0]);
                for k in 1..self.rank {
                    acc = acc.add(&m[i][k].mul(&fx[k]));
                }
                acc
            })
            .collect())
    }

    pub fn phi(&self, x: &[PiSeries]) -> Result<Vec<PiSeries>> {
        self.apply_semilinear(&self.phi_matrix, x, phi_sub)
    }

    pub fn gamma(&self, x: &[PiSeries]) -> Result<Vec<PiSeries>> {
        self.apply_semilinear(&self.gamma_matrix, x, |f| gamma_sub(f, self.chi_gamma))
    }

    pub fn sigma(&self, kind: NablaKind, x: &[PiSeries]) -> Result<Vec<PiSeries>> {
        match kind {
            NablaKind::Phi => self.phi(x),
            NablaKind::Gamma => self.gamma(x),
        }
    }

    /// pi^-1 (x - sigma(x)).
    pub fn nabla(&self, kind: NablaKind, x: &[PiSeries]) -> Result<Vec<PiSeries>> {
        let sx = self.sigma(kind, x)?;
        Ok(x.iter().zip(&sx).map(|(a, b)| a.sub(b).shift(-1)).collect())
    }

    /// P phi(G) - G gamma(P).
    pub fn commutation_residual(&self) -> Result<SeriesMatrix> {
        let lhs = mat_mul(&self.phi_matrix, &mat_map(&self.gamma_matrix, phi_sub)?);
        let rhs = mat_mul(&self.gamma_matrix, &mat_map(&self.phi_matrix, |f| gamma_sub(f, self.chi_gamma))?);
        Ok(mat_sub(&lhs, &rhs))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<PiSeries> {
        let model = &self.phi_matrix[0][0];
        let (n, w) = (model.len(), model.work_precision());
        (0..self.rank)
            .map(|k| {
                if k == i {
                    PiSeries::one(self.prime, n, w)
                } else {
                    PiSeries::zero(self.prime, n, w)
                }
            })
            .collect()
    }

    /// det of the phi-matrix (rank 2).
    pub fn phi_determinant(&self) -> Option<PiSeries> {
        (self.rank == 2).then(|| {
            let p = &self.phi_matrix;
            p[0][0].mul(&p[1][1]).sub(&p[0][1].mul(&p[1][0]))
        })
    }
}

/// Parameters of the family; m = floor((k - 2)/(p - 1)) is derived.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WachFamilySpec {
    pub p: u64,
    pub k: u32,
    pub alpha: PadicInt,
    pub z_coeffs: Vec<PadicInt>,
    pub pi_precision: usize,
    pub p_precision: i64,
}

impl WachFamilySpec {
    /// z = p^m + pi + ... + pi^(k-2): the constant term p^m makes the
    /// reduced trace equal to alpha p^m.
    pub fn standard(p: u64, k: u32, alpha: i64, pi_precision: usize, p_precision: i64) -> Result<Self> {
        if !is_prime(p) || k < 2 {
            return Err(Error::Invalid(format!("need a prime p and k >= 2, got p = {p}, k = {k}")));
        }
        let m = (k - 2) / (p as u32 - 1);
        let mut z_coeffs = vec![PadicInt::from_bigint(p, p_precision, num_traits::pow(BigInt::from(p), m as usize))];
        z_coeffs.extend((1..k - 1).map(|_| PadicInt::one(p, p_precision)));
        let spec = WachFamilySpec {
            p,
            k,
            alpha: PadicInt::from_int(p, p_precision, alpha),
            z_coeffs,
            pi_precision,
            p_precision,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn m(&self) -> u32 {
        (self.k - 2) / (self.p as u32 - 1)
    }

    pub fn chi_gamma(&self) -> i64 {
        1 + self.p as i64
    }

    /// Guard digits for the degree-by-degree solve of the gamma-matrix.
    pub fn working_precision(&self) -> i64 {
        self.p_precision + (self.k as i64 + 2) * self.pi_precision as i64 + 4
    }

    pub fn a_p(&self) -> PadicInt {
        self.alpha.mul_p_pow(self.m() as i64)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Invalid(format!("p = {} is not prime", self.p)));
        }
        if self.k < 2 {
            return Err(Error::Invalid(format!("k = {} must be at least 2", self.k)));
        }
        if self.alpha.prime() != self.p || self.z_coeffs.iter().any(|z| z.prime() != self.p) {
            return Err(Error::Invalid("alpha and z must be p-adic for the same p".into()));
        }
        if !self.alpha.is_zero_mod(1) {
            return Err(Error::Invalid(format!("alpha = {} is not in the maximal ideal", self.alpha)));
        }
        if self.z_coeffs.len() > self.k as usize - 1 || self.z_coeffs.iter().any(|z| !z.is_integral()) {
            return Err(Error::Invalid("z must be an integral polynomial of degree at most k - 2".into()));
        }
        if self.pi_precision < 2 || self.p_precision < 1 {
            return Err(Error::Invalid("pi precision must be at least 2 and p precision positive".into()));
        }
        Ok(())
    }

    fn lift(&self, c: &PadicInt, w: i64) -> PadicInt {
        PadicInt::from_rational(self.p, w, &c.to_rational()).expect("integral p-adic input")
    }

    pub fn z_series(&self, w: i64) -> PiSeries {
        let coeffs: Vec<PadicInt> = (0..self.pi_precision)
            .map(|d| match self.z_coeffs.get(d) {
                Some(c) => self.lift(c, w),
                None => PadicInt::zero(self.p, w),
            })
            .collect();
        PiSeries::from_coeffs(self.p, 0, coeffs).expect("same prime")
    }

    pub fn phi_matrix(&self) -> Result<SeriesMatrix> {
        let (p, n, w) = (self.p, self.pi_precision, self.working_precision());
        let q = q_element(p, n, w);
        let alpha = self.lift(&self.alpha, w);
        Ok(vec![
            vec![PiSeries::zero(p, n, w), PiSeries::one(p, n, w).neg()],
            vec![q.pow(self.k as i64 - 1)?, self.z_series(w).scale(&alpha)],
        ])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaRoute {
    /// diag(g+, g-) from the infinite products.
    ProductFormula,
    /// The unique G = I mod pi with P phi(G) = G gamma(P), solved degree by degree.
    DegreeSolve,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WachModule {
    pub spec: WachFamilySpec,
    pub module: PhiGammaModule,
    /// prod_{n>=0} phi^(2n+1)(q)/p.
    pub lambda_plus: PiSeries,
    /// prod_{n>=0} phi^(2n)(q)/p.
    pub lambda_minus: PiSeries,
    pub g_plus: PiSeries,
    pub g_minus: PiSeries,
    /// Factors multiplied into lambda+ and lambda-.
    pub factors_used: [usize; 2],
    pub gamma_route: GammaRoute,
    /// Whether diag(g+, g-) itself satisfies the commutation.
    pub diagonal_commutes: bool,
    /// Whether the solved matrix equals diag(g+, g-).
    pub routes_agree: bool,
}

/// Largest p-adic valuation of an index 1..n.
fn max_index_valuation(p: u64, n: usize) -> i64 {
    (1..n.max(2) as u64)
        .map(|mut i| {
            let mut v = 0;
            while i % p == 0 {
                i /= p;
                v += 1;
            }
            v
        })
        .max()
        .unwrap_or(0)
}

/// lambda-, lambda+ as products of phi^r(q)/p over even and odd r.
///
/// Coefficient i of phi^r(q)/p has valuation at least r - 1 - v_p(i), so once
/// a factor is 1 mod p^target and r is past that bound, the product is final.
fn lambda_products(p: u64, n: usize, w: i64, target: i64) -> Result<([PiSeries; 2], [usize; 2])> {
    let cap = 4 * n;
    let one = PiSeries::one(p, n, w);
    let vmax = max_index_valuation(p, n);
    let mut prods = [one.clone(), one.clone()];
    let mut used = [0usize; 2];
    let mut done = [false; 2];
    let mut cur = q_element(p, n, w);
    let mut r: i64 = 0;
    while !(done[0] && done[1]) {
        let parity = (r % 2) as usize;
        if !done[parity] {
            let factor = cur.scale_p_pow(-1);
            if factor.sub(&one).vanishes(target) && r - 1 - vmax >= target {
                done[parity] = true;
            } else {
                if used[parity] >= cap {
                    return Err(Error::ProductNotStabilized(cap));
                }
                prods[parity] = prods[parity].mul(&factor);
                used[parity] += 1;
            }
        }
        cur = phi_sub(&cur)?;
        r += 1;
    }
    let [even, odd] = prods;
    Ok(([odd.with_p_precision(target), even.with_p_precision(target)], [used[1], used[0]]))
}

/// (lambda / gamma(lambda))^(k-1).
fn gamma_quotient(lambda: &PiSeries, chi: i64, k: u32) -> Result<PiSeries> {
    lambda.div(&gamma_sub(lambda, chi)?)?.pow(k as i64 - 1)
}

/// Gaussian elimination over Q_p with minimal-valuation pivots.
fn solve_linear(mut m: Vec<Vec<PadicInt>>, mut rhs: Vec<PadicInt>) -> Option<Vec<PadicInt>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .min_by_key(|&r| m[r][col].valuation().unwrap_or(i64::MAX))?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].inv().ok()?;
        for r in col + 1..n {
            let f = m[r][col].mul(&inv);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = f.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&t);
            }
            let t = f.mul(&rhs[col]);
            rhs[r] = rhs[r].sub(&t);
        }
    }
    let mut x = vec![PadicInt::zero(m[0][0].prime(), 0); n];
    for i in (0..n).rev() {
        let mut s = rhs[i].clone();
        for c in i + 1..n {
            s = s.sub(&m[i][c].mul(&x[c]));
        }
        x[i] = s.div(&m[i][i]).ok()?;
    }
    Some(x)
}

/// G = sum G_d pi^d with G_0 = I, each G_d solving p^d A X - X A = -R_d where
/// A = P(0) and R_d is degree d of P phi(G_<d) - G_<d gamma(P).
fn solve_gamma_matrix(pm: &SeriesMatrix, p: u64, chi: i64, n: usize, w: i64) -> Result<SeriesMatrix> {
    let gp = mat_map(pm, |f| gamma_sub(f, chi))?;
    let a: Vec<Vec<PadicInt>> = pm.iter().map(|r| r.iter().map(|x| x.coeff(0).expect("known")).collect()).collect();
    let mut g: Vec<Vec<Vec<PadicInt>>> = vec![vec![vec![PadicInt::zero(p, w); n]; 2]; 2];
    for i in 0..2 {
        g[i][i][0] = PadicInt::one(p, w);
    }
    let build = |g: &Vec<Vec<Vec<PadicInt>>>| -> SeriesMatrix {
        g.iter()
            .map(|row| row.iter().map(|c| PiSeries::from_coeffs(p, 0, c.clone()).expect("same prime")).collect())
            .collect()
    };
    for d in 1..n {
        let cur = build(&g);
        let e = mat_sub(&mat_mul(pm, &mat_map(&cur, phi_sub)?), &mat_mul(&cur, &gp));
        let pd = PadicInt::from_bigint(p, w, num_traits::pow(BigInt::from(p), d));
        // unknown x_{kl} at index 2k + l; equation (i, j) at row 2i + j
        let mut lin = vec![vec![PadicInt::zero(p, w); 4]; 4];
        let mut rhs = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let row = 2 * i + j;
                for k in 0..2 {
                    let idx = 2 * k + j;
                    lin[row][idx] = lin[row][idx].add(&pd.mul(&a[i][k]));
                    let idx = 2 * i + k;
                    lin[row][idx] = lin[row][idx].sub(&a[k][j]);
                }
                rhs.push(e[i][j].coeff(d as i64).expect("known").neg());
            }
        }
        let x = solve_linear(lin, rhs)
            .ok_or_else(|| Error::CommutationFailure(format!("degree {d}: p^{d} A and A share an eigenvalue")))?;
        for k in 0..2 {
            for l in 0..2 {
                g[k][l][d] = x[2 * k + l].clone();
            }
        }
    }
    Ok(build(&g))
}

/// Builds P(alpha), the products lambda+-, g+- and the gamma-matrix.
///
/// diag(g+, g-) commutes with P only at alpha = 0; for alpha != 0 the
/// gamma-matrix is the solved one and the diagonal check is recorded.
pub fn wach_build(spec: &WachFamilySpec) -> Result<WachModule> {
    spec.validate()?;
    let (p, n, w, t) = (spec.p, spec.pi_precision, spec.working_precision(), spec.p_precision);
    let chi = spec.chi_gamma();
    let pm = spec.phi_matrix()?;
    // the gamma quotient and q^(k-1) products cost up to about N digits
    let ([lambda_plus, lambda_minus], factors_used) = lambda_products(p, n, w, t + n as i64 + 1)?;
    let g_plus = gamma_quotient(&lambda_plus, chi, spec.k)?;
    let g_minus = gamma_quotient(&lambda_minus, chi, spec.k)?;
    let zero = PiSeries::zero(p, n, w);
    let diag = vec![vec![g_plus.clone(), zero.clone()], vec![zero, g_minus.clone()]];
    let with_gamma = |gamma_matrix: SeriesMatrix| PhiGammaModule {
        prime: p,
        rank: 2,
        chi_gamma: chi,
        phi_matrix: pm.clone(),
        gamma_matrix,
    };
    let diagonal_commutes = mat_vanishes(&with_gamma(diag.clone()).commutation_residual()?, t);
    let solved = solve_gamma_matrix(&pm, p, chi, n, w);
    let routes_agree = match &solved {
        Ok(s) => mat_vanishes(&mat_sub(s, &diag), t),
        Err(_) => false,
    };
    let (gamma_matrix, gamma_route) = if spec.alpha.is_zero() {
        (diag, GammaRoute::ProductFormula)
    } else {
        (solved?, GammaRoute::DegreeSolve)
    };
    let module = with_gamma(gamma_matrix);
    let residual = module.commutation_residual()?;
    if !mat_vanishes(&residual, t) {
        return Err(Error::CommutationFailure(matrix_to_text(&residual)));
    }
    Ok(WachModule {
        spec: spec.clone(),
        module,
        lambda_plus,
        lambda_minus,
        g_plus,
        g_minus,
        factors_used,
        gamma_route,
        diagonal_commutes,
        routes_agree,
    })
}

/// Set pi = 0 in both matrices.
pub fn wach_reduce(m: &PhiGammaModule) -> Result<PhiGammaModule> {
    let at_zero = |x: &PiSeries| -> Result<PiSeries> {
        let c = x
            .at_zero()
            .ok_or_else(|| Error::Invalid(format!("{x} has no known constant term")))?;
        if x.min_degree() < 0 && !x.coeffs()[..(-x.min_degree()) as usize].iter().all(PadicInt::is_zero) {
            return Err(Error::Invalid(format!("{x} has a pole at pi = 0")));
        }
        Ok(PiSeries::constant(c, 1))
    };
    Ok(PhiGammaModule {
        prime: m.prime,
        rank: m.rank,
        chi_gamma: m.chi_gamma,
        phi_matrix: mat_map(&m.phi_matrix, at_zero)?,
        gamma_matrix: mat_map(&m.gamma_matrix, at_zero)?,
    })
}

/// Reduced phi-matrix against [[0, -1], [p^(k-1), alpha p^m]], gamma against
/// the identity, and the trace against a_p.
pub fn reduction_report(w: &WachModule) -> Result<VerificationReport> {
    let spec = &w.spec;
    let t = spec.p_precision;
    let red = wach_reduce(&w.module)?;
    let c = |x: &PiSeries| x.coeff(0).expect("constant");
    let int = |n: BigInt| PadicInt::from_bigint(spec.p, t, n);
    let pk = int(num_traits::pow(BigInt::from(spec.p), spec.k as usize - 1));
    let expect_phi = [
        [int(BigInt::zero()), int(-BigInt::one())],
        [pk, spec.a_p()],
    ];
    let mut report = VerificationReport::new(format!("reduction mod pi (p = {}, k = {}, alpha = {})", spec.p, spec.k, spec.alpha));
    let mut phi_ok = true;
    let mut gamma_ok = true;
    let mut diffs = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let dphi = c(&red.phi_matrix[i][j]).sub(&expect_phi[i][j]);
            phi_ok &= dphi.is_zero_mod(t);
            diffs.push(rational_to_text(&super::series::padic_balanced(&dphi)));
            let id = int(BigInt::from(u8::from(i == j)));
            gamma_ok &= c(&red.gamma_matrix[i][j]).sub(&id).is_zero_mod(t);
        }
    }
    report.push("reduced phi - [[0,-1],[p^(k-1), alpha p^m]]", format!("[{}]", diffs.join(", ")), phi_ok);
    report.push("reduced gamma - identity", if gamma_ok { "0" } else { "nonzero" }, gamma_ok);
    let trace = c(&red.phi_matrix[0][0]).add(&c(&red.phi_matrix[1][1]));
    let dt = trace.sub(&spec.a_p());
    report.push(
        "trace(reduced phi) - a_p",
        rational_to_text(&super::series::padic_balanced(&dt)),
        dt.is_zero_mod(t),
    );
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilStep {
    Full,
    LineE1,
    Zero,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationRow {
    pub i: i64,
    pub dim: usize,
    /// Basis vectors of Fil^i as coordinate pairs in (e1, e2).
    pub basis: Vec<[String; 2]>,
    pub step: FilStep,
    pub expected: FilStep,
}

impl FiltrationRow {
    pub fn matches(&self) -> bool {
        self.step == self.expected
    }
}

/// Full for i <= 0, Q_p e1 for 1 <= i <= k-1, zero for i >= k.
pub fn expected_filtration_step(i: i64, k: u32) -> FilStep {
    if i <= 0 {
        FilStep::Full
    } else if i < k as i64 {
        FilStep::LineE1
    } else {
        FilStep::Zero
    }
}

fn rpoly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Remainder modulo a monic polynomial, padded to deg(m) coefficients.
fn rpoly_rem(a: &[Rational], m: &[Rational]) -> Vec<Rational> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = r.pop().expect("nonempty");
        let shift = r.len() - dm;
        for (k, c) in m[..dm].iter().enumerate() {
            r[shift + k] -= &lead * c;
        }
    }
    r.resize(dm, Rational::zero());
    r
}

/// Fil^i of N/pi N as the image of {x in N : phi(x) in q^i N}.
///
/// Constant lifts a e1 + b e2 suffice: pi-multiples only add terms of higher
/// q-order. phi of the lift has coordinates (-b, a q^(k-1) + b alpha z), and
/// q-divisibility of a polynomial is exact division by the monic q.
pub fn wach_filtration(spec: &WachFamilySpec) -> Result<Vec<FiltrationRow>> {
    spec.validate()?;
    let p = spec.p;
    let q: Vec<Rational> = (1..=p).map(|d| Rational::from_integer(binom(p, d))).collect();
    let alpha = spec.alpha.to_rational();
    let z: Vec<Rational> = if spec.z_coeffs.is_empty() {
        vec![Rational::zero()]
    } else {
        spec.z_coeffs.iter().map(|c| c.to_rational() * &alpha).collect()
    };
    let mut qk = vec![Rational::one()];
    for _ in 1..spec.k {
        qk = rpoly_mul(&qk, &q);
    }
    let mut rows = Vec::new();
    for i in -1..=(spec.k as i64 + 1) {
        let (dim, basis) = if i <= 0 {
            (2, vec![[Rational::one(), Rational::zero()], [Rational::zero(), Rational::one()]])
        } else {
            let mut qi = vec![Rational::one()];
            for _ in 0..i {
                qi = rpoly_mul(&qi, &q);
            }
            // images of e1 and e2 in (Q_p[pi]/q^i)^2
            let mut va = rpoly_rem(&[Rational::zero()], &qi);
            va.extend(rpoly_rem(&qk, &qi));
            let mut vb = rpoly_rem(&[-Rational::one()], &qi);
            vb.extend(rpoly_rem(&z, &qi));
            kernel_of_pair(&va, &vb)
        };
        let step = match (dim, basis.first()) {
            (2, _) => FilStep::Full,
            (0, _) => FilStep::Zero,
            (1, Some(v)) if v[1].is_zero() => FilStep::LineE1,
            _ => FilStep::Other,
        };
        rows.push(FiltrationRow {
            i,
            dim,
            basis: basis.iter().map(|v| [rational_to_text(&v[0]), rational_to_text(&v[1])]).collect(),
            step,
            expected: expected_filtration_step(i, spec.k),
        });
    }
    Ok(rows)
}

/// Kernel of (a, b) -> a va + b vb.
fn kernel_of_pair(va: &[Rational], vb: &[Rational]) -> (usize, Vec<[Rational; 2]>) {
    let za = va.iter().all(Zero::is_zero);
    let zb = vb.iter().all(Zero::is_zero);
    let (one, zero) = (Rational::one(), Rational::zero());
    match (za, zb) {
        (true, true) => (2, vec![[one.clone(), zero.clone()], [zero, one]]),
        (true, false) => (1, vec![[one, zero]]),
        (false, true) => (1, vec![[zero, one]]),
        (false, false) => {
            let k = vb.iter().position(|c| !c.is_zero()).expect("nonzero");
            let c = &va[k] / &vb[k];
            // va = c vb  =>  kernel spanned by (1, -c)
            if va.iter().zip(vb).all(|(x, y)| *x == &c * y) {
                (1, vec![[one, -c]])
            } else {
                (0, vec![])
            }
        }
    }
}

/// One entry of an action table: the operator image next to the derived
/// closed form and, when the example displays one, the displayed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRow {
    pub label: String,
    pub oracle: Vec<PiSeries>,
    pub closed: Vec<PiSeries>,
    pub displayed: Option<Vec<PiSeries>>,
    pub matches_closed: bool,
    pub matches_displayed: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTable {
    pub i: i64,
    pub rows: Vec<ActionRow>,
}

impl ActionTable {
    pub fn oracle_ok(&self) -> bool {
        self.rows.iter().all(|r| r.matches_closed)
    }

    pub fn displays_ok(&self) -> bool {
        self.rows.iter().all(|r| r.matches_displayed != Some(false))
    }
}

fn vec_agree(a: &[PiSeries], b: &[PiSeries], t: i64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.agrees(y, t))
}

fn row(label: &str, oracle: Vec<PiSeries>, closed: Vec<PiSeries>, displayed: Option<Vec<PiSeries>>, t: i64) -> ActionRow {
    let matches_closed = vec_agree(&oracle, &closed, t);
    let matches_displayed = displayed.as_ref().map(|d| vec_agree(&oracle, d, t));
    ActionRow {
        label: label.into(),
        oracle,
        closed,
        displayed,
        matches_closed,
        matches_displayed,
    }
}

/// a pi^i nabla_pi on e1 and e2 for phi and gamma, the reduced a nabla on the
/// reduction (nabla = id - phi there), and the bracket of a pi^i nabla with
/// pi^(i+1) nabla acting on e1 and e2 against its closed coefficient.
pub fn wach_homlie_actions(w: &WachModule, a: &PiSeries, i: i64) -> Result<ActionTable> {
    let spec = &w.spec;
    let (p, n, wp, t) = (spec.p, spec.pi_precision, spec.working_precision(), spec.p_precision);
    let m = &w.module;
    let x = a.shift(i);
    let api = a.shift(i - 1);
    let zero = PiSeries::zero(p, n, wp);
    let one = PiSeries::one(p, n, wp);
    let e = [m.basis_vector(0), m.basis_vector(1)];
    let act = |kind: NablaKind, v: &[PiSeries]| -> Result<Vec<PiSeries>> {
        Ok(m.nabla(kind, v)?.iter().map(|c| x.mul(c)).collect())
    };
    let q = q_element(p, n, wp);
    let qk = q.pow(spec.k as i64 - 1)?;
    let az = spec.z_series(wp).scale(&PadicInt::from_rational(p, wp, &spec.alpha.to_rational())?);
    let g = &m.gamma_matrix;
    let mut rows = vec![
        row(
            "phi: a pi^i nabla(e1)",
            act(NablaKind::Phi, &e[0])?,
            vec![api.clone(), api.mul(&qk).neg()],
            Some(vec![zero.clone(), api.mul(&one.sub(&qk))]),
            t,
        ),
        row(
            "phi: a pi^i nabla(e2)",
            act(NablaKind::Phi, &e[1])?,
            vec![api.clone(), api.mul(&one.sub(&az))],
            Some(vec![api.clone(), api.mul(&one.sub(&az))]),
            t,
        ),
        row(
            "gamma: a pi^i nabla(e1)",
            act(NablaKind::Gamma, &e[0])?,
            vec![api.mul(&one.sub(&g[0][0])), api.mul(&g[1][0]).neg()],
            Some(vec![api.mul(&one.sub(&w.g_plus)), zero.clone()]),
            t,
        ),
        row(
            "gamma: a pi^i nabla(e2)",
            act(NablaKind::Gamma, &e[1])?,
            vec![api.mul(&g[0][1]).neg(), api.mul(&one.sub(&g[1][1]))],
            Some(vec![zero.clone(), api.mul(&one.sub(&w.g_minus))]),
            t,
        ),
    ];

    // reduction: scalars a(0), nabla = id - phi
    let red = wach_reduce(m)?;
    let abar = PiSeries::constant(
        a.at_zero().ok_or_else(|| Error::Invalid("a has no constant term".into()))?,
        1,
    );
    let c = |v: i64| PiSeries::constant(PadicInt::from_int(p, wp, v), 1);
    let pk = PiSeries::constant(PadicInt::from_bigint(p, wp, num_traits::pow(BigInt::from(p), spec.k as usize - 1)), 1);
    let ap = PiSeries::constant(PadicInt::from_rational(p, wp, &spec.a_p().to_rational())?, 1);
    let ebar = [red.basis_vector(0), red.basis_vector(1)];
    let red_act = |v: &[PiSeries]| -> Result<Vec<PiSeries>> {
        let fv = red.phi(v)?;
        Ok(v.iter().zip(&fv).map(|(x, y)| abar.mul(&x.sub(y))).collect())
    };
    // the displayed coefficient of e1's image carries q, read at pi = 0 as p
    rows.push(row(
        "reduced phi: a nabla(e1)",
        red_act(&ebar[0])?,
        vec![abar.clone(), abar.mul(&pk).neg()],
        Some(vec![c(0), c(p as i64).mul(&c(1).sub(&pk))]),
        t,
    ));
    rows.push(row(
        "reduced phi: a nabla(e2)",
        red_act(&ebar[1])?,
        vec![abar.clone(), abar.mul(&c(1).sub(&ap))],
        Some(vec![abar.clone(), abar.mul(&c(1).sub(&ap))]),
        t,
    ));

    // bracket action: sigma(x) nabla(y nabla v) - sigma(y) nabla(x nabla v) = c nabla(v)
    let ctx = PiContext::new(p, spec.chi_gamma(), n, t)?;
    let y = one.shift(i + 1);
    for kind in [NablaKind::Phi, NablaKind::Gamma] {
        let br = pi_bracket(a, i, &one, i + 1, kind, &ctx)?;
        let (sx, sy) = (ctx.sigma(kind, &x)?, ctx.sigma(kind, &y)?);
        for (idx, v) in e.iter().enumerate() {
            let dv = m.nabla(kind, v)?;
            let ydv: Vec<PiSeries> = dv.iter().map(|c| y.mul(c)).collect();
            let xdv: Vec<PiSeries> = dv.iter().map(|c| x.mul(c)).collect();
            let l = m.nabla(kind, &ydv)?;
            let r = m.nabla(kind, &xdv)?;
            let oracle: Vec<PiSeries> = l.iter().zip(&r).map(|(u, v)| sx.mul(u).sub(&sy.mul(v))).collect();
            let closed: Vec<PiSeries> = dv.iter().map(|c| br.closed.mul(c)).collect();
            rows.push(row(
                &format!("{kind}: <<a pi^i nabla, pi^(i+1) nabla>>(e{})", idx + 1),
                oracle,
                closed,
                None,
                t,
            ));
        }
    }
    Ok(ActionTable { i, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(p: u64, k: u32, alpha: i64, n: usize) -> WachModule {
        wach_build(&WachFamilySpec::standard(p, k, alpha, n, 20).unwrap()).unwrap()
    }

    /// phi^r(q) = sum_{j<p} (1 + pi)^(j p^r), expanded with integer binomials.
    fn phi_iterate_q_closed(p: u64, r: u32, n: usize, w: i64) -> PiSeries {
        let e = num_traits::pow(BigInt::from(p), r as usize);
        let ints: Vec<PadicInt> = (0..n)
            .map(|d| {
                let mut s = BigInt::zero();
                for j in 0..p {
                    let top = &e * BigInt::from(j);
                    s += num_integer::binomial(top, BigInt::from(d));
                }
                PadicInt::from_bigint(p, w, s)
            })
            .collect();
        PiSeries::from_coeffs(p, 0, ints).unwrap()
    }

    #[test]
    fn iterated_frobenius_of_q_matches_cyclotomic_closed_form() {
        for p in [2u64, 3, 5] {
            let mut cur = q_element(p, 8, 30);
            for r in 0..5 {
                assert!(cur.agrees(&phi_iterate_q_closed(p, r, 8, 30), 30), "p = {p}, r = {r}");
                cur = phi_sub(&cur).unwrap();
            }
        }
    }

    #[test]
    fn products_stabilize_and_intertwine() {
        // phi(lambda-) = lambda+ and q phi(lambda+) = p lambda-
        let w = build(3, 4, 0, 12);
        let t = 20;
        assert!(w.factors_used[0] > 0 && w.factors_used[1] > 0);
        assert!(phi_sub(&w.lambda_minus).unwrap().agrees(&w.lambda_plus, t));
        let q = q_element(3, 12, 60);
        let lhs = q.mul(&phi_sub(&w.lambda_plus).unwrap());
        assert!(lhs.agrees(&w.lambda_minus.scale_p_pow(1), t));
        assert!(w.lambda_plus.coeff(0).unwrap().sub(&PadicInt::one(3, 20)).is_zero_mod(20));
    }

    #[test]
    fn product_cap_is_enforced() {
        assert_eq!(lambda_products(3, 2, 60, 40).map(|r| r.1), Err(Error::ProductNotStabilized(8)));
    }

    #[test]
    fn alpha_zero_commutes_with_diagonal_and_routes_agree() {
        let w = build(3, 4, 0, 12);
        assert_eq!(w.gamma_route, GammaRoute::ProductFormula);
        assert!(w.diagonal_commutes && w.routes_agree);
        // phi(e2) = -e1 exactly
        let e2 = w.module.basis_vector(1);
        let img = w.module.phi(&e2).unwrap();
        assert!(img[0].agrees(&PiSeries::one(3, 12, 60).neg(), 20));
        assert!(img[1].vanishes(20));
    }

    #[test]
    fn nonzero_alpha_needs_the_solved_gamma_matrix() {
        let w = build(3, 4, 3, 12);
        assert_eq!(w.gamma_route, GammaRoute::DegreeSolve);
        assert!(!w.diagonal_commutes);
        let r = w.module.commutation_residual().unwrap();
        assert!(mat_vanishes(&r, 20));
        // the solved matrix is the identity mod pi
        for i in 0..2 {
            for j in 0..2 {
                let c = w.module.gamma_matrix[i][j].coeff(0).unwrap();
                let id = PadicInt::from_int(3, 20, i64::from(i == j));
                assert!(c.sub(&id).is_zero_mod(20));
            }
        }
    }

    #[test]
    fn basis_actions() {
        let w = build(5, 3, 5, 8);
        let m = &w.module;
        let (e1, e2) = (m.basis_vector(0), m.basis_vector(1));
        let f1 = m.phi(&e1).unwrap();
        let qk = q_element(5, 8, 60).pow(2).unwrap();
        assert!(f1[0].vanishes(20) && f1[1].agrees(&qk, 20));
        let f2 = m.phi(&e2).unwrap();
        let az = w.spec.z_series(60).scale(&PadicInt::from_int(5, 60, 5));
        assert!(f2[1].agrees(&az, 20));
    }

    #[test]
    fn reduction_matches_formula() {
        for (p, k, alpha) in [(3u64, 4u32, 0i64), (2, 5, 4), (5, 2, 5)] {
            let w = build(p, k, alpha, 8);
            let rep = reduction_report(&w).unwrap();
            assert!(rep.all_pass(), "{rep}");
        }
    }

    #[test]
    fn filtration_table() {
        for (p, k) in [(2u64, 2u32), (3, 4), (5, 5)] {
            let spec = WachFamilySpec::standard(p, k, p as i64, 8, 20).unwrap();
            let rows = wach_filtration(&spec).unwrap();
            assert_eq!(rows.len(), k as usize + 3);
            for r in &rows {
                assert!(r.matches(), "p={p} k={k} i={} got {:?}", r.i, r.step);
            }
            let at = |i: i64| rows.iter().find(|r| r.i == i).unwrap();
            assert_eq!(at(0).dim, 2);
            assert_eq!(at(k as i64 - 1).basis, vec![["1".to_string(), "0".to_string()]]);
            assert_eq!(at(k as i64).dim, 0);
        }
    }

    #[test]
    fn action_tables() {
        let w = build(3, 3, 0, 10);
        let a = PiSeries::from_ints(3, 10, w.spec.working_precision(), &[1, 1]);
        let table = wach_homlie_actions(&w, &a, 2).unwrap();
        assert!(table.oracle_ok(), "{:?}", table.rows.iter().filter(|r| !r.matches_closed).map(|r| &r.label).collect::<Vec<_>>());
        let bad: Vec<&str> = table
            .rows
            .iter()
            .filter(|r| r.matches_displayed == Some(false))
            .map(|r| r.label.as_str())
            .collect();
        // the displayed images of e1 drop the e1 component
        assert_eq!(bad, vec!["phi: a pi^i nabla(e1)", "reduced phi: a nabla(e1)"]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(WachFamilySpec::standard(4, 3, 0, 8, 20).is_err());
        assert!(WachFamilySpec::standard(3, 1, 0, 8, 20).is_err());
        assert!(WachFamilySpec::standard(3, 3, 1, 8, 20).is_err());
    }

    #[test]
    fn full_grid_commutes_and_reduces() {
        for p in [2u64, 3, 5] {
            for k in 2..=5u32 {
                for alpha in [0, p as i64, (p * p) as i64] {
                    let spec = WachFamilySpec::standard(p, k, alpha, 12, 20).unwrap();
                    let w = wach_build(&spec).unwrap_or_else(|e| panic!("p={p} k={k} a={alpha}: {e}"));
                    assert_eq!(w.routes_agree, alpha == 0, "p={p} k={k} a={alpha}");
                    assert!(reduction_report(&w).unwrap().all_pass());
                    assert!(wach_filtration(&spec).unwrap().iter().all(FiltrationRow::matches));
                }
            }
        }
    }
}
