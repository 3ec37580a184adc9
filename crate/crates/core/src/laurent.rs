//! Laurent polynomials over Q(zeta) and monomial endomorphisms acting on them.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::CycloNumber;

/// Exponent vector k, standing for the monomial e_1^k_1 ... e_n^k_n.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zero(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        ExponentVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Row-vector action k -> k * Sigma.
    pub fn times_matrix(&self, m: &[Vec<i64>]) -> Self {
        let n = m.first().map_or(0, Vec::len);
        ExponentVector((0..n).map(|l| self.0.iter().zip(m).map(|(k, row)| k * row[l]).sum()).collect())
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|k| k.abs()).sum()
    }
}

/// Sparse element of Q(zeta)[e_1^{+-1}, ..., e_n^{+-1}]; zero terms are never stored.
#[derive(Clone)]
pub struct LaurentPoly {
    nvars: usize,
    terms: HashMap<ExponentVector, CycloNumber>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: HashMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: CycloNumber) -> Self {
        Self::monomial(c, ExponentVector::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, CycloNumber::one(1))
    }

    pub fn monomial(c: CycloNumber, k: ExponentVector) -> Self {
        let mut p = Self::zero(k.len());
        if !c.is_zero() {
            p.terms.insert(k, c);
        }
        p
    }

    /// The variable e_i (zero-based index).
    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(CycloNumber::one(1), ExponentVector::unit(nvars, i))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (ExponentVector, CycloNumber)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (k, c) in terms {
            if k.len() != nvars {
                return Err(Error::ArityMismatch { left: nvars, right: k.len() });
            }
            p.add_term(k, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &ExponentVector) -> Option<&CycloNumber> {
        self.terms.get(k)
    }

    /// Terms in lexicographic exponent order.
    pub fn sorted_terms(&self) -> Vec<(&ExponentVector, &CycloNumber)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &CycloNumber)> {
        self.terms.iter()
    }

    /// The single term, when the polynomial is a nonzero monomial.
    pub fn as_monomial(&self) -> Option<(&ExponentVector, &CycloNumber)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    fn add_term(&mut self, k: ExponentVector, c: CycloNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&k) {
            Some(old) => {
                let s = old.add(&c);
                if !s.is_zero() {
                    self.terms.insert(k, s);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::ArityMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka.add(kb), ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        let mut out = Self::zero(self.nvars);
        for (k, a) in &self.terms {
            out.add_term(k.clone(), a.mul(c));
        }
        out
    }

    pub fn shift(&self, k: &ExponentVector) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.add(k), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self).expect("same arity");
        }
        acc
    }

    /// Exact quotient by a nonzero monomial.
    pub fn div_monomial(&self, k: &ExponentVector, c: &CycloNumber) -> Result<Self> {
        let inv = c.inv()?;
        Ok(self.shift(&ExponentVector(k.0.iter().map(|x| -x).collect())).scale(&inv))
    }

    /// Componentwise minimum of the exponents present (None for zero).
    pub fn min_exponents(&self) -> Option<ExponentVector> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, k| ExponentVector(acc.0.iter().zip(&k.0).map(|(a, b)| *a.min(b)).collect())))
    }

    pub fn max_exponents(&self) -> Option<ExponentVector> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, k| ExponentVector(acc.0.iter().zip(&k.0).map(|(a, b)| *a.max(b)).collect())))
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.sorted_terms()
            .iter()
            .map(|(k, c)| {
                let ks: Vec<String> = k.0.iter().map(i64::to_string).collect();
                format!("{} * e^[{}]", c.to_text(), ks.join(","))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn from_text(s: &str, nvars: usize) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero(nvars));
        }
        let bad = |t: &str| Error::Parse(format!("bad Laurent term {t:?}"));
        let mut terms = Vec::new();
        for t in s.split(" + ") {
            let (c, e) = t.rsplit_once(" * e^").ok_or_else(|| bad(t))?;
            let inner = e.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(|| bad(t))?;
            let k = if inner.trim().is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| bad(t)))
                    .collect::<Result<Vec<_>>>()?
            };
            terms.push((ExponentVector(k), CycloNumber::from_text(c)?));
        }
        Self::from_terms(nvars, terms)
    }
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars
            && self.terms.len() == other.terms.len()
            && self.terms.iter().all(|(k, c)| other.terms.get(k) == Some(c))
    }
}

impl Eq for LaurentPoly {}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// sigma(e_i) = zeta_i * e^(row i of Sigma), with scalars moved by zeta -> zeta^j.
#[derive(Clone, PartialEq, Eq)]
pub struct MonomialEndo {
    matrix: Vec<Vec<i64>>,
    zeta: Vec<CycloNumber>,
    coeff_galois: i64,
}

/// Serialized form of a [`MonomialEndo`] whose multipliers are roots of unity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndoSpec {
    pub matrix: Vec<Vec<i64>>,
    pub zeta_orders: Vec<u64>,
    pub zeta_powers: Vec<i64>,
    pub coeff_galois: i64,
}

impl MonomialEndo {
    pub fn new(matrix: Vec<Vec<i64>>, zeta: Vec<CycloNumber>, coeff_galois: i64) -> Result<Self> {
        let n = matrix.len();
        if let Some(row) = matrix.iter().find(|r| r.len() != n) {
            return Err(Error::ArityMismatch { left: n, right: row.len() });
        }
        if zeta.len() != n {
            return Err(Error::ArityMismatch { left: n, right: zeta.len() });
        }
        if zeta.iter().any(CycloNumber::is_zero) {
            return Err(Error::Invalid("monomial multipliers must be nonzero".into()));
        }
        Ok(MonomialEndo {
            matrix,
            zeta,
            coeff_galois,
        })
    }

    /// Multipliers given as zeta_{orders[i]}^{powers[i]}.
    pub fn from_roots(matrix: Vec<Vec<i64>>, orders: &[u64], powers: &[i64], coeff_galois: i64) -> Result<Self> {
        if orders.len() != powers.len() {
            return Err(Error::ArityMismatch {
                left: orders.len(),
                right: powers.len(),
            });
        }
        if orders.contains(&0) {
            return Err(Error::Invalid("root-of-unity order must be positive".into()));
        }
        let zeta = orders.iter().zip(powers).map(|(&m, &k)| CycloNumber::root_of_unity(m, k)).collect();
        Self::new(matrix, zeta, coeff_galois)
    }

    pub fn from_spec(spec: &EndoSpec) -> Result<Self> {
        Self::from_roots(spec.matrix.clone(), &spec.zeta_orders, &spec.zeta_powers, spec.coeff_galois)
    }

    /// None when a multiplier is not a root of unity.
    pub fn to_spec(&self) -> Option<EndoSpec> {
        let roots: Option<Vec<(u64, u64)>> = self.zeta.iter().map(CycloNumber::as_root_of_unity).collect();
        let roots = roots?;
        Some(EndoSpec {
            matrix: self.matrix.clone(),
            zeta_orders: roots.iter().map(|r| r.0).collect(),
            zeta_powers: roots.iter().map(|r| r.1 as i64).collect(),
            coeff_galois: self.coeff_galois,
        })
    }

    pub fn identity(n: usize) -> Self {
        let matrix = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        MonomialEndo {
            matrix,
            zeta: vec![CycloNumber::one(1); n],
            coeff_galois: 1,
        }
    }

    pub fn nvars(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn zeta(&self) -> &[CycloNumber] {
        &self.zeta
    }

    pub fn coeff_galois(&self) -> i64 {
        self.coeff_galois
    }

    pub fn is_identity(&self) -> bool {
        self.coeff_galois == 1
            && self.matrix == Self::identity(self.nvars()).matrix
            && self.zeta.iter().all(CycloNumber::is_one)
    }

    pub fn determinant(&self) -> i64 {
        det(&self.matrix)
    }

    /// Scalar multiplier of sigma(e^k): prod zeta_i^k_i.
    pub fn multiplier(&self, k: &ExponentVector) -> Result<CycloNumber> {
        let mut acc = CycloNumber::one(1);
        for (z, &e) in self.zeta.iter().zip(&k.0) {
            if e != 0 {
                acc = acc.mul(&z.pow(e)?);
            }
        }
        Ok(acc)
    }

    pub fn apply_scalar(&self, c: &CycloNumber) -> Result<CycloNumber> {
        if self.coeff_galois == 1 {
            Ok(c.clone())
        } else {
            c.galois(self.coeff_galois)
        }
    }

    pub fn apply(&self, f: &LaurentPoly) -> Result<LaurentPoly> {
        if f.nvars() != self.nvars() {
            return Err(Error::ArityMismatch {
                left: self.nvars(),
                right: f.nvars(),
            });
        }
        let mut out = LaurentPoly::zero(f.nvars());
        for (k, c) in f.terms() {
            let coeff = self.apply_scalar(c)?.mul(&self.multiplier(k)?);
            out.add_term(k.times_matrix(&self.matrix), coeff);
        }
        Ok(out)
    }

    /// self o other: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.nvars() != other.nvars() {
            return Err(Error::ArityMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        let n = self.nvars();
        let matrix = mat_mul(&other.matrix, &self.matrix);
        let mut zeta = Vec::with_capacity(n);
        for i in 0..n {
            let row = ExponentVector(other.matrix[i].clone());
            zeta.push(self.apply_scalar(&other.zeta[i])?.mul(&self.multiplier(&row)?));
        }
        Self::new(matrix, zeta, self.coeff_galois * other.coeff_galois)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::identity(self.nvars());
        for _ in 0..e {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Inverse automorphism; `modulus` bounds the orders of all scalars so that
    /// the Galois index can be inverted.
    pub fn inverse(&self, modulus: u64) -> Result<Self> {
        let d = self.determinant();
        if d.abs() != 1 {
            return Err(Error::Invalid(format!("determinant {d} is not a unit")));
        }
        let jinv = {
            let g = self.coeff_galois.extended_gcd(&(modulus as i64));
            if g.gcd != 1 {
                return Err(Error::InvalidGaloisIndex {
                    j: self.coeff_galois,
                    m: modulus,
                });
            }
            g.x.rem_euclid(modulus as i64)
        };
        let inv = int_inverse(&self.matrix, d);
        let scalar_inv = MonomialEndo {
            matrix: MonomialEndo::identity(self.nvars()).matrix,
            zeta: vec![CycloNumber::one(1); self.nvars()],
            coeff_galois: jinv,
        };
        let mut zeta = Vec::with_capacity(self.nvars());
        for row in &inv {
            let m = self.multiplier(&ExponentVector(row.clone()))?;
            zeta.push(scalar_inv.apply_scalar(&m.inv()?)?);
        }
        Self::new(inv, zeta, jinv)
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| format!("[{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        let z: Vec<String> = self.zeta.iter().map(CycloNumber::to_text).collect();
        format!("matrix=[{}] zeta=[{}] galois={}", rows.join(","), z.join(";"), self.coeff_galois)
    }
}

impl fmt::Debug for MonomialEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

pub fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| *x).collect())
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

/// Integer inverse of a unimodular matrix via the adjugate.
fn int_inverse(m: &[Vec<i64>], d: i64) -> Vec<Vec<i64>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![d]];
    }
    let mut inv = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != i).map(|(_, x)| *x).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = s * det(&minor) * d;
        }
    }
    inv
}
