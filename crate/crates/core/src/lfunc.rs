//! Dirichlet characters, generalized Bernoulli numbers, the formal L-symbol
//! algebra with its hom-Lie bracket, and special values at s = 1 - n.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{CycloNumber, Rational};

/// (Z/m)^x as a product of cyclic groups with chosen generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroup {
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
    /// Exponent of the group; every character takes values in mu_exponent.
    pub exponent: u64,
    dlog: Vec<Option<Vec<u64>>>,
}

fn factor(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut k = 0;
            while m.is_multiple_of(p) {
                m /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

fn mult_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 % m {
        x = mul_mod(x, a, m);
        k += 1;
    }
    k
}

/// x = g mod q, x = 1 mod m/q.
fn crt_lift(g: u64, q: u64, m: u64) -> u64 {
    let rest = m / q;
    (0..rest).map(|t| g + t * q).find(|x| x % rest == 1 % rest).expect("coprime moduli")
}

impl UnitGroup {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("modulus must be positive".into()));
        }
        let mut gens = Vec::new();
        for (p, k) in factor(m) {
            let q = p.pow(k);
            if p == 2 {
                match k {
                    1 => {}
                    2 => gens.push((3 % q, 2u64, q)),
                    _ => {
                        gens.push((q - 1, 2, q));
                        gens.push((5, q / 4, q));
                    }
                }
            } else {
                let phi = q / p * (p - 1);
                let g = (2..q).find(|&g| g % p != 0 && mult_order(g, q) == phi).expect("odd prime powers are cyclic");
                gens.push((g, phi, q));
            }
        }
        let generators: Vec<u64> = gens.iter().map(|&(g, _, q)| crt_lift(g, q, m)).collect();
        let orders: Vec<u64> = gens.iter().map(|&(_, o, _)| o).collect();
        let exponent = orders.iter().fold(1u64, |a, &b| a.lcm(&b));
        let mut dlog = vec![None; m as usize];
        let mut digits = vec![0u64; orders.len()];
        loop {
            let a = generators.iter().zip(&digits).fold(1 % m, |acc, (&g, &e)| mul_mod(acc, pow_mod(g, e, m), m));
            dlog[a as usize] = Some(digits.clone());
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < orders[i] {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        Ok(UnitGroup {
            modulus: m,
            generators,
            orders,
            exponent,
            dlog,
        })
    }

    pub fn size(&self) -> u64 {
        self.orders.iter().product()
    }

    /// Exponents of a in the generators, None for non-units.
    pub fn log(&self, a: i64) -> Option<&[u64]> {
        let r = a.rem_euclid(self.modulus as i64) as usize;
        self.dlog[r].as_deref()
    }
}

/// A character of (Z/m)^x extended by 0; chi(a) = zeta_e^{values[a mod m]}
/// with e the exponent of the unit group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirichletCharacter {
    modulus: u64,
    exponent: u64,
    /// t_i with chi(g_i) = zeta_{ord_i}^{t_i}.
    images: Vec<u64>,
    values: Vec<Option<u64>>,
}

impl DirichletCharacter {
    pub fn from_images(group: &UnitGroup, images: &[u64]) -> Result<Self> {
        if images.len() != group.orders.len() {
            return Err(Error::ArityMismatch {
                left: group.orders.len(),
                right: images.len(),
            });
        }
        let e = group.exponent;
        let images: Vec<u64> = images.iter().zip(&group.orders).map(|(t, o)| t % o).collect();
        let values = (0..group.modulus as i64)
            .map(|a| {
                group.log(a).map(|digits| {
                    digits
                        .iter()
                        .zip(&images)
                        .zip(&group.orders)
                        .map(|((d, t), o)| d * t % o * (e / o))
                        .sum::<u64>()
                        % e
                })
            })
            .collect();
        Ok(DirichletCharacter {
            modulus: group.modulus,
            exponent: e,
            images,
            values,
        })
    }

    pub fn trivial(m: u64) -> Result<Self> {
        let g = UnitGroup::new(m)?;
        Self::from_images(&g, &vec![0; g.orders.len()])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The exponent e of (Z/m)^x; values lie in Q(zeta_e).
    pub fn field_order(&self) -> u64 {
        self.exponent
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    /// Exponent k with chi(a) = zeta_e^k, None when gcd(a, m) > 1.
    pub fn value_exponent(&self, a: i64) -> Option<u64> {
        self.values[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, a: i64) -> CycloNumber {
        match self.value_exponent(a) {
            Some(k) => CycloNumber::root_of_unity(self.exponent, k as i64),
            None => CycloNumber::zero(self.exponent),
        }
    }

    pub fn order(&self) -> u64 {
        let g = self.values.iter().flatten().fold(self.exponent, |acc, &k| acc.gcd(&k));
        self.exponent / g
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_even(&self) -> bool {
        self.value_exponent(-1) == Some(0)
    }

    pub fn label(&self) -> String {
        let t: Vec<String> = self.images.iter().map(u64::to_string).collect();
        format!("chi{}[{}]", self.modulus, t.join(","))
    }
}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Serialized character: the modulus, the canonical generators and their images t_i.
#[derive(Serialize, Deserialize)]
struct CharacterSpec {
    modulus: u64,
    generators: Vec<u64>,
    images: Vec<u64>,
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let g = UnitGroup::new(self.modulus).map_err(serde::ser::Error::custom)?;
        CharacterSpec {
            modulus: self.modulus,
            generators: g.generators,
            images: self.images.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirichletCharacter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = CharacterSpec::deserialize(d)?;
        let g = UnitGroup::new(spec.modulus).map_err(serde::de::Error::custom)?;
        if spec.generators != g.generators {
            return Err(serde::de::Error::custom("generators differ from the canonical choice"));
        }
        DirichletCharacter::from_images(&g, &spec.images).map_err(serde::de::Error::custom)
    }
}

/// All phi(m) characters mod m, trivial first, then by generator images.
pub fn enumerate_characters(m: u64) -> Result<Vec<DirichletCharacter>> {
    let g = UnitGroup::new(m)?;
    let mut out = Vec::new();
    let mut t = vec![0u64; g.orders.len()];
    loop {
        out.push(DirichletCharacter::from_images(&g, &t)?);
        let mut i = t.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            t[i] += 1;
            if t[i] < g.orders[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

/// sigma_j o chi with sigma_j(zeta) = zeta^j.
pub fn galois_twist(chi: &DirichletCharacter, j: i64) -> Result<DirichletCharacter> {
    let ord = chi.order();
    if (j.rem_euclid(ord as i64) as u64).gcd(&ord) != 1 {
        return Err(Error::InvalidGaloisIndex { j, m: ord });
    }
    let e = chi.exponent;
    let jj = j.rem_euclid(e as i64) as u64;
    let g = UnitGroup::new(chi.modulus)?;
    let images: Vec<u64> = chi.images.iter().zip(&g.orders).map(|(t, o)| t * (jj % o) % o).collect();
    DirichletCharacter::from_images(&g, &images)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliValue {
    pub n: u32,
    pub chi: DirichletCharacter,
    pub value: CycloNumber,
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Coefficients h_0..h_order of t / (e^{ft} - 1).
fn inverse_exp_series(f: u64, order: usize) -> Vec<Rational> {
    let d: Vec<Rational> = (0..=order)
        .map(|k| Rational::new(BigInt::from(f).pow(k as u32 + 1), factorial(k as u32 + 1)))
        .collect();
    let mut h: Vec<Rational> = Vec::with_capacity(order + 1);
    h.push(d[0].recip());
    for k in 1..=order {
        let s: Rational = (1..=k).map(|i| &d[i] * &h[k - i]).sum();
        h.push(-s / &d[0]);
    }
    h
}

/// Coefficients s_0..s_order of sum_{a=1}^{f} chi(a) e^{at}.
fn character_exp_series(chi: &DirichletCharacter, order: usize) -> Vec<CycloNumber> {
    let f = chi.modulus;
    let e = chi.exponent as usize;
    (0..=order)
        .map(|k| {
            let mut by_class = vec![BigInt::zero(); e];
            for a in 1..=f {
                if let Some(r) = chi.value_exponent(a as i64) {
                    by_class[r as usize] += BigInt::from(a).pow(k as u32);
                }
            }
            let kf = factorial(k as u32);
            by_class
                .into_iter()
                .enumerate()
                .filter(|(_, s)| !s.is_zero())
                .fold(CycloNumber::zero(chi.exponent), |acc, (r, s)| {
                    acc.add(&CycloNumber::root_of_unity(chi.exponent, r as i64).scale(&Rational::new(s, kf.clone())))
                })
        })
        .collect()
}

/// n! [t^n] of the product series, both factors expanded to `order` >= n.
pub fn gen_bernoulli_truncated(n: u32, chi: &DirichletCharacter, order: usize) -> Result<CycloNumber> {
    if n == 0 {
        return Err(Error::Invalid("Bernoulli index must be at least 1".into()));
    }
    if order < n as usize {
        return Err(Error::PrecisionLoss(format!("order {order} below index {n}")));
    }
    let h = inverse_exp_series(chi.modulus, order);
    let s = character_exp_series(chi, order);
    let mut prod = vec![CycloNumber::zero(chi.exponent); order + 1];
    for (i, si) in s.iter().enumerate() {
        for (j, hj) in h.iter().enumerate().take(order + 1 - i) {
            prod[i + j] = prod[i + j].add(&si.scale(hj));
        }
    }
    Ok(prod[n as usize].scale(&Rational::from_integer(factorial(n))))
}

/// B_{n,chi} = n! [t^n] sum_{a=1}^{f} chi(a) t e^{at} / (e^{ft} - 1), f = modulus.
pub fn gen_bernoulli(n: u32, chi: &DirichletCharacter) -> Result<BernoulliValue> {
    Ok(BernoulliValue {
        n,
        chi: chi.clone(),
        value: gen_bernoulli_truncated(n, chi, n as usize)?,
    })
}

/// Memo table for B_{n,chi}; concurrent readers, one writer at a time.
#[derive(Default, Clone)]
pub struct BernoulliCache {
    table: Arc<RwLock<HashMap<(u32, DirichletCharacter), CycloNumber>>>,
}

impl BernoulliCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, n: u32, chi: &DirichletCharacter) -> Result<CycloNumber> {
        let key = (n, chi.clone());
        if let Some(v) = self.table.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = gen_bernoulli(n, chi)?.value;
        self.table.write().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// L(chi, 1 - n) = -B_{n,chi} / n.
    pub fn l_special(&self, chi: &DirichletCharacter, n: u32) -> Result<CycloNumber> {
        Ok(self.get(n, chi)?.scale(&Rational::new(BigInt::from(-1), BigInt::from(n))))
    }
}

pub fn l_special(chi: &DirichletCharacter, n: u32) -> Result<CycloNumber> {
    BernoulliCache::new().l_special(chi, n)
}

fn check_sigma(chi: &DirichletCharacter, theta: &DirichletCharacter, j: i64) -> Result<()> {
    if chi.modulus != theta.modulus {
        return Err(Error::ContextMismatch);
    }
    let e = chi.exponent;
    if (j.rem_euclid(e as i64) as u64).gcd(&e) != 1 {
        return Err(Error::InvalidGaloisIndex { j, m: e });
    }
    Ok(())
}

/// (B_{n,sigma chi} B_{n,theta} - B_{n,sigma theta} B_{n,chi}) / n^2, the value
/// at s = 1 - n of the bracket of L(chi) delta and L(theta) delta.
pub fn l_special_bracket_cached(cache: &BernoulliCache, chi: &DirichletCharacter, theta: &DirichletCharacter, n: u32, j: i64) -> Result<CycloNumber> {
    check_sigma(chi, theta, j)?;
    let schi = galois_twist(chi, j)?;
    let stheta = galois_twist(theta, j)?;
    let num = cache.get(n, &schi)?.mul(&cache.get(n, theta)?).sub(&cache.get(n, &stheta)?.mul(&cache.get(n, chi)?));
    let n2 = BigInt::from(n) * BigInt::from(n);
    Ok(num.scale(&Rational::new(BigInt::one(), n2)))
}

pub fn l_special_bracket(chi: &DirichletCharacter, theta: &DirichletCharacter, n: u32, j: i64) -> Result<CycloNumber> {
    l_special_bracket_cached(&BernoulliCache::new(), chi, theta, n, j)
}

/// Formal integer combination of characters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VirtualCharacter {
    pub coeffs: BTreeMap<DirichletCharacter, i64>,
}

impl VirtualCharacter {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn of(chi: &DirichletCharacter) -> Self {
        Self::zero().plus(chi, 1)
    }

    pub fn plus(mut self, chi: &DirichletCharacter, k: i64) -> Self {
        let v = self.coeffs.get(chi).copied().unwrap_or(0) + k;
        if v == 0 {
            self.coeffs.remove(chi);
        } else {
            self.coeffs.insert(chi.clone(), v);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        other.coeffs.iter().fold(self.clone(), |acc, (c, k)| acc.plus(c, *k))
    }

    pub fn neg(&self) -> Self {
        VirtualCharacter {
            coeffs: self.coeffs.iter().map(|(c, k)| (c.clone(), -k)).collect(),
        }
    }

    pub fn twist(&self, j: i64) -> Result<Self> {
        let mut out = Self::zero();
        for (c, k) in &self.coeffs {
            out = out.plus(&galois_twist(c, j)?, *k);
        }
        Ok(out)
    }

    pub fn label(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs.iter().map(|(c, k)| format!("{k}*{c}")).collect::<Vec<_>>().join("+")
    }
}

/// Finite sum of c * L_xi in the monoid algebra with L_xi L_eta = L_{xi+eta}.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LSymbolElement {
    pub terms: BTreeMap<VirtualCharacter, CycloNumber>,
}

impl LSymbolElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn symbol(c: CycloNumber, xi: VirtualCharacter) -> Self {
        Self::zero().with_term(xi, c)
    }

    fn with_term(mut self, xi: VirtualCharacter, c: CycloNumber) -> Self {
        let s = match self.terms.remove(&xi) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !s.is_zero() {
            self.terms.insert(xi, s);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        other.terms.iter().fold(self.clone(), |acc, (xi, c)| acc.with_term(xi.clone(), c.clone()))
    }

    pub fn neg(&self) -> Self {
        LSymbolElement {
            terms: self.terms.iter().map(|(xi, c)| (xi.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (x, a) in &self.terms {
            for (y, b) in &other.terms {
                out = out.with_term(x.add(y), a.mul(b));
            }
        }
        out
    }

    /// sigma acts on coefficients by zeta -> zeta^j and on indices by chi -> sigma o chi.
    pub fn sigma(&self, j: i64) -> Result<Self> {
        let mut out = Self::zero();
        for (xi, c) in &self.terms {
            out = out.with_term(xi.twist(j)?, c.galois(j)?);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms.iter().map(|(xi, c)| format!("{c} * L[{}]", xi.label())).collect::<Vec<_>>().join(" + ")
    }
}

/// <<x delta, y delta>> = (sigma(x) y - sigma(y) x) delta for delta = id - sigma.
pub fn lsym_hl_bracket(x: &LSymbolElement, y: &LSymbolElement, j: i64) -> Result<LSymbolElement> {
    Ok(x.sigma(j)?.mul(y).sub(&y.sigma(j)?.mul(x)))
}

/// The same bracket through sigma(x) d(y) - sigma(y) d(x) with d = id - sigma.
pub fn lsym_bracket_via_derivation(x: &LSymbolElement, y: &LSymbolElement, j: i64) -> Result<LSymbolElement> {
    let (sx, sy) = (x.sigma(j)?, y.sigma(j)?);
    let dx = x.sub(&sx);
    let dy = y.sub(&sy);
    Ok(sx.mul(&dy).sub(&sy.mul(&dx)))
}

/// <<p L_chi delta, q L_theta delta>> = (p^s q L_{s chi + theta} - q^s p L_{s theta + chi}) delta.
pub fn lsym_bracket(p: &CycloNumber, chi: &VirtualCharacter, q: &CycloNumber, theta: &VirtualCharacter, j: i64) -> Result<LSymbolElement> {
    let x = LSymbolElement::symbol(p.clone(), chi.clone());
    let y = LSymbolElement::symbol(q.clone(), theta.clone());
    lsym_hl_bracket(&x, &y, j)
}

/// Evaluates at s = 1 - n: L_xi -> prod L(chi_i, 1 - n)^{k_i}.
pub fn specialize(x: &LSymbolElement, n: u32, cache: &BernoulliCache) -> Result<CycloNumber> {
    let mut acc = CycloNumber::zero(1);
    for (xi, c) in &x.terms {
        let mut term = c.clone();
        for (chi, k) in &xi.coeffs {
            term = term.mul(&cache.l_special(chi, n)?.pow(*k)?);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}
