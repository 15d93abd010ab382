//! Arithmetic in `F_q` and `F_{q^f}`.
//!
//! Elements are dense coefficient vectors over `F_q` reduced modulo a monic
//! irreducible polynomial. The prime field is the `f = 1` case of the same
//! type with modulus `X`. Construction is deterministic: the modulus is the
//! first monic irreducible polynomial in the enumeration order described on
//! [`build_extension`], and the generator is the first primitive element in
//! the same order, so any two runs produce identical fields.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{self, add_mod, inv_mod, is_prime, mul_mod, sub_mod};
use crate::cyclotomy::phi_homogeneous;
use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 64;

/// An element of `F_{q^f}`: `f` coefficients over `F_q`, constant term first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// The value as an element of the prime field, if it lies there.
    pub fn as_prime_field(&self) -> Option<u64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_prime_field() {
            return write!(f, "{c}");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "X")?,
                (1, _) => write!(f, "{c}*X")?,
                (_, 1) => write!(f, "X^{i}")?,
                _ => write!(f, "{c}*X^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.coeffs.len() == 1 {
            s.serialize_u64(self.coeffs[0])
        } else {
            self.coeffs.serialize(s)
        }
    }
}

/// `F_{q^f}` presented as `F_q[X] / (modulus)`.
pub struct ExtField {
    q: u64,
    degree: usize,
    modulus: Vec<u64>,
    card_minus_1: BigUint,
    factorization: Vec<(BigUint, u32)>,
    generator: OnceLock<FieldElement>,
}

impl fmt::Debug for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtField")
            .field("q", &self.q)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Serializable description of a constructed field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldSummary {
    pub q: u64,
    pub degree: usize,
    /// Monic modulus coefficients, constant term first.
    pub modulus: Vec<u64>,
    #[serde(serialize_with = "crate::serde_decimal::serialize")]
    pub card_minus_1: BigUint,
}

/// Build `F_{q^f}`.
///
/// The modulus is the first monic irreducible polynomial of degree `f`
/// when candidates `X^f + c_{f-1} X^{f-1} + ... + c_0` are enumerated by
/// the integer `c_0 + c_1 q + ... + c_{f-1} q^{f-1}` (so `c_0` varies
/// fastest). For `f = 1` this gives the modulus `X`.
pub fn build_extension(q: u64, f: usize) -> Result<ExtField> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q.to_string()));
    }
    if f == 0 || f > MAX_DEGREE {
        return Err(Error::InvalidInput(format!(
            "extension degree {f} outside 1..={MAX_DEGREE}"
        )));
    }
    let modulus = if f == 1 {
        vec![0, 1]
    } else {
        let mut index: u128 = 0;
        loop {
            let candidate = monic_from_index(q, f, index);
            if is_irreducible(q, &candidate) {
                break candidate;
            }
            index += 1;
        }
    };
    ExtField::with_modulus(q, modulus)
}

fn monic_from_index(q: u64, f: usize, mut index: u128) -> Vec<u64> {
    let mut coeffs = vec![0u64; f + 1];
    for c in coeffs.iter_mut().take(f) {
        *c = (index % q as u128) as u64;
        index /= q as u128;
    }
    coeffs[f] = 1;
    coeffs
}

/// Ben-Or's test: `gcd(X^(q^i) - X, g) = 1` for `i = 1..f/2`, stopping at the first
/// common factor (most reducible candidates have a small-degree factor).
pub fn is_irreducible(q: u64, modulus: &[u64]) -> bool {
    let f = modulus.len() - 1;
    if f == 0 || modulus[f] != 1 {
        return false;
    }
    if f == 1 {
        return true;
    }
    if modulus[0] == 0 {
        return false;
    }
    let ring = PolyRing { q, modulus };
    let mut h = vec![0u64; f];
    h[1] = 1;
    let g = trim(modulus.to_vec());
    for _ in 1..=f / 2 {
        // h = X^(q^i) mod g
        h = ring.pow_u64(&h, q);
        let mut diff = h.clone();
        diff[1] = sub_mod(diff[1], 1, q);
        let diff = trim(diff);
        if diff.len() == 1 && diff[0] == 0 {
            return false;
        }
        if poly_gcd(q, g.clone(), diff).len() > 1 {
            return false;
        }
    }
    true
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_rem(q: u64, mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], q).expect("nonzero leading coefficient");
    while a.len() > db && !(a.len() == 1 && a[0] == 0) {
        let da = a.len() - 1;
        let c = mul_mod(a[da], lead_inv, q);
        if c != 0 {
            for (ai, &bi) in a[da - db..].iter_mut().zip(b) {
                *ai = sub_mod(*ai, mul_mod(c, bi, q), q);
            }
        }
        a.pop();
        if a.is_empty() {
            a.push(0);
        }
    }
    trim(a)
}

fn poly_gcd(q: u64, mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(q, a, &b);
        a = b;
        b = r;
    }
    a
}

/// Arithmetic in `F_q[X]` modulo a monic polynomial (not necessarily irreducible).
struct PolyRing<'a> {
    q: u64,
    modulus: &'a [u64],
}

impl PolyRing<'_> {
    fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let q = self.q;
        let f = self.degree();
        if f == 1 {
            return vec![mul_mod(a[0], b[0], q)];
        }
        let mut prod = vec![0u128; 2 * f - 1];
        let qq = q as u128;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                // Each term is below q^2 < 2^126; fold before the sum can overflow.
                let t = prod[i + j] + ai as u128 * bj as u128;
                prod[i + j] = if t >= qq * qq { t % qq } else { t };
            }
        }
        let mut red: Vec<u64> = prod.iter().map(|&c| (c % qq) as u64).collect();
        for k in (f..red.len()).rev() {
            let c = red[k];
            if c == 0 {
                continue;
            }
            for i in 0..f {
                let idx = k - f + i;
                red[idx] = sub_mod(red[idx], mul_mod(c, self.modulus[i], q), q);
            }
        }
        red.truncate(f);
        red
    }

    fn pow_u64(&self, base: &[u64], mut exp: u64) -> Vec<u64> {
        let mut acc = self.one();
        let mut b = base.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    fn pow_big(&self, base: &[u64], exp: &BigUint) -> Vec<u64> {
        let bits = exp.bits();
        let mut acc = self.one();
        for i in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if exp.bit(i) {
                acc = self.mul(&acc, base);
            }
        }
        acc
    }

    fn one(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.degree()];
        v[0] = 1;
        v
    }
}

impl ExtField {
    /// Build a field from an explicit monic modulus, verifying irreducibility.
    pub fn with_modulus(q: u64, modulus: Vec<u64>) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q.to_string()));
        }
        if modulus.len() < 2 || modulus.iter().any(|&c| c >= q) {
            return Err(Error::InvalidInput(
                "modulus must be reduced of degree >= 1".into(),
            ));
        }
        if !is_irreducible(q, &modulus) {
            return Err(Error::InvalidInput("modulus is not irreducible".into()));
        }
        let degree = modulus.len() - 1;
        let card_minus_1 = BigUint::from(q).pow(degree as u32) - 1u32;
        // q^f - 1 = prod_{e | f} Phi_e(q); factor the pieces separately.
        let mut factorization: Vec<(BigUint, u32)> = Vec::new();
        for e in arith::divisors(degree as u64) {
            let piece = phi_homogeneous(e, &BigInt::from(q), &BigInt::one())?;
            let piece = piece.to_biguint().expect("Phi_e(q) > 0 for q >= 2");
            arith::merge_factorizations(&mut factorization, &arith::factor_big(&piece));
        }
        let back = factorization
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        if back != card_minus_1 {
            return Err(Error::Inconsistent(
                "factorization of q^f - 1 does not multiply back".into(),
            ));
        }
        Ok(Self {
            q,
            degree,
            modulus,
            card_minus_1,
            factorization,
            generator: OnceLock::new(),
        })
    }

    fn ring(&self) -> PolyRing<'_> {
        PolyRing {
            q: self.q,
            modulus: &self.modulus,
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// `q^f - 1`.
    pub fn card_minus_1(&self) -> &BigUint {
        &self.card_minus_1
    }

    pub fn factorization(&self) -> &[(BigUint, u32)] {
        &self.factorization
    }

    pub fn summary(&self) -> FieldSummary {
        FieldSummary {
            q: self.q,
            degree: self.degree,
            modulus: self.modulus.clone(),
            card_minus_1: self.card_minus_1.clone(),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.degree],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_u64(1)
    }

    /// Image of a rational integer in the prime subfield.
    pub fn from_u64(&self, a: u64) -> FieldElement {
        let mut coeffs = vec![0; self.degree];
        coeffs[0] = a % self.q;
        FieldElement { coeffs }
    }

    pub fn from_i64(&self, a: i64) -> FieldElement {
        self.from_u64(arith::reduce_i128(a as i128, self.q))
    }

    /// Element from coefficients, constant term first; missing ones are zero.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.degree {
            return Err(Error::InvalidInput(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.degree
            )));
        }
        let mut c = vec![0; self.degree];
        for (dst, &src) in c.iter_mut().zip(coeffs) {
            *dst = src % self.q;
        }
        Ok(FieldElement { coeffs: c })
    }

    /// The element whose base-`q` digits (constant term least significant) spell `index`.
    pub fn element_from_index(&self, mut index: u128) -> FieldElement {
        let mut coeffs = vec![0; self.degree];
        for c in coeffs.iter_mut() {
            *c = (index % self.q as u128) as u64;
            index /= self.q as u128;
        }
        FieldElement { coeffs }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| add_mod(x, y, self.q))
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| sub_mod(x, y, self.q))
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        debug_assert_eq!(a.coeffs.len(), self.degree);
        debug_assert_eq!(b.coeffs.len(), self.degree);
        FieldElement {
            coeffs: self.ring().mul(&a.coeffs, &b.coeffs),
        }
    }

    pub fn pow(&self, a: &FieldElement, exp: &BigUint) -> FieldElement {
        if self.degree == 1 {
            if let Some(e) = exp.to_u64() {
                return self.from_u64(arith::pow_mod(a.coeffs[0], e, self.q));
            }
        }
        FieldElement {
            coeffs: self.ring().pow_big(&a.coeffs, exp),
        }
    }

    pub fn pow_u64(&self, a: &FieldElement, exp: u64) -> FieldElement {
        if self.degree == 1 {
            return self.from_u64(arith::pow_mod(a.coeffs[0], exp, self.q));
        }
        FieldElement {
            coeffs: self.ring().pow_u64(&a.coeffs, exp),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        if self.degree == 1 {
            return Some(self.from_u64(inv_mod(a.coeffs[0], self.q)?));
        }
        Some(self.pow(a, &(&self.card_minus_1 - 1u32)))
    }

    /// Exact multiplicative order of a nonzero element, by descent over the primes of `q^f - 1`.
    pub fn exact_order(&self, x: &FieldElement) -> Result<BigUint> {
        if x.is_zero() {
            return Err(Error::InvalidInput("zero has no multiplicative order".into()));
        }
        let mut order = self.card_minus_1.clone();
        for (l, e) in &self.factorization {
            for _ in 0..*e {
                let candidate = &order / l;
                if self.pow(x, &candidate).is_one() {
                    order = candidate;
                } else {
                    break;
                }
            }
        }
        Ok(order)
    }

    fn is_primitive(&self, x: &FieldElement) -> bool {
        if x.is_zero() {
            return false;
        }
        self.factorization
            .iter()
            .all(|(l, _)| !self.pow(x, &(&self.card_minus_1 / l)).is_one())
    }

    /// The first primitive element in index order (cached after the first call).
    pub fn find_generator(&self) -> &FieldElement {
        // for f > 1 the constants (indices below q) lie in F_q^* and cannot be primitive
        let first = if self.degree == 1 { 1 } else { self.q as u128 };
        self.generator.get_or_init(|| {
            (first..)
                .map(|i| self.element_from_index(i))
                .find(|x| self.is_primitive(x))
                .expect("the multiplicative group is cyclic")
        })
    }

    /// `g^((q^f - 1) / m)` for the deterministic generator `g`: an element of exact order `m`.
    pub fn element_of_order(&self, m: u64) -> Result<FieldElement> {
        let m_big = BigUint::from(m);
        if m == 0 || !(&self.card_minus_1 % &m_big).is_zero() {
            return Err(Error::OrderNotDividing {
                m: m.to_string(),
                order: self.card_minus_1.to_string(),
            });
        }
        Ok(self.pow(self.find_generator(), &(&self.card_minus_1 / m_big)))
    }

    /// The `x` with `x = z^mu`, `0 <= mu < p`, by linear scan.
    pub fn dlog_small_subgroup(&self, x: &FieldElement, z: &FieldElement, p: u64) -> Result<u64> {
        if !self.pow_u64(x, p).is_one() {
            return Err(Error::NotInMuP { p });
        }
        let mut acc = self.one();
        for mu in 0..p {
            if &acc == x {
                return Ok(mu);
            }
            acc = self.mul(&acc, z);
        }
        Err(Error::InvalidInput(format!(
            "z does not generate the p-th roots of unity (p = {p})"
        )))
    }

    /// True when `m` divides `q^f - 1`.
    pub fn contains_roots_of_order(&self, m: u64) -> bool {
        m > 0 && self.card_minus_1.is_multiple_of(&BigUint::from(m))
    }
}

/// Lookup table for the cyclic subgroup `<z>` of order `p`.
#[derive(Debug, Clone)]
pub struct SubgroupTable {
    powers: Vec<FieldElement>,
    index: Option<HashMap<FieldElement, u64>>,
}

impl SubgroupTable {
    pub fn new(field: &ExtField, z: &FieldElement, p: u64) -> Self {
        let mut powers = Vec::with_capacity(p as usize);
        let mut acc = field.one();
        for _ in 0..p {
            powers.push(acc.clone());
            acc = field.mul(&acc, z);
        }
        let index = (p > 64).then(|| {
            powers
                .iter()
                .enumerate()
                .map(|(i, x)| (x.clone(), i as u64))
                .collect()
        });
        Self { powers, index }
    }

    pub fn power(&self, k: u64) -> &FieldElement {
        &self.powers[(k % self.powers.len() as u64) as usize]
    }

    /// `mu` with `x = z^mu`, if `x` lies in the subgroup.
    pub fn log(&self, x: &FieldElement) -> Option<u64> {
        match &self.index {
            Some(map) => map.get(x).copied(),
            None => self.powers.iter().position(|y| y == x).map(|i| i as u64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Irreducibility by exhaustive search for roots and quadratic factors (degree <= 4).
    fn brute_irreducible(q: u64, poly: &[u64]) -> bool {
        let f = poly.len() - 1;
        let eval = |x: u64| {
            poly.iter()
                .rev()
                .fold(0u64, |acc, &c| add_mod(mul_mod(acc, x, q), c, q))
        };
        if (0..q).any(|x| eval(x) == 0) {
            return false;
        }
        if f >= 4 {
            for a in 0..q {
                for b in 0..q {
                    let g = [b, a, 1];
                    if poly_rem(q, poly.to_vec(), &g) == vec![0] {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn prime_field_modulus() {
        let f = build_extension(11, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.card_minus_1(), &BigUint::from(10u32));
    }

    #[test]
    fn quadratic_over_f5() {
        // -2 = 3 is a non-residue mod 5 (squares are {1, 4}), and X^2, X^2 + 1 split.
        let squares: Vec<u64> = (1..5).map(|x| x * x % 5).collect();
        assert!(!squares.contains(&3));
        assert!(squares.contains(&4));
        let f = build_extension(5, 2).unwrap();
        assert_eq!(f.modulus(), &[2, 0, 1]);
    }

    #[test]
    fn quartic_over_f7_is_first_irreducible() {
        let f = build_extension(7, 4).unwrap();
        let mut first = None;
        for idx in 0u128.. {
            let cand = monic_from_index(7, 4, idx);
            if brute_irreducible(7, &cand) {
                first = Some(cand);
                break;
            }
        }
        assert_eq!(f.modulus(), first.unwrap().as_slice());
        assert_eq!(f.card_minus_1(), &BigUint::from(2400u32));
    }

    #[test]
    fn rabin_agrees_with_brute_force() {
        for q in [2u64, 3, 5, 7] {
            for f in 2..=4usize {
                let total = (q as u128).pow(f as u32);
                for idx in 0..total {
                    let cand = monic_from_index(q, f, idx);
                    assert_eq!(is_irreducible(q, &cand), brute_irreducible(q, &cand), "{cand:?}");
                }
            }
        }
    }

    #[test]
    fn generators() {
        assert_eq!(
            build_extension(11, 1).unwrap().find_generator().as_prime_field(),
            Some(2)
        );
        assert_eq!(
            build_extension(31, 1).unwrap().find_generator().as_prime_field(),
            Some(3)
        );
        assert_eq!(
            build_extension(13, 1).unwrap().find_generator().as_prime_field(),
            Some(2)
        );
        let f = build_extension(7, 4).unwrap();
        let g = f.find_generator().clone();
        assert_eq!(f.exact_order(&g).unwrap(), BigUint::from(2400u32));
    }

    #[test]
    fn orders_and_logs() {
        let f31 = build_extension(31, 1).unwrap();
        assert_eq!(f31.exact_order(&f31.one()).unwrap(), BigUint::one());
        assert_eq!(f31.exact_order(&f31.from_u64(16)).unwrap(), BigUint::from(5u32));
        assert_eq!(f31.exact_order(&f31.from_u64(3)).unwrap(), BigUint::from(30u32));
        assert!(f31.exact_order(&f31.zero()).is_err());

        let f11 = build_extension(11, 1).unwrap();
        assert!(f11.element_of_order(1).unwrap().is_one());
        let w = f11.element_of_order(5).unwrap();
        assert!(f11.pow_u64(&w, 5).is_one() && !w.is_one());
        assert!(f11.element_of_order(3).is_err());
        let (x, z) = (f11.from_u64(4), f11.from_u64(3));
        assert_eq!(f11.dlog_small_subgroup(&x, &z, 5).unwrap(), 4);
        assert_eq!(f11.dlog_small_subgroup(&f11.one(), &z, 5).unwrap(), 0);
        assert_eq!(f11.dlog_small_subgroup(&z, &z, 5).unwrap(), 1);
        assert_eq!(
            f11.dlog_small_subgroup(&f11.from_u64(2), &z, 5),
            Err(Error::NotInMuP { p: 5 })
        );

        let f = build_extension(7, 4).unwrap();
        let w = f.element_of_order(5).unwrap();
        assert_eq!(f.exact_order(&w).unwrap(), BigUint::from(5u32));
        let w = f.element_of_order(2400).unwrap();
        assert_eq!(f.exact_order(&w).unwrap(), BigUint::from(2400u32));
    }

    #[test]
    fn field_axioms_and_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (q, deg) in [(7u64, 4usize), (5, 2), (31, 1), (3, 6), (1_000_003, 3)] {
            let f = build_extension(q, deg).unwrap();
            let card = BigUint::from(q).pow(deg as u32);
            let rand_elt = |rng: &mut ChaCha8Rng| {
                let c: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..q)).collect();
                f.from_coeffs(&c).unwrap()
            };
            for _ in 0..10_000 {
                let (a, b, c) = (rand_elt(&mut rng), rand_elt(&mut rng), rand_elt(&mut rng));
                assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                if !a.is_zero() {
                    assert!(f.mul(&a, &f.inv(&a).unwrap()).is_one());
                }
            }
            for _ in 0..200 {
                let a = rand_elt(&mut rng);
                assert_eq!(f.pow(&a, &card), a);
            }
        }
    }

    #[test]
    fn element_of_order_is_exact() {
        let f = build_extension(13, 4).unwrap();
        for m in arith::divisors(28_560) {
            let x = f.element_of_order(m).unwrap();
            assert!(f.pow_u64(&x, m).is_one());
            for (l, _) in arith::factor_u64(m) {
                assert!(!f.pow_u64(&x, m / l).is_one());
            }
        }
    }

    #[test]
    fn dlog_round_trip() {
        let f = build_extension(7, 4).unwrap();
        let z = f.element_of_order(5).unwrap();
        for k in 0..5 {
            let x = f.pow_u64(&z, k);
            assert_eq!(f.dlog_small_subgroup(&x, &z, 5).unwrap(), k);
        }
    }
}
