//! Cyclotomic polynomials, multiplicative orders and the `(p, q, n)`
//! parameter frame.
//!
//! A frame ties an odd prime exponent `p` to an auxiliary prime `q` and a
//! ratio order `n | q - 1`. It records the residue degree `f` of `q`
//! modulo `p`, the symbol exponent `kappa = (q^f - 1) / p`, and the
//! decomposition `n = d * p^r` with `gcd(d, p) = 1`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, factor_u64, is_prime, pow_mod};
use crate::error::{Error, Result};

/// Default size budget (in bits) for the exact `q | Phi_n(u, v)` cross-check.
pub const DEFAULT_PHI_BUDGET_BITS: u64 = 1_000_000;

/// Cyclotomic polynomials are refused for `m` with more distinct prime factors.
pub const MAX_DISTINCT_PRIMES: usize = 8;

/// The arithmetic frame `(p, q, f, kappa, n, d, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloParams {
    pub p: u64,
    pub q: u64,
    pub f: u32,
    #[serde(with = "crate::serde_decimal")]
    pub kappa: BigUint,
    pub n: u64,
    pub d: u64,
    pub r: u32,
}

impl CycloParams {
    /// Frame for a directly supplied ratio order `n`, which must divide `q - 1`.
    pub fn new(p: u64, q: u64, n: u64) -> Result<Self> {
        check_exponent_prime(p)?;
        check_aux_prime(p, q)?;
        if n == 0 || !(q - 1).is_multiple_of(n) {
            return Err(Error::InvalidInput(format!(
                "n = {n} must be a positive divisor of q - 1 = {}",
                q - 1
            )));
        }
        let (f, kappa) = residue_frame(p, q)?;
        let (d, r) = split_n(n, p);
        Ok(Self {
            p,
            q,
            f,
            kappa,
            n,
            d,
            r,
        })
    }

    /// `kappa mod p`; zero exactly when `q^f = 1 mod p^2`.
    pub fn kappa_mod_p(&self) -> u64 {
        (&self.kappa % self.p).to_u64().unwrap()
    }

    /// `p^r`.
    pub fn p_power(&self) -> u64 {
        self.p.pow(self.r)
    }

    /// Which of the four special ratio orders `{p, 1, 2p, 2}` this frame has, if any.
    pub fn special_case(&self) -> Option<SpecialCase> {
        SpecialCase::from_n(self.n, self.p)
    }
}

/// The special ratio orders handled by dedicated criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpecialCase {
    #[serde(rename = "n-p")]
    NEqualsP,
    #[serde(rename = "n-1")]
    NEqualsOne,
    #[serde(rename = "n-2p")]
    NEqualsTwoP,
    #[serde(rename = "n-2")]
    NEqualsTwo,
}

impl SpecialCase {
    pub fn from_n(n: u64, p: u64) -> Option<Self> {
        match n {
            1 => Some(Self::NEqualsOne),
            2 => Some(Self::NEqualsTwo),
            _ if n == p => Some(Self::NEqualsP),
            _ if n == 2 * p => Some(Self::NEqualsTwoP),
            _ => None,
        }
    }

    pub fn n(self, p: u64) -> u64 {
        match self {
            Self::NEqualsP => p,
            Self::NEqualsOne => 1,
            Self::NEqualsTwoP => 2 * p,
            Self::NEqualsTwo => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::NEqualsP => "n-p",
            Self::NEqualsOne => "n-1",
            Self::NEqualsTwoP => "n-2p",
            Self::NEqualsTwo => "n-2",
        }
    }
}

impl std::str::FromStr for SpecialCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n-p" | "p" => Ok(Self::NEqualsP),
            "n-1" | "1" => Ok(Self::NEqualsOne),
            "n-2p" | "2p" => Ok(Self::NEqualsTwoP),
            "n-2" | "2" => Ok(Self::NEqualsTwo),
            other => Err(Error::InvalidInput(format!("unknown special case {other:?}"))),
        }
    }
}

/// A coprime pair of nonzero integers `(u, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntPair {
    #[serde(with = "crate::serde_decimal_signed")]
    u: BigInt,
    #[serde(with = "crate::serde_decimal_signed")]
    v: BigInt,
}

impl IntPair {
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>) -> Result<Self> {
        let (u, v) = (u.into(), v.into());
        if u.is_zero() || v.is_zero() {
            return Err(Error::InvalidInput("u and v must be nonzero".into()));
        }
        if !u.gcd(&v).is_one() {
            return Err(Error::InvalidInput(format!("gcd(u, v) != 1 for ({u}, {v})")));
        }
        Ok(Self { u, v })
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn v(&self) -> &BigInt {
        &self.v
    }

    /// `(u mod q, v mod q)` in `[0, q)`.
    pub fn residues(&self, q: u64) -> (u64, u64) {
        (reduce_big(&self.u, q), reduce_big(&self.v, q))
    }
}

/// Reduce a signed big integer into `[0, q)`.
pub fn reduce_big(a: &BigInt, q: u64) -> u64 {
    a.mod_floor(&BigInt::from(q)).to_u64().unwrap()
}

fn check_exponent_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("p = {p} must be an odd prime")));
    }
    Ok(())
}

fn check_aux_prime(p: u64, q: u64) -> Result<()> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q.to_string()));
    }
    if q == 2 || q == p {
        return Err(Error::InvalidInput(format!(
            "q = {q} must differ from 2 and p = {p}"
        )));
    }
    Ok(())
}

/// Coefficients of the `m`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_poly(m: u64) -> Result<Vec<BigInt>> {
    if m == 0 {
        return Err(Error::InvalidInput("cyclotomic index m must be >= 1".into()));
    }
    let factors = factor_u64(m);
    if factors.len() > MAX_DISTINCT_PRIMES {
        return Err(Error::Unsupported(format!(
            "m = {m} has {} distinct prime factors (limit {MAX_DISTINCT_PRIMES})",
            factors.len()
        )));
    }
    // Phi_m(X) = Phi_rad(X^(m / rad)), and Phi_rad = prod_{e | rad} (X^e - 1)^mu(rad / e).
    let rad: u64 = factors.iter().map(|(p, _)| p).product();
    let stretch = (m / rad) as usize;
    let primes: Vec<u64> = factors.iter().map(|&(p, _)| p).collect();

    let mut numerators = Vec::new();
    let mut denominators = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let sub: u64 = (0..primes.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| primes[i])
            .product();
        let e = (rad / sub) as usize;
        if mask.count_ones() % 2 == 0 {
            numerators.push(e);
        } else {
            denominators.push(e);
        }
    }
    let degree: usize = arith::euler_phi(rad) as usize;
    // Work with integer coefficients truncated to degree; exact since the quotient is a polynomial.
    let mut poly = vec![BigInt::zero(); degree + 1];
    poly[0] = BigInt::one();
    // Multiplying by (1 - X^e) and dividing by it, in the ring of power series, keeps signs
    // consistent: prod (X^e - 1)^mu = +- prod (1 - X^e)^mu, and the sign is fixed by monicity.
    for &e in &numerators {
        for i in (e..=degree).rev() {
            let t = poly[i - e].clone();
            poly[i] -= t;
        }
    }
    for &e in &denominators {
        for i in e..=degree {
            let t = poly[i - e].clone();
            poly[i] += t;
        }
    }
    if poly[degree].is_negative() {
        for c in poly.iter_mut() {
            *c = -c.clone();
        }
    }
    if stretch == 1 {
        return Ok(poly);
    }
    let mut out = vec![BigInt::zero(); degree * stretch + 1];
    for (i, c) in poly.into_iter().enumerate() {
        out[i * stretch] = c;
    }
    Ok(out)
}

/// `Phi_m(a, b) = b^phi(m) * Phi_m(a / b)`, evaluated exactly from the coefficients.
pub fn phi_homogeneous(m: u64, a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::InvalidInput("(a, b) = (0, 0)".into()));
    }
    let coeffs = cyclotomic_poly(m)?;
    // Homogeneous Horner: sum c_i a^i b^(deg - i).
    let mut acc = BigInt::zero();
    let mut b_pow = BigInt::one();
    let mut terms = Vec::with_capacity(coeffs.len());
    for c in coeffs.iter().rev() {
        terms.push(c * &b_pow);
        b_pow *= b;
    }
    // terms[j] = c_{deg - j} * b^j; Horner in a over ascending powers of b.
    for t in terms.iter() {
        acc = acc * a + t;
    }
    Ok(acc)
}

/// Least `n >= 1` with `a^n = 1 (mod q)`, for prime `q`.
pub fn mult_order(a: u64, q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q.to_string()));
    }
    let a = a % q;
    if a == 0 {
        return Err(Error::InvalidInput(format!("a = 0 mod {q} has no order")));
    }
    let mut order = q - 1;
    for (l, e) in factor_u64(q - 1) {
        for _ in 0..e {
            if pow_mod(a, order / l, q) == 1 {
                order /= l;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Signed-integer convenience wrapper around [`mult_order`].
pub fn mult_order_int(a: &BigInt, q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q.to_string()));
    }
    mult_order(reduce_big(a, q), q)
}

/// `(f, kappa)` with `f` the order of `q` modulo `p` and `kappa = (q^f - 1) / p`.
pub fn residue_frame(p: u64, q: u64) -> Result<(u32, BigUint)> {
    check_exponent_prime(p)?;
    if q == p {
        return Err(Error::InvalidInput(format!("q = p = {p} is ramified")));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q.to_string()));
    }
    let f = mult_order(q % p, p)? as u32;
    let card = BigUint::from(q).pow(f) - 1u32;
    let (kappa, rem) = card.div_rem(&BigUint::from(p));
    debug_assert!(rem.is_zero());
    Ok((f, kappa))
}

/// `n = d * p^r` with `gcd(d, p) = 1`.
pub fn split_n(n: u64, p: u64) -> (u64, u32) {
    assert!(n >= 1 && p >= 2);
    let (mut d, mut r) = (n, 0);
    while d % p == 0 {
        d /= p;
        r += 1;
    }
    (d, r)
}

/// Outcome of the `q | Phi_n(u, v)` cross-check performed by [`attach_pair`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivisibilityCheck {
    Verified,
    /// The estimated size of `Phi_n(u, v)` exceeded the budget.
    Skipped,
}

/// Assemble the frame from `(p, q, u, v)` with the default size budget.
pub fn attach_pair(p: u64, q: u64, pair: &IntPair) -> Result<CycloParams> {
    attach_pair_with_budget(p, q, pair, DEFAULT_PHI_BUDGET_BITS).map(|(params, _)| params)
}

pub fn attach_pair_with_budget(
    p: u64,
    q: u64,
    pair: &IntPair,
    budget_bits: u64,
) -> Result<(CycloParams, DivisibilityCheck)> {
    check_exponent_prime(p)?;
    check_aux_prime(p, q)?;
    let (u, v) = pair.residues(q);
    if u == 0 || v == 0 {
        return Err(Error::DegeneratePair { q });
    }
    let ratio = arith::mul_mod(v, arith::inv_mod(u, q).unwrap(), q);
    let n = mult_order(ratio, q)?;
    let params = CycloParams::new(p, q, n)?;

    let height = pair.u().bits().max(pair.v().bits()).max(1);
    let estimate = arith::euler_phi(n).saturating_mul(height);
    let check = if estimate > budget_bits {
        DivisibilityCheck::Skipped
    } else {
        let value = phi_homogeneous(n, pair.u(), pair.v())?;
        if !(value % BigInt::from(q)).is_zero() {
            return Err(Error::Inconsistent(format!(
                "order of v/u mod {q} is {n} but q does not divide Phi_{n}(u, v)"
            )));
        }
        DivisibilityCheck::Verified
    };
    Ok((params, check))
}
