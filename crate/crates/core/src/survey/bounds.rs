//! Minkowski and GRH bounds for `Q(zeta_p)` and regularity of `p`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::arith::{inv_mod, is_prime, mul_mod, sub_mod};
use crate::error::{Error, Result};

pub const MAX_BOUNDS_P: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub p: u64,
    /// Minkowski bound of `Q(zeta_p)`.
    pub minkowski: f64,
    /// `log |Delta_K|` with `|Delta_K| = p^(p-2)`.
    pub log_discriminant: f64,
    /// `12 (log Delta_K)^2`, evaluated from the exact discriminant.
    pub grh: f64,
    /// `12 (p-2)^2 (log p)^2`.
    pub grh_simplified: f64,
    /// Cutoff below which class representatives are searched; the Minkowski bound itself.
    pub c_p: f64,
    pub regular: bool,
    /// Even `k <= p-3` with `B_k = 0 mod p`.
    pub irregular_indices: Vec<u64>,
}

fn check_p(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if p > MAX_BOUNDS_P {
        return Err(Error::InvalidInput(format!("p = {p} exceeds {MAX_BOUNDS_P}")));
    }
    Ok(())
}

pub fn bounds_report(p: u64) -> Result<BoundsReport> {
    check_p(p)?;
    let (log_discriminant, grh, grh_simplified) = grh_bounds(p)?;
    let minkowski = minkowski_bound(p);
    let irregular_indices = irregular_indices(p)?;
    Ok(BoundsReport {
        p,
        minkowski,
        log_discriminant,
        grh,
        grh_simplified,
        c_p: minkowski,
        regular: irregular_indices.is_empty(),
        irregular_indices,
    })
}

/// `(4/pi)^((p-1)/2) (p-1)! / (p-1)^(p-1) sqrt(p^(p-2))`, summed in log space.
pub fn minkowski_bound(p: u64) -> f64 {
    let deg = (p - 1) as f64;
    let log_fact: f64 = (2..p).map(|k| (k as f64).ln()).sum();
    let log_b = deg / 2.0 * (4.0 / std::f64::consts::PI).ln() + log_fact - deg * deg.ln()
        + (p - 2) as f64 / 2.0 * (p as f64).ln();
    log_b.exp()
}

/// Natural log of a big integer from its leading 64 bits.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = x >> shift;
    let mantissa = top.iter_u64_digits().next().unwrap_or(0) as f64;
    mantissa.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(log Delta_K, 12 (log Delta_K)^2, 12 (p-2)^2 (log p)^2)`.
pub fn grh_bounds(p: u64) -> Result<(f64, f64, f64)> {
    check_p(p)?;
    let disc = BigUint::from(p).pow((p - 2) as u32);
    let log_disc = ln_big(&disc);
    let simplified = {
        let t = (p - 2) as f64 * (p as f64).ln();
        12.0 * t * t
    };
    Ok((log_disc, 12.0 * log_disc * log_disc, simplified))
}

/// `B_0, ..., B_{p-3}` reduced mod `p`, from
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
pub fn bernoulli_mod_p(p: u64) -> Result<Vec<u64>> {
    check_p(p)?;
    let top = p.saturating_sub(3) as usize;
    let inv: Vec<u64> = (0..p)
        .map(|k| if k == 0 { 0 } else { inv_mod(k, p).unwrap() })
        .collect();
    let mut b = vec![0u64; top + 1];
    b[0] = 1;
    for m in 1..=top {
        let n = (m + 1) as u64;
        let mut binom = 1u64;
        let mut acc = 0u64;
        for (j, bj) in b.iter().enumerate().take(m) {
            if j > 0 {
                binom = mul_mod(mul_mod(binom, n + 1 - j as u64, p), inv[j], p);
            }
            acc = (acc + mul_mod(binom, *bj, p)) % p;
        }
        b[m] = mul_mod(sub_mod(0, acc, p), inv[n as usize], p);
    }
    Ok(b)
}

pub fn irregular_indices(p: u64) -> Result<Vec<u64>> {
    let b = bernoulli_mod_p(p)?;
    Ok((2..b.len() as u64)
        .step_by(2)
        .filter(|&k| b[k as usize] == 0)
        .collect())
}

pub fn is_regular(p: u64) -> bool {
    irregular_indices(p).map(|v| v.is_empty()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn bernoulli_exact(m: usize) -> Vec<BigRational> {
        let mut b: Vec<BigRational> = vec![BigRational::from_integer(1.into())];
        for n in 1..=m {
            let mut acc = BigRational::from_integer(0.into());
            let mut binom = num_bigint::BigInt::from(1);
            for (j, bj) in b.iter().enumerate() {
                if j > 0 {
                    binom = binom * (n + 2 - j) / j;
                }
                acc += BigRational::from_integer(binom.clone()) * bj;
            }
            b.push(-acc / BigRational::from_integer(((n + 1) as i64).into()));
        }
        b
    }

    #[test]
    fn bernoulli_matches_rationals() {
        let exact = bernoulli_exact(40);
        assert_eq!(exact[2], BigRational::new(1.into(), 6.into()));
        assert_eq!(exact[12], BigRational::new((-691).into(), 2730.into()));
        for p in [5u64, 7, 11, 13, 37, 41, 43] {
            let m = bernoulli_mod_p(p).unwrap();
            for (k, bk) in m.iter().enumerate() {
                let num = exact[k].numer().clone() % p as i64;
                let den = exact[k].denom().clone() % p as i64;
                let num: i64 = num.try_into().unwrap();
                let den: i64 = den.try_into().unwrap();
                let lhs = (*bk as i64 * den - num).rem_euclid(p as i64);
                assert_eq!(lhs, 0, "p = {p}, k = {k}");
            }
        }
    }

    #[test]
    fn regularity() {
        assert!(is_regular(3) && is_regular(5) && is_regular(7));
        assert_eq!(irregular_indices(37).unwrap(), vec![32]);
        assert_eq!(irregular_indices(59).unwrap(), vec![44]);
        assert_eq!(irregular_indices(67).unwrap(), vec![58]);
        let irregular: Vec<u64> = crate::arith::primes_up_to(160)
            .into_iter()
            .filter(|&p| p > 2 && !is_regular(p))
            .collect();
        assert_eq!(irregular, vec![37, 59, 67, 101, 103, 131, 149, 157]);
    }

    #[test]
    fn minkowski_p5() {
        let direct = (4.0 / std::f64::consts::PI).powi(2) * 24.0 / 256.0 * 125f64.sqrt();
        let r = bounds_report(5).unwrap();
        assert!((r.minkowski - direct).abs() < 1e-12);
        assert!((r.minkowski - 1.699).abs() < 1e-3);
        assert_eq!(r.c_p, r.minkowski);
    }

    #[test]
    fn grh_agreement_small() {
        for p in [3u64, 5, 7, 97, 9973] {
            let (_, g, s) = grh_bounds(p).unwrap();
            assert!(((g - s) / s).abs() < 1e-9, "p = {p}");
        }
        assert!(bounds_report(4).is_err());
        assert!(bounds_report(10_007).is_err());
    }
}
