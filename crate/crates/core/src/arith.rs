//! Word-size and big-integer number theory used throughout the crate:
//! modular arithmetic on `u64`, primality, integer factorization and
//! prime enumeration.
//!
//! Factorization follows the usual desk-scale recipe: trial division by
//! the primes below 10^6, a primality test on the cofactor, then Brent's
//! variant of Pollard rho on whatever composite part remains.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Trial-division limit used before switching to Pollard rho.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let egcd = ((a % m) as i128).extended_gcd(&(m as i128));
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(m as i128) as u64)
}

/// Reduce a signed 128-bit integer into `[0, m)`.
pub fn reduce_i128(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Chinese remainder for two coprime moduli; returns the unique residue mod `m1 * m2`.
pub fn crt_pair(a1: u64, m1: u64, a2: u64, m2: u64) -> Option<u64> {
    let m = m1.checked_mul(m2)?;
    let inv = inv_mod(m1 % m2, m2)?;
    // x = a1 + m1 * ((a2 - a1) * inv mod m2)
    let diff = sub_mod(a2 % m2, a1 % m2, m2);
    let t = mul_mod(diff, inv, m2);
    Some(((a1 as u128 + m1 as u128 * t as u128) % m as u128) as u64)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_LIMIT))
}

/// Sieve of Eratosthenes: all primes `<= limit`.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes in the half-open range `[lo, hi)`, via a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo || hi <= 2 {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = (hi as f64).sqrt() as u64 + 2;
    let base = primes_up_to(root);
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in &base {
        let mut start = (lo.div_ceil(p) * p).max(p * p);
        while start < hi {
            composite[(start - lo) as usize] = true;
            start += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first twenty prime bases. Deterministic below
/// 3.3 * 10^24 and a strong probable-prime test beyond.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    const BASES: [u32; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    for &p in &BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> u64 {
    // Brent's cycle detection with batched gcds.
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = one.clone();
        let mut product = one.clone();
        let mut steps = 0u32;
        while g == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            product = (product * diff) % n;
            steps += 1;
            if steps.is_multiple_of(64) {
                g = product.gcd(n);
                if g.is_zero() {
                    g = n.clone();
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64, e: u32) {
    match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += e,
        None => out.push((p, e)),
    }
}

fn split_u64(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        push_factor(out, n, 1);
        return;
    }
    let d = rho_u64(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

/// Prime factorization of `n >= 1`, sorted by prime.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 requires n >= 1");
    let mut out = Vec::new();
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        split_u64(n, &mut out);
    }
    out.sort_unstable();
    out
}

fn split_big(n: BigUint, out: &mut Vec<(BigUint, u32)>) {
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        for (p, e) in factor_u64(small) {
            push_big(out, BigUint::from(p), e);
        }
        return;
    }
    if is_prime_big(&n) {
        push_big(out, n, 1);
        return;
    }
    let d = rho_big(&n);
    let rest = &n / &d;
    split_big(d, out);
    split_big(rest, out);
}

fn push_big(out: &mut Vec<(BigUint, u32)>, p: BigUint, e: u32) {
    match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += e,
        None => out.push((p, e)),
    }
}

/// Prime factorization of an arbitrary positive integer, sorted by prime.
pub fn factor_big(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factor_big requires n >= 1");
    if let Some(small) = n.to_u64() {
        return factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
    }
    let mut n = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        if n.bits() <= 64 {
            break;
        }
        let mut e = 0;
        while (&n % p).is_zero() {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((BigUint::from(p), e));
        }
    }
    split_big(n, &mut out);
    out.sort();
    out
}

/// Merge two factorizations (multiplying the underlying integers).
pub fn merge_factorizations(a: &mut Vec<(BigUint, u32)>, b: &[(BigUint, u32)]) {
    for (p, e) in b {
        push_big(a, p.clone(), *e);
    }
    a.sort();
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Möbius function.
pub fn moebius(n: u64) -> i32 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factor_matches_trial_division() {
        for n in 1..5000u64 {
            assert_eq!(factor_u64(n), brute_factor(n), "n = {n}");
        }
    }

    #[test]
    fn factor_semiprime_beyond_trial_limit() {
        let p = 1_000_003u64;
        let q = 998_244_353u64;
        assert_eq!(factor_u64(p * q), vec![(p, 1), (q, 1)]);
        let n = BigUint::from(p) * BigUint::from(q) * BigUint::from(1_000_000_007u64);
        let f = factor_big(&n);
        assert_eq!(
            f,
            vec![
                (BigUint::from(p), 1),
                (BigUint::from(q), 1),
                (BigUint::from(1_000_000_007u64), 1)
            ]
        );
    }

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve = primes_up_to(20_000);
        let from_test: Vec<u64> = (0..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, from_test);
        assert_eq!(primes_in_range(10_000, 20_001), sieve[1229..].to_vec());
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(crt_pair(0, 6, 1, 5), Some(6));
        assert_eq!(crt_pair(1, 6, 2, 5), Some(7));
        assert_eq!(inv_mod(3, 11), Some(4));
        assert_eq!(inv_mod(2, 4), None);
    }

    #[test]
    fn divisor_and_phi() {
        assert_eq!(divisors(30), vec![1, 2, 3, 5, 6, 10, 15, 30]);
        assert_eq!(euler_phi(30), 8);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(12), 0);
    }
}
