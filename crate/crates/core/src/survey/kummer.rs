//! Rank lower bounds for the Kummer extension generated by the ratios `eps_k / eps_1`.
//!
//! Every prime `l = 1 mod lcm(n, p)` gives a linear functional
//! `k -> mu_k - mu_1` on the radical. The rank of the stacked functionals
//! over `Z/pZ` bounds the Kummer degree exponent from below.

use serde::Serialize;

use crate::arith::{inv_mod, is_prime, lcm, mul_mod, sub_mod};
use crate::criteria::epsilon_family;
use crate::cyclotomy::CycloParams;
use crate::error::{Error, Result};
use crate::residue_symbol::{make_context, symbol};

/// How far past `start` the prime search may run, in multiples of `lcm(n, p) * trials`.
const SEARCH_FACTOR: u64 = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KummerRank {
    pub p: u64,
    pub n: u64,
    pub trials_requested: usize,
    pub primes: Vec<u64>,
    pub rank: usize,
    /// Rank after each sampled prime.
    pub rank_history: Vec<usize>,
    /// Fewer primes than requested were found within the search budget.
    pub partial: bool,
}

/// Row-echelon basis over `Z/pZ`.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    p: u64,
    rows: Vec<(usize, Vec<u64>)>,
}

impl EchelonBasis {
    pub fn new(p: u64) -> Self {
        Self { p, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert a vector; returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = sub_mod(*x, mul_mod(c, *r, p), p);
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => false,
            Some(pivot) => {
                let inv = inv_mod(v[pivot], p).expect("p prime");
                v.iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
                self.rows.push((pivot, v));
                true
            }
        }
    }
}

/// The functional `(mu_2 - mu_1, ..., mu_{p-1} - mu_1)` at one prime; zero entries stand in for vanishing `eps_k`.
pub fn symbol_vector(p: u64, l: u64, n: u64) -> Result<Vec<u64>> {
    let params = CycloParams::new(p, l, n)?;
    let ctx = make_context(&params, None, None)?;
    let fam = epsilon_family(&ctx);
    let mut mus = Vec::with_capacity(p as usize - 1);
    for k in 1..p {
        let e = fam.value(k);
        mus.push(if e.is_zero() {
            None
        } else {
            Some(symbol(&ctx, e)?.mu())
        });
    }
    let mu1 = mus[0].ok_or(Error::SymbolUndefined)?;
    Ok(mus[1..]
        .iter()
        .map(|m| m.map_or(0, |m| sub_mod(m, mu1, p)))
        .collect())
}

/// Rank of the functionals from the first `trials` primes `l >= start`
/// with `l = 1 mod lcm(n, p)`.
pub fn estimate_kummer_rank(p: u64, n: u64, trials: usize, start: u64) -> Result<KummerRank> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if (trials as u64) < p {
        return Err(Error::InvalidInput(format!(
            "trials = {trials} must be at least p = {p}"
        )));
    }
    let m = lcm(n, p);
    // smallest l >= start with l = 1 mod m
    let s = start.max(2);
    let mut l = s + (m + 1 - s % m) % m;
    let limit = l.saturating_add(m.saturating_mul(trials as u64).saturating_mul(SEARCH_FACTOR));

    let mut basis = EchelonBasis::new(p);
    let mut out = KummerRank {
        p,
        n,
        trials_requested: trials,
        primes: Vec::new(),
        rank: 0,
        rank_history: Vec::new(),
        partial: false,
    };
    while out.primes.len() < trials {
        if l > limit {
            out.partial = true;
            break;
        }
        if is_prime(l) && l != p {
            basis.insert(symbol_vector(p, l, n)?);
            out.primes.push(l);
            out.rank_history.push(basis.rank());
        }
        l += m;
    }
    out.rank = basis.rank();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_rank() {
        let mut b = EchelonBasis::new(5);
        assert!(b.insert(vec![1, 2, 3]));
        assert!(!b.insert(vec![2, 4, 1]));
        assert!(b.insert(vec![0, 1, 0]));
        assert!(!b.insert(vec![0, 0, 0]));
        assert!(b.insert(vec![0, 0, 4]));
        assert_eq!(b.rank(), 3);
    }

    #[test]
    fn rank_bounds_and_monotone() {
        let r = estimate_kummer_rank(5, 12, 50, 0).unwrap();
        assert_eq!(r.primes.len(), 50);
        assert!(r.rank <= 3);
        assert!(r.rank_history.windows(2).all(|w| w[0] <= w[1]));
        assert!(r.primes.iter().all(|&l| l % 60 == 1));
        let again = estimate_kummer_rank(5, 12, 50, 100_000).unwrap();
        assert_eq!(r.rank, again.rank);
    }

    #[test]
    fn start_is_respected() {
        let r = estimate_kummer_rank(5, 3, 5, 61).unwrap();
        assert_eq!(r.primes[0], 61);
        let r = estimate_kummer_rank(5, 3, 5, 62).unwrap();
        assert!(r.primes[0] > 61);
    }

    #[test]
    fn rejects_few_trials() {
        assert!(estimate_kummer_rank(5, 12, 4, 0).is_err());
    }
}
