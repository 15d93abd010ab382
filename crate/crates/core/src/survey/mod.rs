//! Batch tooling: prime tables, scans, hypothesis search, Kummer ranks and bounds.

pub mod bounds;
pub mod hypothesis;
pub mod kummer;
pub mod scan;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::arith::{euler_phi, pow_mod, primes_up_to};
use crate::cyclotomy::mult_order;

pub use bounds::{bounds_report, BoundsReport};
pub use hypothesis::{hypothesis_search, HypothesisResult};
pub use kummer::{estimate_kummer_rank, KummerRank};
pub use scan::{satisfaction_scan, ScanAggregates, ScanConfig, ScanRecord, XiPolicy};

/// Primes `q < bound`, `q != p`, whose order `f` mod `p` is even and with
/// `q^f != 1 mod p^2`.
pub fn even_order_primes(p: u64, bound: u64) -> Vec<u64> {
    let p2 = p * p;
    primes_up_to(bound.saturating_sub(1))
        .into_iter()
        .filter(|&q| q != p)
        .filter(|&q| {
            let f = mult_order(q % p, p).expect("p is prime and q != p");
            f.is_multiple_of(2) && pow_mod(q % p2, f, p2) != 1
        })
        .collect()
}

const PRINTED_491: &str = include_str!("../../data/even_order_491.txt");

/// The printed `p = 491` table, verbatim (repeats included).
pub fn printed_table_491() -> Vec<u64> {
    PRINTED_491
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split(','))
        .filter_map(|t| {
            let t = t.trim();
            (!t.is_empty()).then(|| t.parse().expect("embedded table is numeric"))
        })
        .collect()
}

/// Item-by-item comparison of a computed list against a reference list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListComparison {
    pub computed_count: usize,
    pub reference_count_raw: usize,
    pub reference_count_dedup: usize,
    /// Values the reference repeats, with their multiplicity.
    pub reference_duplicates: Vec<(u64, usize)>,
    /// Positions where the reference is not ascending.
    pub reference_order_breaks: Vec<usize>,
    pub missing_from_reference: Vec<u64>,
    pub extra_in_reference: Vec<u64>,
    pub exact_match: bool,
}

pub fn compare_lists(computed: &[u64], reference: &[u64]) -> ListComparison {
    let mut counts = std::collections::BTreeMap::new();
    for &x in reference {
        *counts.entry(x).or_insert(0usize) += 1;
    }
    let reference_duplicates = counts
        .iter()
        .filter(|(_, &c)| c > 1)
        .map(|(&x, &c)| (x, c))
        .collect();
    let reference_order_breaks = reference
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] <= w[0])
        .map(|(i, _)| i + 1)
        .collect();
    let comp: BTreeSet<u64> = computed.iter().copied().collect();
    let refs: BTreeSet<u64> = reference.iter().copied().collect();
    let missing_from_reference: Vec<u64> = comp.difference(&refs).copied().collect();
    let extra_in_reference: Vec<u64> = refs.difference(&comp).copied().collect();
    ListComparison {
        computed_count: computed.len(),
        reference_count_raw: reference.len(),
        reference_count_dedup: refs.len(),
        reference_duplicates,
        reference_order_breaks,
        exact_match: missing_from_reference.is_empty() && extra_in_reference.is_empty(),
        missing_from_reference,
        extra_in_reference,
    }
}

/// Upper estimates for the chance that one prime passes the full family:
/// `phi(n) / p^delta` and `phi(q - 1) / p^delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityBound {
    pub delta: u32,
    pub phi_n_bound: f64,
    pub phi_q_minus_1_bound: f64,
}

pub fn probability_bound(p: u64, q: u64, n: u64, delta: u32) -> ProbabilityBound {
    let denom = (p as f64).powi(delta as i32);
    ProbabilityBound {
        delta,
        phi_n_bound: euler_phi(n) as f64 / denom,
        phi_q_minus_1_bound: euler_phi(q - 1) as f64 / denom,
    }
}

/// Binomial acceptance window `[mean - k sigma, mean + k sigma]` for `trials` draws.
pub fn binomial_window(trials: u64, prob: f64, k_sigma: f64) -> (f64, f64) {
    let mean = trials as f64 * prob;
    let sigma = (trials as f64 * prob * (1.0 - prob)).sqrt();
    (mean - k_sigma * sigma, mean + k_sigma * sigma)
}
