//! Exhaustive search over the primes of `Q(xi_{q-1})` above `q`.
//!
//! Each generator `g` of `F_q^*` stands for one such prime via
//! `xi_{q-1} -> g`. The question is whether some prime passes the whole
//! main family.

use std::sync::Arc;

use serde::Serialize;

use crate::arith::{factor_u64, is_prime, pow_mod};
use crate::criteria::{check_main, check_main_without_last, CriterionVerdict};
use crate::cyclotomy::{mult_order, CycloParams};
use crate::error::{Error, Result};
use crate::finite_field::build_extension;
use crate::residue_symbol::{galois_transport, EmbeddingContext};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisResult {
    pub p: u64,
    pub q: u64,
    pub n: u64,
    pub f: u32,
    pub generator_count: u64,
    pub exists_ideal: bool,
    pub passing_generators: Vec<u64>,
    /// Indices excluded because `eps_k` vanishes (only `n = 2p`).
    pub excluded_k: Vec<u64>,
    /// For `p` not dividing `q - 1`: every generator's verdict is unchanged
    /// under `zeta -> zeta^j` for all `j`. `None` when `p | q - 1`, where
    /// the image of `zeta` is forced.
    pub orbit_consistent: Option<bool>,
}

fn verdict(ctx: &EmbeddingContext) -> Result<CriterionVerdict> {
    if ctx.params().n == 2 * ctx.p() {
        // k = p-1 gives eps = 0; the remaining ratios decide
        check_main_without_last(ctx)
    } else {
        check_main(ctx)
    }
}

pub fn hypothesis_search(p: u64, q: u64) -> Result<HypothesisResult> {
    if q < 3 || !is_prime(q) || q == p {
        return Err(Error::InvalidInput(format!(
            "q = {q} must be an odd prime different from p"
        )));
    }
    let n = q - 1;
    let params = CycloParams::new(p, q, n)?;
    let field = Arc::new(build_extension(q, params.f as usize)?);
    let factors = factor_u64(n);
    let generators: Vec<u64> = (1..q)
        .filter(|&g| factors.iter().all(|&(l, _)| pow_mod(g, n / l, q) != 1))
        .collect();

    let mut passing = Vec::new();
    let mut excluded_k = Vec::new();
    let mut consistent = true;
    for &g in &generators {
        let ctx =
            EmbeddingContext::from_parts(Arc::clone(&field), params.clone(), field.from_u64(g), None, None)?;
        let v = verdict(&ctx)?;
        excluded_k = v.excluded_k.clone();
        if params.r == 0 {
            for j in 2..p {
                if verdict(&galois_transport(&ctx, j)?)?.holds != v.holds {
                    consistent = false;
                }
            }
        }
        if v.holds {
            passing.push(g);
        }
    }
    Ok(HypothesisResult {
        p,
        q,
        n,
        f: mult_order(q % p, p)? as u32,
        generator_count: generators.len() as u64,
        exists_ideal: !passing.is_empty(),
        passing_generators: passing,
        excluded_k,
        orbit_consistent: (params.r == 0).then_some(consistent),
    })
}
