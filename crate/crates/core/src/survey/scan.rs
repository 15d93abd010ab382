//! Satisfaction scans over ranges of auxiliary primes.
//!
//! Each prime `q` is evaluated independently (pure function of the config
//! and `q`), batches are farmed out to a rayon pool and merged back in `q`
//! order, so output is independent of the worker count. With a checkpoint
//! the scan persists `(last_q_done, records_bytes, aggregates)` after each
//! batch; resuming truncates the record stream to `records_bytes` and
//! continues with the next prime.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factor_u64, pow_mod, primes_in_range};
use crate::criteria::{check_main, check_main_without_last, check_special, CriterionVerdict, VerdictKind};
use crate::cyclotomy::{mult_order, CycloParams};
use crate::error::{Error, Result};
use crate::finite_field::build_extension;
use crate::residue_symbol::EmbeddingContext;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_MAX_P: u64 = 31;
const BATCH: usize = 64;

/// Which images of `xi` are evaluated for each `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiPolicy {
    /// One deterministic element per admissible divisor `n | q - 1`.
    #[default]
    PerDivisor,
    /// Every element of `F_q^*` whose order is admissible.
    AllElements,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Main criterion only; `n` in `{1, 2, p, 2p}` is skipped.
    #[default]
    Main,
    /// Special-case criteria for `n` in `{1, 2, p, 2p}`, the main criterion otherwise.
    SpecialAuto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub p: u64,
    pub q_min: u64,
    /// Inclusive.
    pub q_max: u64,
    pub mode: ScanMode,
    pub policy: XiPolicy,
    /// Keep only `q` whose order mod `p` equals this.
    pub degree_filter: Option<u32>,
    pub max_p: u64,
    #[serde(skip)]
    pub workers: usize,
}

impl ScanConfig {
    pub fn new(p: u64, q_min: u64, q_max: u64) -> Self {
        Self {
            p,
            q_min,
            q_max,
            mode: ScanMode::Main,
            policy: XiPolicy::PerDivisor,
            degree_filter: None,
            max_p: DEFAULT_MAX_P,
            workers: 1,
        }
    }

    /// Equality ignoring the worker count, which never affects results.
    pub fn same_scan(&self, other: &Self) -> bool {
        Self {
            workers: 0,
            ..self.clone()
        } == Self {
            workers: 0,
            ..other.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p < 3 || !crate::arith::is_prime(self.p) {
            return Err(Error::NotPrime(self.p.to_string()));
        }
        if self.p > self.max_p {
            return Err(Error::InvalidInput(format!(
                "p = {} exceeds the configured maximum {}",
                self.p, self.max_p
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("workers must be positive".into()));
        }
        Ok(())
    }

    /// Primes to visit, ascending.
    pub fn primes(&self) -> Vec<u64> {
        let lo = self.q_min.max(3);
        if self.q_max < lo {
            return Vec::new();
        }
        primes_in_range(lo, self.q_max + 1)
            .into_iter()
            .filter(|&q| q != self.p)
            .filter(|&q| match self.degree_filter {
                Some(f) => mult_order(q % self.p, self.p)
                    .map(|o| o == f as u64)
                    .unwrap_or(false),
                None => true,
            })
            .collect()
    }
}

/// One evaluated embedding. Keyed by `(p, q, ordinal, kind)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub p: u64,
    pub q: u64,
    pub f: u32,
    pub n: u64,
    pub ordinal: u64,
    /// Image of `xi` in `F_q`.
    pub xi: u64,
    pub kind: VerdictKind,
    pub holds: bool,
    /// Number of `k >= 2` with `mu_k = mu_1` (main kinds).
    pub pass_count: u32,
    /// Symbols `mu_k` in increasing `k` (main kinds).
    pub mu: Vec<u64>,
    pub error: Option<String>,
}

impl ScanRecord {
    pub fn is_main(&self) -> bool {
        matches!(self.kind, VerdictKind::Main | VerdictKind::MainWithKPMinus1)
    }

    /// `mu_2 = mu_1`, when both were evaluated.
    pub fn single_ratio(&self) -> Option<bool> {
        (self.is_main() && self.error.is_none() && self.mu.len() >= 2).then(|| self.mu[0] == self.mu[1])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub evaluations: u64,
    pub single_ratio_passes: u64,
    pub full_family_passes: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanAggregates {
    pub primes_scanned: u64,
    pub records: u64,
    pub errors: u64,
    pub main: Counts,
    pub per_n: BTreeMap<u64, Counts>,
    /// Keyed by the order `f` of `q` mod `p`.
    pub per_f: BTreeMap<u32, Counts>,
    pub special_evaluations: u64,
    pub special_holds: u64,
    /// Evaluations where `q^f = 1 mod p^2` and `symbol(zeta) = 0` disagree.
    pub special_equivalence_failures: u64,
}

impl ScanAggregates {
    fn absorb(&mut self, rec: &ScanRecord, special_equivalent: Option<bool>) {
        self.records += 1;
        if rec.error.is_some() {
            self.errors += 1;
            return;
        }
        if rec.is_main() {
            let single = rec.single_ratio() == Some(true);
            for c in [
                &mut self.main,
                self.per_n.entry(rec.n).or_default(),
                self.per_f.entry(rec.f).or_default(),
            ] {
                c.evaluations += 1;
                c.single_ratio_passes += single as u64;
                c.full_family_passes += rec.holds as u64;
            }
        } else {
            self.special_evaluations += 1;
            self.special_holds += rec.holds as u64;
            if special_equivalent == Some(false) {
                self.special_equivalence_failures += 1;
            }
        }
    }

    pub fn single_ratio_rate(&self) -> f64 {
        ratio(self.main.single_ratio_passes, self.main.evaluations)
    }

    pub fn full_family_rate(&self) -> f64 {
        ratio(self.main.full_family_passes, self.main.evaluations)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Result for one prime: records plus the per-record special-case equivalence flag.
type PrimeResult = Vec<(ScanRecord, Option<bool>)>;

fn excluded_for_main(n: u64, p: u64) -> bool {
    n == 1 || n == 2 || n == p || n == 2 * p
}

fn evaluate(ctx: &EmbeddingContext, mode: ScanMode) -> Result<CriterionVerdict> {
    let params = ctx.params();
    match (mode, params.special_case()) {
        (ScanMode::SpecialAuto, Some(case)) => check_special(ctx, case),
        _ if params.n == 2 * params.p => check_main_without_last(ctx),
        _ => check_main(ctx),
    }
}

fn scan_prime(config: &ScanConfig, q: u64) -> PrimeResult {
    let p = config.p;
    let f = mult_order(q % p, p).expect("q != p") as u32;
    let mode = config.mode;
    let admissible = |n: u64| mode == ScanMode::SpecialAuto || !excluded_for_main(n, p);

    let kind_for = |n: u64| match (mode, crate::cyclotomy::SpecialCase::from_n(n, p)) {
        (ScanMode::SpecialAuto, Some(case)) => VerdictKind::special(case),
        _ if n == 2 * p => VerdictKind::Main,
        _ => VerdictKind::MainWithKPMinus1,
    };
    let failed = |ordinal: u64, n: u64, xi: u64, e: Error| {
        vec![(
            ScanRecord {
                p,
                q,
                f,
                n,
                ordinal,
                xi,
                kind: kind_for(n),
                holds: false,
                pass_count: 0,
                mu: Vec::new(),
                error: Some(e.to_string()),
            },
            None,
        )]
    };

    let field = match build_extension(q, f as usize) {
        Ok(field) => Arc::new(field),
        Err(e) => return failed(0, 0, 0, e),
    };
    // (ordinal, n, xi) triples
    let candidates: Vec<(u64, u64, u64)> = match config.policy {
        XiPolicy::PerDivisor => divisors(q - 1)
            .into_iter()
            .filter(|&n| admissible(n))
            .enumerate()
            .map(|(i, n)| {
                let xi = field
                    .element_of_order(n)
                    .ok()
                    .and_then(|x| x.as_prime_field())
                    .unwrap_or(0);
                (i as u64, n, xi)
            })
            .collect(),
        XiPolicy::AllElements => {
            let factors = factor_u64(q - 1);
            (1..q)
                .map(|x| (x, order_mod_prime(x, q, &factors), x))
                .filter(|&(_, n, _)| admissible(n))
                .collect()
        }
    };

    let mut out = Vec::with_capacity(candidates.len());
    for (ordinal, n, xi) in candidates {
        let run = || -> Result<(CriterionVerdict, Option<bool>)> {
            let params = CycloParams::new(p, q, n)?;
            if xi == 0 {
                return Err(Error::Inconsistent(format!("no element of order {n} in F_{q}")));
            }
            let ctx =
                EmbeddingContext::from_parts(Arc::clone(&field), params, field.from_u64(xi), None, None)?;
            let v = evaluate(&ctx, mode)?;
            let eq = v
                .aux
                .get("q^f = 1 mod p^2 iff symbol(zeta) = 0")
                .and_then(|x| x.as_bool());
            Ok((v, eq))
        };
        match run() {
            Ok((v, eq)) => {
                let is_main = matches!(v.kind, VerdictKind::Main | VerdictKind::MainWithKPMinus1);
                let rec = ScanRecord {
                    p,
                    q,
                    f,
                    n,
                    ordinal,
                    xi,
                    kind: v.kind,
                    holds: v.holds,
                    pass_count: if is_main { v.ratio_pass_count() as u32 } else { 0 },
                    mu: if is_main {
                        v.witnesses.iter().map(|w| w.mu.mu()).collect()
                    } else {
                        Vec::new()
                    },
                    error: None,
                };
                out.push((rec, eq));
            }
            Err(e) => out.extend(failed(ordinal, n, xi, e)),
        }
    }
    out
}

fn order_mod_prime(x: u64, q: u64, factors: &[(u64, u32)]) -> u64 {
    let mut order = q - 1;
    for &(l, _) in factors {
        while order.is_multiple_of(l) && pow_mod(x, order / l, q) == 1 {
            order /= l;
        }
    }
    order
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

fn evaluate_batch(pool: &rayon::ThreadPool, config: &ScanConfig, qs: &[u64]) -> Vec<PrimeResult> {
    pool.install(|| qs.par_iter().map(|&q| scan_prime(config, q)).collect())
}

/// Run a scan in memory.
pub fn satisfaction_scan(config: &ScanConfig) -> Result<(ScanAggregates, Vec<ScanRecord>)> {
    let mut records = Vec::new();
    let aggregates = run_scan(config, |rec| {
        records.push(rec.clone());
        Ok(())
    })?;
    Ok((aggregates, records))
}

/// Run a scan, handing records to `sink` in `(q, ordinal)` order.
pub fn run_scan(
    config: &ScanConfig,
    mut sink: impl FnMut(&ScanRecord) -> Result<()>,
) -> Result<ScanAggregates> {
    config.validate()?;
    let pool = pool(config.workers)?;
    let mut agg = ScanAggregates::default();
    for chunk in config.primes().chunks(BATCH * config.workers) {
        for prime in evaluate_batch(&pool, config, chunk) {
            agg.primes_scanned += 1;
            for (rec, eq) in &prime {
                agg.absorb(rec, *eq);
                sink(rec)?;
            }
        }
    }
    Ok(agg)
}

/// Persistent scan state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub p: u64,
    pub config: ScanConfig,
    pub last_q_done: Option<u64>,
    pub records_bytes: u64,
    pub aggregates: ScanAggregates,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanProgress {
    pub completed: bool,
    pub resumed: bool,
    pub last_q_done: Option<u64>,
    pub aggregates: ScanAggregates,
}

fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut f, cp)?;
        f.write_all(b"\n")?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path)?;
    let cp: Checkpoint =
        serde_json::from_str(&text).map_err(|e| Error::Checkpoint(format!("unreadable: {e}")))?;
    if cp.schema_version != SCHEMA_VERSION {
        return Err(Error::Checkpoint(format!(
            "schema version {} (expected {SCHEMA_VERSION})",
            cp.schema_version
        )));
    }
    Ok(cp)
}

/// Scan with records streamed to `records_path` (JSON Lines) and state kept
/// in `checkpoint_path`. An existing checkpoint for the same configuration
/// is resumed. `stop_after` ends the run after that many primes, leaving a
/// resumable state behind (used to simulate interruption).
pub fn run_checkpointed(
    config: &ScanConfig,
    records_path: &Path,
    checkpoint_path: &Path,
    stop_after: Option<usize>,
) -> Result<ScanProgress> {
    config.validate()?;
    let (mut cp, resumed) = if checkpoint_path.exists() {
        let cp = read_checkpoint(checkpoint_path)?;
        if !cp.config.same_scan(config) {
            return Err(Error::Checkpoint(
                "checkpoint belongs to a different scan configuration".into(),
            ));
        }
        (cp, true)
    } else {
        let cp = Checkpoint {
            schema_version: SCHEMA_VERSION,
            p: config.p,
            config: config.clone(),
            last_q_done: None,
            records_bytes: 0,
            aggregates: ScanAggregates::default(),
        };
        (cp, false)
    };

    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(false)
        .open(records_path)?;
    let len = file.metadata()?.len();
    if len < cp.records_bytes {
        return Err(Error::Checkpoint(format!(
            "record stream has {len} bytes, checkpoint expects {}",
            cp.records_bytes
        )));
    }
    file.set_len(cp.records_bytes)?;
    let mut out = BufWriter::new(OpenOptions::new().append(true).open(records_path)?);
    drop(file);

    let pending: Vec<u64> = config
        .primes()
        .into_iter()
        .filter(|&q| cp.last_q_done.is_none_or(|last| q > last))
        .collect();
    let limit = stop_after.unwrap_or(usize::MAX).min(pending.len());
    let pool = pool(config.workers)?;
    for chunk in pending[..limit].chunks(BATCH * config.workers) {
        for (q, prime) in chunk.iter().zip(evaluate_batch(&pool, config, chunk)) {
            cp.aggregates.primes_scanned += 1;
            for (rec, eq) in &prime {
                cp.aggregates.absorb(rec, *eq);
                let mut line = serde_json::to_vec(rec)?;
                line.push(b'\n');
                out.write_all(&line)?;
                cp.records_bytes += line.len() as u64;
            }
            cp.last_q_done = Some(*q);
        }
        out.flush()?;
        out.get_ref().sync_data()?;
        write_checkpoint(checkpoint_path, &cp)?;
    }
    if limit == 0 {
        write_checkpoint(checkpoint_path, &cp)?;
    }
    Ok(ScanProgress {
        completed: limit == pending.len(),
        resumed,
        last_q_done: cp.last_q_done,
        aggregates: cp.aggregates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_range() {
        let cfg = ScanConfig::new(5, 100, 90);
        let (agg, recs) = satisfaction_scan(&cfg).unwrap();
        assert!(recs.is_empty());
        assert_eq!(agg, ScanAggregates::default());
    }

    #[test]
    fn worker_count_does_not_matter() {
        let mut cfg = ScanConfig::new(5, 7, 600);
        let (a1, r1) = satisfaction_scan(&cfg).unwrap();
        cfg.workers = 4;
        let (a4, r4) = satisfaction_scan(&cfg).unwrap();
        assert_eq!(a1, a4);
        assert_eq!(r1, r4);
        assert!(r1
            .windows(2)
            .all(|w| (w[0].q, w[0].ordinal) < (w[1].q, w[1].ordinal)));
    }

    #[test]
    fn per_divisor_excludes_small_n() {
        let cfg = ScanConfig::new(5, 31, 31);
        let (_, recs) = satisfaction_scan(&cfg).unwrap();
        let ns: Vec<u64> = recs.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![3, 6, 15, 30]);
        assert!(recs.iter().all(|r| r.error.is_none() && r.mu.len() == 4));
    }

    #[test]
    fn all_elements_counts() {
        let mut cfg = ScanConfig::new(5, 31, 31);
        cfg.policy = XiPolicy::AllElements;
        let (agg, recs) = satisfaction_scan(&cfg).unwrap();
        // 30 units minus orders 1, 2, 5, 10: 1 + 1 + 4 + 4
        assert_eq!(recs.len(), 20);
        assert_eq!(agg.per_n[&3].evaluations, 2);
        assert_eq!(agg.per_n[&30].evaluations, 8);
    }

    #[test]
    fn special_auto_equivalence() {
        let mut cfg = ScanConfig::new(5, 3, 1500);
        cfg.mode = ScanMode::SpecialAuto;
        let (agg, _) = satisfaction_scan(&cfg).unwrap();
        assert!(agg.special_evaluations > 0);
        assert_eq!(agg.special_equivalence_failures, 0);
        assert_eq!(agg.errors, 0);
    }

    #[test]
    fn resume_matches_uninterrupted() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ScanConfig {
            workers: 2,
            ..ScanConfig::new(5, 7, 900)
        };
        let (full_agg, full_recs) = satisfaction_scan(&cfg).unwrap();

        let rec = dir.path().join("r.jsonl");
        let cp = dir.path().join("c.json");
        let first = run_checkpointed(&cfg, &rec, &cp, Some(37)).unwrap();
        assert!(!first.completed);
        // a torn write after the checkpoint is discarded on resume
        fs::OpenOptions::new()
            .append(true)
            .open(&rec)
            .unwrap()
            .write_all(b"{\"partial")
            .unwrap();
        let second = run_checkpointed(&cfg, &rec, &cp, None).unwrap();
        assert!(second.completed && second.resumed);
        assert_eq!(second.aggregates, full_agg);

        let text = fs::read_to_string(&rec).unwrap();
        let lines: Vec<ScanRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines, full_recs);

        let other = ScanConfig::new(7, 7, 900);
        assert!(run_checkpointed(&other, &rec, &cp, None).is_err());
    }
}
