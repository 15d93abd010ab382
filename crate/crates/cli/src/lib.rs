//! Command-line front end.
//!
//! [`run`] parses arguments, executes one command and writes the result to
//! the given sinks. Exit codes: 0 computed, 1 computed with a violated
//! necessary condition, 2 usage or input error.

mod output;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use cyclosieve::criteria::{audit_summary, q_power_mod_p_squared, twisted_passing_exponents};
use cyclosieve::cyclotomy::{mult_order_int, reduce_big};
use cyclosieve::survey::scan::{run_checkpointed, run_scan, ScanMode};
use cyclosieve::survey::{
    bounds_report, compare_lists, estimate_kummer_rank, even_order_primes, hypothesis_search,
    printed_table_491, probability_bound, ScanConfig, XiPolicy,
};
use cyclosieve::{
    attach_pair, audit_pair, check_main, check_special, check_twisted, make_context, phi_homogeneous, symbol,
    CycloParams, EmbeddingContext, IntPair, PrincipalityPolicy, SpecialCase,
};

pub use output::{Format, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cyclosieve",
    version,
    about = "Cyclotomic congruence criteria and prime surveys"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Which auxiliary primes are treated as p-principal.
    #[arg(long, global = true, value_enum, default_value_t = Policy::Regular)]
    pub assume_p_principal: Policy,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Regular,
    Always,
    Never,
}

impl From<Policy> for PrincipalityPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Regular => PrincipalityPolicy::Regular,
            Policy::Always => PrincipalityPolicy::Always,
            Policy::Never => PrincipalityPolicy::Never,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cyclotomic polynomials and multiplicative orders.
    #[command(subcommand)]
    Cyclo(CycloCmd),
    /// p-th power residue symbol of an element.
    Symbol(SymbolArgs),
    /// Congruence criteria.
    #[command(subcommand)]
    Criterion(CriterionCmd),
    /// Batch surveys.
    #[command(subcommand)]
    Survey(SurveyCmd),
    /// Minkowski and GRH bounds, regularity.
    Bounds {
        #[arg(long)]
        p: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CycloCmd {
    /// Homogeneous cyclotomic value Phi_m(a, b).
    Phi {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Multiplicative order of a modulo a prime q.
    Order {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        q: u64,
    },
}

/// Frame selection: either a pair `(u, v)` or an explicit `n`.
#[derive(Debug, Clone, Args)]
pub struct ContextArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, allow_hyphen_values = true, requires = "v")]
    pub u: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "u")]
    pub v: Option<String>,
    /// Power of the default order-p element used for zeta (only when p does not divide n).
    #[arg(long)]
    pub z_choice: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SymbolArgs {
    #[command(flatten)]
    pub ctx: ContextArgs,
    /// Integer argument, reduced mod q.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "coeffs")]
    pub alpha: Option<String>,
    /// Field element as comma-separated coefficients, constant term first.
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Option<Vec<u64>>,
}

#[derive(Debug, Subcommand)]
pub enum CriterionCmd {
    /// Ratios (eps_k / eps_1)^kappa for k = 1..p-1.
    Main(ContextArgs),
    /// The n in {p, 1, 2p, 2} criteria.
    Special {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Case label (n-p, n-1, n-2p, n-2); inferred from n when absent.
        #[arg(long)]
        case: Option<String>,
    },
    /// Twisted ratios with exponents k^m.
    Twisted {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long, required_unless_present = "all_m")]
        m: Option<u64>,
        /// Report every m in 1..p-1 that passes.
        #[arg(long)]
        all_m: bool,
    },
    /// Full dossier for a pair over a list of primes.
    Audit {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Primes to audit (comma separated or repeated).
        #[arg(long, value_delimiter = ',', required_unless_present = "qmax")]
        q: Vec<u64>,
        /// Audit every odd prime up to this bound.
        #[arg(long)]
        qmax: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareWith {
    Paper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Main,
    SpecialAuto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XiArg {
    PerDivisor,
    AllElements,
}

#[derive(Debug, Subcommand)]
pub enum SurveyCmd {
    /// Primes q < bound of even order mod p with (q^f - 1)/p prime to p.
    EvenOrder {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        bound: u64,
        /// Compare against the embedded printed table (p = 491).
        #[arg(long, value_enum)]
        compare: Option<CompareWith>,
    },
    /// Satisfaction scan over a range of primes q.
    Scan(ScanArgs),
    /// Search all generators of F_q^* for one passing the main family.
    Hypothesis {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Rank lower bound for the Kummer degree exponent.
    Rank {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Smallest prime to sample from.
        #[arg(long, default_value_t = 0)]
        start: u64,
        /// Auxiliary prime for the probability bound (default: first sampled prime).
        #[arg(long)]
        q: Option<u64>,
    },
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Odd prime exponent.
    #[arg(long)]
    pub p: u64,
    /// Smallest q (inclusive).
    #[arg(long)]
    pub qmin: u64,
    /// Largest q (inclusive).
    #[arg(long)]
    pub qmax: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long, env = "CYCLOSIEVE_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// main: skip n in {1, 2, p, 2p}; special-auto: special-case criteria there, main elsewhere.
    #[arg(long, value_enum, default_value_t = ModeArg::Main)]
    pub mode: ModeArg,
    /// One image of xi per divisor n of q - 1, or every nonzero residue.
    #[arg(long, value_enum, default_value_t = XiArg::PerDivisor)]
    pub xi: XiArg,
    /// Keep only q of this order mod p.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Refuse larger p (guards against runaway field degrees).
    #[arg(long, default_value_t = cyclosieve::survey::scan::DEFAULT_MAX_P)]
    pub max_p: u64,
    /// Checkpoint file; requires --records.
    #[arg(long, requires = "records")]
    pub checkpoint: Option<PathBuf>,
    /// Write records as JSON Lines to this file.
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Stop after this many primes (leaves a resumable checkpoint).
    #[arg(long, requires = "checkpoint")]
    pub stop_after: Option<usize>,
}

/// Outcome of a command before rendering.
pub struct Outcome {
    pub command: &'static str,
    pub result: Value,
    /// Items for line-oriented formats.
    pub rows: Option<Vec<Value>>,
    pub human: Vec<String>,
    pub violated: bool,
}

impl Outcome {
    fn new(command: &'static str, result: impl Serialize) -> anyhow::Result<Self> {
        Ok(Self {
            command,
            result: serde_json::to_value(result)?,
            rows: None,
            human: Vec::new(),
            violated: false,
        })
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
/// A closed stdout (`cyclosieve ... | head`) ends the run quietly.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(
            c.downcast_ref::<cyclosieve::Error>(),
            Some(cyclosieve::Error::BrokenPipe)
        ) || c
            .downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<serde_json::Error>()
                .is_some_and(|j| j.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe))
    })
}

pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let format = cli.format;
    match execute(&cli, format, out) {
        Ok(Some(outcome)) => {
            if let Err(e) = output::render(&outcome, format, out) {
                if is_broken_pipe(&e) {
                    return EXIT_OK;
                }
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            if outcome.violated {
                EXIT_VIOLATED
            } else {
                EXIT_OK
            }
        }
        Ok(None) => EXIT_OK,
        Err(e) if is_broken_pipe(&e) => EXIT_OK,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn parse_int(s: &str, name: &str) -> anyhow::Result<BigInt> {
    s.parse::<BigInt>()
        .with_context(|| format!("--{name}: not an integer: {s:?}"))
}

fn build_context(a: &ContextArgs) -> anyhow::Result<(EmbeddingContext, Option<IntPair>)> {
    let pair = match (&a.u, &a.v) {
        (Some(u), Some(v)) => Some(IntPair::new(parse_int(u, "u")?, parse_int(v, "v")?)?),
        _ => None,
    };
    let params = match (&pair, a.n) {
        (Some(pair), n) => {
            let params = attach_pair(a.p, a.q, pair)?;
            if let Some(n) = n {
                if n != params.n {
                    bail!("--n {n} disagrees with the order {} of v/u mod q", params.n);
                }
            }
            params
        }
        (None, Some(n)) => CycloParams::new(a.p, a.q, n)?,
        (None, None) => bail!("either --n or both --u and --v are required"),
    };
    let ctx = make_context(&params, pair.as_ref(), a.z_choice)?;
    Ok((ctx, pair))
}

fn execute(cli: &Cli, format: Format, out: &mut dyn Write) -> anyhow::Result<Option<Outcome>> {
    let policy: PrincipalityPolicy = cli.assume_p_principal.into();
    match &cli.command {
        Command::Cyclo(CycloCmd::Phi { m, a, b }) => {
            let value = phi_homogeneous(*m, &parse_int(a, "a")?, &parse_int(b, "b")?)?;
            let mut o = Outcome::new(
                "cyclo phi",
                json!({"m": m, "a": a, "b": b, "value": value.to_string()}),
            )?;
            o.human.push(format!("Phi_{m}({a}, {b}) = {value}"));
            Ok(Some(o))
        }
        Command::Cyclo(CycloCmd::Order { a, q }) => {
            let order = mult_order_int(&parse_int(a, "a")?, *q)?;
            let mut o = Outcome::new("cyclo order", json!({"a": a, "q": q, "order": order}))?;
            o.human.push(format!("order of {a} mod {q} = {order}"));
            Ok(Some(o))
        }
        Command::Symbol(args) => {
            let (ctx, _) = build_context(&args.ctx)?;
            let field = ctx.field();
            let alpha = match (&args.alpha, &args.coeffs) {
                (Some(a), _) => field.from_u64(reduce_big(&parse_int(a, "alpha")?, args.ctx.q)),
                (None, Some(c)) => field.from_coeffs(c)?,
                (None, None) => bail!("--alpha or --coeffs is required"),
            };
            let mu = symbol(&ctx, &alpha)?;
            let mut o = Outcome::new(
                "symbol",
                json!({"context": ctx.summary(), "alpha": alpha, "mu": mu}),
            )?;
            o.human.push(format!("symbol({alpha}) = zeta^{}", mu.mu()));
            Ok(Some(o))
        }
        Command::Criterion(cmd) => criterion(cmd, policy),
        Command::Survey(cmd) => survey(cmd, format, out),
        Command::Bounds { p } => {
            let r = bounds_report(*p)?;
            let mut o = Outcome::new("bounds", &r)?;
            o.human.push(format!("p = {p}"));
            o.human.push(format!("minkowski = {:.6}", r.minkowski));
            o.human
                .push(format!("grh = {:.6} (simplified {:.6})", r.grh, r.grh_simplified));
            o.human
                .push(format!("regular = {} {:?}", r.regular, r.irregular_indices));
            Ok(Some(o))
        }
    }
}

fn pair_applicable(ctx: &EmbeddingContext, policy: PrincipalityPolicy) -> bool {
    ctx.has_pair() && policy.assumes_principal(ctx.p())
}

fn criterion(cmd: &CriterionCmd, policy: PrincipalityPolicy) -> anyhow::Result<Option<Outcome>> {
    match cmd {
        CriterionCmd::Main(args) => {
            let (ctx, _) = build_context(args)?;
            let v = check_main(&ctx)?;
            let applicable = pair_applicable(&ctx, policy);
            let mut o = Outcome::new(
                "criterion main",
                json!({"context": ctx.summary(), "paper_applicable": applicable, "verdict": v}),
            )?;
            o.human.push(verdict_line(&v));
            o.violated = applicable && !v.holds;
            Ok(Some(o))
        }
        CriterionCmd::Special { ctx: args, case } => {
            let (ctx, _) = build_context(args)?;
            let case = match case {
                Some(label) => label.parse::<SpecialCase>()?,
                None => ctx
                    .params()
                    .special_case()
                    .ok_or_else(|| anyhow!("n = {} is not a special case (p, 1, 2p, 2)", ctx.params().n))?,
            };
            let v = check_special(&ctx, case)?;
            let applicable = pair_applicable(&ctx, policy);
            let mut o = Outcome::new(
                "criterion special",
                json!({
                    "context": ctx.summary(),
                    "q^f mod p^2": q_power_mod_p_squared(ctx.params()),
                    "paper_applicable": applicable,
                    "verdict": v,
                }),
            )?;
            o.human.push(verdict_line(&v));
            o.violated = applicable && !v.holds;
            Ok(Some(o))
        }
        CriterionCmd::Twisted { ctx: args, m, all_m } => {
            let (ctx, _) = build_context(args)?;
            let mut result = json!({"context": ctx.summary()});
            let mut o_lines = Vec::new();
            if let Some(m) = m {
                let v = check_twisted(&ctx, *m)?;
                o_lines.push(verdict_line(&v));
                result["verdict"] = serde_json::to_value(&v)?;
            }
            if *all_m {
                let passing = twisted_passing_exponents(&ctx)?;
                o_lines.push(format!("passing m: {passing:?}"));
                result["passing_m"] = json!(passing);
            }
            let mut o = Outcome::new("criterion twisted", result)?;
            o.human = o_lines;
            Ok(Some(o))
        }
        CriterionCmd::Audit { p, u, v, q, qmax } => {
            let pair = IntPair::new(parse_int(u, "u")?, parse_int(v, "v")?)?;
            let mut qs = q.clone();
            if let Some(max) = qmax {
                qs.extend(
                    cyclosieve::arith::primes_in_range(3, max + 1)
                        .into_iter()
                        .filter(|&x| x != *p),
                );
            }
            qs.sort_unstable();
            qs.dedup();
            if *p < 3 || !cyclosieve::arith::is_prime(*p) {
                bail!("p = {p} must be an odd prime");
            }
            let entries = audit_pair(*p, &pair, &qs, policy);
            let summary = audit_summary(*p, &entries);
            let violated = entries.iter().any(|e| e.violated());
            let mut o = Outcome::new(
                "criterion audit",
                json!({
                    "p": p,
                    "u": u,
                    "v": v,
                    "policy": policy,
                    "p_principal_assumed": policy.assumes_principal(*p),
                    "summary": summary,
                    "violated": violated,
                    "entries": entries,
                }),
            )?;
            o.rows = Some(
                entries
                    .iter()
                    .map(serde_json::to_value)
                    .collect::<Result<_, _>>()?,
            );
            o.human.push(summary);
            for e in &entries {
                let status = match (&e.error, &e.first_violation) {
                    (Some(err), _) => format!("skipped: {err}"),
                    (None, Some(v)) => format!("fails {v}"),
                    (None, None) => "passes".into(),
                };
                let n = e
                    .params
                    .as_ref()
                    .map(|p| p.n.to_string())
                    .unwrap_or_else(|| "-".into());
                o.human.push(format!("  q = {:>6}  n = {:>6}  {status}", e.q, n));
            }
            o.violated = violated;
            Ok(Some(o))
        }
    }
}

fn verdict_line(v: &cyclosieve::CriterionVerdict) -> String {
    let mus: Vec<String> = v
        .witnesses
        .iter()
        .map(|w| format!("{}:{}", w.k, w.mu.mu()))
        .collect();
    match v.first_violation() {
        None => format!("{}: holds [{}]", v.kind.label(), mus.join(" ")),
        Some(c) => format!("{}: fails at {c} [{}]", v.kind.label(), mus.join(" ")),
    }
}

fn survey(cmd: &SurveyCmd, format: Format, out: &mut dyn Write) -> anyhow::Result<Option<Outcome>> {
    match cmd {
        SurveyCmd::EvenOrder { p, bound, compare } => {
            if *bound < 2 {
                bail!("--bound must be at least 2");
            }
            if !cyclosieve::arith::is_prime(*p) || *p < 3 {
                bail!("p = {p} must be an odd prime");
            }
            let primes = even_order_primes(*p, *bound);
            let comparison = match compare {
                Some(CompareWith::Paper) => {
                    if *p != 491 {
                        bail!("--compare paper is only available for p = 491");
                    }
                    let table: Vec<u64> = printed_table_491().into_iter().filter(|&x| x < *bound).collect();
                    Some(compare_lists(&primes, &table))
                }
                None => None,
            };
            let mut o = Outcome::new(
                "survey even-order",
                json!({"p": p, "bound": bound, "count": primes.len(), "primes": primes, "comparison": comparison}),
            )?;
            o.rows = Some(primes.iter().map(|q| json!({"q": q})).collect());
            o.human.push(format!("{} primes: {:?}", primes.len(), primes));
            if let Some(c) = &comparison {
                o.human.push(format!(
                    "reference: {} printed, {} distinct; repeats {:?}; order breaks at {:?}",
                    c.reference_count_raw,
                    c.reference_count_dedup,
                    c.reference_duplicates,
                    c.reference_order_breaks
                ));
                o.human.push(format!(
                    "computed but not in reference: {:?}",
                    c.missing_from_reference
                ));
                o.human.push(format!(
                    "in reference but not computed: {:?}",
                    c.extra_in_reference
                ));
                o.human.push(format!("exact match: {}", c.exact_match));
            }
            Ok(Some(o))
        }
        SurveyCmd::Scan(args) => scan(args, format, out),
        SurveyCmd::Hypothesis { p, q } => {
            let r = hypothesis_search(*p, *q)?;
            let mut o = Outcome::new("survey hypothesis", &r)?;
            o.human.push(format!(
                "p = {p}, q = {q}: {} of {} generators pass; exists_ideal = {}",
                r.passing_generators.len(),
                r.generator_count,
                r.exists_ideal
            ));
            Ok(Some(o))
        }
        SurveyCmd::Rank {
            p,
            n,
            trials,
            start,
            q,
        } => {
            let r = estimate_kummer_rank(*p, *n, *trials, *start)?;
            let q = q.or_else(|| r.primes.first().copied());
            let bound = match q {
                Some(q) => {
                    let params = CycloParams::new(*p, q, *n).ok();
                    params.map(|_| probability_bound(*p, q, *n, r.rank as u32))
                }
                None => None,
            };
            let mut o = Outcome::new(
                "survey rank",
                json!({"rank": r, "probability_q": q, "probability_bound": bound}),
            )?;
            o.human.push(format!(
                "p = {p}, n = {n}: rank {} from {} primes{}",
                r.rank,
                r.primes.len(),
                if r.partial { " (partial)" } else { "" }
            ));
            Ok(Some(o))
        }
    }
}

fn scan(args: &ScanArgs, format: Format, out: &mut dyn Write) -> anyhow::Result<Option<Outcome>> {
    let config = ScanConfig {
        p: args.p,
        q_min: args.qmin,
        q_max: args.qmax,
        mode: match args.mode {
            ModeArg::Main => ScanMode::Main,
            ModeArg::SpecialAuto => ScanMode::SpecialAuto,
        },
        policy: match args.xi {
            XiArg::PerDivisor => XiPolicy::PerDivisor,
            XiArg::AllElements => XiPolicy::AllElements,
        },
        degree_filter: args.degree,
        max_p: args.max_p,
        workers: args.workers,
    };
    let (aggregates, completed, last_q_done, resumed) = match (&args.checkpoint, &args.records) {
        (Some(cp), Some(records)) => {
            let progress = run_checkpointed(&config, records, cp, args.stop_after)?;
            (
                progress.aggregates,
                progress.completed,
                progress.last_q_done,
                progress.resumed,
            )
        }
        (None, records) => {
            let mut file = match records {
                Some(path) => Some(std::io::BufWriter::new(
                    std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
                )),
                None => None,
            };
            let mut csv_out = (format == Format::Csv).then(output::scan_csv_writer);
            let mut last = None;
            let agg = run_scan(&config, |rec| {
                last = Some(rec.q);
                let line = serde_json::to_string(rec)?;
                if let Some(f) = file.as_mut() {
                    writeln!(f, "{line}")?;
                }
                match format {
                    Format::Jsonl => writeln!(out, "{line}")?,
                    Format::Csv => output::scan_csv_row(csv_out.as_mut().unwrap(), rec)?,
                    _ => {}
                }
                Ok(())
            })?;
            if let Some(f) = file.as_mut() {
                f.flush()?;
            }
            if let Some(w) = csv_out {
                out.write_all(&w.into_inner().map_err(|e| anyhow!("csv: {e}"))?)?;
            }
            if matches!(format, Format::Jsonl | Format::Csv) {
                return Ok(None);
            }
            (agg, true, last, false)
        }
        (Some(_), None) => bail!("--checkpoint requires --records"),
    };
    let p = config.p as f64;
    let per_f: Value = aggregates
        .per_f
        .keys()
        .map(|&f| {
            let exp = if f == 1 {
                p.powi(-(config.p as i32 - 2))
            } else {
                p.powf(-((config.p - 1) as f64) / f as f64)
            };
            (f.to_string(), json!(exp))
        })
        .collect::<serde_json::Map<_, _>>()
        .into();
    let mut o = Outcome::new(
        "survey scan",
        json!({
            "config": config,
            "completed": completed,
            "resumed": resumed,
            "last_q_done": last_q_done,
            "aggregates": aggregates,
            "single_ratio_rate": aggregates.single_ratio_rate(),
            "full_family_rate": aggregates.full_family_rate(),
            "expected_single_ratio_rate": 1.0 / p,
            "expected_full_family_rate_per_f": per_f,
        }),
    )?;
    o.human.push(format!(
        "{} primes, {} evaluations; single-ratio rate {:.5} (1/p = {:.5}); full-family rate {:.6}",
        aggregates.primes_scanned,
        aggregates.main.evaluations,
        aggregates.single_ratio_rate(),
        1.0 / p,
        aggregates.full_family_rate()
    ));
    if !completed {
        o.human
            .push(format!("stopped after q = {last_q_done:?}; rerun to resume"));
    }
    Ok(Some(o))
}
