//! Congruence criteria over an embedding context.
//!
//! Everything here is phrased through symbols: a congruence
//! `(a / b)^kappa = 1` in the residue field is `symbol(a) = symbol(b)`, and
//! products become sums in `Z/pZ`. Verdicts keep every per-`k` symbol so
//! that single-ratio and full-family statistics can be computed from the
//! same record.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::pow_mod;
use crate::cyclotomy::DEFAULT_PHI_BUDGET_BITS;
use crate::cyclotomy::{attach_pair_with_budget, CycloParams, DivisibilityCheck, IntPair, SpecialCase};
use crate::error::{Error, Result};
use crate::finite_field::FieldElement;
use crate::residue_symbol::{make_context, symbol, EmbeddingContext, SymbolExponent};

/// How `eps_k = 1 + xi * zeta^k` looks for the given `(d, r, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonClass {
    CyclotomicUnit,
    /// Generates the prime above `p` (the `d = 2` cases).
    OneMinusZetaType,
    Zero,
    Two,
}

/// Classification of `eps_k` from the shape of `n = d * p^r` alone.
///
/// With the forced image of `zeta` (`p | n`), `xi = psi * zeta_r` and the
/// degenerate values are: `eps_0 = 0` for `n = 2`, `eps_{p-1} = 0` for
/// `n = 2p`, `eps_0 = 2` for `n = 1` and `eps_{p-1} = 2` for `n = p`.
pub fn classify_epsilon(params: &CycloParams, k: u64) -> EpsilonClass {
    let (p, n, d, r) = (params.p, params.n, params.d, params.r);
    if (d == 2 && r == 1 && k == p - 1) || (n == 2 && k == 0) {
        EpsilonClass::Zero
    } else if (n == 1 && k == 0) || (n == p && k == p - 1) {
        EpsilonClass::Two
    } else if d == 2 {
        EpsilonClass::OneMinusZetaType
    } else {
        EpsilonClass::CyclotomicUnit
    }
}

/// The values `eps_k = 1 + xi_bar * z^k` for `k = 0..p-1`.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonFamily {
    pub values: Vec<FieldElement>,
    pub classes: Vec<EpsilonClass>,
}

impl EpsilonFamily {
    pub fn value(&self, k: u64) -> &FieldElement {
        &self.values[k as usize]
    }

    /// Indices `k >= 1` whose value vanishes.
    pub fn zero_indices(&self) -> Vec<u64> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_zero())
            .map(|(k, _)| k as u64)
            .collect()
    }
}

pub fn epsilon_family(ctx: &EmbeddingContext) -> EpsilonFamily {
    let field = ctx.field();
    let one = field.one();
    let p = ctx.p();
    let values = (0..p)
        .map(|k| field.add(&one, &field.mul(ctx.xi_bar(), ctx.z_power(k))))
        .collect();
    let classes = (0..p).map(|k| classify_epsilon(ctx.params(), k)).collect();
    EpsilonFamily { values, classes }
}

/// Which criterion a verdict reports on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    /// Ratios `eps_k / eps_1` for `k = 1..p-2`.
    Main,
    /// Ratios `eps_k / eps_1` for `k = 1..p-1`.
    #[serde(rename = "main-with-k-p-1")]
    MainWithKPMinus1,
    #[serde(rename = "special-n-p")]
    SpecialNP,
    #[serde(rename = "special-n-1")]
    SpecialN1,
    #[serde(rename = "special-n-2p")]
    SpecialN2p,
    #[serde(rename = "special-n-2")]
    SpecialN2,
    Twisted,
}

impl VerdictKind {
    pub fn special(case: SpecialCase) -> Self {
        match case {
            SpecialCase::NEqualsP => Self::SpecialNP,
            SpecialCase::NEqualsOne => Self::SpecialN1,
            SpecialCase::NEqualsTwoP => Self::SpecialN2p,
            SpecialCase::NEqualsTwo => Self::SpecialN2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Main => "main",
            Self::MainWithKPMinus1 => "main-with-k-p-1",
            Self::SpecialNP => "special-n-p",
            Self::SpecialN1 => "special-n-1",
            Self::SpecialN2p => "special-n-2p",
            Self::SpecialN2 => "special-n-2",
            Self::Twisted => "twisted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub k: u64,
    pub mu: SymbolExponent,
}

/// One named congruence; `holds` is `None` when it could not be evaluated
/// (for instance `u`-conditions on a context without an attached pair).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: String,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionVerdict {
    pub kind: VerdictKind,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub clauses: Vec<Clause>,
    pub aux: BTreeMap<String, Value>,
    /// Indices left out because `eps_k` vanishes.
    pub excluded_k: Vec<u64>,
    /// Set when a stronger special-case criterion exists for this `n`.
    pub special_case_applicable: Option<SpecialCase>,
}

impl CriterionVerdict {
    fn new(kind: VerdictKind) -> Self {
        Self {
            kind,
            holds: false,
            witnesses: Vec::new(),
            clauses: Vec::new(),
            aux: BTreeMap::new(),
            excluded_k: Vec::new(),
            special_case_applicable: None,
        }
    }

    fn clause(&mut self, name: impl Into<String>, holds: Option<bool>) {
        self.clauses.push(Clause {
            name: name.into(),
            holds,
        });
    }

    fn finish(mut self) -> Self {
        self.holds = self.clauses.iter().all(|c| c.holds != Some(false));
        self
    }

    /// Name of the first clause that failed.
    pub fn first_violation(&self) -> Option<&str> {
        self.clauses
            .iter()
            .find(|c| c.holds == Some(false))
            .map(|c| c.name.as_str())
    }

    pub fn witness(&self, k: u64) -> Option<SymbolExponent> {
        self.witnesses.iter().find(|w| w.k == k).map(|w| w.mu)
    }

    /// Whether `eps_2 / eps_1` alone passes (for main verdicts with `p >= 5`).
    pub fn single_ratio_passes(&self) -> Option<bool> {
        Some(self.witness(2)? == self.witness(1)?)
    }

    /// Number of `k >= 2` with `mu_k = mu_1`.
    pub fn ratio_pass_count(&self) -> usize {
        match self.witness(1) {
            Some(mu1) => self.witnesses.iter().filter(|w| w.k >= 2 && w.mu == mu1).count(),
            None => 0,
        }
    }
}

fn symbols_for(
    ctx: &EmbeddingContext,
    family: &EpsilonFamily,
    ks: impl Iterator<Item = u64>,
) -> Result<(Vec<Witness>, Vec<u64>)> {
    let mut witnesses = Vec::new();
    let mut excluded = Vec::new();
    for k in ks {
        let eps = family.value(k);
        if eps.is_zero() {
            excluded.push(k);
            continue;
        }
        witnesses.push(Witness {
            k,
            mu: symbol(ctx, eps)?,
        });
    }
    Ok((witnesses, excluded))
}

fn all_equal(witnesses: &[Witness]) -> bool {
    witnesses.windows(2).all(|w| w[0].mu == w[1].mu)
}

/// Ratios `(eps_k / eps_1)^kappa = 1` for `k = 1..p-1`.
pub fn check_main(ctx: &EmbeddingContext) -> Result<CriterionVerdict> {
    let p = ctx.p();
    if ctx.params().n == 2 * p {
        return Err(Error::ExcludedCase);
    }
    main_verdict(ctx, true)
}

/// Ratios for `k = 1..p-2` only; defined for every `n`, including `n = 2p`.
pub fn check_main_without_last(ctx: &EmbeddingContext) -> Result<CriterionVerdict> {
    main_verdict(ctx, false)
}

fn main_verdict(ctx: &EmbeddingContext, include_last: bool) -> Result<CriterionVerdict> {
    let p = ctx.p();
    let family = epsilon_family(ctx);
    let (witnesses, excluded) = symbols_for(ctx, &family, 1..p)?;
    let kind = if include_last {
        VerdictKind::MainWithKPMinus1
    } else {
        VerdictKind::Main
    };
    let mut v = CriterionVerdict::new(kind);

    let short: Vec<Witness> = witnesses.iter().copied().filter(|w| w.k <= p - 2).collect();
    let holds_short = all_equal(&short);
    if include_last {
        let holds_full = all_equal(&witnesses);
        v.clause("(eps_k/eps_1)^kappa = 1 for k = 1..p-1", Some(holds_full));
        v.aux.insert("holds_k_le_p_minus_2".into(), json!(holds_short));
    } else {
        v.clause("(eps_k/eps_1)^kappa = 1 for k = 1..p-2", Some(holds_short));
    }
    v.aux
        .insert("symbol(zeta)".into(), json!(ctx.symbol_exponent_mod_p()));
    v.witnesses = if include_last { witnesses } else { short };
    v.excluded_k = excluded;
    v.special_case_applicable = ctx.params().special_case();
    Ok(v.finish())
}

/// `q^f mod p^2` for the frame.
pub fn q_power_mod_p_squared(params: &CycloParams) -> u64 {
    let p2 = params.p * params.p;
    pow_mod(params.q % p2, params.f as u64, p2)
}

/// The special-case criteria for `n` in `{p, 1, 2p, 2}`.
pub fn check_special(ctx: &EmbeddingContext, case: SpecialCase) -> Result<CriterionVerdict> {
    let params = ctx.params();
    let p = params.p;
    if params.n != case.n(p) {
        return Err(Error::CaseMismatch(format!(
            "case {} needs n = {}, context has n = {}",
            case.label(),
            case.n(p),
            params.n
        )));
    }
    let field = ctx.field();
    let mut v = CriterionVerdict::new(VerdictKind::special(case));

    let residue = q_power_mod_p_squared(params);
    let modulus_name = match case {
        SpecialCase::NEqualsP | SpecialCase::NEqualsTwoP => "q mod p^2",
        SpecialCase::NEqualsOne | SpecialCase::NEqualsTwo => "q^f mod p^2",
    };
    v.aux.insert(modulus_name.into(), json!(residue));
    let zeta_symbol = symbol(ctx, ctx.z())?;
    v.aux.insert("symbol(zeta)".into(), json!(zeta_symbol));
    v.aux.insert(
        "q^f = 1 mod p^2 iff symbol(zeta) = 0".into(),
        json!((residue == 1) == zeta_symbol.is_trivial()),
    );
    v.clause(format!("{modulus_name} = 1"), Some(residue == 1));

    let sym_u = ctx.u_bar().map(|u| ctx.symbol_of_residue(u)).transpose()?;
    let sym_v = ctx.v_bar().map(|x| ctx.symbol_of_residue(x)).transpose()?;
    if let (Some(su), Some(sv)) = (sym_u, sym_v) {
        v.aux.insert("symbol(u)".into(), json!(su));
        v.aux.insert("symbol(v)".into(), json!(sv));
    }

    let one = field.one();
    match case {
        SpecialCase::NEqualsP | SpecialCase::NEqualsOne => {
            let mut unit_symbols = Vec::with_capacity(p as usize - 1);
            for j in 1..p {
                let unit = field.add(&one, ctx.z_power(j));
                unit_symbols.push(symbol(ctx, &unit)?);
            }
            v.aux.insert("symbol(1+zeta^j)".into(), json!(unit_symbols));
            v.clause(
                "symbol(1+zeta^j) = 0 for j = 1..p-1",
                Some(unit_symbols.iter().all(|s| s.is_trivial())),
            );
            let two = ctx.symbol_of_int(2)?;
            v.aux.insert("symbol(2)".into(), json!(two));
            v.clause("symbol(2) = 0", Some(two.is_trivial()));
            v.clause("symbol(u) = 0", sym_u.map(|s| s.is_trivial()));
            v.clause("symbol(v) = 0", sym_v.map(|s| s.is_trivial()));
        }
        SpecialCase::NEqualsTwoP | SpecialCase::NEqualsTwo => {
            let sym_p = ctx.symbol_of_residue(p)?;
            v.aux.insert("symbol(p)".into(), json!(sym_p));
            let mut sums = Vec::with_capacity(p as usize - 1);
            let mut one_minus = Vec::with_capacity(p as usize - 1);
            for j in 1..p {
                let unit = field.sub(&one, ctx.z_power(j));
                let s = symbol(ctx, &unit)?;
                one_minus.push(s);
                sums.push(s + sym_p);
            }
            v.aux.insert("symbol(1-zeta^j)".into(), json!(one_minus));
            v.aux.insert("symbol(1-zeta^j)+symbol(p)".into(), json!(sums));
            v.clause(
                "symbol(1-zeta^j) + symbol(p) = 0 for j = 1..p-1",
                Some(sums.iter().all(|s| s.is_trivial())),
            );
            let target = -one_minus[0];
            v.clause("symbol(u) = -symbol(1-zeta)", sym_u.map(|s| s == target));
            v.clause("symbol(v) = -symbol(1-zeta)", sym_v.map(|s| s == target));
        }
    }
    Ok(v.finish())
}

/// Twisted ratios `(zeta^(-k^m) eps_k / (zeta^(-1) eps_1))^kappa = 1` for `k = 1..p-2`.
pub fn check_twisted(ctx: &EmbeddingContext, m: u64) -> Result<CriterionVerdict> {
    let p = ctx.p();
    if m.is_multiple_of(p) {
        return Err(Error::InvalidInput(format!(
            "twist exponent m = {m} is 0 mod {p}"
        )));
    }
    let family = epsilon_family(ctx);
    let (witnesses, excluded) = symbols_for(ctx, &family, 1..p - 1)?;
    if !excluded.is_empty() {
        return Err(Error::InvalidInput(format!(
            "eps_k vanishes for k in {excluded:?}; twisted criterion undefined"
        )));
    }
    let kappa = SymbolExponent::new(ctx.symbol_exponent_mod_p(), p);
    let twisted: Vec<SymbolExponent> = witnesses
        .iter()
        .map(|w| w.mu - kappa.scale(pow_mod(w.k, m, p)))
        .collect();
    let mut v = CriterionVerdict::new(VerdictKind::Twisted);
    v.aux.insert("m".into(), json!(m));
    v.aux.insert("mu_k - kappa*k^m".into(), json!(twisted));
    v.clause(
        "mu_k - kappa*k^m = mu_1 - kappa for k = 1..p-2",
        Some(twisted.windows(2).all(|w| w[0] == w[1])),
    );
    v.witnesses = witnesses;
    Ok(v.finish())
}

/// All `m` in `1..p-1` for which the twisted criterion holds.
pub fn twisted_passing_exponents(ctx: &EmbeddingContext) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for m in 1..ctx.p() {
        if check_twisted(ctx, m)?.holds {
            out.push(m);
        }
    }
    Ok(out)
}

/// `prod_{j=0}^{p-1} (1 + xi_bar z^j) = 1 + xi_bar^p` in the residue field.
pub fn product_identity(ctx: &EmbeddingContext) -> bool {
    let field = ctx.field();
    let family = epsilon_family(ctx);
    let product = family
        .values
        .iter()
        .fold(field.one(), |acc, e| field.mul(&acc, e));
    let rhs = field.add(&field.one(), &field.pow_u64(ctx.xi_bar(), ctx.p()));
    product == rhs
}

/// Policy deciding which primes `q` are treated as `p`-principal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrincipalityPolicy {
    /// Every prime is `p`-principal when `p` is regular; none otherwise.
    #[default]
    Regular,
    Always,
    Never,
}

impl PrincipalityPolicy {
    pub fn assumes_principal(self, p: u64) -> bool {
        match self {
            Self::Always => true,
            Self::Never => false,
            Self::Regular => crate::survey::bounds::is_regular(p),
        }
    }
}

impl std::str::FromStr for PrincipalityPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(Self::Regular),
            "always" => Ok(Self::Always),
            "never" => Ok(Self::Never),
            other => Err(Error::InvalidInput(format!("unknown policy {other:?}"))),
        }
    }
}

/// The audit dossier for one auxiliary prime.
#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub q: u64,
    pub params: Option<CycloParams>,
    pub divisibility_check: Option<DivisibilityCheck>,
    pub verdicts: Vec<CriterionVerdict>,
    pub error: Option<String>,
    /// Whether the verdicts are necessary conditions under the policy in force.
    pub paper_applicable: bool,
    pub first_violation: Option<String>,
}

impl AuditEntry {
    pub fn violated(&self) -> bool {
        self.paper_applicable && self.first_violation.is_some()
    }
}

/// Dispatch the applicable criteria for each `q`. Per-`q` degeneracies are
/// recorded in the entry instead of aborting the audit.
pub fn audit_pair(p: u64, pair: &IntPair, q_list: &[u64], policy: PrincipalityPolicy) -> Vec<AuditEntry> {
    let principal = policy.assumes_principal(p);
    q_list.iter().map(|&q| audit_one(p, pair, q, principal)).collect()
}

fn audit_one(p: u64, pair: &IntPair, q: u64, principal: bool) -> AuditEntry {
    let mut entry = AuditEntry {
        q,
        params: None,
        divisibility_check: None,
        verdicts: Vec::new(),
        error: None,
        paper_applicable: principal,
        first_violation: None,
    };
    let run = |entry: &mut AuditEntry| -> Result<()> {
        let (params, check) = attach_pair_with_budget(p, q, pair, DEFAULT_PHI_BUDGET_BITS)?;
        entry.divisibility_check = Some(check);
        entry.params = Some(params.clone());
        let ctx = make_context(&params, Some(pair), None)?;
        if let Some(case) = params.special_case() {
            entry.verdicts.push(check_special(&ctx, case)?);
        }
        if params.n != 2 * p {
            entry.verdicts.push(check_main(&ctx)?);
        }
        Ok(())
    };
    if let Err(e) = run(&mut entry) {
        entry.error = Some(e.to_string());
        entry.paper_applicable = false;
    }
    entry.first_violation = entry
        .verdicts
        .iter()
        .find_map(|v| v.first_violation().map(|c| format!("{}: {}", v.kind.label(), c)));
    entry
}

/// One-line summary of an audit: the first violated necessary condition, if any.
pub fn audit_summary(p: u64, entries: &[AuditEntry]) -> String {
    match entries.iter().find(|e| e.violated()) {
        Some(e) => format!(
            "p = {p}: necessary condition violated at q = {} ({})",
            e.q,
            e.first_violation.as_deref().unwrap_or("?")
        ),
        None if entries.iter().any(|e| e.first_violation.is_some()) => {
            format!("p = {p}: some criteria fail, but no q is p-principal under the policy in force")
        }
        None => format!("p = {p}: no necessary condition violated at the audited primes"),
    }
}
