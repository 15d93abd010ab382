//! Embeddings of `Q(xi, zeta)` into residue fields, and the `p`-th power
//! residue symbol.
//!
//! An [`EmbeddingContext`] fixes the images `xi_bar` (order `n`) and `z`
//! (order `p`) inside `F_{q^f}`; one context stands for one prime of
//! `Q(xi, zeta)` above `q`. The symbol of a nonzero `alpha` is the exponent
//! `mu` in `alpha^kappa = z^mu`.
//!
//! When `p | n` the image of `zeta` is forced to be the power `xi_bar^t`
//! with `t = 0 mod d` and `t = p^(r-1) mod p^r`. When `p` does not divide
//! `n` the image of `zeta` is a free choice among the order-`p` elements,
//! and different choices model the different primes above the same prime
//! of `Q(xi)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::arith::{self, crt_pair, inv_mod, mul_mod};
use crate::cyclotomy::{CycloParams, IntPair};
use crate::error::{Error, Result};
use crate::finite_field::{build_extension, ExtField, FieldElement, SubgroupTable};

/// A residue symbol exponent `mu` in `Z/pZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolExponent {
    mu: u64,
    p: u64,
}

impl SymbolExponent {
    pub fn new(mu: u64, p: u64) -> Self {
        Self { mu: mu % p, p }
    }

    pub fn mu(self) -> u64 {
        self.mu
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn is_trivial(self) -> bool {
        self.mu == 0
    }

    pub fn scale(self, k: u64) -> Self {
        Self::new(mul_mod(self.mu, k % self.p, self.p), self.p)
    }
}

impl std::ops::Add for SymbolExponent {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        Self::new(self.mu + other.mu, self.p)
    }
}

impl std::ops::Neg for SymbolExponent {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(self.p - self.mu, self.p)
    }
}

impl std::ops::Sub for SymbolExponent {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        self + (-other)
    }
}

impl fmt::Display for SymbolExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mu)
    }
}

impl Serialize for SymbolExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.mu)
    }
}

/// One prime of `Q(xi, zeta)` above `q`, realised inside `F_{q^f'}`.
#[derive(Debug, Clone)]
pub struct EmbeddingContext {
    params: CycloParams,
    field: Arc<ExtField>,
    xi_bar: FieldElement,
    z: FieldElement,
    u_bar: Option<u64>,
    v_bar: Option<u64>,
    /// `(|field| - 1) / p`.
    exponent: BigUint,
    table: SubgroupTable,
    /// Accumulated Galois twist `j` (1 for an untransported context).
    twist: u64,
}

/// Serializable snapshot of a context.
#[derive(Debug, Clone, Serialize)]
pub struct ContextSummary {
    pub params: CycloParams,
    pub field_degree: usize,
    pub field_modulus: Vec<u64>,
    pub xi_bar: FieldElement,
    pub z: FieldElement,
    pub u_bar: Option<u64>,
    pub v_bar: Option<u64>,
    #[serde(serialize_with = "crate::serde_decimal::serialize")]
    pub symbol_exponent: BigUint,
    pub twist: u64,
}

/// The field degree needed to hold both `mu_n` and `mu_p`: the order of `q` modulo `lcm(n, p)`.
pub fn context_field_degree(params: &CycloParams) -> Result<usize> {
    let m = arith::lcm(params.n, params.p);
    if m == 1 {
        return Ok(1);
    }
    let mut order = 1u64;
    let mut acc = params.q % m;
    while acc != 1 {
        acc = mul_mod(acc, params.q, m);
        order += 1;
        if order > crate::finite_field::MAX_DEGREE as u64 {
            return Err(Error::Unsupported(format!(
                "residue degree of q = {} modulo {m} exceeds {}",
                params.q,
                crate::finite_field::MAX_DEGREE
            )));
        }
    }
    Ok(order as usize)
}

/// Build the field a context for `params` lives in.
pub fn context_field(params: &CycloParams) -> Result<Arc<ExtField>> {
    Ok(Arc::new(build_extension(
        params.q,
        context_field_degree(params)?,
    )?))
}

/// Exponent `t` with `t = 0 mod d` and `t = p^(r-1) mod p^r`, so that `xi^t` has order `p`.
pub fn zeta_exponent(params: &CycloParams) -> Option<u64> {
    if params.r == 0 {
        return None;
    }
    let pr = params.p_power();
    crt_pair(0, params.d, params.p.pow(params.r - 1), pr)
}

/// Build the context for `params`, with `xi_bar = v / u` when a pair is attached.
///
/// `z_choice` selects the image of `zeta` when `p` does not divide `n`: the
/// deterministic order-`p` element is raised to that power (default 1). When
/// `p | n` the image is forced and `z_choice` must be absent.
pub fn make_context(
    params: &CycloParams,
    pair: Option<&IntPair>,
    z_choice: Option<u64>,
) -> Result<EmbeddingContext> {
    let field = context_field(params)?;
    make_context_in(field, params, pair, z_choice)
}

/// As [`make_context`], reusing an already built field.
pub fn make_context_in(
    field: Arc<ExtField>,
    params: &CycloParams,
    pair: Option<&IntPair>,
    z_choice: Option<u64>,
) -> Result<EmbeddingContext> {
    let q = params.q;
    let (xi_bar, images) = match pair {
        Some(pair) => {
            let (u, v) = pair.residues(q);
            if u == 0 || v == 0 {
                return Err(Error::DegeneratePair { q });
            }
            let ratio = mul_mod(v, inv_mod(u, q).unwrap(), q);
            (field.from_u64(ratio), Some((u, v)))
        }
        None => (field.element_of_order(params.n)?, None),
    };
    EmbeddingContext::from_parts(field, params.clone(), xi_bar, images, z_choice)
}

impl EmbeddingContext {
    /// Assemble a context from an explicit image of `xi`.
    pub fn from_parts(
        field: Arc<ExtField>,
        params: CycloParams,
        xi_bar: FieldElement,
        pair_images: Option<(u64, u64)>,
        z_choice: Option<u64>,
    ) -> Result<Self> {
        let p = params.p;
        if field.characteristic() != params.q {
            return Err(Error::Inconsistent("field characteristic differs from q".into()));
        }
        if !field.contains_roots_of_order(arith::lcm(params.n, p)) {
            return Err(Error::Inconsistent(format!(
                "field of degree {} lacks roots of unity of order lcm({}, {p})",
                field.degree(),
                params.n
            )));
        }
        let order = field.exact_order(&xi_bar)?;
        if order != BigUint::from(params.n) {
            return Err(Error::Inconsistent(format!(
                "xi_bar has order {order}, expected n = {}",
                params.n
            )));
        }
        let z = match zeta_exponent(&params) {
            Some(t) => {
                if z_choice.is_some() {
                    return Err(Error::InvalidInput(
                        "the image of zeta is forced when p divides n; omit z_choice".into(),
                    ));
                }
                field.pow_u64(&xi_bar, t)
            }
            None => {
                let j = z_choice.unwrap_or(1);
                if j.is_multiple_of(p) {
                    return Err(Error::InvalidInput(format!("z_choice {j} is not a unit mod {p}")));
                }
                let base = field.element_of_order(p)?;
                field.pow_u64(&base, j % p)
            }
        };
        let exponent = field.card_minus_1() / p;
        let table = SubgroupTable::new(&field, &z, p);
        let (u_bar, v_bar) = match pair_images {
            Some((u, v)) => (Some(u), Some(v)),
            None => (None, None),
        };
        Ok(Self {
            params,
            field,
            xi_bar,
            z,
            u_bar,
            v_bar,
            exponent,
            table,
            twist: 1,
        })
    }

    pub fn params(&self) -> &CycloParams {
        &self.params
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn field(&self) -> &ExtField {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<ExtField> {
        &self.field
    }

    pub fn xi_bar(&self) -> &FieldElement {
        &self.xi_bar
    }

    pub fn z(&self) -> &FieldElement {
        &self.z
    }

    /// `z^k`.
    pub fn z_power(&self, k: u64) -> &FieldElement {
        self.table.power(k)
    }

    pub fn u_bar(&self) -> Option<u64> {
        self.u_bar
    }

    pub fn v_bar(&self) -> Option<u64> {
        self.v_bar
    }

    pub fn has_pair(&self) -> bool {
        self.u_bar.is_some()
    }

    pub fn twist(&self) -> u64 {
        self.twist
    }

    /// The exponent `(|field| - 1) / p` actually used for symbols.
    pub fn symbol_exponent(&self) -> &BigUint {
        &self.exponent
    }

    /// `symbol_exponent mod p`, i.e. the symbol of `zeta` itself.
    pub fn symbol_exponent_mod_p(&self) -> u64 {
        (&self.exponent % self.params.p).to_u64().unwrap()
    }

    /// True when the field degree exceeds the residue degree `f` of `q` mod `p`.
    pub fn is_enlarged(&self) -> bool {
        self.field.degree() > self.params.f as usize
    }

    /// `u_bar * xi_bar = v_bar`, when a pair is attached.
    pub fn pair_relation_holds(&self) -> Option<bool> {
        let (u, v) = (self.u_bar?, self.v_bar?);
        let lhs = self.field.mul(&self.field.from_u64(u), &self.xi_bar);
        Some(lhs == self.field.from_u64(v))
    }

    pub fn summary(&self) -> ContextSummary {
        ContextSummary {
            params: self.params.clone(),
            field_degree: self.field.degree(),
            field_modulus: self.field.modulus().to_vec(),
            xi_bar: self.xi_bar.clone(),
            z: self.z.clone(),
            u_bar: self.u_bar,
            v_bar: self.v_bar,
            symbol_exponent: self.exponent.clone(),
            twist: self.twist,
        }
    }

    /// Symbol of the image of a rational integer.
    pub fn symbol_of_int(&self, a: i64) -> Result<SymbolExponent> {
        symbol(self, &self.field.from_i64(a))
    }

    /// Symbol of a prime-field residue `a mod q`.
    pub fn symbol_of_residue(&self, a: u64) -> Result<SymbolExponent> {
        symbol(self, &self.field.from_u64(a))
    }
}

/// The `p`-th power residue symbol: `mu` with `alpha^kappa' = z^mu`.
pub fn symbol(ctx: &EmbeddingContext, alpha: &FieldElement) -> Result<SymbolExponent> {
    if alpha.is_zero() {
        return Err(Error::SymbolUndefined);
    }
    let power = ctx.field.pow(alpha, &ctx.exponent);
    let mu = ctx.table.log(&power).ok_or_else(|| {
        Error::Inconsistent("alpha^kappa is not a power of z; field or z inconsistent".into())
    })?;
    Ok(SymbolExponent::new(mu, ctx.params.p))
}

/// The context of the conjugate prime under `zeta -> zeta^j`.
///
/// For `p | n` the image of `xi` moves too: `xi_bar -> xi_bar^j'` with
/// `j' = j mod p^r` and `j' = 1 mod d`, which keeps `z` equal to the
/// forced power of the new `xi_bar`.
pub fn galois_transport(ctx: &EmbeddingContext, j: u64) -> Result<EmbeddingContext> {
    let p = ctx.params.p;
    if j.is_multiple_of(p) {
        return Err(Error::InvalidInput(format!(
            "transport exponent {j} is 0 mod {p}"
        )));
    }
    let j = j % p;
    let field = &ctx.field;
    let xi_bar = if ctx.params.r >= 1 {
        let pr = ctx.params.p_power();
        let j_prime = crt_pair(j, pr, 1, ctx.params.d).expect("p^r and d are coprime");
        field.pow_u64(&ctx.xi_bar, j_prime)
    } else {
        ctx.xi_bar.clone()
    };
    let z = field.pow_u64(&ctx.z, j);
    let table = SubgroupTable::new(field, &z, p);
    Ok(EmbeddingContext {
        params: ctx.params.clone(),
        field: Arc::clone(&ctx.field),
        xi_bar,
        z,
        u_bar: ctx.u_bar,
        v_bar: ctx.v_bar,
        exponent: ctx.exponent.clone(),
        table,
        twist: mul_mod(ctx.twist, j, p),
    })
}

/// `j^{-1} mod p`.
pub fn unit_inverse(j: u64, p: u64) -> Option<u64> {
    if j.gcd(&p) != 1 {
        return None;
    }
    inv_mod(j % p, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomy::attach_pair;

    fn ctx_31() -> EmbeddingContext {
        let pair = IntPair::new(1, 3).unwrap();
        let params = attach_pair(5, 31, &pair).unwrap();
        make_context(&params, Some(&pair), None).unwrap()
    }

    #[test]
    fn forced_zeta_for_q31() {
        let ctx = ctx_31();
        assert_eq!(zeta_exponent(ctx.params()), Some(6));
        assert_eq!(ctx.xi_bar().as_prime_field(), Some(3));
        assert_eq!(ctx.z().as_prime_field(), Some(16));
        assert_eq!(ctx.pair_relation_holds(), Some(true));
    }

    #[test]
    fn forced_zeta_for_q11() {
        let pair = IntPair::new(1, 3).unwrap();
        let params = attach_pair(5, 11, &pair).unwrap();
        let ctx = make_context(&params, Some(&pair), None).unwrap();
        assert_eq!(zeta_exponent(&params), Some(1));
        assert_eq!(ctx.z(), ctx.xi_bar());
        assert!(make_context(&params, Some(&pair), Some(2)).is_err());
    }

    #[test]
    fn free_zeta_in_extension() {
        let pair = IntPair::new(1, 3).unwrap();
        let params = attach_pair(5, 7, &pair).unwrap();
        assert_eq!((params.n, params.r, params.f), (6, 0, 4));
        let ctx = make_context(&params, Some(&pair), None).unwrap();
        assert_eq!(ctx.field().degree(), 4);
        assert!(!ctx.is_enlarged());
        assert_eq!(ctx.xi_bar().as_prime_field(), Some(3));
        assert_eq!(ctx.field().exact_order(ctx.z()).unwrap(), BigUint::from(5u32));
        assert!(make_context(&params, Some(&pair), Some(5)).is_err());
    }

    #[test]
    fn mismatched_pair_rejected() {
        let pair = IntPair::new(1, 3).unwrap();
        let params = CycloParams::new(5, 31, 10).unwrap();
        assert!(matches!(
            make_context(&params, Some(&pair), None),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn symbol_values() {
        let pair = IntPair::new(1, 3).unwrap();
        let params = attach_pair(5, 11, &pair).unwrap();
        let ctx = make_context(&params, Some(&pair), None).unwrap();
        // 2^2 = 4 = 3^4 mod 11
        assert_eq!(ctx.symbol_of_int(2).unwrap().mu(), 4);
        assert_eq!(symbol(&ctx, ctx.z()).unwrap().mu(), ctx.params().kappa_mod_p());
        assert_eq!(symbol(&ctx, &ctx.field().zero()), Err(Error::SymbolUndefined));
        let beta = ctx.field().from_u64(7);
        let fifth = ctx.field().pow_u64(&beta, 5);
        assert!(symbol(&ctx, &fifth).unwrap().is_trivial());
    }

    #[test]
    fn transport_q31() {
        let ctx = ctx_31();
        let same = galois_transport(&ctx, 1).unwrap();
        assert_eq!(same.z(), ctx.z());
        assert_eq!(same.xi_bar(), ctx.xi_bar());
        let moved = galois_transport(&ctx, 2).unwrap();
        assert_eq!(moved.z().as_prime_field(), Some(8));
        // t' = 7: 3^7 mod 31 = 17
        assert_eq!(moved.xi_bar().as_prime_field(), Some(arith::pow_mod(3, 7, 31)));
        assert_eq!(moved.field().pow_u64(moved.xi_bar(), 6), *moved.z());
        assert!(galois_transport(&ctx, 5).is_err());
        for a in 1..31u64 {
            let before = ctx.symbol_of_residue(a).unwrap();
            let after = moved.symbol_of_residue(a).unwrap();
            assert_eq!(after, before.scale(unit_inverse(2, 5).unwrap()));
        }
    }
}
