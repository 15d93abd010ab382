//! Cyclotomic congruence criteria for the equation
//! `(u^p + v^p) / (u + v) = w^p`.
//!
//! The crate models a prime of `Q(xi, zeta)` above an auxiliary prime `q`
//! as a concrete embedding into a finite field `F_{q^f}` and evaluates
//! `p`-th power residue symbols there. On top of that sit the congruence
//! criteria for the family `eps_k = 1 + xi * zeta^k` ([`criteria`]) and
//! the batch tooling that scans primes, estimates Kummer ranks and reports
//! class-group bounds ([`survey`]).
//!
//! Modules, bottom-up:
//!
//! * [`cyclotomy`]: cyclotomic polynomials, orders, the `(p, q, n)` frame.
//! * [`finite_field`]: `F_q` and `F_{q^f}` with deterministic construction.
//! * [`residue_symbol`]: embeddings and the power residue symbol.
//! * [`criteria`]: main, special-case and twisted criteria; pair audits.
//! * [`survey`]: scans, checkpoints, hypothesis search, ranks and bounds.

pub mod arith;
pub mod criteria;
pub mod cyclotomy;
pub mod error;
pub mod finite_field;
pub mod residue_symbol;
pub mod survey;

pub use criteria::{
    audit_pair, check_main, check_special, check_twisted, epsilon_family, product_identity, AuditEntry,
    CriterionVerdict, EpsilonClass, EpsilonFamily, PrincipalityPolicy, VerdictKind,
};
pub use cyclotomy::{
    attach_pair, cyclotomic_poly, mult_order, phi_homogeneous, residue_frame, split_n, CycloParams, IntPair,
    SpecialCase,
};
pub use error::{Error, Result};
pub use finite_field::{build_extension, ExtField, FieldElement};
pub use residue_symbol::{galois_transport, make_context, symbol, EmbeddingContext, SymbolExponent};

/// Serialize unbounded integers as decimal strings.
pub(crate) mod serde_decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| D::Error::custom("bad decimal"))
    }
}

pub(crate) mod serde_decimal_signed {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::parse_bytes(s.as_bytes(), 10).ok_or_else(|| D::Error::custom("bad decimal"))
    }
}
