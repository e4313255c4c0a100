//! Tiered fabric audits.
//!
//! A [`Topology`] is a set of tiered nodes joined by link bundles. The audit
//! compares, at every node, the capacity facing down the hierarchy with the
//! capacity facing up, and checks the quotient against a [`FabricPolicy`].
//! [`clos`] covers the Clos / Leaf-Spine blocking conditions and a
//! brute-force permutation router used to confirm them on small instances.

pub mod audit;
pub mod clos;
pub mod policy;
pub mod topology;

use num_rational::Ratio;
use thiserror::Error;

pub use audit::{audit, oversubscription_ratio, AuditReport, LinkGroup, Verdict};
pub use clos::{
    clos_nonblocking, exhaustive_check, route_permutation, BlockingWitness, ClosParams,
    ClosVerdict, ExhaustiveReport, FabricVerdict, RouteOutcome,
};
pub use policy::{FabricPolicy, TierPair};
pub use topology::{Link, Node, Tier, Topology};

/// Exact over-subscription quotient of two integer capacities.
pub type Rational = Ratio<u128>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FabricError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("unknown key `{key}` in {context}")]
    UnknownKey { context: String, key: String },
    #[error("missing key `{key}` in {context}")]
    MissingKey { context: String, key: String },
    #[error("invalid value for `{key}` in {context}: {reason}")]
    InvalidValue {
        context: String,
        key: String,
        reason: String,
    },
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("link {link} references unknown node `{id}`")]
    UnknownNode { link: usize, id: String },
    #[error("link {link} connects node `{id}` to itself")]
    SelfLoop { link: usize, id: String },
    #[error("aggregate capacity overflows at node `{0}`")]
    Overflow(String),
    #[error("upstream capacity must be positive")]
    NoUpstream,
    #[error("mapping is not a permutation of 0..{size}")]
    NotAPermutation { size: usize },
    #[error("{ports} ports exceed the exhaustive-routing limit of {limit}")]
    TooLarge { ports: usize, limit: usize },
    #[error("Clos parameter `{0}` must be positive")]
    ZeroParameter(&'static str),
}

pub type Result<T, E = FabricError> = std::result::Result<T, E>;

/// Parses a positive decimal literal (`20`, `2.5`, `1e1`, `3E-1`) exactly.
pub fn parse_decimal_ratio(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(at) => (&text[..at], text[at + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (whole, frac) = match mantissa.split_once('.') {
        Some((w, f)) => (w, f),
        None => (mantissa, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .bytes()
        .chain(frac.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let mut numer: u128 = 0;
    for b in whole.bytes().chain(frac.bytes()) {
        numer = numer.checked_mul(10)?.checked_add(u128::from(b - b'0'))?;
    }
    let scale = exponent.checked_sub(i32::try_from(frac.len()).ok()?)?;
    let pow = 10u128.checked_pow(scale.unsigned_abs())?;
    let value = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(pow)?)
    } else {
        Rational::new(numer, pow)
    };
    (value > Rational::from_integer(0)).then_some(value)
}

/// Lossy view of a ratio for display.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
