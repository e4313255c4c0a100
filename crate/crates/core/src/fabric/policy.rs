use serde_json::Value;

use super::topology::{object, only_keys, Tier};
use super::{parse_decimal_ratio, FabricError, Rational, Result};

/// Tier boundaries that carry an over-subscription limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TierPair {
    AccessDistribution,
    DistributionCore,
    ServerCore,
    LeafSpine,
}

impl TierPair {
    pub const ALL: [TierPair; 4] = [
        TierPair::AccessDistribution,
        TierPair::DistributionCore,
        TierPair::ServerCore,
        TierPair::LeafSpine,
    ];

    pub fn between(lower: Tier, upper: Tier) -> Option<TierPair> {
        match (lower, upper) {
            (Tier::Access, Tier::Distribution) => Some(TierPair::AccessDistribution),
            (Tier::Distribution, Tier::Core) => Some(TierPair::DistributionCore),
            (Tier::ServerAccess, Tier::Core) => Some(TierPair::ServerCore),
            (Tier::Leaf, Tier::Spine) => Some(TierPair::LeafSpine),
            _ => None,
        }
    }

    /// Key used in policy files.
    pub fn key(self) -> &'static str {
        match self {
            TierPair::AccessDistribution => "access_distribution",
            TierPair::DistributionCore => "distribution_core",
            TierPair::ServerCore => "server_core",
            TierPair::LeafSpine => "leaf_spine",
        }
    }
}

/// Maximum down:up ratio allowed at each tier boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FabricPolicy {
    pub access_distribution: Rational,
    pub distribution_core: Rational,
    pub server_core: Rational,
    pub leaf_spine: Rational,
}

impl Default for FabricPolicy {
    /// 20:1, 4:1, 1:1 and 3:1.
    fn default() -> Self {
        FabricPolicy {
            access_distribution: Rational::from_integer(20),
            distribution_core: Rational::from_integer(4),
            server_core: Rational::from_integer(1),
            leaf_spine: Rational::from_integer(3),
        }
    }
}

impl FabricPolicy {
    pub fn threshold(&self, pair: TierPair) -> Rational {
        match pair {
            TierPair::AccessDistribution => self.access_distribution,
            TierPair::DistributionCore => self.distribution_core,
            TierPair::ServerCore => self.server_core,
            TierPair::LeafSpine => self.leaf_spine,
        }
    }

    pub fn set(&mut self, pair: TierPair, value: Rational) {
        match pair {
            TierPair::AccessDistribution => self.access_distribution = value,
            TierPair::DistributionCore => self.distribution_core = value,
            TierPair::ServerCore => self.server_core = value,
            TierPair::LeafSpine => self.leaf_spine = value,
        }
    }

    /// Parses a policy document. Missing keys keep their defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| FabricError::Json(e.to_string()))?;
        let map = object(&value, "policy")?;
        let keys: Vec<&str> = TierPair::ALL.iter().map(|p| p.key()).collect();
        only_keys(map, "policy", &keys)?;
        let mut policy = FabricPolicy::default();
        for pair in TierPair::ALL {
            let Some(v) = map.get(pair.key()) else {
                continue;
            };
            let ratio = v
                .as_number()
                .and_then(|n| parse_decimal_ratio(&n.to_string()))
                .ok_or_else(|| FabricError::InvalidValue {
                    context: "policy".into(),
                    key: pair.key().into(),
                    reason: "expected a positive number".into(),
                })?;
            policy.set(pair, ratio);
        }
        Ok(policy)
    }
}
