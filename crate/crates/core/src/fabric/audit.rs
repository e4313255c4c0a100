use std::collections::BTreeMap;

use serde::Serialize;

use super::clos::{clos_nonblocking, ClosVerdict};
use super::policy::{FabricPolicy, TierPair};
use super::topology::{Tier, Topology};
use super::{FabricError, Rational, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Violation,
    /// No policy covers this tier boundary.
    Unrated,
    /// Downstream capacity with nowhere to go.
    Orphaned,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::Violation => "violation",
            Verdict::Unrated => "unrated",
            Verdict::Orphaned => "orphaned",
        }
    }
}

/// One node's downstream capacity against its uplinks toward one tier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkGroup {
    pub node: String,
    pub tier: Tier,
    pub upstream_tier: Option<Tier>,
    pub downstream_bps: u128,
    pub upstream_bps: u128,
    pub ratio: Option<Rational>,
    pub threshold: Option<Rational>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub groups: Vec<LinkGroup>,
    pub clos: Option<ClosVerdict>,
}

impl AuditReport {
    /// True when any group violates its threshold or is orphaned.
    pub fn has_findings(&self) -> bool {
        self.groups
            .iter()
            .any(|g| matches!(g.verdict, Verdict::Violation | Verdict::Orphaned))
    }
}

/// `downstream / upstream` as an exact fraction.
pub fn oversubscription_ratio(downstream: u128, upstream: u128) -> Result<Rational> {
    if upstream == 0 {
        return Err(FabricError::NoUpstream);
    }
    Ok(Rational::new(downstream, upstream))
}

/// Checks every node's down:up ratio against `policy`.
///
/// Links between nodes of the same level are ignored. Nodes without
/// downstream capacity are not reported.
pub fn audit(topology: &Topology, policy: &FabricPolicy) -> Result<AuditReport> {
    topology.validate()?;
    let tiers: BTreeMap<&str, Tier> = topology
        .nodes
        .iter()
        .map(|n| (n.id.as_str(), n.tier))
        .collect();

    let mut groups = Vec::new();
    for node in &topology.nodes {
        let level = node.tier.level();
        let mut down: u128 = 0;
        let mut up: BTreeMap<Tier, u128> = BTreeMap::new();
        for link in &topology.links {
            let peer = if link.from == node.id {
                &link.to
            } else if link.to == node.id {
                &link.from
            } else {
                continue;
            };
            let peer_tier = tiers[peer.as_str()];
            let overflow = || FabricError::Overflow(node.id.clone());
            if peer_tier.level() < level {
                down = down.checked_add(link.capacity()).ok_or_else(overflow)?;
            } else if peer_tier.level() > level {
                let slot = up.entry(peer_tier).or_insert(0);
                *slot = slot.checked_add(link.capacity()).ok_or_else(overflow)?;
            }
        }
        if down == 0 {
            continue;
        }
        if up.is_empty() {
            if !node.tier.is_top() {
                groups.push(LinkGroup {
                    node: node.id.clone(),
                    tier: node.tier,
                    upstream_tier: None,
                    downstream_bps: down,
                    upstream_bps: 0,
                    ratio: None,
                    threshold: None,
                    verdict: Verdict::Orphaned,
                });
            }
            continue;
        }
        for (upper, capacity) in up {
            let ratio = oversubscription_ratio(down, capacity)?;
            let threshold = TierPair::between(node.tier, upper).map(|p| policy.threshold(p));
            let verdict = match threshold {
                Some(t) if ratio > t => Verdict::Violation,
                Some(_) => Verdict::Ok,
                None => Verdict::Unrated,
            };
            groups.push(LinkGroup {
                node: node.id.clone(),
                tier: node.tier,
                upstream_tier: Some(upper),
                downstream_bps: down,
                upstream_bps: capacity,
                ratio: Some(ratio),
                threshold,
                verdict,
            });
        }
    }

    let clos = topology
        .clos
        .as_ref()
        .map(|c| clos_nonblocking(c, policy.leaf_spine))
        .transpose()?;
    Ok(AuditReport { groups, clos })
}
