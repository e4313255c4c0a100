//! Three-stage Clos networks and their two-tier Leaf-Spine fold.
//!
//! With `r` ingress switches of `n` ports each, `k` middle switches, uplinks
//! of `i` bits/s and host ports of `j` bits/s, an ingress switch can carry all
//! of its traffic when `i·k ≥ j·n`; with `i = j` this is the rearrangeable
//! condition `k ≥ n`. The strict-sense condition `k ≥ 2n − 1` is reported
//! alongside.
//!
//! [`route_permutation`] is an exhaustive backtracking router for tiny
//! instances. It knows nothing about the conditions above and serves as an
//! independent check of them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FabricError, Rational, Result};

/// Largest `n·r` accepted by the backtracking router.
pub const ROUTING_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosParams {
    /// Host-facing ports per ingress (leaf) switch.
    pub n: u64,
    /// Ingress / egress switch count.
    pub r: u64,
    /// Middle-stage (spine) switch count.
    pub k: u64,
    /// Speed of each ingress-to-middle link, bits/s.
    pub uplink_bps: u64,
    /// Speed of each host-facing port, bits/s.
    pub downlink_bps: u64,
}

impl ClosParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("n", self.n),
            ("r", self.r),
            ("k", self.k),
            ("uplink_bps", self.uplink_bps),
            ("downlink_bps", self.downlink_bps),
        ];
        match fields.iter().find(|(_, v)| *v == 0) {
            Some((name, _)) => Err(FabricError::ZeroParameter(name)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FabricVerdict {
    NonBlocking,
    AcceptableOversubscribed,
    Blocking,
}

impl FabricVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            FabricVerdict::NonBlocking => "non-blocking",
            FabricVerdict::AcceptableOversubscribed => "acceptable-oversubscribed",
            FabricVerdict::Blocking => "blocking",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosVerdict {
    pub verdict: FabricVerdict,
    /// `j·n / (i·k)`: host capacity over uplink capacity of one leaf.
    pub ratio: Rational,
    /// Over-subscription accepted as "acceptable".
    pub max_ratio: Rational,
    /// `i·k ≥ j·(2n − 1)`.
    pub strict_sense: bool,
}

/// Classifies a Clos / Leaf-Spine fabric.
///
/// Non-blocking when `i·k ≥ j·n`, acceptable when `i·k · max_ratio ≥ j·n`,
/// blocking otherwise.
pub fn clos_nonblocking(params: &ClosParams, max_ratio: Rational) -> Result<ClosVerdict> {
    params.validate()?;
    let uplink = u128::from(params.uplink_bps) * u128::from(params.k);
    let hosts = u128::from(params.downlink_bps) * u128::from(params.n);
    let ratio = Rational::new(hosts, uplink);
    let one = Rational::from_integer(1);
    let verdict = if ratio <= one {
        FabricVerdict::NonBlocking
    } else if ratio <= max_ratio {
        FabricVerdict::AcceptableOversubscribed
    } else {
        FabricVerdict::Blocking
    };
    let strict_sense = u128::from(params.downlink_bps)
        .checked_mul(2 * u128::from(params.n) - 1)
        .is_some_and(|need| uplink >= need);
    Ok(ClosVerdict {
        verdict,
        ratio,
        max_ratio,
        strict_sense,
    })
}

/// Why a permutation could not be routed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingWitness {
    /// An ingress switch whose connections need more distinct middle
    /// switches than exist, when one does.
    pub ingress: Option<usize>,
    /// That switch's connections as (input, output) pairs.
    pub connections: Vec<(usize, usize)>,
    pub middles: usize,
    /// Middle-switch choices tried by the search.
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RouteOutcome {
    /// Middle switch assigned to each input, indexed by input port.
    Routed(Vec<usize>),
    Blocked(BlockingWitness),
}

impl RouteOutcome {
    pub fn is_routed(&self) -> bool {
        matches!(self, RouteOutcome::Routed(_))
    }
}

struct Search<'a> {
    n: usize,
    k: usize,
    mapping: &'a [usize],
    ingress_busy: Vec<u32>,
    egress_busy: Vec<u32>,
    assignment: Vec<usize>,
    explored: u64,
}

impl Search<'_> {
    // Middle switches are interchangeable, so a connection only ever tries
    // the middles already in use plus one fresh one.
    fn place(&mut self, conn: usize, opened: usize) -> bool {
        if conn == self.mapping.len() {
            return true;
        }
        let ingress = 1u32 << (conn / self.n);
        let egress = 1u32 << (self.mapping[conn] / self.n);
        for middle in 0..(opened + 1).min(self.k) {
            self.explored += 1;
            if self.ingress_busy[middle] & ingress != 0 || self.egress_busy[middle] & egress != 0 {
                continue;
            }
            self.ingress_busy[middle] |= ingress;
            self.egress_busy[middle] |= egress;
            self.assignment[conn] = middle;
            if self.place(conn + 1, opened.max(middle + 1)) {
                return true;
            }
            self.ingress_busy[middle] &= !ingress;
            self.egress_busy[middle] &= !egress;
        }
        false
    }
}

/// Routes the permutation `mapping` (input port → output port) through a
/// Clos network with `r` edge switches of `n` ports and `k` middle switches.
/// Input `x` sits on ingress `x / n`, output `y` on egress `y / n`.
pub fn route_permutation(n: usize, r: usize, k: usize, mapping: &[usize]) -> Result<RouteOutcome> {
    if n == 0 {
        return Err(FabricError::ZeroParameter("n"));
    }
    if r == 0 {
        return Err(FabricError::ZeroParameter("r"));
    }
    if k == 0 {
        return Err(FabricError::ZeroParameter("k"));
    }
    let ports = n.saturating_mul(r);
    if ports > ROUTING_LIMIT {
        return Err(FabricError::TooLarge {
            ports,
            limit: ROUTING_LIMIT,
        });
    }
    if !is_permutation(mapping, ports) {
        return Err(FabricError::NotAPermutation { size: ports });
    }

    let slots = k.min(ports);
    let mut search = Search {
        n,
        k: slots,
        mapping,
        ingress_busy: vec![0; slots],
        egress_busy: vec![0; slots],
        assignment: vec![0; ports],
        explored: 0,
    };
    if search.place(0, 0) {
        return Ok(RouteOutcome::Routed(search.assignment));
    }

    // Every ingress carries n connections; more than k of them cannot all
    // take distinct middles.
    let ingress = (n > k).then_some(0);
    let connections = ingress
        .map(|s| (s * n..(s + 1) * n).map(|x| (x, mapping[x])).collect())
        .unwrap_or_default();
    Ok(RouteOutcome::Blocked(BlockingWitness {
        ingress,
        connections,
        middles: k,
        explored: search.explored,
    }))
}

fn is_permutation(mapping: &[usize], size: usize) -> bool {
    if mapping.len() != size {
        return false;
    }
    let mut seen = vec![false; size];
    mapping
        .iter()
        .all(|&y| y < size && !std::mem::replace(&mut seen[y], true))
}

/// Permutation number `index` of `0..size` in lexicographic order.
pub fn nth_permutation(size: usize, mut index: u64) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..size).collect();
    let mut radix: Vec<u64> = (0..size).map(|i| factorial(i as u64)).collect();
    radix.reverse();
    radix
        .into_iter()
        .map(|block| {
            let pick = (index / block) as usize;
            index %= block;
            pool.remove(pick)
        })
        .collect()
}

fn factorial(m: u64) -> u64 {
    (1..=m).product()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub permutations: u64,
    /// Lexicographically first permutation that could not be routed.
    pub first_blocked: Option<Vec<usize>>,
}

impl ExhaustiveReport {
    pub fn all_routable(&self) -> bool {
        self.first_blocked.is_none()
    }
}

/// Tries to route every permutation of `n·r` ports.
pub fn exhaustive_check(n: usize, r: usize, k: usize) -> Result<ExhaustiveReport> {
    let ports = n.saturating_mul(r);
    if ports > ROUTING_LIMIT {
        return Err(FabricError::TooLarge {
            ports,
            limit: ROUTING_LIMIT,
        });
    }
    let permutations = factorial(ports as u64);
    let blocked = (0..permutations)
        .into_par_iter()
        .map(|index| {
            let mapping = nth_permutation(ports, index);
            route_permutation(n, r, k, &mapping).map(|o| (!o.is_routed()).then_some(mapping))
        })
        .find_first(|outcome| !matches!(outcome, Ok(None)))
        .transpose()?
        .flatten();
    Ok(ExhaustiveReport {
        n,
        r,
        k,
        permutations,
        first_blocked: blocked,
    })
}
