use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::clos::ClosParams;
use super::{FabricError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    /// End stations: servers, user ports. Always at the bottom.
    Host,
    Access,
    ServerAccess,
    Leaf,
    Distribution,
    Spine,
    Core,
}

impl Tier {
    pub const ALL: [Tier; 7] = [
        Tier::Host,
        Tier::Access,
        Tier::ServerAccess,
        Tier::Leaf,
        Tier::Distribution,
        Tier::Spine,
        Tier::Core,
    ];

    /// Height in the hierarchy. Links between equal heights (stacking,
    /// peer links) carry no up/down direction.
    pub fn level(self) -> u8 {
        match self {
            Tier::Host => 0,
            Tier::Access | Tier::ServerAccess | Tier::Leaf => 1,
            Tier::Distribution | Tier::Spine => 2,
            Tier::Core => 3,
        }
    }

    /// Tiers expected to have no uplinks.
    pub fn is_top(self) -> bool {
        matches!(self, Tier::Core | Tier::Spine)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Host => "host",
            Tier::Access => "access",
            Tier::ServerAccess => "server-access",
            Tier::Leaf => "leaf",
            Tier::Distribution => "distribution",
            Tier::Spine => "spine",
            Tier::Core => "core",
        }
    }

    fn parse(text: &str) -> Option<Tier> {
        Tier::ALL.into_iter().find(|t| t.as_str() == text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub tier: Tier,
}

/// A bundle of `count` parallel links of `bps` each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub from: String,
    pub to: String,
    pub bps: u64,
    pub count: u32,
}

impl Link {
    pub fn capacity(&self) -> u128 {
        u128::from(self.bps) * u128::from(self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clos: Option<ClosParams>,
}

impl Topology {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self> {
        let topology = Topology {
            nodes,
            links,
            clos: None,
        };
        topology.validate()?;
        Ok(topology)
    }

    pub fn with_clos(mut self, clos: ClosParams) -> Result<Self> {
        clos.validate()?;
        self.clos = Some(clos);
        Ok(self)
    }

    /// Parses and validates a topology document.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| FabricError::Json(e.to_string()))?;
        let root = object(&value, "topology")?;
        only_keys(root, "topology", &["nodes", "links", "clos"])?;

        let nodes = array(root, "topology", "nodes")?
            .iter()
            .enumerate()
            .map(|(i, v)| parse_node(v, &format!("nodes[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let links = array(root, "topology", "links")?
            .iter()
            .enumerate()
            .map(|(i, v)| parse_link(v, &format!("links[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let topology = Topology::new(nodes, links)?;
        match root.get("clos") {
            None | Some(Value::Null) => Ok(topology),
            Some(v) => topology.with_clos(parse_clos(v)?),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for node in &self.nodes {
            if node.id.is_empty() {
                return Err(invalid("nodes", "id", "must not be empty"));
            }
            if seen.insert(node.id.as_str(), node.tier).is_some() {
                return Err(FabricError::DuplicateNode(node.id.clone()));
            }
        }
        for (i, link) in self.links.iter().enumerate() {
            for end in [&link.from, &link.to] {
                if !seen.contains_key(end.as_str()) {
                    return Err(FabricError::UnknownNode {
                        link: i,
                        id: end.clone(),
                    });
                }
            }
            if link.from == link.to {
                return Err(FabricError::SelfLoop {
                    link: i,
                    id: link.from.clone(),
                });
            }
            if link.bps == 0 {
                return Err(invalid(&format!("links[{i}]"), "bps", "must be positive"));
            }
            if link.count == 0 {
                return Err(invalid(
                    &format!("links[{i}]"),
                    "count",
                    "must be at least 1",
                ));
            }
        }
        if let Some(clos) = &self.clos {
            clos.validate()?;
        }
        Ok(())
    }

    pub fn tier_of(&self, id: &str) -> Option<Tier> {
        self.nodes.iter().find(|n| n.id == id).map(|n| n.tier)
    }

    /// Multiplies every link rate by `factor`.
    pub fn scaled(&self, factor: u64) -> Option<Topology> {
        let links = self
            .links
            .iter()
            .map(|l| {
                Some(Link {
                    bps: l.bps.checked_mul(factor)?,
                    ..l.clone()
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Topology {
            links,
            ..self.clone()
        })
    }
}

fn invalid(context: &str, key: &str, reason: &str) -> FabricError {
    FabricError::InvalidValue {
        context: context.to_string(),
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

pub(crate) fn object<'a>(value: &'a Value, context: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| FabricError::Json(format!("{context} must be a JSON object")))
}

pub(crate) fn only_keys(map: &Map<String, Value>, context: &str, allowed: &[&str]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(key) => Err(FabricError::UnknownKey {
            context: context.to_string(),
            key: key.clone(),
        }),
        None => Ok(()),
    }
}

fn field<'a>(map: &'a Map<String, Value>, context: &str, key: &str) -> Result<&'a Value> {
    map.get(key).ok_or_else(|| FabricError::MissingKey {
        context: context.to_string(),
        key: key.to_string(),
    })
}

fn array<'a>(map: &'a Map<String, Value>, context: &str, key: &str) -> Result<&'a Vec<Value>> {
    field(map, context, key)?
        .as_array()
        .ok_or_else(|| invalid(context, key, "expected an array"))
}

fn string(map: &Map<String, Value>, context: &str, key: &str) -> Result<String> {
    field(map, context, key)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| invalid(context, key, "expected a string"))
}

/// A non-negative integer, written either as an integer or as an integral
/// float such as `1e9`.
pub(crate) fn integer(map: &Map<String, Value>, context: &str, key: &str) -> Result<u64> {
    let value = field(map, context, key)?;
    let number = value
        .as_number()
        .ok_or_else(|| invalid(context, key, "expected a number"))?;
    if let Some(u) = number.as_u64() {
        return Ok(u);
    }
    match number.as_f64() {
        Some(f) if f >= 0.0 && f.fract() == 0.0 && f < u64::MAX as f64 => Ok(f as u64),
        _ => Err(invalid(context, key, "expected a non-negative integer")),
    }
}

fn parse_node(value: &Value, context: &str) -> Result<Node> {
    let map = object(value, context)?;
    only_keys(map, context, &["id", "tier"])?;
    let id = string(map, context, "id")?;
    let tier_name = string(map, context, "tier")?;
    let tier = Tier::parse(&tier_name)
        .ok_or_else(|| invalid(context, "tier", &format!("unknown tier `{tier_name}`")))?;
    Ok(Node { id, tier })
}

fn parse_link(value: &Value, context: &str) -> Result<Link> {
    let map = object(value, context)?;
    only_keys(map, context, &["from", "to", "bps", "count"])?;
    let count = integer(map, context, "count")?;
    Ok(Link {
        from: string(map, context, "from")?,
        to: string(map, context, "to")?,
        bps: integer(map, context, "bps")?,
        count: u32::try_from(count).map_err(|_| invalid(context, "count", "too large"))?,
    })
}

fn parse_clos(value: &Value) -> Result<ClosParams> {
    let context = "clos";
    let map = object(value, context)?;
    only_keys(map, context, &["n", "r", "k", "uplink_bps", "downlink_bps"])?;
    Ok(ClosParams {
        n: integer(map, context, "n")?,
        r: integer(map, context, "r")?,
        k: integer(map, context, "k")?,
        uplink_bps: integer(map, context, "uplink_bps")?,
        downlink_bps: integer(map, context, "downlink_bps")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "nodes": [
            {"id": "h", "tier": "host"},
            {"id": "a1", "tier": "access"},
            {"id": "d1", "tier": "distribution"}
        ],
        "links": [
            {"from": "h", "to": "a1", "bps": 1e9, "count": 48},
            {"from": "a1", "to": "d1", "bps": 1000000000, "count": 4}
        ]
    }"#;

    #[test]
    fn parses_document() {
        let t = Topology::from_json(SMALL).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert_eq!(t.links[0].bps, 1_000_000_000);
        assert_eq!(t.links[0].capacity(), 48_000_000_000);
        assert_eq!(t.tier_of("d1"), Some(Tier::Distribution));
        assert!(t.clos.is_none());
    }

    #[test]
    fn unknown_keys_are_named() {
        let doc = SMALL.replace(r#""count": 4}"#, r#""count": 4, "speed": 1}"#);
        assert_eq!(
            Topology::from_json(&doc),
            Err(FabricError::UnknownKey {
                context: "links[1]".into(),
                key: "speed".into()
            })
        );
        let doc = SMALL.replacen('{', r#"{"extra": true,"#, 1);
        assert!(matches!(
            Topology::from_json(&doc),
            Err(FabricError::UnknownKey { key, .. }) if key == "extra"
        ));
    }

    #[test]
    fn structural_errors() {
        let dup = SMALL.replace(r#""id": "d1""#, r#""id": "a1""#);
        assert_eq!(
            Topology::from_json(&dup),
            Err(FabricError::DuplicateNode("a1".into()))
        );
        let dangling = SMALL.replace(r#""to": "d1""#, r#""to": "zz""#);
        assert!(matches!(
            Topology::from_json(&dangling),
            Err(FabricError::UnknownNode { link: 1, .. })
        ));
        let zero = SMALL.replace(r#""count": 4}"#, r#""count": 0}"#);
        assert!(matches!(
            Topology::from_json(&zero),
            Err(FabricError::InvalidValue { key, .. }) if key == "count"
        ));
        let frac = SMALL.replace("1e9", "1.5");
        assert!(Topology::from_json(&frac).is_err());
        let tier = SMALL.replace(r#""tier": "host""#, r#""tier": "edge""#);
        assert!(Topology::from_json(&tier).is_err());
        assert!(matches!(
            Topology::from_json("[1,2]"),
            Err(FabricError::Json(_))
        ));
        assert!(matches!(
            Topology::from_json(r#"{"nodes": []}"#),
            Err(FabricError::MissingKey { key, .. }) if key == "links"
        ));
    }

    #[test]
    fn clos_section() {
        let doc = SMALL.replacen(
            '{',
            r#"{"clos": {"n": 48, "r": 4, "k": 6, "uplink_bps": 4e10, "downlink_bps": 1e10},"#,
            1,
        );
        let t = Topology::from_json(&doc).unwrap();
        assert_eq!(t.clos.unwrap().k, 6);
        let bad = doc.replace(r#""k": 6"#, r#""k": 0"#);
        assert_eq!(
            Topology::from_json(&bad),
            Err(FabricError::ZeroParameter("k"))
        );
    }
}
