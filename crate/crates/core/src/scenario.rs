//! Scenario files: a topology plus a demand matrix in one TOML document.
//!
//! ```toml
//! name = "triangle"
//! reconstructed = false
//!
//! [topology]
//! unit = "km"            # km | mi | 10mi
//! nodes = [{ id = 1, name = "A" }, { id = 2 }, { id = 3 }]
//! links = [
//!     { a = 1, b = 2, distance = 1.0 },
//!     { a = 2, b = 3, distance = 1.0 },
//!     { a = 1, b = 3, distance = 1.0 },
//! ]
//!
//! [[demands]]
//! src = 1
//! dst = 2
//! rate = 1
//! ```
//!
//! Node ids are arbitrary non-negative integers; they are mapped to dense
//! indices in listed order. Serialization always emits the canonical field
//! order shown above.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::topology::{DemandMatrix, DistanceUnit, Flow, NodeId, Topology};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// Set on fixtures rebuilt from figures rather than taken from exact data.
    pub reconstructed: bool,
    pub note: Option<String>,
    pub topology: Topology,
    pub demands: DemandMatrix,
}

#[derive(Serialize, Deserialize)]
struct NodeEntry {
    id: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    name: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct LinkEntry {
    a: u32,
    b: u32,
    distance: f64,
}

#[derive(Serialize, Deserialize)]
struct DemandEntry {
    src: u32,
    dst: u32,
    rate: u32,
}

#[derive(Serialize)]
struct TopologyDoc {
    unit: DistanceUnit,
    nodes: Vec<NodeEntry>,
    links: Vec<LinkEntry>,
}

#[derive(Serialize)]
struct ScenarioDoc {
    name: String,
    reconstructed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    topology: TopologyDoc,
    demands: Vec<DemandEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTopology {
    #[serde(default)]
    unit: DistanceUnit,
    nodes: Vec<Spanned<NodeEntry>>,
    links: Vec<Spanned<LinkEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    name: String,
    #[serde(default)]
    reconstructed: bool,
    #[serde(default)]
    note: Option<String>,
    topology: RawTopology,
    #[serde(default)]
    demands: Vec<Spanned<DemandEntry>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Scenario {
    /// Parses and validates scenario text.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        let at = |span: std::ops::Range<usize>, message: String| Error::ValidationAt {
            line: line_of(text, span.start),
            message,
        };

        let mut index = BTreeMap::new();
        for (i, node) in raw.topology.nodes.iter().enumerate() {
            if index.insert(node.get_ref().id, i).is_some() {
                return Err(at(
                    node.span(),
                    format!("duplicate node id {}", node.get_ref().id),
                ));
            }
        }
        let lookup = |id: u32, span: std::ops::Range<usize>| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| at(span, format!("unknown node id {id}")))
        };

        let mut edges = Vec::with_capacity(raw.topology.links.len());
        for link in &raw.topology.links {
            let l = link.get_ref();
            let a = lookup(l.a, link.span())?;
            let b = lookup(l.b, link.span())?;
            edges.push((a, b, l.distance));
        }
        let labels = raw.topology.nodes.iter().map(|n| n.get_ref().id).collect();
        let names = raw
            .topology
            .nodes
            .iter()
            .map(|n| n.get_ref().name.clone())
            .collect();
        // Re-run per-link checks individually so failures carry a line number.
        for (link, &(a, b, d)) in raw.topology.links.iter().zip(&edges) {
            if a == b {
                return Err(at(link.span(), format!("self-loop on node {}", link.get_ref().a)));
            }
            if !(d > 0.0 && d.is_finite()) {
                return Err(at(link.span(), format!("non-positive distance {d}")));
            }
        }
        for (i, link) in raw.topology.links.iter().enumerate() {
            let (a, b, _) = edges[i];
            let key = (a.min(b), a.max(b));
            if edges[..i].iter().any(|&(x, y, _)| (x.min(y), x.max(y)) == key) {
                return Err(at(
                    link.span(),
                    format!(
                        "parallel link between nodes {} and {}",
                        link.get_ref().a,
                        link.get_ref().b
                    ),
                ));
            }
        }
        let topology = Topology::new(raw.topology.unit, labels, names, &edges)?;

        let mut flows = Vec::with_capacity(raw.demands.len());
        for d in &raw.demands {
            let e = d.get_ref();
            let src = lookup(e.src, d.span())?;
            let dst = lookup(e.dst, d.span())?;
            let flow = Flow::new(NodeId(src), NodeId(dst), e.rate)
            .map_err(|err| at(d.span(), err.to_string()))?;
            flows.push(flow);
        }
        let demands = DemandMatrix::new(flows)?;

        Ok(Scenario {
            name: raw.name,
            reconstructed: raw.reconstructed,
            note: raw.note,
            topology,
            demands,
        })
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Canonical UTF-8 encoding. `parse(to_toml(s)) == s` holds exactly.
    pub fn to_toml(&self) -> String {
        let t = &self.topology;
        let doc = ScenarioDoc {
            name: self.name.clone(),
            reconstructed: self.reconstructed,
            note: self.note.clone(),
            topology: TopologyDoc {
                unit: t.unit(),
                nodes: t
                    .nodes()
                    .map(|n| NodeEntry {
                        id: t.label(n),
                        name: t.name(n).map(str::to_string),
                    })
                    .collect(),
                links: t
                    .links()
                    .iter()
                    .map(|l| LinkEntry {
                        a: t.label(l.a),
                        b: t.label(l.b),
                        distance: l.raw_distance,
                    })
                    .collect(),
            },
            demands: self
                .demands
                .flows()
                .iter()
                .map(|f| DemandEntry {
                    src: t.label(f.src),
                    dst: t.label(f.dst),
                    rate: f.rate,
                })
                .collect(),
        };
        toml::to_string(&doc).expect("scenario documents always serialize")
    }
}
