//! Undirected weighted network graph, demands and paths.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index, `0..n` after loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

/// Stable link index, `0..m` in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinkId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Length unit declared by a scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DistanceUnit {
    #[default]
    #[serde(rename = "km")]
    Km,
    #[serde(rename = "mi")]
    Miles,
    #[serde(rename = "10mi")]
    TensOfMiles,
}

pub const KM_PER_MILE: f64 = 1.609344;

impl DistanceUnit {
    /// Multiplier converting a distance in this unit to kilometers.
    pub fn km_scale(self) -> f64 {
        match self {
            DistanceUnit::Km => 1.0,
            DistanceUnit::Miles => KM_PER_MILE,
            DistanceUnit::TensOfMiles => 10.0 * KM_PER_MILE,
        }
    }
}

/// A bidirectional link. `a < b` always holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub id: LinkId,
    pub a: NodeId,
    pub b: NodeId,
    /// Length in kilometers.
    pub distance: f64,
    /// Length exactly as written in the scenario file.
    pub raw_distance: f64,
}

impl Link {
    pub fn other(&self, n: NodeId) -> NodeId {
        if n == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TopologyWarning {
    /// Node with a single link; that link cannot be protected by anything.
    DegreeOne { node: NodeId },
}

/// Immutable network graph. Distances are always kilometers internally.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    unit: DistanceUnit,
    labels: Vec<u32>,
    names: Vec<Option<String>>,
    links: Vec<Link>,
    /// Per node: (neighbor, link) sorted by neighbor id.
    adjacency: Vec<Vec<(NodeId, LinkId)>>,
    warnings: Vec<TopologyWarning>,
}

impl Topology {
    /// Builds a topology from labelled nodes and `(a, b, distance)` triples
    /// indexed by dense position. Distances are in `unit`.
    pub fn new(
        unit: DistanceUnit,
        labels: Vec<u32>,
        names: Vec<Option<String>>,
        edges: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Validation("topology has no nodes".into()));
        }
        let mut seen_labels = BTreeSet::new();
        for &l in &labels {
            if !seen_labels.insert(l) {
                return Err(Error::Validation(format!("duplicate node id {l}")));
            }
        }
        let scale = unit.km_scale();
        let mut links = Vec::with_capacity(edges.len());
        let mut pairs = BTreeSet::new();
        for (i, &(a, b, d)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::Validation(format!("link {i} references an unknown node")));
            }
            if a == b {
                return Err(Error::Validation(format!(
                    "link {i} is a self-loop on node {}",
                    labels[a]
                )));
            }
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Validation(format!(
                    "link {}-{} has non-positive distance {d}",
                    labels[a], labels[b]
                )));
            }
            let (a, b) = (a.min(b), a.max(b));
            if !pairs.insert((a, b)) {
                return Err(Error::Validation(format!(
                    "parallel link between nodes {} and {}",
                    labels[a], labels[b]
                )));
            }
            links.push(Link {
                id: LinkId(i),
                a: NodeId(a),
                b: NodeId(b),
                distance: d * scale,
                raw_distance: d,
            });
        }
        let mut adjacency = vec![Vec::new(); n];
        for l in &links {
            adjacency[l.a.0].push((l.b, l.id));
            adjacency[l.b.0].push((l.a, l.id));
        }
        for adj in &mut adjacency {
            adj.sort();
        }
        let topo = Topology {
            unit,
            labels,
            names,
            links,
            adjacency,
            warnings: Vec::new(),
        };
        if !topo.is_connected() {
            return Err(Error::Validation("topology is not connected".into()));
        }
        let warnings = (0..n)
            .filter(|&v| topo.adjacency[v].len() < 2)
            .map(|v| TopologyWarning::DegreeOne { node: NodeId(v) })
            .collect();
        Ok(Topology { warnings, ..topo })
    }

    /// Convenience constructor for tests and examples: nodes labelled `0..n`,
    /// distances in km.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(DistanceUnit::Km, (0..n as u32).collect(), vec![None; n], edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.0]
    }

    pub fn unit(&self) -> DistanceUnit {
        self.unit
    }

    pub fn warnings(&self) -> &[TopologyWarning] {
        &self.warnings
    }

    /// Label the node carried in the scenario file.
    pub fn label(&self, n: NodeId) -> u32 {
        self.labels[n.0]
    }

    pub fn name(&self, n: NodeId) -> Option<&str> {
        self.names[n.0].as_deref()
    }

    pub fn node_by_label(&self, label: u32) -> Option<NodeId> {
        self.labels.iter().position(|&l| l == label).map(NodeId)
    }

    /// Neighbors with the connecting link, ascending by neighbor id.
    pub fn neighbors(&self, n: NodeId) -> &[(NodeId, LinkId)] {
        &self.adjacency[n.0]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adjacency[n.0].len()
    }

    pub fn link_between(&self, u: NodeId, v: NodeId) -> Option<LinkId> {
        self.adjacency[u.0]
            .iter()
            .find(|(w, _)| *w == v)
            .map(|&(_, l)| l)
    }

    /// Link between two nodes given by their file labels.
    pub fn link_by_labels(&self, u: u32, v: u32) -> Option<LinkId> {
        self.link_between(self.node_by_label(u)?, self.node_by_label(v)?)
    }

    fn is_connected(&self) -> bool {
        self.reachable_from(NodeId(0), &BTreeSet::new()).len() == self.node_count()
    }

    /// Nodes reachable from `start` without crossing `excluded` links.
    pub fn reachable_from(&self, start: NodeId, excluded: &BTreeSet<LinkId>) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, l) in self.neighbors(u) {
                if !excluded.contains(&l) && seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Links whose removal disconnects the graph.
    pub fn bridges(&self) -> Vec<LinkId> {
        self.links
            .iter()
            .filter(|l| {
                let excluded = BTreeSet::from([l.id]);
                !self.reachable_from(l.a, &excluded).contains(&l.b)
            })
            .map(|l| l.id)
            .collect()
    }

    /// Minimum hop count between two nodes, ignoring distances.
    pub fn hop_distance(&self, src: NodeId, dst: NodeId) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[src.0] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            if u == dst {
                return Some(dist[u.0]);
            }
            for &(v, _) in self.neighbors(u) {
                if dist[v.0] == usize::MAX {
                    dist[v.0] = dist[u.0] + 1;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Formats a node sequence with file labels, e.g. `1-5-4`.
    pub fn format_nodes(&self, nodes: &[NodeId]) -> String {
        nodes
            .iter()
            .map(|n| self.label(*n).to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// A unit-rate (or integer-rate) demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    pub src: NodeId,
    pub dst: NodeId,
    pub rate: u32,
}

impl Flow {
    pub fn new(src: NodeId, dst: NodeId, rate: u32) -> Result<Self> {
        if src == dst {
            return Err(Error::Validation(format!("flow from node {src} to itself")));
        }
        if rate == 0 {
            return Err(Error::Validation(format!("flow {src}->{dst} has zero rate")));
        }
        Ok(Flow { src, dst, rate })
    }

    pub fn unit(src: NodeId, dst: NodeId) -> Self {
        Flow { src, dst, rate: 1 }
    }
}

/// Ordered list of demands. Order defines the planner's enumeration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandMatrix {
    flows: Vec<Flow>,
}

impl DemandMatrix {
    pub fn new(flows: Vec<Flow>) -> Result<Self> {
        if flows.is_empty() {
            return Err(Error::Validation("demand matrix is empty".into()));
        }
        Ok(DemandMatrix { flows })
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    /// Splits every flow into unit-rate subflows, keeping order.
    /// Returns the subflows with the index of the demand they came from.
    pub fn unit_subflows(&self) -> Vec<(usize, Flow)> {
        self.flows
            .iter()
            .enumerate()
            .flat_map(|(i, f)| (0..f.rate).map(move |_| (i, Flow::unit(f.src, f.dst))))
            .collect()
    }
}

/// A simple path: no repeated node, consecutive links share a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    /// Total length in km.
    pub length: f64,
}

impl Path {
    /// Builds a path from a node sequence. Fails if a hop has no link or a node repeats.
    pub fn from_nodes(topo: &Topology, nodes: Vec<NodeId>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Validation("path needs at least two nodes".into()));
        }
        let mut seen = BTreeSet::new();
        if !nodes.iter().all(|n| seen.insert(*n)) {
            return Err(Error::Validation(format!(
                "path {} repeats a node",
                topo.format_nodes(&nodes)
            )));
        }
        let mut links = Vec::with_capacity(nodes.len() - 1);
        let mut length = 0.0;
        for w in nodes.windows(2) {
            let l = topo.link_between(w[0], w[1]).ok_or_else(|| {
                Error::Validation(format!(
                    "no link between {} and {}",
                    topo.label(w[0]),
                    topo.label(w[1])
                ))
            })?;
            length += topo.link(l).distance;
            links.push(l);
        }
        Ok(Path {
            nodes,
            links,
            length,
        })
    }

    /// Path from file labels, for fixtures and tests.
    pub fn from_labels(topo: &Topology, labels: &[u32]) -> Result<Self> {
        let nodes = labels
            .iter()
            .map(|&l| {
                topo.node_by_label(l)
                    .ok_or_else(|| Error::Validation(format!("unknown node {l}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_nodes(topo, nodes)
    }

    pub fn src(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn dst(&self) -> NodeId {
        *self.nodes.last().expect("path has nodes")
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn uses(&self, link: LinkId) -> bool {
        self.links.contains(&link)
    }

    pub fn is_link_disjoint(&self, other: &Path) -> bool {
        self.links.iter().all(|l| !other.links.contains(l))
    }

    /// Position of `link` along the path, counted from the source.
    pub fn link_position(&self, link: LinkId) -> Option<usize> {
        self.links.iter().position(|&l| l == link)
    }

    /// Length of the prefix before hop `pos`, i.e. from the source to `nodes[pos]`.
    pub fn prefix_length(&self, topo: &Topology, pos: usize) -> f64 {
        self.links[..pos].iter().map(|&l| topo.link(l).distance).sum()
    }
}

/// Approximate float equality used for all distance comparisons.
pub(crate) fn dist_eq(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub(crate) fn dist_lt(a: f64, b: f64) -> bool {
    a < b && !dist_eq(a, b)
}
