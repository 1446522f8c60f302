//! Shortest-path and link-disjoint routing.
//!
//! Ties are always broken toward the lexicographically smallest node
//! sequence so that every plan is reproducible.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use crate::topology::{dist_eq, dist_lt, LinkId, NodeId, Path, Topology};

/// Default propagation speed in fiber, km/s.
pub const FIBER_KM_PER_S: f64 = 2.0e5;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Distance from every node to `target` avoiding `excluded` links.
/// Unreachable nodes get `f64::INFINITY`.
pub fn distances_to(topo: &Topology, target: NodeId, excluded: &BTreeSet<LinkId>) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; topo.node_count()];
    let mut heap = BinaryHeap::new();
    dist[target.0] = 0.0;
    heap.push(Reverse((Dist(0.0), target)));
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if d > dist[u.0] {
            continue;
        }
        for &(v, l) in topo.neighbors(u) {
            if excluded.contains(&l) {
                continue;
            }
            let nd = d + topo.link(l).distance;
            if nd < dist[v.0] {
                dist[v.0] = nd;
                heap.push(Reverse((Dist(nd), v)));
            }
        }
    }
    dist
}

/// Minimum-distance simple path from `src` to `dst` avoiding `excluded`.
///
/// Among equal-length paths the lexicographically smallest node sequence
/// wins: distances to `dst` are computed first, then the path is walked
/// greedily from `src` through the smallest admissible neighbor.
pub fn shortest_path(
    topo: &Topology,
    src: NodeId,
    dst: NodeId,
    excluded: &BTreeSet<LinkId>,
) -> Option<Path> {
    assert_ne!(src, dst, "shortest_path needs distinct endpoints");
    let dist = distances_to(topo, dst, excluded);
    if !dist[src.0].is_finite() {
        return None;
    }
    let mut nodes = vec![src];
    let mut links = Vec::new();
    let mut u = src;
    while u != dst {
        let (v, l) = topo
            .neighbors(u)
            .iter()
            .copied()
            .filter(|(_, l)| !excluded.contains(l))
            .find(|&(v, l)| {
                dist[v.0].is_finite() && dist_eq(dist[u.0], topo.link(l).distance + dist[v.0])
            })
            .expect("a tight neighbor exists on every shortest-path tree");
        nodes.push(v);
        links.push(l);
        u = v;
    }
    let length = links.iter().map(|&l| topo.link(l).distance).sum();
    Some(Path {
        nodes,
        links,
        length,
    })
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i32,
    cost: f64,
    link: Option<LinkId>,
}

/// Residual network for successive-shortest-path min-cost flow.
struct FlowNet {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        FlowNet {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i32, cost: f64, link: Option<LinkId>) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc {
            to,
            cap,
            cost,
            link,
        });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: 0,
            cost: -cost,
            link,
        });
    }

    /// Bellman-Ford (queue based) shortest augmenting path; returns arc chain.
    fn augmenting_path(&self, source: usize, sink: usize) -> Option<Vec<usize>> {
        let n = self.out.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![usize::MAX; n];
        let mut queued = vec![false; n];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0.0;
        queued[source] = true;
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            for &ai in &self.out[u] {
                let a = &self.arcs[ai];
                if a.cap > 0 && dist_lt(dist[u] + a.cost, dist[a.to]) {
                    dist[a.to] = dist[u] + a.cost;
                    via[a.to] = ai;
                    if !queued[a.to] {
                        queued[a.to] = true;
                        queue.push_back(a.to);
                    }
                }
            }
        }
        if !dist[sink].is_finite() {
            return None;
        }
        let mut chain = Vec::new();
        let mut v = sink;
        while v != source {
            let ai = via[v];
            chain.push(ai);
            v = self.arcs[ai ^ 1].to;
        }
        chain.reverse();
        Some(chain)
    }

    fn push(&mut self, chain: &[usize]) {
        for &ai in chain {
            self.arcs[ai].cap -= 1;
            self.arcs[ai ^ 1].cap += 1;
        }
    }
}

/// Link-disjoint paths, one per entry of `sources`, all ending at `sink`,
/// with minimum total distance. Repeated sources get several paths.
///
/// Successive shortest augmenting paths: each new path may reroute the
/// earlier ones, so trap topologies that defeat shortest-then-remove are
/// handled. Returns `None` when the cut around `sink` is too small.
pub fn min_cost_disjoint_paths(
    topo: &Topology,
    sources: &[NodeId],
    sink: NodeId,
    excluded: &BTreeSet<LinkId>,
) -> Option<Vec<Path>> {
    assert!(sources.iter().all(|&s| s != sink));
    let n = topo.node_count();
    let super_source = n;
    let mut net = FlowNet::new(n + 1);
    let distinct: BTreeSet<NodeId> = sources.iter().copied().collect();
    for &s in &distinct {
        let count = sources.iter().filter(|&&x| x == s).count() as i32;
        net.add_arc(super_source, s.0, count, 0.0, None);
    }
    for l in topo.links() {
        if excluded.contains(&l.id) {
            continue;
        }
        net.add_arc(l.a.0, l.b.0, 1, l.distance, Some(l.id));
        net.add_arc(l.b.0, l.a.0, 1, l.distance, Some(l.id));
    }
    for _ in 0..sources.len() {
        let chain = net.augmenting_path(super_source, sink.0)?;
        net.push(&chain);
    }

    // Net flow per directed link, opposite directions cancelled.
    let mut used: Vec<(NodeId, NodeId, LinkId)> = Vec::new();
    for l in topo.links() {
        if excluded.contains(&l.id) {
            continue;
        }
        let flow_of = |from: usize| -> i32 {
            net.out[from]
                .iter()
                .map(|&ai| &net.arcs[ai])
                .filter(|a| a.link == Some(l.id) && a.cost > 0.0 && a.to == l.other(NodeId(from)).0)
                .map(|a| 1 - a.cap)
                .sum()
        };
        let forward = flow_of(l.a.0);
        let backward = flow_of(l.b.0);
        match forward - backward {
            1 => used.push((l.a, l.b, l.id)),
            -1 => used.push((l.b, l.a, l.id)),
            _ => {}
        }
    }

    let mut paths = Vec::with_capacity(sources.len());
    for &s in sources {
        let mut nodes = vec![s];
        let mut links = Vec::new();
        let mut u = s;
        while u != sink {
            let idx = used
                .iter()
                .enumerate()
                .filter(|(_, (from, _, _))| *from == u)
                .min_by_key(|(_, (_, to, _))| *to)
                .map(|(i, _)| i)?;
            let (_, v, l) = used.remove(idx);
            nodes.push(v);
            links.push(l);
            u = v;
        }
        let length = links.iter().map(|&l| topo.link(l).distance).sum();
        paths.push(Path {
            nodes,
            links,
            length,
        });
    }
    Some(paths)
}

/// Two link-disjoint `src`→`dst` paths of minimum combined distance,
/// shorter one first.
pub fn disjoint_path_pair(topo: &Topology, src: NodeId, dst: NodeId) -> Option<(Path, Path)> {
    assert_ne!(src, dst, "disjoint_path_pair needs distinct endpoints");
    let mut paths = min_cost_disjoint_paths(topo, &[src, src], dst, &BTreeSet::new())?;
    paths.sort_by(|a, b| {
        if dist_eq(a.length, b.length) {
            a.nodes.cmp(&b.nodes)
        } else {
            a.length.total_cmp(&b.length)
        }
    });
    let second = paths.pop()?;
    let first = paths.pop()?;
    Some((first, second))
}

/// One-way propagation delay of a path, seconds.
pub fn path_delay(path: &Path, km_per_s: f64) -> f64 {
    path.length / km_per_s
}
