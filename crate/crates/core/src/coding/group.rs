use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::gf2::Gf2Matrix;
use crate::routing::{min_cost_disjoint_paths, shortest_path};
use crate::topology::{dist_eq, dist_lt, Flow, LinkId, NodeId, Path, Topology};

/// Route carrying the XOR parity. It starts at the first source, passes
/// every other source (where that source's data is folded in) and ends at
/// the decode node. Links never repeat; nodes may.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityRoute {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    /// Position in `nodes` where each group member's data joins the parity.
    pub taps: Vec<usize>,
    pub length: f64,
}

impl ParityRoute {
    pub fn uses(&self, link: LinkId) -> bool {
        self.links.contains(&link)
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }
}

/// N working paths to one decode node plus one parity route, all pairwise
/// link-disjoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodingGroup {
    /// Flow indices in the owning plan (`0..N` for a standalone group).
    pub members: Vec<usize>,
    pub flows: Vec<Flow>,
    pub working: Vec<Path>,
    pub protection: ParityRoute,
    pub decode_node: NodeId,
}

impl CodingGroup {
    pub fn size(&self) -> usize {
        self.flows.len()
    }

    pub fn rate(&self) -> u32 {
        self.flows[0].rate
    }

    /// Capacity-distance consumed by working paths plus the parity route.
    pub fn consumed(&self) -> f64 {
        let rate = f64::from(self.rate());
        let working: f64 = self.working.iter().map(|p| p.length).sum();
        rate * (working + self.protection.length)
    }

    /// True when every route is pairwise link-disjoint from every other.
    pub fn routes_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.working
            .iter()
            .flat_map(|p| p.links.iter())
            .chain(self.protection.links.iter())
            .all(|l| seen.insert(*l))
    }
}

/// Consumed capacity-distance of the group over what its flows would use
/// on unconstrained shortest paths. Always at least 1.
pub fn redundancy_ratio(group: &CodingGroup, topo: &Topology) -> f64 {
    let baseline: f64 = group
        .flows
        .iter()
        .map(|f| {
            let p = shortest_path(topo, f.src, f.dst, &BTreeSet::new())
                .expect("topologies are connected");
            f64::from(f.rate) * p.length
        })
        .sum();
    group.consumed() / baseline
}

/// Walks from `start` visiting every node of `targets` nearest-first on the
/// residual graph. Returns the legs in visiting order, or `None` when some
/// target cannot be reached.
fn nearest_neighbor_legs(
    topo: &Topology,
    start: NodeId,
    targets: &BTreeSet<NodeId>,
    excluded: &mut BTreeSet<LinkId>,
) -> Option<Vec<Path>> {
    let mut legs = Vec::new();
    let mut at = start;
    let mut left = targets.clone();
    left.remove(&start);
    while !left.is_empty() {
        // nearest remaining target; ties by smaller node id
        let mut best: Option<Path> = None;
        for &t in &left {
            if let Some(p) = shortest_path(topo, at, t, excluded) {
                if best.as_ref().is_none_or(|b| dist_lt(p.length, b.length)) {
                    best = Some(p);
                }
            }
        }
        let leg = best?;
        excluded.extend(leg.links.iter().copied());
        at = leg.dst();
        left.remove(&at);
        // a leg may pass other targets on its way; they count as visited
        for n in &leg.nodes {
            left.remove(n);
        }
        legs.push(leg);
    }
    Some(legs)
}

fn candidate_group(topo: &Topology, flows: &[Flow], last: NodeId) -> Option<CodingGroup> {
    let dst = flows[0].dst;
    let mut sources: Vec<NodeId> = flows.iter().map(|f| f.src).collect();
    sources.push(last);
    let mut paths = min_cost_disjoint_paths(topo, &sources, dst, &BTreeSet::new())?;

    // Among paths leaving `last` the shortest carries the parity so that
    // parity never lags a working stream from the same source.
    let from_last: Vec<usize> = (0..paths.len()).filter(|&i| sources[i] == last).collect();
    let parity_idx = *from_last
        .iter()
        .min_by(|&&i, &&j| {
            if dist_eq(paths[i].length, paths[j].length) {
                paths[i].nodes.cmp(&paths[j].nodes)
            } else {
                paths[i].length.total_cmp(&paths[j].length)
            }
        })
        .expect("last source has at least one path");
    // keep working paths aligned with `flows`: the spare path from `last`
    // sits at the end
    let end = paths.len() - 1;
    paths.swap(parity_idx, end);
    let final_leg = paths.pop().expect("at least two paths");
    let working = paths;

    let mut excluded: BTreeSet<LinkId> = working
        .iter()
        .flat_map(|p| p.links.iter().copied())
        .chain(final_leg.links.iter().copied())
        .collect();
    // Collection legs stay away from the decode node.
    excluded.extend(topo.neighbors(dst).iter().map(|&(_, l)| l));

    let distinct: BTreeSet<NodeId> = flows.iter().map(|f| f.src).collect();
    let legs = nearest_neighbor_legs(topo, last, &distinct, &mut excluded)?;

    // Legs were found outward from `last`; the parity travels them inward.
    let mut nodes = Vec::new();
    let mut links = Vec::new();
    for leg in legs.iter().rev() {
        let mut rev_nodes: Vec<NodeId> = leg.nodes.iter().rev().copied().collect();
        if !nodes.is_empty() {
            rev_nodes.remove(0);
        }
        nodes.extend(rev_nodes);
        links.extend(leg.links.iter().rev().copied());
    }
    if nodes.is_empty() {
        nodes.push(last);
    }
    nodes.extend(final_leg.nodes[1..].iter().copied());
    links.extend(final_leg.links.iter().copied());

    let taps = flows
        .iter()
        .map(|f| nodes.iter().position(|&n| n == f.src).expect("route visits every source"))
        .collect();
    let length = links.iter().map(|&l| topo.link(l).distance).sum();
    Some(CodingGroup {
        members: (0..flows.len()).collect(),
        flows: flows.to_vec(),
        working,
        protection: ParityRoute {
            nodes,
            links,
            taps,
            length,
        },
        decode_node: dst,
    })
}

/// Embeds `flows` (same destination, same rate) as one coding group.
///
/// Working paths and the parity route's final leg are routed jointly as
/// minimum-cost link-disjoint paths; the parity then collects the remaining
/// sources nearest-first on links no working path uses. Every source is
/// tried as the last collection point and the cheapest embedding is kept.
pub fn find_group(topo: &Topology, flows: &[Flow]) -> Option<CodingGroup> {
    assert!(flows.len() >= 2, "a coding group needs at least two flows");
    let dst = flows[0].dst;
    assert!(
        flows.iter().all(|f| f.dst == dst && f.rate == flows[0].rate),
        "grouped flows must share destination and rate"
    );
    let distinct: BTreeSet<NodeId> = flows.iter().map(|f| f.src).collect();
    let mut best: Option<CodingGroup> = None;
    for &last in &distinct {
        if let Some(g) = candidate_group(topo, flows, last) {
            debug_assert!(g.routes_disjoint());
            if best
                .as_ref()
                .is_none_or(|b| dist_lt(g.consumed(), b.consumed()))
            {
                best = Some(g);
            }
        }
    }
    best
}

/// Signals reaching the decode node after `failed` goes down: one identity
/// row per surviving working stream plus the parity row if its route
/// survives. Columns are the group's data streams.
pub fn decode_matrix(group: &CodingGroup, failed: Option<LinkId>) -> Gf2Matrix {
    let n = group.size();
    let mut m = Gf2Matrix::new(n);
    for (k, p) in group.working.iter().enumerate() {
        if !failed.is_some_and(|l| p.uses(l)) {
            m.push_identity_row(k);
        }
    }
    if !failed.is_some_and(|l| group.protection.uses(l)) {
        // each stream whose tap lies on the route contributes to the parity
        let row: Vec<bool> = group
            .protection
            .taps
            .iter()
            .map(|&t| t < group.protection.nodes.len())
            .collect();
        m.push_row(&row);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Topology;

    /// Common source 0, common sink 1, `k` equal-length disjoint relays.
    fn fig1(k: usize) -> Topology {
        let mut edges = Vec::new();
        for i in 0..k {
            edges.push((0, 2 + i, 1.0));
            edges.push((2 + i, 1, 1.0));
        }
        Topology::from_edges(k + 2, &edges).unwrap()
    }

    #[test]
    fn star_ratio_is_n_plus_one_over_n() {
        for n in 2..=4 {
            let t = fig1(n + 1);
            let flows = vec![Flow::unit(NodeId(0), NodeId(1)); n];
            let g = find_group(&t, &flows).unwrap();
            assert!(g.routes_disjoint());
            let ratio = redundancy_ratio(&g, &t);
            assert!((ratio - (n as f64 + 1.0) / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn not_enough_disjoint_routes() {
        let t = fig1(2);
        let flows = vec![Flow::unit(NodeId(0), NodeId(1)); 2];
        assert!(find_group(&t, &flows).is_none());
    }

    #[test]
    fn star_of_distinct_sources() {
        // sink 0; sources 1..=3 each linked to the sink, ring 1-2-3-4-1, relay 4-0
        let t = Topology::from_edges(
            5,
            &[
                (1, 0, 1.0),
                (2, 0, 1.0),
                (3, 0, 1.0),
                (4, 0, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 1, 1.0),
            ],
        )
        .unwrap();
        let flows: Vec<Flow> = (1..=3).map(|s| Flow::unit(NodeId(s), NodeId(0))).collect();
        let g = find_group(&t, &flows).unwrap();
        assert!(g.routes_disjoint());
        assert_eq!(g.working.len(), 3);
        assert_eq!(*g.protection.nodes.last().unwrap(), NodeId(0));
        for (k, f) in flows.iter().enumerate() {
            assert_eq!(g.protection.nodes[g.protection.taps[k]], f.src);
            assert_eq!(g.working[k].src(), f.src);
        }
        assert!(redundancy_ratio(&g, &t) >= 1.0);
    }

    #[test]
    fn decode_matrix_shapes() {
        let t = fig1(3);
        let g = find_group(&t, &[Flow::unit(NodeId(0), NodeId(1)); 2]).unwrap();
        let m = decode_matrix(&g, None);
        assert_eq!(m.row_count(), 3);
        assert!(m.has_full_column_rank());

        let on_working = g.working[0].links[0];
        let m = decode_matrix(&g, Some(on_working));
        assert_eq!(m.row_count(), 2);
        assert_eq!(m.row(1), vec![true, true]);
        assert_eq!(m.rank(), 2);

        let on_parity = g.protection.links[0];
        let m = decode_matrix(&g, Some(on_parity));
        assert_eq!(m.row_count(), 2);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn shared_working_link_is_rank_deficient() {
        let t = fig1(3);
        let mut g = find_group(&t, &[Flow::unit(NodeId(0), NodeId(1)); 2]).unwrap();
        g.working[1] = g.working[0].clone();
        let m = decode_matrix(&g, Some(g.working[0].links[0]));
        assert_eq!(m.rank(), 1);
        assert!(!m.has_full_column_rank());
    }
}
