//! p-cycle baseline: cycle enumeration and greedy efficiency-driven
//! placement of unit-capacity cycle copies.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::plan::{PlannedFlow, Protection, ProtectionPlan, Scheme, Uncovered};
use crate::routing::shortest_path;
use crate::topology::{dist_eq, dist_lt, DemandMatrix, LinkId, NodeId, Path, Topology};

/// Upper bound on cycle size when none is given.
pub const DEFAULT_MAX_HOPS: usize = 12;

/// Simple cycle in canonical form: starts at its smallest node and the
/// second node is smaller than the last. `links[i]` joins `nodes[i]` and
/// `nodes[(i + 1) % len]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSelection {
    pub cycle: Cycle,
    pub copies: u32,
}

impl Cycle {
    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    /// Protection units one copy gives a failure of `link`: 1 on-cycle,
    /// 2 straddling, 0 otherwise.
    pub fn protects(&self, topo: &Topology, link: LinkId) -> u32 {
        if self.links.contains(&link) {
            return 1;
        }
        let l = topo.link(link);
        if self.contains_node(l.a) && self.contains_node(l.b) {
            2
        } else {
            0
        }
    }

    fn arc(&self, topo: &Topology, from: usize, to: usize, forward: bool) -> Path {
        let k = self.nodes.len();
        let mut nodes = vec![self.nodes[from]];
        let mut links = Vec::new();
        let mut i = from;
        while i != to {
            let (next, link) = if forward {
                ((i + 1) % k, self.links[i])
            } else {
                ((i + k - 1) % k, self.links[(i + k - 1) % k])
            };
            nodes.push(self.nodes[next]);
            links.push(link);
            i = next;
        }
        let length = links.iter().map(|&l| topo.link(l).distance).sum();
        Path {
            nodes,
            links,
            length,
        }
    }

    /// Protection routes this cycle offers around a failed `link`, from
    /// `link.a` to `link.b`: the rest of the ring for an on-cycle link, both
    /// arcs for a straddling one.
    pub fn detours(&self, topo: &Topology, link: LinkId) -> Vec<Path> {
        let l = topo.link(link);
        let (Some(ia), Some(ib)) = (
            self.nodes.iter().position(|&n| n == l.a),
            self.nodes.iter().position(|&n| n == l.b),
        ) else {
            return Vec::new();
        };
        let forward = self.arc(topo, ia, ib, true);
        let backward = self.arc(topo, ia, ib, false);
        if self.links.contains(&link) {
            // the arc made of just the failed link is not a detour
            vec![if forward.links == [link] { backward } else { forward }]
        } else {
            vec![forward, backward]
        }
    }
}

/// All simple cycles of 3..=`max_hops` links, each once, in lexicographic
/// order of their canonical node sequences.
pub fn enumerate_cycles(topo: &Topology, max_hops: usize) -> Vec<Cycle> {
    assert!(max_hops >= 3, "cycles have at least three links");
    let mut out = Vec::new();
    let mut on_path = vec![false; topo.node_count()];
    for start in topo.nodes() {
        let mut nodes = vec![start];
        let mut links = Vec::new();
        on_path[start.0] = true;
        extend(topo, start, max_hops, &mut nodes, &mut links, &mut on_path, &mut out);
        on_path[start.0] = false;
    }
    out.sort_by(|a, b| a.nodes.cmp(&b.nodes));
    out
}

fn extend(
    topo: &Topology,
    start: NodeId,
    max_hops: usize,
    nodes: &mut Vec<NodeId>,
    links: &mut Vec<LinkId>,
    on_path: &mut [bool],
    out: &mut Vec<Cycle>,
) {
    let u = *nodes.last().expect("path is never empty");
    for &(v, l) in topo.neighbors(u) {
        if v == start {
            // close, keeping one of the two orientations
            if nodes.len() >= 3 && nodes[1] < u {
                let mut cyc_links = links.clone();
                cyc_links.push(l);
                let length = cyc_links.iter().map(|&l| topo.link(l).distance).sum();
                out.push(Cycle {
                    nodes: nodes.clone(),
                    links: cyc_links,
                    length,
                });
            }
        } else if v > start && !on_path[v.0] && nodes.len() < max_hops {
            on_path[v.0] = true;
            nodes.push(v);
            links.push(l);
            extend(topo, start, max_hops, nodes, links, on_path, out);
            links.pop();
            nodes.pop();
            on_path[v.0] = false;
        }
    }
}

/// Links whose endpoints both lie on the cycle but which are not part of it.
pub fn straddling_links(cycle: &Cycle, topo: &Topology) -> Vec<LinkId> {
    topo.links()
        .iter()
        .filter(|l| cycle.protects(topo, l.id) == 2)
        .map(|l| l.id)
        .collect()
}

fn useful_units(cycle: &Cycle, straddlers: &[LinkId], unprotected: &[u32]) -> u32 {
    let on: u32 = cycle.links.iter().map(|l| unprotected[l.0].min(1)).sum();
    let across: u32 = straddlers.iter().map(|l| unprotected[l.0].min(2)).sum();
    on + across
}

/// Working capacity one copy would newly protect, per km of cycle.
pub fn apriori_efficiency(cycle: &Cycle, topo: &Topology, unprotected: &[u32]) -> f64 {
    let straddlers = straddling_links(cycle, topo);
    f64::from(useful_units(cycle, &straddlers, unprotected)) / cycle.length
}

/// Greedy p-cycle placement against shortest-path working capacity.
pub fn pc_design(topo: &Topology, dm: &DemandMatrix, max_hops: Option<usize>) -> ProtectionPlan {
    let max_hops = max_hops.unwrap_or_else(|| topo.node_count().min(DEFAULT_MAX_HOPS)).max(3);
    let mut plan = ProtectionPlan::new(Scheme::PCycles, topo);
    for (i, &flow) in dm.flows().iter().enumerate() {
        let working = shortest_path(topo, flow.src, flow.dst, &BTreeSet::new())
            .expect("topologies are connected");
        plan.add_working(&working, flow.rate);
        plan.flows.push(PlannedFlow {
            demand: i,
            flow,
            working,
            protection: Protection::Cycles,
        });
    }

    let cycles = enumerate_cycles(topo, max_hops);
    let straddlers: Vec<Vec<LinkId>> = cycles.iter().map(|c| straddling_links(c, topo)).collect();
    let mut unprotected = plan.working_cap.clone();
    let mut copies = vec![0u32; cycles.len()];
    let mut order = Vec::new();

    loop {
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in cycles.iter().enumerate() {
            let units = useful_units(c, &straddlers[k], &unprotected);
            if units == 0 {
                continue;
            }
            let score = f64::from(units) / c.length;
            let better = match best {
                None => true,
                Some((b, bs)) => {
                    dist_lt(bs, score) || (dist_eq(bs, score) && dist_lt(c.length, cycles[b].length))
                }
            };
            if better {
                best = Some((k, score));
            }
        }
        let Some((k, _)) = best else { break };
        for l in &cycles[k].links {
            unprotected[l.0] -= unprotected[l.0].min(1);
        }
        for l in &straddlers[k] {
            unprotected[l.0] -= unprotected[l.0].min(2);
        }
        if copies[k] == 0 {
            order.push(k);
        }
        copies[k] += 1;
    }

    for k in order {
        plan.add_spare(&cycles[k].links, copies[k]);
        plan.cycles.push(CycleSelection {
            cycle: cycles[k].clone(),
            copies: copies[k],
        });
    }
    for (l, &left) in unprotected.iter().enumerate() {
        if left > 0 {
            plan.uncovered.push(Uncovered {
                flows: plan.affected_by(LinkId(l)),
                link: Some(LinkId(l)),
                reason: format!("{left} working unit(s) not covered by any cycle"),
            });
        }
    }
    plan.derive_recovery_actions(topo);
    plan
}
