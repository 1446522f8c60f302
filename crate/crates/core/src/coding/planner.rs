use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::group::{find_group, redundancy_ratio, CodingGroup};
use crate::error::{Error, Result};
use crate::plan::{PlannedFlow, Protection, ProtectionPlan, Scheme, Uncovered};
use crate::routing::{disjoint_path_pair, shortest_path};
use crate::topology::{DemandMatrix, Flow, NodeId, Topology};

/// Flow count above which candidate groups are limited by source proximity.
const UNLIMITED_RADIUS_FLOWS: usize = 12;
const DEFAULT_RADIUS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub thrsd_low: f64,
    pub thrsd_high: f64,
    pub thrsd_step: f64,
    pub n_max: usize,
    /// Max hop distance between sources of one candidate group.
    /// `None` picks unlimited for small demand sets and 3 otherwise.
    pub hop_radius: Option<usize>,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            thrsd_low: 1.6,
            thrsd_high: 3.0,
            thrsd_step: 0.2,
            n_max: 4,
            hop_radius: None,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(1.0 <= self.thrsd_low && self.thrsd_low <= self.thrsd_high) {
            return Err(Error::Validation(format!(
                "thresholds must satisfy 1 <= low ({}) <= high ({})",
                self.thrsd_low, self.thrsd_high
            )));
        }
        if !(self.thrsd_step > 0.0) {
            return Err(Error::Validation("threshold step must be positive".into()));
        }
        if self.n_max < 2 {
            return Err(Error::Validation("n_max must be at least 2".into()));
        }
        Ok(())
    }

    /// Threshold levels from low to high inclusive.
    pub fn thresholds(&self) -> Vec<f64> {
        let steps = ((self.thrsd_high - self.thrsd_low) / self.thrsd_step + 1e-9).floor() as usize;
        (0..=steps)
            .map(|k| self.thrsd_low + k as f64 * self.thrsd_step)
            .collect()
    }
}

struct Evaluated {
    group: CodingGroup,
    ratio: f64,
}

/// Calls `visit` for every combination of `k` entries of `pool` (in
/// lexicographic index order) whose flows share a destination and whose
/// sources are pairwise within `radius` hops.
fn for_each_combination(
    pool: &[usize],
    k: usize,
    flows: &[Flow],
    hops: &[Vec<usize>],
    radius: usize,
    visit: &mut dyn FnMut(&[usize]),
) {
    fn rec(
        pool: &[usize],
        start: usize,
        k: usize,
        chosen: &mut Vec<usize>,
        flows: &[Flow],
        hops: &[Vec<usize>],
        radius: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if chosen.len() == k {
            visit(chosen);
            return;
        }
        let need = k - chosen.len();
        for i in start..pool.len() {
            if pool.len() - i < need {
                break;
            }
            let f = flows[pool[i]];
            let fits = chosen.iter().all(|&c| {
                let g = flows[c];
                g.dst == f.dst && g.rate == f.rate && hops[g.src.0][f.src.0] <= radius
            });
            if fits {
                chosen.push(pool[i]);
                rec(pool, i + 1, k, chosen, flows, hops, radius, visit);
                chosen.pop();
            }
        }
    }
    rec(pool, 0, k, &mut Vec::with_capacity(k), flows, hops, radius, visit);
}

fn all_pairs_hops(topo: &Topology) -> Vec<Vec<usize>> {
    topo.nodes()
        .map(|u| {
            topo.nodes()
                .map(|v| topo.hop_distance(u, v).unwrap_or(usize::MAX))
                .collect()
        })
        .collect()
}

/// Threshold-driven diversity-coding planner.
///
/// Flows are split into unit-rate subflows. For each threshold level from
/// low to high, and each group size from `n_max` down to 2, every
/// combination of still-unprotected flows is tried; a combination becomes a
/// coding group when it embeds and its redundancy ratio is within the
/// level. A group is only taken if it costs no more than protecting its
/// flows individually by 1+1 APS. Leftover flows get 1+1 APS.
pub fn algorithm_one(topo: &Topology, dm: &DemandMatrix, params: &SearchParams) -> ProtectionPlan {
    params.validate().expect("search parameters are validated by the caller");
    let subflows = dm.unit_subflows();
    let flows: Vec<Flow> = subflows.iter().map(|(_, f)| *f).collect();
    let radius = params.hop_radius.unwrap_or(if flows.len() <= UNLIMITED_RADIUS_FLOWS {
        usize::MAX
    } else {
        DEFAULT_RADIUS
    });
    let hops = all_pairs_hops(topo);
    let aps: Vec<Option<f64>> = flows
        .iter()
        .map(|f| disjoint_path_pair(topo, f.src, f.dst).map(|(a, b)| f64::from(f.rate) * (a.length + b.length)))
        .collect();

    let mut unprotected: BTreeSet<usize> = (0..flows.len()).collect();
    let mut cache: HashMap<(NodeId, Vec<NodeId>), Option<Evaluated>> = HashMap::new();
    let mut accepted: Vec<(Vec<usize>, CodingGroup)> = Vec::new();

    for level in params.thresholds() {
        for n in (2..=params.n_max).rev() {
            let pool: Vec<usize> = unprotected.iter().copied().collect();
            for_each_combination(&pool, n, &flows, &hops, radius, &mut |combo| {
                if !combo.iter().all(|i| unprotected.contains(i)) {
                    return;
                }
                let members: Vec<Flow> = combo.iter().map(|&i| flows[i]).collect();
                let key = (members[0].dst, members.iter().map(|f| f.src).collect());
                let eval = cache.entry(key).or_insert_with(|| {
                    find_group(topo, &members).map(|group| Evaluated {
                        ratio: redundancy_ratio(&group, topo),
                        group,
                    })
                });
                let Some(eval) = eval else { return };
                if eval.ratio > level + 1e-9 {
                    return;
                }
                let aps_cost: Option<f64> = combo.iter().map(|&i| aps[i]).sum();
                if aps_cost.is_some_and(|c| eval.group.consumed() > c + 1e-9) {
                    return;
                }
                for i in combo {
                    unprotected.remove(i);
                }
                let mut group = eval.group.clone();
                group.members = combo.to_vec();
                accepted.push((combo.to_vec(), group));
            });
        }
    }

    let mut plan = ProtectionPlan::new(Scheme::DiversityCoding, topo);
    let mut slots: Vec<Option<PlannedFlow>> = vec![None; flows.len()];
    for (gi, (combo, group)) in accepted.into_iter().enumerate() {
        for (k, &i) in combo.iter().enumerate() {
            slots[i] = Some(PlannedFlow {
                demand: subflows[i].0,
                flow: flows[i],
                working: group.working[k].clone(),
                protection: Protection::Coded { group: gi },
            });
        }
        plan.add_spare(&group.protection.links, group.rate());
        plan.groups.push(group);
    }
    for i in unprotected {
        let f = flows[i];
        let planned = match disjoint_path_pair(topo, f.src, f.dst) {
            Some((working, backup)) => {
                plan.add_spare(&backup.links, f.rate);
                PlannedFlow {
                    demand: subflows[i].0,
                    flow: f,
                    working,
                    protection: Protection::Aps { backup },
                }
            }
            None => {
                plan.uncovered.push(Uncovered {
                    flows: vec![i],
                    link: None,
                    reason: "no link-disjoint backup path exists".into(),
                });
                PlannedFlow {
                    demand: subflows[i].0,
                    flow: f,
                    working: shortest_path(topo, f.src, f.dst, &BTreeSet::new())
                        .expect("topologies are connected"),
                    protection: Protection::Unprotected,
                }
            }
        };
        slots[i] = Some(planned);
    }
    plan.flows = slots.into_iter().map(|s| s.expect("every flow planned")).collect();
    for f in &plan.flows.clone() {
        plan.add_working(&f.working, f.flow.rate);
    }
    plan.derive_recovery_actions(topo);
    plan
}
