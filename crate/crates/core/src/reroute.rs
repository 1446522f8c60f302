//! Source-rerouting baseline with spare capacity shared across failures.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::plan::{PlannedFlow, Protection, ProtectionPlan, Scheme, Uncovered};
use crate::routing::{disjoint_path_pair, shortest_path};
use crate::topology::{DemandMatrix, Flow, LinkId, Path, Topology};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackupAssignment {
    pub flow: Flow,
    pub working: Path,
    pub backup: Path,
}

/// Working on the shortest path and backup on the shortest path avoiding it;
/// when that leaves no backup (trap topology) the jointly optimal disjoint
/// pair is used instead.
pub fn backup_assignment(topo: &Topology, flow: Flow) -> Option<BackupAssignment> {
    let working = shortest_path(topo, flow.src, flow.dst, &BTreeSet::new())?;
    let excluded: BTreeSet<LinkId> = working.links.iter().copied().collect();
    if let Some(backup) = shortest_path(topo, flow.src, flow.dst, &excluded) {
        return Some(BackupAssignment {
            flow,
            working,
            backup,
        });
    }
    let (working, backup) = disjoint_path_pair(topo, flow.src, flow.dst)?;
    Some(BackupAssignment {
        flow,
        working,
        backup,
    })
}

/// Spare per link: the largest backup load any single failure puts on it.
pub fn shared_spare(link_count: usize, assignments: &[(u32, &Path, &Path)]) -> Vec<u32> {
    let mut spare = vec![0u32; link_count];
    for failed in 0..link_count {
        let failed = LinkId(failed);
        let mut load = vec![0u32; link_count];
        for &(rate, working, backup) in assignments {
            if working.uses(failed) {
                for l in &backup.links {
                    load[l.0] += rate;
                }
            }
        }
        for (s, l) in spare.iter_mut().zip(load) {
            *s = (*s).max(l);
        }
    }
    spare
}

pub fn sr_design(topo: &Topology, dm: &DemandMatrix) -> ProtectionPlan {
    let mut plan = ProtectionPlan::new(Scheme::SourceRerouting, topo);
    for (i, &flow) in dm.flows().iter().enumerate() {
        let planned = match backup_assignment(topo, flow) {
            Some(a) => PlannedFlow {
                demand: i,
                flow,
                working: a.working,
                protection: Protection::Reroute { backup: a.backup },
            },
            None => {
                plan.uncovered.push(Uncovered {
                    flows: vec![i],
                    link: None,
                    reason: "no link-disjoint backup path exists".into(),
                });
                PlannedFlow {
                    demand: i,
                    flow,
                    working: shortest_path(topo, flow.src, flow.dst, &BTreeSet::new())
                        .expect("topologies are connected"),
                    protection: Protection::Unprotected,
                }
            }
        };
        plan.add_working(&planned.working, flow.rate);
        plan.flows.push(planned);
    }
    let assignments: Vec<(u32, &Path, &Path)> = plan
        .flows
        .iter()
        .filter_map(|f| match &f.protection {
            Protection::Reroute { backup } => Some((f.flow.rate, &f.working, backup)),
            _ => None,
        })
        .collect();
    plan.spare_cap = shared_spare(topo.link_count(), &assignments);
    plan.derive_recovery_actions(topo);
    plan
}
