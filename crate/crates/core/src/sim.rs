//! Exhaustive single-link-failure sweep.
//!
//! Every link is failed in turn. Each scheme's recovery is checked (rank
//! and bit-level decoding for diversity coding, spare/cycle capacity for the
//! rerouting schemes) and the per-flow geometry that feeds the restoration
//! time formulas is measured on the actual routes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coding::{verify_decodable, CodingGroup};
use crate::error::Result;
use crate::metrics::{qor, restoration_time, scp_from_totals, FailureGeometry, RtParams, SchemeResult, SwitchPoint};
use crate::plan::{Protection, ProtectionPlan, Scheme};
use crate::routing::shortest_path;
use crate::topology::{LinkId, Path, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("expected {expected} payloads, got {got}")]
    PayloadCount { expected: usize, got: usize },
    #[error("payloads differ in length")]
    PayloadLength,
    #[error("streams {missing:?} lost and cannot be rebuilt from the received signals")]
    RankDeficient { missing: Vec<usize> },
}

/// Bit-level simulation of one coding group under a failure.
///
/// The parity starts empty at the head of the route and each source XORs
/// its payload in at its tap; the parity is lost if the failed link lies
/// further along. At the decode node a single missing stream is rebuilt as
/// parity XOR the other streams.
pub fn xor_stream_check(
    group: &CodingGroup,
    failed: Option<LinkId>,
    payloads: &[Vec<u8>],
) -> std::result::Result<Vec<Vec<u8>>, DecodeError> {
    let n = group.size();
    if payloads.len() != n {
        return Err(DecodeError::PayloadCount {
            expected: n,
            got: payloads.len(),
        });
    }
    let width = payloads[0].len();
    if payloads.iter().any(|p| p.len() != width) {
        return Err(DecodeError::PayloadLength);
    }

    let route = &group.protection;
    let mut parity = Some(vec![0u8; width]);
    for pos in 0..route.nodes.len() {
        if let Some(acc) = parity.as_mut() {
            for (k, _) in route.taps.iter().enumerate().filter(|(_, &t)| t == pos) {
                for (a, b) in acc.iter_mut().zip(&payloads[k]) {
                    *a ^= b;
                }
            }
        }
        if pos < route.links.len() && Some(route.links[pos]) == failed {
            parity = None;
        }
    }

    let received: Vec<Option<&Vec<u8>>> = group
        .working
        .iter()
        .zip(payloads)
        .map(|(p, data)| (!failed.is_some_and(|l| p.uses(l))).then_some(data))
        .collect();
    let missing: Vec<usize> = (0..n).filter(|&k| received[k].is_none()).collect();
    match (missing.as_slice(), parity) {
        ([], _) => Ok(payloads.to_vec()),
        ([lost], Some(mut acc)) => {
            for (k, data) in received.iter().enumerate() {
                if let Some(data) = data {
                    debug_assert_ne!(k, *lost);
                    for (a, b) in acc.iter_mut().zip(data.iter()) {
                        *a ^= b;
                    }
                }
            }
            let mut out: Vec<Vec<u8>> = received.iter().map(|r| r.cloned().unwrap_or_default()).collect();
            out[*lost] = acc;
            Ok(out)
        }
        _ => Err(DecodeError::RankDeficient { missing }),
    }
}

/// Deterministic test payload for flow `i`.
pub fn probe_payload(i: usize, width: usize) -> Vec<u8> {
    let mut x = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    (0..width)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 24) as u8
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureReport {
    pub failed_link: LinkId,
    pub affected_flows: Vec<usize>,
    pub recovered: Vec<bool>,
    pub geometry: Vec<FailureGeometry>,
    /// Diversity coding only: whether bit-level decoding returned the
    /// original payload of each affected flow.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bit_exact: Vec<bool>,
    pub capacity_feasible: bool,
}

impl FailureReport {
    pub fn fully_recovered(&self) -> bool {
        self.capacity_feasible && self.recovered.iter().all(|&r| r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scheme: Scheme,
    pub reports: Vec<FailureReport>,
    pub result: SchemeResult,
}

impl SweepReport {
    pub fn all_recovered(&self) -> bool {
        self.reports.iter().all(FailureReport::fully_recovered)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Capacity-distance of routing every planned flow on its shortest path.
pub fn shortest_working_capacity(topo: &Topology, plan: &ProtectionPlan) -> f64 {
    plan.flows
        .iter()
        .map(|f| {
            let p = shortest_path(topo, f.flow.src, f.flow.dst, &BTreeSet::new())
                .expect("topologies are connected");
            f64::from(f.flow.rate) * p.length
        })
        .sum()
}

fn edge_delay(topo: &Topology, failed: LinkId, p: &RtParams) -> f64 {
    // failure at the midpoint: the worst case for the nearer end
    topo.link(failed).distance / 2.0 / p.km_per_s
}

fn upstream_geometry(topo: &Topology, working: &Path, failed: LinkId, p: &RtParams) -> (usize, f64) {
    let pos = working.link_position(failed).expect("flow is affected");
    (pos, working.prefix_length(topo, pos) / p.km_per_s)
}

const PROBE_WIDTH: usize = 16;

fn sweep_dc(plan: &ProtectionPlan, p: &RtParams, failed: LinkId) -> FailureReport {
    let affected = plan.affected_by(failed);
    let decodable = verify_decodable(plan, failed);
    let mut report = FailureReport {
        failed_link: failed,
        affected_flows: affected.clone(),
        recovered: Vec::new(),
        geometry: Vec::new(),
        bit_exact: Vec::new(),
        capacity_feasible: true,
    };
    for &i in &affected {
        let f = &plan.flows[i];
        let work = f.working.length;
        let (geometry, bits) = match &f.protection {
            Protection::Coded { group } => {
                let g = &plan.groups[*group];
                let k = g.members.iter().position(|&m| m == i).expect("member of its group");
                // The rebuilt stream is ready once the parity and every other
                // working stream of the same slot have reached the decode node.
                let others = g
                    .working
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, w)| w.length)
                    .fold(0.0, f64::max);
                let ready = g.protection.length.max(others);
                let payloads: Vec<Vec<u8>> = g.members.iter().map(|&m| probe_payload(m, PROBE_WIDTH)).collect();
                let bits = match xor_stream_check(g, Some(failed), &payloads) {
                    Ok(out) => out[k] == payloads[k],
                    Err(_) => false,
                };
                (
                    FailureGeometry {
                        backup_hops: g.protection.hops(),
                        protection_delay: g.protection.length / p.km_per_s,
                        path_skew: (ready - work).max(0.0) / p.km_per_s,
                        ..Default::default()
                    },
                    bits,
                )
            }
            Protection::Aps { backup } => (
                FailureGeometry {
                    backup_hops: backup.hops(),
                    protection_delay: backup.length / p.km_per_s,
                    path_skew: (backup.length - work).max(0.0) / p.km_per_s,
                    ..Default::default()
                },
                !backup.uses(failed),
            ),
            _ => (FailureGeometry::default(), false),
        };
        report.recovered.push(decodable[i]);
        report.geometry.push(geometry);
        report.bit_exact.push(bits);
    }
    report
}

fn sweep_sr(topo: &Topology, plan: &ProtectionPlan, p: &RtParams, failed: LinkId) -> FailureReport {
    let affected = plan.affected_by(failed);
    let mut load = vec![0u32; topo.link_count()];
    for &i in &affected {
        if let Protection::Reroute { backup } = &plan.flows[i].protection {
            for l in &backup.links {
                load[l.0] += plan.flows[i].flow.rate;
            }
        }
    }
    let overloaded: BTreeSet<LinkId> = load
        .iter()
        .zip(&plan.spare_cap)
        .enumerate()
        .filter(|(_, (l, s))| l > s)
        .map(|(k, _)| LinkId(k))
        .collect();
    let mut report = FailureReport {
        failed_link: failed,
        affected_flows: affected.clone(),
        recovered: Vec::new(),
        geometry: Vec::new(),
        bit_exact: Vec::new(),
        capacity_feasible: overloaded.is_empty(),
    };
    for &i in &affected {
        let f = &plan.flows[i];
        match &f.protection {
            Protection::Reroute { backup } => {
                let (n, notify) = upstream_geometry(topo, &f.working, failed, p);
                let ok = !backup.uses(failed) && backup.links.iter().all(|l| !overloaded.contains(l));
                report.recovered.push(ok);
                report.geometry.push(FailureGeometry {
                    backup_hops: backup.hops(),
                    hops_to_source: n,
                    protection_delay: backup.length / p.km_per_s,
                    notify_delay: notify,
                    edge_delay: edge_delay(topo, failed, p),
                    path_skew: 0.0,
                });
            }
            _ => {
                report.recovered.push(false);
                report.geometry.push(FailureGeometry::default());
            }
        }
    }
    report
}

fn sweep_pc(topo: &Topology, plan: &ProtectionPlan, p: &RtParams, failed: LinkId) -> FailureReport {
    let affected = plan.affected_by(failed);
    // one slot per protection unit, shortest detours first
    let mut slots: Vec<Path> = plan
        .cycles
        .iter()
        .flat_map(|sel| {
            sel.cycle
                .detours(topo, failed)
                .into_iter()
                .flat_map(move |d| std::iter::repeat_n(d, sel.copies as usize))
        })
        .collect();
    slots.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.nodes.cmp(&b.nodes)));
    let mut slots = slots.into_iter();
    let mut report = FailureReport {
        failed_link: failed,
        affected_flows: affected.clone(),
        recovered: Vec::new(),
        geometry: Vec::new(),
        bit_exact: Vec::new(),
        capacity_feasible: true,
    };
    for &i in &affected {
        let f = &plan.flows[i];
        let mut worst: Option<Path> = None;
        let mut ok = true;
        for _ in 0..f.flow.rate {
            match slots.next() {
                Some(d) => {
                    if worst.as_ref().is_none_or(|w| d.length > w.length) {
                        worst = Some(d);
                    }
                }
                None => ok = false,
            }
        }
        if !ok {
            report.capacity_feasible = false;
        }
        report.recovered.push(ok);
        report.geometry.push(match worst {
            Some(d) => FailureGeometry {
                backup_hops: d.hops(),
                hops_to_source: d.hops(),
                protection_delay: d.length / p.km_per_s,
                notify_delay: 0.0,
                edge_delay: edge_delay(topo, failed, p),
                path_skew: 0.0,
            },
            None => FailureGeometry::default(),
        });
    }
    report
}

/// Fails every link in turn and evaluates `plan` at each switch time.
pub fn sweep(topo: &Topology, plan: &ProtectionPlan, params: &RtParams, switch_times: &[f64]) -> Result<SweepReport> {
    params.validate()?;
    let reports: Vec<FailureReport> = topo
        .links()
        .iter()
        .map(|l| match plan.scheme {
            Scheme::DiversityCoding => sweep_dc(plan, params, l.id),
            Scheme::SourceRerouting => sweep_sr(topo, plan, params, l.id),
            Scheme::PCycles => sweep_pc(topo, plan, params, l.id),
        })
        .collect();

    let scp = scp_from_totals(plan.total_capacity(topo), shortest_working_capacity(topo, plan))?;
    let points = switch_times
        .iter()
        .map(|&c| {
            let p = params.with_switch(c);
            let rt = reports
                .iter()
                .flat_map(|r| r.geometry.iter().zip(&r.recovered))
                .filter(|(_, &ok)| ok)
                .map(|(g, _)| restoration_time(plan.scheme, g, &p))
                .fold(0.0, f64::max);
            SwitchPoint {
                switch: c,
                rt,
                qor: qor(scp, rt),
            }
        })
        .collect();
    let failed_recoveries = reports.iter().filter(|r| !r.fully_recovered()).count();
    Ok(SweepReport {
        scheme: plan.scheme,
        reports,
        result: SchemeResult {
            scheme: plan.scheme,
            scp,
            points,
            failed_recoveries,
        },
    })
}
