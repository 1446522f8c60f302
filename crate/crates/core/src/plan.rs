//! Protection plans shared by all three schemes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coding::CodingGroup;
use crate::pcycle::CycleSelection;
use crate::topology::{Flow, LinkId, Path, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "dc")]
    DiversityCoding,
    #[serde(rename = "sr")]
    SourceRerouting,
    #[serde(rename = "pc")]
    PCycles,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::DiversityCoding,
        Scheme::SourceRerouting,
        Scheme::PCycles,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Scheme::DiversityCoding => "dc",
            Scheme::SourceRerouting => "sr",
            Scheme::PCycles => "pc",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Scheme::DiversityCoding => "Div. Coding",
            Scheme::SourceRerouting => "Source Rerout.",
            Scheme::PCycles => "p-cycles",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "dc" => Ok(Scheme::DiversityCoding),
            "sr" => Ok(Scheme::SourceRerouting),
            "pc" => Ok(Scheme::PCycles),
            other => Err(format!("unknown scheme `{other}` (expected dc, sr or pc)")),
        }
    }
}

/// How a planned flow survives a failure of its working path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protection {
    /// Member of a diversity-coding group.
    Coded { group: usize },
    /// 1+1 APS: a duplicate travels the backup path permanently.
    Aps { backup: Path },
    /// Source rerouting onto a precomputed backup with shared spare.
    Reroute { backup: Path },
    /// Covered by the plan's selected p-cycles.
    Cycles,
    Unprotected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedFlow {
    /// Index of the demand this flow (or unit subflow) came from.
    pub demand: usize,
    pub flow: Flow,
    pub working: Path,
    pub protection: Protection,
}

/// Something the plan could not protect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Uncovered {
    pub flows: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkId>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum RecoveryAction {
    /// Decode node recovers the stream from the parity and survivors.
    Decode { flow: usize, group: usize },
    /// Receiver selects the duplicate arriving on the APS backup.
    SelectDuplicate { flow: usize },
    /// Source switches the flow to its backup path.
    Reroute { flow: usize },
    /// End nodes of the failed link loop traffic around the listed cycles.
    CycleDetour { units: u32, cycles: Vec<usize> },
    None { flow: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRecovery {
    pub link: LinkId,
    pub actions: Vec<RecoveryAction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtectionPlan {
    pub scheme: Scheme,
    pub flows: Vec<PlannedFlow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<CodingGroup>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<CycleSelection>,
    /// Capacity units per link, indexed by link id.
    pub working_cap: Vec<u32>,
    pub spare_cap: Vec<u32>,
    pub uncovered: Vec<Uncovered>,
    pub recovery_actions: Vec<LinkRecovery>,
}

impl ProtectionPlan {
    pub(crate) fn new(scheme: Scheme, topo: &Topology) -> Self {
        ProtectionPlan {
            scheme,
            flows: Vec::new(),
            groups: Vec::new(),
            cycles: Vec::new(),
            working_cap: vec![0; topo.link_count()],
            spare_cap: vec![0; topo.link_count()],
            uncovered: Vec::new(),
            recovery_actions: Vec::new(),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.uncovered.is_empty()
    }

    pub(crate) fn add_working(&mut self, path: &Path, rate: u32) {
        for l in &path.links {
            self.working_cap[l.0] += rate;
        }
    }

    pub(crate) fn add_spare(&mut self, links: &[LinkId], rate: u32) {
        for l in links {
            self.spare_cap[l.0] += rate;
        }
    }

    fn weighted(&self, topo: &Topology, caps: &[u32]) -> f64 {
        caps.iter()
            .zip(topo.links())
            .map(|(&c, l)| f64::from(c) * l.distance)
            .sum()
    }

    /// Working capacity-distance, unit·km.
    pub fn working_capacity(&self, topo: &Topology) -> f64 {
        self.weighted(topo, &self.working_cap)
    }

    pub fn spare_capacity(&self, topo: &Topology) -> f64 {
        self.weighted(topo, &self.spare_cap)
    }

    pub fn total_capacity(&self, topo: &Topology) -> f64 {
        self.working_capacity(topo) + self.spare_capacity(topo)
    }

    /// 1+1 APS pairs of a diversity-coding plan.
    pub fn aps_pairs(&self) -> impl Iterator<Item = (usize, &PlannedFlow, &Path)> {
        self.flows.iter().enumerate().filter_map(|(i, f)| match &f.protection {
            Protection::Aps { backup } => Some((i, f, backup)),
            _ => None,
        })
    }

    /// Flows whose working path crosses `link`, ascending.
    pub fn affected_by(&self, link: LinkId) -> Vec<usize> {
        self.flows
            .iter()
            .enumerate()
            .filter(|(_, f)| f.working.uses(link))
            .map(|(i, _)| i)
            .collect()
    }

    /// Fills `recovery_actions` from the protection mechanisms.
    pub(crate) fn derive_recovery_actions(&mut self, topo: &Topology) {
        let mut all = Vec::with_capacity(topo.link_count());
        for l in topo.links() {
            let affected = self.affected_by(l.id);
            if affected.is_empty() {
                continue;
            }
            let mut actions = Vec::new();
            let mut cycle_units = 0;
            for &i in &affected {
                match &self.flows[i].protection {
                    Protection::Coded { group } => {
                        actions.push(RecoveryAction::Decode {
                            flow: i,
                            group: *group,
                        })
                    }
                    Protection::Aps { .. } => actions.push(RecoveryAction::SelectDuplicate { flow: i }),
                    Protection::Reroute { .. } => actions.push(RecoveryAction::Reroute { flow: i }),
                    Protection::Cycles => cycle_units += self.flows[i].flow.rate,
                    Protection::Unprotected => actions.push(RecoveryAction::None { flow: i }),
                }
            }
            if cycle_units > 0 {
                let cycles = self
                    .cycles
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.cycle.protects(topo, l.id) > 0)
                    .map(|(k, _)| k)
                    .collect();
                actions.push(RecoveryAction::CycleDetour {
                    units: cycle_units,
                    cycles,
                });
            }
            all.push(LinkRecovery {
                link: l.id,
                actions,
            });
        }
        self.recovery_actions = all;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans always serialize")
    }
}
