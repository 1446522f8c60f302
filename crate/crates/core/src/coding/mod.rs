//! Diversity-coding protection: coding groups, the threshold planner and
//! GF(2) decodability checks.

mod gf2;
mod group;
mod planner;

pub use gf2::Gf2Matrix;
pub use group::{decode_matrix, find_group, redundancy_ratio, CodingGroup, ParityRoute};
pub use planner::{algorithm_one, SearchParams};

use crate::plan::{Protection, ProtectionPlan};
use crate::topology::LinkId;

/// Per plan flow: can its stream still be delivered after `failed` goes down?
///
/// Coded flows are recoverable when their working path survives or the
/// group's received signals have full column rank; APS flows when either
/// copy survives.
pub fn verify_decodable(plan: &ProtectionPlan, failed: LinkId) -> Vec<bool> {
    let ranks: Vec<bool> = plan
        .groups
        .iter()
        .map(|g| decode_matrix(g, Some(failed)).has_full_column_rank())
        .collect();
    plan.flows
        .iter()
        .map(|f| {
            if !f.working.uses(failed) {
                return true;
            }
            match &f.protection {
                Protection::Coded { group } => ranks[*group],
                Protection::Aps { backup } | Protection::Reroute { backup } => !backup.uses(failed),
                Protection::Cycles | Protection::Unprotected => false,
            }
        })
        .collect()
}
