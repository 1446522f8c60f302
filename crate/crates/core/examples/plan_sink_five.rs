//! Capacity of the three schemes on the five-node instance, with the coding
//! groups the planner chose.

use divcode::coding::{algorithm_one, SearchParams};
use divcode::fixtures;
use divcode::pcycle::pc_design;
use divcode::reroute::sr_design;

fn main() -> divcode::Result<()> {
    let s = fixtures::load("sink-five")?;
    let (t, dm) = (&s.topology, &s.demands);

    let dc = algorithm_one(t, dm, &SearchParams::default());
    for g in &dc.groups {
        let srcs: Vec<u32> = g.flows.iter().map(|f| t.label(f.src)).collect();
        println!(
            "group {:?} -> {}: parity {}",
            srcs,
            t.label(g.decode_node),
            t.format_nodes(&g.protection.nodes)
        );
    }
    for plan in [dc, sr_design(t, dm), pc_design(t, dm, None)] {
        println!(
            "{:<16} working {:>6.0}  spare {:>6.0}  total {:>6.0} km",
            plan.scheme.title(),
            plan.working_capacity(t),
            plan.spare_capacity(t),
            plan.total_capacity(t)
        );
    }
    Ok(())
}
