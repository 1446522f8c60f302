//! Candidate cycles and the greedy p-cycle selection on the synthetic
//! network.

use divcode::fixtures;
use divcode::pcycle::{enumerate_cycles, pc_design};

fn main() -> divcode::Result<()> {
    let s = fixtures::load("synthetic-reconstruction")?;
    let t = &s.topology;
    let cycles = enumerate_cycles(t, t.node_count());
    println!("{} candidate cycles", cycles.len());

    let plan = pc_design(t, &s.demands, None);
    for sel in &plan.cycles {
        println!(
            "{} x {} ({} hops, {:.0} km)",
            sel.copies,
            t.format_nodes(&sel.cycle.nodes),
            sel.cycle.hops(),
            sel.cycle.length
        );
    }
    println!(
        "working {:.0} km, spare {:.0} km",
        plan.working_capacity(t),
        plan.spare_capacity(t)
    );
    Ok(())
}
