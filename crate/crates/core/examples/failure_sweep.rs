//! Fails every link of a scenario in turn and prints, per scheme, the worst
//! restoration time and which failures hurt most.
//!
//! cargo run --example failure_sweep -- [scenario]

use divcode::cli::{evaluate, RunConfig};
use divcode::fixtures;
use divcode::metrics::restoration_time;

fn main() -> divcode::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "cost239-reconstruction".into());
    let s = fixtures::resolve(&name)?;
    let t = &s.topology;
    let cfg = RunConfig::default();

    for (plan, report) in evaluate(&s, &cfg)? {
        let p = cfg.rt.with_switch(1e-3);
        let worst = report
            .reports
            .iter()
            .filter_map(|r| {
                r.geometry
                    .iter()
                    .map(|g| restoration_time(plan.scheme, g, &p))
                    .reduce(f64::max)
                    .map(|rt| (rt, r))
            })
            .max_by(|a, b| a.0.total_cmp(&b.0));
        print!(
            "{:<16} {} failures, {} not recovered",
            plan.scheme.title(),
            report.reports.len(),
            report.result.failed_recoveries
        );
        if let Some((rt, r)) = worst {
            let l = t.link(r.failed_link);
            print!(
                "; worst at C=1ms: {:.2} ms on {}-{} ({} flows hit)",
                rt * 1e3,
                t.label(l.a),
                t.label(l.b),
                r.affected_flows.len()
            );
        }
        println!();
    }
    Ok(())
}
