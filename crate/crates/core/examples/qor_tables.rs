//! SCP, worst-case restoration time and QoR for every bundled scenario.

use divcode::cli::{compare_csv, evaluate, RunConfig};
use divcode::fixtures;

fn main() -> divcode::Result<()> {
    let cfg = RunConfig::default();
    for name in fixtures::names() {
        let s = fixtures::load(name)?;
        let runs = evaluate(&s, &cfg)?;
        let results: Vec<_> = runs.iter().map(|(_, r)| &r.result).collect();
        println!("# {name}{}", if s.reconstructed { " (reconstructed)" } else { "" });
        print!("{}", compare_csv(&results, &cfg.switch_times)?);
        println!();
    }
    Ok(())
}
