//! Shortest paths, disjoint pairs and propagation delay on the bundled
//! five-node instance.

use std::collections::BTreeSet;

use divcode::fixtures;
use divcode::routing::{disjoint_path_pair, path_delay, shortest_path, FIBER_KM_PER_S};

fn main() -> divcode::Result<()> {
    let s = fixtures::load("sink-five")?;
    let t = &s.topology;
    let (n1, n4) = (t.node_by_label(1).unwrap(), t.node_by_label(4).unwrap());

    let direct = shortest_path(t, n1, n4, &BTreeSet::new()).unwrap();
    println!("shortest 1->4: {} ({} km)", t.format_nodes(&direct.nodes), direct.length);

    let avoid = BTreeSet::from([t.link_by_labels(1, 4).unwrap()]);
    let detour = shortest_path(t, n1, n4, &avoid).unwrap();
    println!("avoiding 1-4:  {} ({} km)", t.format_nodes(&detour.nodes), detour.length);

    let (a, b) = disjoint_path_pair(t, n1, n4).unwrap();
    println!(
        "disjoint pair: {} + {} = {} km",
        t.format_nodes(&a.nodes),
        t.format_nodes(&b.nodes),
        a.length + b.length
    );
    println!(
        "one-way delay of the longer route: {:.3} ms",
        path_delay(&b, FIBER_KM_PER_S) * 1e3
    );
    Ok(())
}
