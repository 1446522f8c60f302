//! One coding group: three streams plus an XOR parity over four disjoint
//! relays. Every single link failure is decoded both by rank and bit by bit.

use divcode::coding::{decode_matrix, find_group, redundancy_ratio};
use divcode::fixtures;
use divcode::sim::{probe_payload, xor_stream_check};
use divcode::Flow;

fn main() -> divcode::Result<()> {
    let s = fixtures::load("relay-star")?;
    let t = &s.topology;
    let flows: Vec<Flow> = s.demands.unit_subflows().into_iter().map(|(_, f)| f).collect();
    let g = find_group(t, &flows).expect("four disjoint relays exist");

    for (k, w) in g.working.iter().enumerate() {
        println!("stream {k}: {}", t.format_nodes(&w.nodes));
    }
    println!("parity:   {}", t.format_nodes(&g.protection.nodes));
    println!("redundancy ratio {:.4}", redundancy_ratio(&g, t));

    let payloads: Vec<Vec<u8>> = (0..g.size()).map(|k| probe_payload(k, 8)).collect();
    for l in t.links() {
        let rank = decode_matrix(&g, Some(l.id)).rank();
        let bits = xor_stream_check(&g, Some(l.id), &payloads).map(|out| out == payloads);
        println!(
            "fail {}-{}: rank {rank}/{}  bit-exact {:?}",
            t.label(l.a),
            t.label(l.b),
            g.size(),
            bits
        );
    }
    Ok(())
}
