mod support;

use std::collections::BTreeSet;

use divcode::cli::RunConfig;
use divcode::coding::{algorithm_one, decode_matrix};
use divcode::metrics::{q_rt, q_scp, qor, rt_dc, rt_pc, rt_sr, FailureGeometry, RtParams};
use divcode::reroute::backup_assignment;
use divcode::routing::{disjoint_path_pair, shortest_path};
use divcode::sim::{sweep, xor_stream_check};
use divcode::{DemandMatrix, LinkId, NodeId, Scenario, Topology};
use proptest::prelude::*;
use rand::Rng;

fn instance(seed: u64, max_n: usize, flows: usize) -> (Topology, DemandMatrix) {
    let mut rng = support::rng(seed);
    let n = rng.random_range(3..=max_n);
    let t = support::random_biconnected(&mut rng, n, 2 * n);
    let dm = DemandMatrix::new(support::random_unit_flows(&mut rng, n, flows)).unwrap();
    (t, dm)
}

fn geometry() -> impl Strategy<Value = FailureGeometry> {
    (0usize..20, 0usize..20, 0.0..0.05f64, 0.0..0.05f64, 0.0..0.005f64, 0.0..0.05f64).prop_map(
        |(backup_hops, hops_to_source, protection_delay, notify_delay, edge_delay, path_skew)| FailureGeometry {
            backup_hops,
            hops_to_source,
            protection_delay,
            notify_delay,
            edge_delay,
            path_skew,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shortest_path_is_minimal(seed in any::<u64>(), ban in any::<u32>()) {
        let (t, _) = instance(seed, 8, 1);
        let banned: BTreeSet<LinkId> = (0..t.link_count()).filter(|i| ban >> (i % 32) & 1 == 1 && i % 3 == 0).map(LinkId).collect();
        let raw: BTreeSet<usize> = banned.iter().map(|l| l.0).collect();
        for s in 0..t.node_count() {
            for d in 0..t.node_count() {
                if s == d { continue; }
                let got = shortest_path(&t, NodeId(s), NodeId(d), &banned);
                let want = support::brute_shortest(&t, s, d, &raw);
                match (got, want) {
                    (Some(p), Some((len, nodes))) => {
                        prop_assert!(support::close(p.length, len));
                        prop_assert_eq!(p.nodes.iter().map(|n| n.0).collect::<Vec<_>>(), nodes);
                        prop_assert!(p.links.iter().all(|l| !banned.contains(l)));
                    }
                    (None, None) => {}
                    (a, b) => prop_assert!(false, "{s}->{d}: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn disjoint_pair_is_minimal(seed in any::<u64>()) {
        let (t, _) = instance(seed, 8, 1);
        for s in 0..t.node_count() {
            for d in s + 1..t.node_count() {
                let (a, b) = disjoint_path_pair(&t, NodeId(s), NodeId(d)).unwrap();
                prop_assert!(a.is_link_disjoint(&b));
                prop_assert!(a.length <= b.length);
                let want = support::brute_disjoint_pair(&t, s, d).unwrap();
                prop_assert!(support::close(a.length + b.length, want));
            }
        }
    }

    #[test]
    fn quality_functions_are_bounded_and_monotone(rt in 0.0..1.0f64, drt in 0.0..0.1f64, scp in 0.0..500.0f64, dscp in 0.0..100.0f64) {
        prop_assert!(q_rt(rt + drt) <= q_rt(rt));
        prop_assert!(q_scp(scp + dscp) <= q_scp(scp));
        let q = qor(scp, rt);
        prop_assert!(q > 0.0 && q <= 1.0);
        prop_assert!(qor(scp, rt + drt) <= q && qor(scp + dscp, rt) <= q);
    }

    #[test]
    fn restoration_times_follow_their_formulas(g in geometry(), f in 1e-6..1e-3f64, d in 1e-6..1e-3f64, c in 1e-4..0.02f64) {
        let p = RtParams { detect: f, process: d, switch: c, ..RtParams::default() };
        let n = g.hops_to_source as f64;
        let m = g.backup_hops as f64;
        let sr = f + g.notify_delay + (n + 1.0) * d + (m + 1.0) * c + 3.0 * g.protection_delay + 3.0 * (m + 1.0) * d + g.edge_delay;
        let pc = f + (n + 1.0) * d + 2.0 * c + g.protection_delay + g.edge_delay;
        let dc = f + 2.0 * d + g.path_skew;
        prop_assert!((rt_sr(&g, &p) - sr).abs() < 1e-12);
        prop_assert!((rt_pc(&g, &p) - pc).abs() < 1e-12);
        prop_assert!((rt_dc(&g, &p) - dc).abs() < 1e-12);
        prop_assert_eq!(rt_dc(&g, &p), rt_dc(&g, &p.with_switch(c * 2.0)));
    }

    #[test]
    fn xor_recovery_agrees_with_rank(seed in any::<u64>(), payload_seed in any::<u64>()) {
        let (t, dm) = instance(seed, 9, 6);
        let plan = algorithm_one(&t, &dm, &RunConfig::default().search);
        let mut rng = support::rng(payload_seed);
        for g in &plan.groups {
            let payloads: Vec<Vec<u8>> = (0..g.size()).map(|_| (0..12).map(|_| rng.random()).collect()).collect();
            for l in 0..t.link_count() {
                let failed = Some(LinkId(l));
                let full_rank = decode_matrix(g, failed).has_full_column_rank();
                match xor_stream_check(g, failed, &payloads) {
                    Ok(out) => {
                        prop_assert!(full_rank);
                        prop_assert_eq!(&out, &payloads);
                    }
                    Err(_) => prop_assert!(!full_rank),
                }
            }
        }
    }

    #[test]
    fn coding_groups_are_disjoint_and_cheaper_than_aps(seed in any::<u64>()) {
        let (t, dm) = instance(seed, 9, 7);
        let plan = algorithm_one(&t, &dm, &RunConfig::default().search);
        for g in &plan.groups {
            prop_assert!(g.routes_disjoint());
            let aps: f64 = g.flows.iter().map(|&f| {
                let a = backup_assignment(&t, f).unwrap();
                f64::from(f.rate) * (a.working.length + a.backup.length)
            }).sum();
            prop_assert!(g.consumed() <= aps + 1e-9);
        }
    }

    #[test]
    fn scenarios_survive_serialization(seed in any::<u64>(), reconstructed in any::<bool>(), note in proptest::option::of("[a-z ]{0,20}")) {
        let (topology, demands) = instance(seed, 9, 5);
        let s = Scenario { name: format!("s{seed}"), reconstructed, note, topology, demands };
        prop_assert_eq!(Scenario::parse(&s.to_toml()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sweeps_are_deterministic(seed in any::<u64>()) {
        let (t, dm) = instance(seed, 8, 5);
        let cfg = RunConfig::default();
        for scheme in divcode::Scheme::ALL {
            let s = Scenario { name: "p".into(), reconstructed: false, note: None, topology: t.clone(), demands: dm.clone() };
            let a = divcode::cli::design(&s, scheme, &cfg);
            let b = divcode::cli::design(&s, scheme, &cfg);
            prop_assert_eq!(&a, &b);
            let ra = sweep(&t, &a, &cfg.rt, &cfg.switch_times).unwrap().to_json();
            let rb = sweep(&t, &b, &cfg.rt, &cfg.switch_times).unwrap().to_json();
            prop_assert_eq!(ra, rb);
        }
    }
}
