//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls the library's routing or cycle code; graphs are read
//! through `Topology` only for node/link bookkeeping.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use divcode::{Flow, LinkId, NodeId, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A simple path as (nodes, links, length).
#[derive(Debug, Clone)]
pub struct RawPath {
    pub nodes: Vec<usize>,
    pub links: Vec<usize>,
    pub length: f64,
}

impl RawPath {
    pub fn disjoint(&self, other: &RawPath) -> bool {
        self.links.iter().all(|l| !other.links.contains(l))
    }
}

/// Every simple path from `src` to `dst`.
pub fn all_simple_paths(t: &Topology, src: usize, dst: usize) -> Vec<RawPath> {
    fn walk(t: &Topology, dst: usize, cur: &mut RawPath, seen: &mut Vec<bool>, out: &mut Vec<RawPath>) {
        let u = *cur.nodes.last().unwrap();
        if u == dst {
            out.push(cur.clone());
            return;
        }
        for &(v, l) in t.neighbors(NodeId(u)) {
            if seen[v.0] {
                continue;
            }
            seen[v.0] = true;
            cur.nodes.push(v.0);
            cur.links.push(l.0);
            cur.length += t.link(l).distance;
            walk(t, dst, cur, seen, out);
            cur.length -= t.link(l).distance;
            cur.links.pop();
            cur.nodes.pop();
            seen[v.0] = false;
        }
    }
    let mut seen = vec![false; t.node_count()];
    seen[src] = true;
    let mut cur = RawPath {
        nodes: vec![src],
        links: vec![],
        length: 0.0,
    };
    let mut out = Vec::new();
    walk(t, dst, &mut cur, &mut seen, &mut out);
    // recompute lengths exactly in link order
    for p in &mut out {
        p.length = p.links.iter().map(|&l| t.link(LinkId(l)).distance).sum();
    }
    out
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Shortest length and the lexicographically smallest node sequence among
/// shortest paths.
pub fn brute_shortest(t: &Topology, src: usize, dst: usize, excluded: &BTreeSet<usize>) -> Option<(f64, Vec<usize>)> {
    let paths: Vec<RawPath> = all_simple_paths(t, src, dst)
        .into_iter()
        .filter(|p| p.links.iter().all(|l| !excluded.contains(l)))
        .collect();
    let best = paths.iter().map(|p| p.length).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    let nodes = paths
        .iter()
        .filter(|p| close(p.length, best))
        .map(|p| p.nodes.clone())
        .min()
        .unwrap();
    Some((best, nodes))
}

/// Minimum combined length of two link-disjoint `src`→`dst` paths.
pub fn brute_disjoint_pair(t: &Topology, src: usize, dst: usize) -> Option<f64> {
    let mut paths = all_simple_paths(t, src, dst);
    paths.sort_by(|a, b| a.length.total_cmp(&b.length));
    let mut best = f64::INFINITY;
    for (i, p) in paths.iter().enumerate() {
        if 2.0 * p.length >= best {
            break;
        }
        if let Some(q) = paths[i + 1..].iter().find(|q| q.disjoint(p)) {
            best = best.min(p.length + q.length);
        }
    }
    best.is_finite().then_some(best)
}

/// Simple cycles of at most `max_hops` nodes, each as its canonical node
/// ring: smallest node first, then the smaller of its two neighbors.
pub fn brute_cycles(t: &Topology, max_hops: usize) -> BTreeSet<Vec<usize>> {
    let n = t.node_count();
    let adjacent = |u: usize, v: usize| t.link_between(NodeId(u), NodeId(v)).is_some();
    let mut out = BTreeSet::new();
    // extend every sequence of distinct nodes that starts at its minimum
    fn grow(
        n: usize,
        max_hops: usize,
        adjacent: &dyn Fn(usize, usize) -> bool,
        seq: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let first = seq[0];
        let last = *seq.last().unwrap();
        if seq.len() >= 3 && adjacent(last, first) && seq[1] < last {
            out.insert(seq.clone());
        }
        if seq.len() == max_hops {
            return;
        }
        for v in first + 1..n {
            if !seq.contains(&v) && adjacent(last, v) {
                seq.push(v);
                grow(n, max_hops, adjacent, seq, out);
                seq.pop();
            }
        }
    }
    for s in 0..n {
        grow(n, max_hops, &adjacent, &mut vec![s], &mut out);
    }
    out
}

fn ring_links(t: &Topology, ring: &[usize]) -> Vec<usize> {
    (0..ring.len())
        .map(|i| {
            t.link_between(NodeId(ring[i]), NodeId(ring[(i + 1) % ring.len()]))
                .unwrap()
                .0
        })
        .collect()
}

/// Units of protection one copy of `ring` offers link `l`.
fn ring_protects(t: &Topology, ring: &[usize], links: &[usize], l: usize) -> u32 {
    let link = &t.links()[l];
    if links.contains(&l) {
        1
    } else if ring.contains(&link.a.0) && ring.contains(&link.b.0) {
        2
    } else {
        0
    }
}

/// Which working routes the optimal-design oracles may choose from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Working {
    /// Any simple path.
    Any,
    /// Only minimum-distance paths (every tie).
    Shortest,
}

fn working_options(t: &Topology, f: &Flow, rule: Working) -> Vec<RawPath> {
    let paths = all_simple_paths(t, f.src.0, f.dst.0);
    match rule {
        Working::Any => paths,
        Working::Shortest => {
            let best = paths.iter().map(|p| p.length).fold(f64::INFINITY, f64::min);
            paths.into_iter().filter(|p| close(p.length, best)).collect()
        }
    }
}

/// Cheapest capacity-distance of shared-spare rerouting over every choice
/// of working path (per `rule`) and link-disjoint backup per unit flow.
pub fn optimal_sr_total(t: &Topology, flows: &[Flow], rule: Working) -> Option<f64> {
    let m = t.link_count();
    let len: Vec<f64> = t.links().iter().map(|l| l.distance).collect();
    let units: Vec<Flow> = flows
        .iter()
        .flat_map(|f| std::iter::repeat_n(Flow::unit(f.src, f.dst), f.rate as usize))
        .collect();
    let options: Vec<Vec<(RawPath, RawPath)>> = units
        .iter()
        .map(|f| {
            let paths = all_simple_paths(t, f.src.0, f.dst.0);
            let mut pairs = Vec::new();
            for w in &working_options(t, f, rule) {
                for b in &paths {
                    if w.disjoint(b) {
                        pairs.push((w.clone(), b.clone()));
                    }
                }
            }
            pairs.sort_by(|x, y| (x.0.length + x.1.length).total_cmp(&(y.0.length + y.1.length)));
            pairs
        })
        .collect();
    if options.iter().any(Vec::is_empty) {
        return None;
    }

    // load[f][l]: backup units on l when f fails
    struct Search<'a> {
        options: &'a [Vec<(RawPath, RawPath)>],
        len: &'a [f64],
        m: usize,
        best: f64,
    }
    fn spare_cost(load: &[Vec<u32>], len: &[f64], m: usize) -> f64 {
        (0..m)
            .map(|l| f64::from(load.iter().map(|row| row[l]).max().unwrap_or(0)) * len[l])
            .sum()
    }
    fn go(s: &mut Search, k: usize, working: f64, load: &mut Vec<Vec<u32>>) {
        let bound = working + spare_cost(load, s.len, s.m);
        if bound >= s.best - 1e-9 {
            return;
        }
        if k == s.options.len() {
            s.best = bound;
            return;
        }
        for (w, b) in &s.options[k] {
            for &f in &w.links {
                for &l in &b.links {
                    load[f][l] += 1;
                }
            }
            go(s, k + 1, working + w.length, load);
            for &f in &w.links {
                for &l in &b.links {
                    load[f][l] -= 1;
                }
            }
        }
    }
    let mut s = Search {
        options: &options,
        len: &len,
        m,
        best: f64::INFINITY,
    };
    go(&mut s, 0, 0.0, &mut vec![vec![0; m]; m]);
    Some(s.best)
}

/// Cheapest capacity-distance of p-cycle protection over every choice of
/// working path (per `rule`) and every integer copy count per cycle.
pub fn optimal_pc_total(t: &Topology, flows: &[Flow], rule: Working) -> Option<f64> {
    let m = t.link_count();
    let rings: Vec<Vec<usize>> = brute_cycles(t, t.node_count()).into_iter().collect();
    let cover: Vec<(f64, Vec<u32>)> = rings
        .iter()
        .map(|r| {
            let links = ring_links(t, r);
            let length = links.iter().map(|&l| t.links()[l].distance).sum();
            (length, (0..m).map(|l| ring_protects(t, r, &links, l)).collect())
        })
        .collect();
    let units: Vec<Flow> = flows
        .iter()
        .flat_map(|f| std::iter::repeat_n(Flow::unit(f.src, f.dst), f.rate as usize))
        .collect();
    let options: Vec<Vec<RawPath>> = units
        .iter()
        .map(|f| working_options(t, f, rule))
        .collect();

    fn min_cover(cover: &[(f64, Vec<u32>)], need: &[u32]) -> Option<f64> {
        fn go(cover: &[(f64, Vec<u32>)], k: usize, need: &mut Vec<u32>, cost: f64, best: &mut f64) {
            if cost >= *best - 1e-9 {
                return;
            }
            if need.iter().all(|&x| x == 0) {
                *best = cost;
                return;
            }
            if k == cover.len() {
                return;
            }
            let (len, prot) = &cover[k];
            let cap = need.iter().max().copied().unwrap_or(0);
            for copies in (0..=cap).rev() {
                let saved = need.clone();
                for (x, p) in need.iter_mut().zip(prot) {
                    *x = x.saturating_sub(p * copies);
                }
                go(cover, k + 1, need, cost + f64::from(copies) * len, best);
                *need = saved;
            }
        }
        let mut best = f64::INFINITY;
        go(cover, 0, &mut need.to_vec(), 0.0, &mut best);
        best.is_finite().then_some(best)
    }

    let mut memo: HashMap<Vec<u32>, Option<f64>> = HashMap::new();
    let mut best = f64::INFINITY;
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut load = vec![0u32; m];
        let mut working = 0.0;
        for (k, &c) in choice.iter().enumerate() {
            let p = &options[k][c];
            working += p.length;
            for &l in &p.links {
                load[l] += 1;
            }
        }
        if working < best {
            let spare = *memo.entry(load.clone()).or_insert_with(|| min_cover(&cover, &load));
            if let Some(spare) = spare {
                best = best.min(working + spare);
            }
        }
        // odometer over working-path choices
        let mut k = 0;
        loop {
            if k == choice.len() {
                return best.is_finite().then_some(best);
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Random 2-edge-connected graph: a shuffled Hamiltonian ring plus chords.
pub fn random_biconnected(rng: &mut ChaCha8Rng, n: usize, max_links: usize) -> Topology {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut have = BTreeSet::new();
    let mut add = |a: usize, b: usize, rng: &mut ChaCha8Rng, edges: &mut Vec<(usize, usize, f64)>| {
        let key = (a.min(b), a.max(b));
        if a != b && have.insert(key) {
            edges.push((a, b, f64::from(rng.random_range(1..=20u32)) * 10.0));
        }
    };
    for i in 0..n {
        add(order[i], order[(i + 1) % n], rng, &mut edges);
    }
    let extra = rng.random_range(0..=max_links.saturating_sub(n));
    for _ in 0..extra * 3 {
        if edges.len() >= max_links {
            break;
        }
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        add(a, b, rng, &mut edges);
    }
    Topology::from_edges(n, &edges).unwrap()
}

pub fn random_unit_flows(rng: &mut ChaCha8Rng, n: usize, count: usize) -> Vec<Flow> {
    (0..count)
        .map(|_| {
            let s = rng.random_range(0..n);
            let mut d = rng.random_range(0..n - 1);
            if d >= s {
                d += 1;
            }
            Flow::unit(NodeId(s), NodeId(d))
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
