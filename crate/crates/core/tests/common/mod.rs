//! Graph generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use flowcrit::iso::canonical_form;
use flowcrit::MultiGraph;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

/// Calls `f` on every labeled loopless multigraph on `n` vertices with
/// exactly `m` edges and at most `max_mult` copies of each pair.
pub fn for_each_multigraph(n: usize, m: usize, max_mult: usize, f: &mut dyn FnMut(&MultiGraph)) {
    let pairs = vertex_pairs(n);
    let mut counts = vec![0usize; pairs.len()];
    fn rec(
        i: usize,
        left: usize,
        max_mult: usize,
        n: usize,
        pairs: &[(usize, usize)],
        counts: &mut Vec<usize>,
        f: &mut dyn FnMut(&MultiGraph),
    ) {
        if i == pairs.len() {
            if left == 0 {
                let mut g = MultiGraph::new(n).unwrap();
                for (k, &(u, v)) in pairs.iter().enumerate() {
                    for _ in 0..counts[k] {
                        g.add_edge(u, v).unwrap();
                    }
                }
                f(&g);
            }
            return;
        }
        let room = (pairs.len() - i - 1) * max_mult;
        for c in 0..=left.min(max_mult) {
            if left - c > room {
                continue;
            }
            counts[i] = c;
            rec(i + 1, left - c, max_mult, n, pairs, counts, f);
        }
        counts[i] = 0;
    }
    if n >= 1 {
        rec(0, m, max_mult, n, &pairs, &mut counts, f);
    }
}

/// Every labeled loopless multigraph on `n` vertices with at most `max_m`
/// edges.
pub fn all_multigraphs(n: usize, max_m: usize) -> Vec<MultiGraph> {
    let mut out = Vec::new();
    for m in 0..=max_m {
        for_each_multigraph(n, m, m, &mut |g| out.push(g.clone()));
    }
    out
}

/// Connected simple graphs on `n` vertices, one per isomorphism class.
///
/// Every connected graph has a vertex whose removal leaves it connected, so
/// extending each class on `n − 1` vertices by a new vertex with every
/// nonempty neighbourhood reaches all classes on `n`.
pub fn connected_simple_graphs(n: usize) -> Vec<MultiGraph> {
    assert!(n >= 1);
    let mut level = vec![MultiGraph::new(1).unwrap()];
    for k in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for mask in 1u32..(1 << (k - 1)) {
                let mut h = MultiGraph::new(k).unwrap();
                for e in g.edges() {
                    h.add_edge(e.u, e.v).unwrap();
                }
                for v in 0..k - 1 {
                    if mask >> v & 1 == 1 {
                        h.add_edge(v, k - 1).unwrap();
                    }
                }
                if seen.insert(canonical_form(&h).unwrap()) {
                    next.push(h);
                }
            }
        }
        level = next;
    }
    level
}

/// Uniform random labeled tree (Prüfer sequence).
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Random multigraph: each pair gets `0..=max_mult` copies, each nonzero
/// count with probability `p`.
pub fn random_multigraph(rng: &mut ChaCha8Rng, n: usize, p: f64, max_mult: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n).unwrap();
    for (u, v) in vertex_pairs(n) {
        if rng.gen_bool(p) {
            for _ in 0..rng.gen_range(1..=max_mult) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn union_of_trees(rng: &mut ChaCha8Rng, n: usize, trees: usize) -> MultiGraph {
    let mut g = MultiGraph::new(n).unwrap();
    for _ in 0..trees {
        for (u, v) in random_tree(rng, n) {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}
