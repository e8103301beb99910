//! Brute-force canonical forms for small multigraphs.

use crate::error::{ensure_cap, Result};
use crate::graph::MultiGraph;

/// Vertex cap for [`canonical_form`].
pub const CANONICAL_MAX_VERTICES: usize = 10;

/// A complete isomorphism invariant: `n` plus the lexicographically smallest
/// sorted endpoint list over all relabelings that order vertices by degree.
///
/// Only permutations inside degree classes are tried, so regular graphs are
/// the expensive case.
pub fn canonical_form(g: &MultiGraph) -> Result<(usize, Vec<(usize, usize)>)> {
    ensure_cap("canonical form vertex count", CANONICAL_MAX_VERTICES, g.n())?;
    let n = g.n();
    let deg = g.degrees();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (deg[v], v));
    // Class boundaries in the degree-sorted order.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in &by_degree {
        match classes.last_mut() {
            Some(c) if deg[c[0]] == deg[v] => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut perm = vec![0usize; n];
    search_classes(g, &classes, 0, 0, &mut perm, &mut best);
    Ok((n, best.unwrap_or_default()))
}

fn search_classes(
    g: &MultiGraph,
    classes: &[Vec<usize>],
    class: usize,
    offset: usize,
    perm: &mut [usize],
    best: &mut Option<Vec<(usize, usize)>>,
) {
    if class == classes.len() {
        let mut pairs: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = (perm[e.u], perm[e.v]);
                (a.min(b), a.max(b))
            })
            .collect();
        pairs.sort_unstable();
        if best.as_ref().is_none_or(|b| pairs < *b) {
            *best = Some(pairs);
        }
        return;
    }
    let size = classes[class].len();
    permute(&mut classes[class].clone(), 0, &mut |order| {
        for (i, &v) in order.iter().enumerate() {
            perm[v] = offset + i;
        }
        search_classes(g, classes, class + 1, offset + size, perm, best);
    });
}

/// Calls `f` on every permutation of `items`.
fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

pub fn is_isomorphic(a: &MultiGraph, b: &MultiGraph) -> Result<bool> {
    if a.n() != b.n() || a.m() != b.m() || a.degree_sequence() != b.degree_sequence() {
        return Ok(false);
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}
