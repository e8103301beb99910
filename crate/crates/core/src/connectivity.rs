//! Exact edge connectivity and essential edge connectivity.
//!
//! Up to [`ENUMERATION_LIMIT`] vertices both quantities come from enumerating
//! every cut `[S, Sᶜ]` with vertex 0 fixed on one side. Above that, plain edge
//! connectivity falls back to Stoer–Wagner, which is also exact.

use crate::error::{ensure_cap, Error, Result};
use crate::graph::{bit, full_mask, Cut, MultiGraph};

/// Largest vertex count for which cuts are enumerated.
pub const ENUMERATION_LIMIT: usize = 20;

/// Minimum `|[S, Sᶜ]|` over nonempty proper `S`. Zero when disconnected.
pub fn edge_connectivity(g: &MultiGraph) -> Result<usize> {
    Ok(min_cut(g)?.size)
}

/// A minimum edge cut. Among minimum cuts enumeration returns the one whose
/// side (containing vertex 0) has the smallest mask.
pub fn min_cut(g: &MultiGraph) -> Result<Cut> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition(
            "edge connectivity needs at least two vertices".into(),
        ));
    }
    if n > ENUMERATION_LIMIT {
        return Ok(stoer_wagner(g));
    }
    let cuts = CutTable::new(g);
    let mut best: Option<(usize, u64)> = None;
    for side in cuts.sides() {
        let size = cuts.size(side);
        if best.is_none_or(|(b, _)| size < b) {
            best = Some((size, side));
        }
    }
    let (_, side) = best.expect("n >= 2 has at least one cut");
    Ok(Cut::of(g, side))
}

/// Minimum size of an edge cut with at least one edge inside each side.
/// `None` when no such cut exists.
pub fn essential_edge_connectivity(g: &MultiGraph) -> Result<Option<usize>> {
    Ok(min_essential_cut(g)?.map(|c| c.size))
}

pub fn min_essential_cut(g: &MultiGraph) -> Result<Option<Cut>> {
    ensure_cap("essential connectivity vertex count", ENUMERATION_LIMIT, g.n())?;
    if g.n() < 4 {
        return Ok(None);
    }
    let cuts = CutTable::new(g);
    let all = g.vertex_mask();
    let mut best: Option<(usize, u64)> = None;
    for side in cuts.sides() {
        if g.inner_edge_count(side) == 0 || g.inner_edge_count(all & !side) == 0 {
            continue;
        }
        let size = cuts.size(side);
        if best.is_none_or(|(b, _)| size < b) {
            best = Some((size, side));
        }
    }
    Ok(best.map(|(_, side)| Cut::of(g, side)))
}

/// Cut sizes by subset enumeration over sides that contain vertex 0.
struct CutTable<'a> {
    g: &'a MultiGraph,
}

impl<'a> CutTable<'a> {
    fn new(g: &'a MultiGraph) -> Self {
        CutTable { g }
    }

    /// Every nonempty proper side containing vertex 0, in increasing mask order.
    fn sides(&self) -> impl Iterator<Item = u64> {
        let rest = self.g.n() - 1;
        let top = 1u64 << rest;
        (0..top - 1).map(|m| (m << 1) | 1)
    }

    fn size(&self, side: u64) -> usize {
        self.g.cut_size(side)
    }
}

/// Stoer–Wagner global minimum cut on the multiplicity-weighted graph.
fn stoer_wagner(g: &MultiGraph) -> Cut {
    let n = g.n();
    let mut w = vec![vec![0usize; n]; n];
    for e in g.edges() {
        w[e.u][e.v] += 1;
        w[e.v][e.u] += 1;
    }
    // members[i]: original vertices merged into super-vertex i.
    let mut members: Vec<u64> = (0..n).map(bit).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = (usize::MAX, 0u64);
    while active.len() > 1 {
        let mut key = vec![0usize; n];
        let mut added = vec![false; n];
        let mut order = Vec::with_capacity(active.len());
        for _ in 0..active.len() {
            let next = *active
                .iter()
                .filter(|&&v| !added[v])
                .max_by_key(|&&v| (key[v], std::cmp::Reverse(v)))
                .expect("unadded vertex remains");
            added[next] = true;
            order.push(next);
            for &v in &active {
                if !added[v] {
                    key[v] += w[next][v];
                }
            }
        }
        let t = order[order.len() - 1];
        let s = order[order.len() - 2];
        if key[t] < best.0 {
            best = (key[t], members[t]);
        }
        members[s] |= members[t];
        for &v in &active {
            w[s][v] += w[t][v];
            w[v][s] = w[s][v];
        }
        w[s][s] = 0;
        active.retain(|&v| v != t);
    }
    let mut side = best.1;
    if side & 1 == 0 {
        side = full_mask(n) & !side;
    }
    Cut::of(g, side)
}
