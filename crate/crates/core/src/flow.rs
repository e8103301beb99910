//! Exact decision procedures for β-orientations, modulo-3 orientations and
//! Z3-connectivity.
//!
//! The main solver is a backtracking search over edge directions. Edges are
//! visited in BFS order (grouped by the later endpoint in BFS vertex order) so
//! vertices close early. Each vertex tracks its current imbalance `a` modulo 3
//! and the number `r` of still unoriented incident edges; the remaining edges
//! can move `a` by any `x ∈ {−r, −r+2, …, r}`, so a vertex is infeasible only
//! when `r = 0` and `a ≢ β`, or `r = 1` and `a ≡ β`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_cap, Error, Result};
use crate::families::complete_bipartite;
use crate::graph::{mask_vertices, MultiGraph};
use crate::orientation::{Orientation, Z3Boundary};

/// Vertex cap for the backtracking solver.
pub const SOLVER_MAX_VERTICES: usize = 20;
/// Vertex cap for Z3-connectivity.
pub const Z3_MAX_VERTICES: usize = 12;
/// Edge cap for the exhaustive oracle.
pub const BRUTE_FORCE_MAX_EDGES: usize = 24;

fn check_boundary(g: &MultiGraph, beta: &Z3Boundary) -> Result<()> {
    if beta.len() != g.n() {
        return Err(Error::InvalidBoundary(format!(
            "boundary has {} entries, graph has {} vertices",
            beta.len(),
            g.n()
        )));
    }
    Ok(())
}

/// A β-orientation of `g`, if one exists.
pub fn find_beta_orientation(g: &MultiGraph, beta: &Z3Boundary) -> Result<Option<Orientation>> {
    check_boundary(g, beta)?;
    ensure_cap("solver vertex count", SOLVER_MAX_VERTICES, g.n())?;

    // Each component must carry a zero-sum boundary on its own.
    for comp in g.components() {
        let s: u32 = mask_vertices(comp).map(|v| beta.values()[v] as u32).sum();
        if !s.is_multiple_of(3) {
            return Ok(None);
        }
    }

    let mut search = Search::new(g, beta);
    Ok(search
        .run()
        .then(|| Orientation::from_directions(g, &search.forward)))
}

struct Search<'a> {
    g: &'a MultiGraph,
    target: Vec<u8>,
    /// Edge indices in search order.
    order: Vec<usize>,
    imbalance: Vec<u8>,
    remaining: Vec<usize>,
    forward: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(g: &'a MultiGraph, beta: &Z3Boundary) -> Self {
        Search {
            g,
            target: beta.values().to_vec(),
            order: bfs_edge_order(g),
            imbalance: vec![0; g.n()],
            remaining: g.degrees(),
            forward: vec![true; g.m()],
        }
    }

    #[inline]
    fn feasible(&self, v: usize) -> bool {
        match self.remaining[v] {
            0 => self.imbalance[v] == self.target[v],
            1 => self.imbalance[v] != self.target[v],
            _ => true,
        }
    }

    fn run(&mut self) -> bool {
        if !(0..self.g.n()).all(|v| self.feasible(v)) {
            return false;
        }
        self.descend(0)
    }

    fn descend(&mut self, depth: usize) -> bool {
        let Some(&ei) = self.order.get(depth) else {
            return true;
        };
        let e = self.g.edges()[ei];
        self.remaining[e.u] -= 1;
        self.remaining[e.v] -= 1;
        for forward in [true, false] {
            let (tail, head) = if forward { (e.u, e.v) } else { (e.v, e.u) };
            self.imbalance[tail] = (self.imbalance[tail] + 1) % 3;
            self.imbalance[head] = (self.imbalance[head] + 2) % 3;
            if self.feasible(tail) && self.feasible(head) {
                self.forward[ei] = forward;
                if self.descend(depth + 1) {
                    return true;
                }
            }
            self.imbalance[tail] = (self.imbalance[tail] + 2) % 3;
            self.imbalance[head] = (self.imbalance[head] + 1) % 3;
        }
        self.remaining[e.u] += 1;
        self.remaining[e.v] += 1;
        false
    }
}

/// Vertices in BFS order (component by component); each edge is placed in the
/// group of whichever endpoint comes later.
fn bfs_edge_order(g: &MultiGraph) -> Vec<usize> {
    let n = g.n();
    let inc = g.incidence();
    let mut rank = vec![usize::MAX; n];
    let mut vertices = Vec::with_capacity(n);
    for root in 0..n {
        if rank[root] != usize::MAX {
            continue;
        }
        rank[root] = vertices.len();
        vertices.push(root);
        let mut head = vertices.len() - 1;
        while head < vertices.len() {
            let v = vertices[head];
            head += 1;
            for &ei in &inc[v] {
                let w = g.edges()[ei].other(v);
                if rank[w] == usize::MAX {
                    rank[w] = vertices.len();
                    vertices.push(w);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by_key(|&i| {
        let e = g.edges()[i];
        (rank[e.u].max(rank[e.v]), rank[e.u].min(rank[e.v]), i)
    });
    order
}

/// Exhaustive oracle: walks all `2^m` orientations in Gray-code order.
pub fn brute_force_beta(g: &MultiGraph, beta: &Z3Boundary) -> Result<Option<Orientation>> {
    check_boundary(g, beta)?;
    ensure_cap("brute-force edge count", BRUTE_FORCE_MAX_EDGES, g.m())?;
    let n = g.n();
    let m = g.m();
    let target = beta.values();
    // Start with every edge u → v.
    let mut forward = vec![true; m];
    let mut net = vec![0i64; n];
    for e in g.edges() {
        net[e.u] += 1;
        net[e.v] -= 1;
    }
    let ok = |net: &[i64], v: usize| net[v].rem_euclid(3) as u8 == target[v];
    let mut bad = (0..n).filter(|&v| !ok(&net, v)).count();
    let mut step: u64 = 0;
    loop {
        if bad == 0 {
            return Ok(Some(Orientation::from_directions(g, &forward)));
        }
        step += 1;
        if step >= 1u64 << m {
            return Ok(None);
        }
        let i = step.trailing_zeros() as usize;
        let e = g.edges()[i];
        let before = ok(&net, e.u) as usize + ok(&net, e.v) as usize;
        let delta = if forward[i] { -2 } else { 2 };
        net[e.u] += delta;
        net[e.v] -= delta;
        forward[i] = !forward[i];
        let after = ok(&net, e.u) as usize + ok(&net, e.v) as usize;
        bad = bad + before - after;
    }
}

/// Why a flow decision was made without search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowReason {
    Bridge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowDecision {
    pub admits: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<FlowReason>,
}

/// Whether `g` has a modulo-3 orientation, equivalently a nowhere-zero
/// 3-flow. Graphs with a bridge are rejected before search.
pub fn has_mod3_orientation(g: &MultiGraph) -> Result<FlowDecision> {
    if g.has_bridge() {
        return Ok(FlowDecision {
            admits: false,
            orientation: None,
            reason: Some(FlowReason::Bridge),
        });
    }
    let o = find_beta_orientation(g, &Z3Boundary::zero(g.n()))?;
    Ok(FlowDecision {
        admits: o.is_some(),
        orientation: o,
        reason: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z3Decision {
    pub connected: bool,
    /// Lexicographically first boundary with no β-orientation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_boundary: Option<Z3Boundary>,
}

/// Z3-connectivity with a canonical certificate.
///
/// Computes the set of all boundaries realised by some orientation, one edge
/// at a time: each edge shifts every reachable boundary by `±(1_u − 1_v)`.
/// Boundaries are indexed by their first `n − 1` entries (the last is forced),
/// with vertex 0 most significant, so the first index missing from the set is
/// the lexicographically first unsatisfiable boundary.
pub fn is_z3_connected(g: &MultiGraph) -> Result<Z3Decision> {
    ensure_cap("Z3-connectivity vertex count", Z3_MAX_VERTICES, g.n())?;
    let reach = ReachableBoundaries::compute(g);
    Ok(match reach.first_missing() {
        None => Z3Decision {
            connected: true,
            failing_boundary: None,
        },
        Some(idx) => Z3Decision {
            connected: false,
            failing_boundary: Some(reach.decode(idx)),
        },
    })
}

/// Z3-connectivity by running the backtracking solver on every boundary in
/// lexicographic order, stopping at the first failure. Slower than
/// [`is_z3_connected`] but independent of it.
pub fn is_z3_connected_by_search(g: &MultiGraph) -> Result<Z3Decision> {
    ensure_cap("Z3-connectivity vertex count", Z3_MAX_VERTICES, g.n())?;
    for beta in all_boundaries(g.n()) {
        if find_beta_orientation(g, &beta)?.is_none() {
            return Ok(Z3Decision {
                connected: false,
                failing_boundary: Some(beta),
            });
        }
    }
    Ok(Z3Decision {
        connected: true,
        failing_boundary: None,
    })
}

/// All `3^(n−1)` boundaries on `n` vertices in lexicographic order.
pub fn all_boundaries(n: usize) -> impl Iterator<Item = Z3Boundary> {
    let free = n.saturating_sub(1);
    let count = 3usize.pow(free as u32);
    (0..count).map(move |mut idx| {
        if n == 0 {
            return Z3Boundary::zero(0);
        }
        let mut prefix = vec![0u8; free];
        for slot in prefix.iter_mut().rev() {
            *slot = (idx % 3) as u8;
            idx /= 3;
        }
        Z3Boundary::completed(&prefix)
    })
}

struct ReachableBoundaries {
    n: usize,
    place: Vec<usize>,
    set: Vec<bool>,
}

impl ReachableBoundaries {
    fn compute(g: &MultiGraph) -> Self {
        let n = g.n();
        let free = n.saturating_sub(1);
        let size = 3usize.pow(free as u32);
        // place[v] = 3^(n−2−v) for v < n−1; the last vertex is dropped.
        let mut place = vec![0usize; n];
        for v in 0..free {
            place[v] = 3usize.pow((free - 1 - v) as u32);
        }
        let mut set = vec![false; size];
        set[0] = true;
        let mut next = vec![false; size];
        for e in g.edges() {
            next.iter_mut().for_each(|x| *x = false);
            for (idx, _) in set.iter().enumerate().filter(|(_, &on)| on) {
                let plus = shift(shift(idx, place[e.u], 1), place[e.v], 2);
                let minus = shift(shift(idx, place[e.u], 2), place[e.v], 1);
                next[plus] = true;
                next[minus] = true;
            }
            std::mem::swap(&mut set, &mut next);
        }
        ReachableBoundaries { n, place, set }
    }

    fn first_missing(&self) -> Option<usize> {
        self.set.iter().position(|&on| !on)
    }

    fn decode(&self, idx: usize) -> Z3Boundary {
        let free = self.n - 1;
        let prefix: Vec<u8> = (0..free).map(|v| ((idx / self.place[v]) % 3) as u8).collect();
        Z3Boundary::completed(&prefix)
    }
}

/// Adds `delta` (mod 3) to the base-3 digit with place value `place`.
/// A zero place value marks the dropped last vertex.
#[inline]
fn shift(idx: usize, place: usize, delta: usize) -> usize {
    if place == 0 {
        return idx;
    }
    let d = (idx / place) % 3;
    let nd = (d + delta) % 3;
    idx + nd * place - d * place
}

/// The orientation `D(k)` of `K_{3,t−3}`: every part-X vertex has
/// `d⁺ − d⁻ ≡ k` and every part-Y vertex `≡ 0 (mod 3)`.
///
/// Part X is `{0, 1, 2}` and part Y is `{3, …, t−1}`. A degree-3 vertex of Y
/// is balanced only as a source or a sink, and then every X vertex sees the
/// same net outflow `#sinks − #sources`. Taking the first `c` vertices of Y as
/// sinks with `c ≡ 2(k + |Y|) (mod 3)`, `0 ≤ c ≤ 2`, hits `k`; `|Y| ≥ 2`
/// guarantees `c ≤ |Y|`.
pub fn special_bipartite_orientation(t: usize, k: u8) -> Result<(MultiGraph, Orientation)> {
    if t < 5 {
        return Err(Error::Precondition(format!(
            "D(k) needs t >= 5, got {t}"
        )));
    }
    if k > 2 {
        return Err(Error::Precondition(format!("k must be 0, 1 or 2, got {k}")));
    }
    let y = t - 3;
    let g = complete_bipartite(3, y)?;
    let sinks = (2 * (k as usize + y)) % 3;
    debug_assert!(sinks <= y);
    // complete_bipartite emits edges with the X endpoint first.
    let forward: Vec<bool> = g.edges().iter().map(|e| e.v - 3 < sinks).collect();
    let o = Orientation::from_directions(&g, &forward);
    let mut want = vec![k; 3];
    want.extend(std::iter::repeat_n(0, y));
    let beta = Z3Boundary::new(want)?;
    o.verify(&g, &beta).map_err(|msg| {
        Error::Precondition(format!("D({k}) construction failed for t = {t}: {msg}"))
    })?;
    Ok((g, o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{complete, wheel};

    fn two_k2() -> MultiGraph {
        MultiGraph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap()
    }

    fn check(g: &MultiGraph, beta: &Z3Boundary) -> bool {
        let fast = find_beta_orientation(g, beta).unwrap();
        let slow = brute_force_beta(g, beta).unwrap();
        assert_eq!(fast.is_some(), slow.is_some(), "{g:?} {beta}");
        for o in fast.iter().chain(slow.iter()) {
            o.verify(g, beta).unwrap();
        }
        fast.is_some()
    }

    #[test]
    fn double_edge_is_z3_connected() {
        for beta in all_boundaries(2) {
            assert!(check(&two_k2(), &beta));
        }
        assert!(is_z3_connected(&two_k2()).unwrap().connected);
    }

    #[test]
    fn single_edge_never_balances() {
        let k2 = complete(2);
        assert!(!check(&k2, &Z3Boundary::zero(2)));
        assert!(!has_mod3_orientation(&k2).unwrap().admits);
    }

    #[test]
    fn k4_has_no_mod3_orientation() {
        assert!(!check(&complete(4), &Z3Boundary::zero(4)));
        let beta = Z3Boundary::new(vec![1, 2, 0, 0]).unwrap();
        check(&complete(4), &beta);
    }

    #[test]
    fn trees_fail_nonrealisable_boundaries() {
        let path = MultiGraph::from_pairs(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        for beta in all_boundaries(4) {
            check(&path, &beta);
        }
        assert!(!is_z3_connected(&path).unwrap().connected);
    }

    #[test]
    fn wheels() {
        assert!(!has_mod3_orientation(&wheel(5).unwrap()).unwrap().admits);
        let w5 = wheel(5).unwrap();
        for id in w5.edge_ids().collect::<Vec<_>>() {
            let c = w5.contract_edge(id).unwrap();
            let d = has_mod3_orientation(&c.graph).unwrap();
            assert!(d.admits);
            d.orientation.unwrap().verify_mod3(&c.graph).unwrap();
        }
        assert!(is_z3_connected(&wheel(4).unwrap()).unwrap().connected);
        assert!(!is_z3_connected(&wheel(5).unwrap()).unwrap().connected);
    }

    #[test]
    fn trivial_graphs() {
        let k1 = complete(1);
        assert!(has_mod3_orientation(&k1).unwrap().admits);
        let empty = MultiGraph::new(3).unwrap();
        let d = has_mod3_orientation(&empty).unwrap();
        assert!(d.admits);
        assert_eq!(d.orientation.unwrap().arcs.len(), 0);
        assert!(is_z3_connected(&k1).unwrap().connected);
        assert!(!is_z3_connected(&empty).unwrap().connected);
    }

    #[test]
    fn bridge_short_circuit() {
        let g = MultiGraph::from_pairs(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)],
        )
        .unwrap();
        let d = has_mod3_orientation(&g).unwrap();
        assert!(!d.admits);
        assert_eq!(d.reason, Some(FlowReason::Bridge));
    }

    #[test]
    fn certificate_is_lexicographically_first() {
        for g in [complete(4), wheel(5).unwrap(), complete(3)] {
            let fast = is_z3_connected(&g).unwrap();
            let slow = is_z3_connected_by_search(&g).unwrap();
            assert_eq!(fast, slow);
        }
        // K4 has no modulo-3 orientation, so β ≡ 0 is the certificate.
        let d = is_z3_connected(&complete(4)).unwrap();
        assert!(d.failing_boundary.unwrap().is_zero());
    }

    #[test]
    fn errors() {
        let k4 = complete(4);
        assert!(matches!(
            find_beta_orientation(&k4, &Z3Boundary::zero(3)),
            Err(Error::InvalidBoundary(_))
        ));
        assert!(brute_force_beta(&complete(8), &Z3Boundary::zero(8))
            .unwrap_err()
            .is_cap());
        assert!(find_beta_orientation(&complete(21), &Z3Boundary::zero(21))
            .unwrap_err()
            .is_cap());
        assert!(is_z3_connected(&complete(13)).unwrap_err().is_cap());
        assert!(special_bipartite_orientation(4, 0).is_err());
        assert!(special_bipartite_orientation(6, 3).is_err());
    }

    #[test]
    fn special_orientation_balances() {
        for t in 5..=12 {
            for k in 0..3u8 {
                let (g, o) = special_bipartite_orientation(t, k).unwrap();
                // Recount degrees directly.
                let net = o.net_outflow(g.n());
                for (v, &x) in net.iter().enumerate() {
                    let want = if v < 3 { k as i64 } else { 0 };
                    assert_eq!(x.rem_euclid(3), want, "t={t} k={k} v={v}");
                }
                assert_eq!(g.m(), 3 * (t - 3));
            }
        }
    }

    #[test]
    fn boundary_enumeration_order() {
        let all: Vec<_> = all_boundaries(3).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].values(), &[0, 0, 0]);
        assert_eq!(all[1].values(), &[0, 1, 2]);
        assert_eq!(all[3].values(), &[1, 0, 2]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all_boundaries(1).count(), 1);
    }
}
