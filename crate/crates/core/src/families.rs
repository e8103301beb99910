//! Graph families and the 2-sum construction.
//!
//! Labeling is fixed so certificates are byte-stable: wheel hubs come last,
//! `K⁺_{3,n−3}` has X = {0, 1, 2} with the extra edge 0–1 appended after the
//! bipartite edges.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::criticality::{is_3_flow_critical, Verdict};
use crate::error::{Error, Result};
use crate::flow::SOLVER_MAX_VERTICES;
use crate::graph::{EdgeId, MultiGraph, MAX_VERTICES};

/// `K_n`, edges listed column by column (`(0,1), (0,2), (1,2), (0,3), …`),
/// the same order graph6 decoding produces.
pub fn complete(n: usize) -> MultiGraph {
    assert!(n <= MAX_VERTICES, "K_{n} exceeds the vertex limit");
    let pairs: Vec<_> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    MultiGraph::from_pairs(n, &pairs).expect("valid complete graph")
}

/// `K_{a,b}` with parts `{0..a}` and `{a..a+b}`; edges `(x, y)` with `x` in the
/// first part, x-major.
pub fn complete_bipartite(a: usize, b: usize) -> Result<MultiGraph> {
    let pairs: Vec<_> = (0..a)
        .flat_map(|x| (a..a + b).map(move |y| (x, y)))
        .collect();
    MultiGraph::from_pairs(a + b, &pairs)
}

pub fn cycle(k: usize) -> Result<MultiGraph> {
    if k < 3 {
        return Err(Error::Precondition(format!("cycle needs k >= 3, got {k}")));
    }
    let pairs: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
    MultiGraph::from_pairs(k, &pairs)
}

/// `W_k`: the cycle `0..k` followed by spokes to the hub `k`.
pub fn wheel(k: usize) -> Result<MultiGraph> {
    if k < 3 {
        return Err(Error::Precondition(format!("wheel needs k >= 3, got {k}")));
    }
    let mut g = MultiGraph::new(k + 1)?;
    for i in 0..k {
        g.add_edge(i, (i + 1) % k)?;
    }
    for i in 0..k {
        g.add_edge(i, k)?;
    }
    Ok(g)
}

/// `K⁺_{3,n−3}`: `K_{3,n−3}` plus the edge 0–1 inside the part of size 3.
pub fn k3plus(n: usize) -> Result<MultiGraph> {
    if n < 6 {
        return Err(Error::Precondition(format!("K+(3,n-3) needs n >= 6, got {n}")));
    }
    let mut g = complete_bipartite(3, n - 3)?;
    g.add_edge(0, 1)?;
    Ok(g)
}

/// Every edge doubled.
pub fn doubled(g: &MultiGraph) -> MultiGraph {
    let mut h = MultiGraph::new(g.n()).expect("same vertex count");
    for e in g.edges() {
        h.add_edge(e.u, e.v).expect("valid edge");
        h.add_edge(e.u, e.v).expect("valid edge");
    }
    h
}

/// Inputs to `G₁ ⊕_(e₁,e₂) G₂`.
///
/// With `flip = false` the stored endpoints `(u₁, v₁)` of `e1` are merged
/// with `(u₂, v₂)` of `e2`; with `flip = true`, `u₁` meets `v₂` and `v₁` meets
/// `u₂`.
#[derive(Clone, Copy, Debug)]
pub struct TwoSumSpec<'a> {
    pub g1: &'a MultiGraph,
    pub e1: EdgeId,
    pub g2: &'a MultiGraph,
    pub e2: EdgeId,
    pub flip: bool,
}

/// The 2-sum: `G₁ − e₁` and `G₂ − e₂` glued at the endpoints of the deleted
/// edges, plus one fresh edge between the two glued vertices.
///
/// Vertices of `G₁` keep their labels; the remaining vertices of `G₂` follow
/// in increasing order. Edges are `G₁ − e₁`, then `G₂ − e₂`, then `uv`,
/// numbered from 0.
pub fn two_sum(spec: &TwoSumSpec<'_>) -> Result<MultiGraph> {
    let e1 = *spec.g1.edge(spec.e1).ok_or(Error::UnknownEdge(spec.e1))?;
    let e2 = *spec.g2.edge(spec.e2).ok_or(Error::UnknownEdge(spec.e2))?;
    let (u1, v1) = (e1.u, e1.v);
    let (u2, v2) = if spec.flip { (e2.v, e2.u) } else { (e2.u, e2.v) };
    let n1 = spec.g1.n();
    let n = n1 + spec.g2.n() - 2;
    let mut map = vec![0; spec.g2.n()];
    let mut next = n1;
    for (x, slot) in map.iter_mut().enumerate() {
        *slot = if x == u2 {
            u1
        } else if x == v2 {
            v1
        } else {
            next += 1;
            next - 1
        };
    }
    let mut g = MultiGraph::new(n)?;
    for e in spec.g1.edges().iter().filter(|e| e.id != spec.e1) {
        g.add_edge(e.u, e.v)?;
    }
    for e in spec.g2.edges().iter().filter(|e| e.id != spec.e2) {
        g.add_edge(map[e.u], map[e.v])?;
    }
    g.add_edge(u1, v1)?;
    Ok(g)
}

/// Parameters of a critical graph with edge density close to `q/p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyPlan {
    /// Target ratio in lowest terms.
    pub p: u64,
    pub q: u64,
    /// Requested lower bound on the vertex count.
    pub floor: u64,
    pub s: u64,
    pub a: Ratio<i128>,
    pub b: Ratio<i128>,
    pub t: u64,
    /// Predicted `8s + t + 5`.
    pub n: u64,
    /// Predicted `14s + 3t + 3`.
    pub edges: u64,
}

impl FamilyPlan {
    pub fn ratio(&self) -> Ratio<i128> {
        Ratio::new(self.q as i128, self.p as i128)
    }

    /// `rn − 5/8 ≤ |E| ≤ rn + 5/8`, checked on rationals.
    pub fn within_margin(&self) -> bool {
        let rn = self.ratio() * self.n as i128;
        let margin = Ratio::new(5, 8);
        let e = Ratio::from_integer(self.edges as i128);
        rn - margin <= e && e <= rn + margin
    }

    /// The same two inequalities after scaling by `8p`:
    /// `8qn − 5p ≤ 8p|E| ≤ 8qn + 5p`.
    pub fn within_margin_scaled(&self) -> bool {
        let (p, q) = (self.p as i128, self.q as i128);
        let lhs = 8 * p * self.edges as i128;
        let qn = 8 * q * self.n as i128;
        qn - 5 * p <= lhs && lhs <= qn + 5 * p
    }

    pub fn seed_vertices(&self) -> u64 {
        8 * self.s + 7
    }

    pub fn seed_edges(&self) -> u64 {
        14 * self.s + 12
    }
}

/// Chooses `s` and `t` so that the 2-sum of an `(8s+7, 14s+12)` critical seed
/// with `K⁺_{3,t−3}` has density within `5/8` of `q/p`.
///
/// `s` is the smallest integer `≥ 6(3p−q)/(8q−14p) + N`, and `t` the smallest
/// integer in `[a, b]` where
/// `a, b = ((8q−14p)s + 5q − 3p ∓ 5p/8) / (3p − q)`. Any integer in `[a, b]`
/// works; the smallest is taken.
pub fn plan_density_family(p: u64, q: u64, floor: u64) -> Result<FamilyPlan> {
    if p == 0 || floor == 0 {
        return Err(Error::Precondition("p and N must be positive".into()));
    }
    let g = p.gcd(&q);
    let (p, q) = (p / g, q / g);
    let (pi, qi) = (p as i128, q as i128);
    // 7/4 < q/p < 3
    if !(4 * qi > 7 * pi && qi < 3 * pi) {
        return Err(Error::Precondition(format!(
            "ratio {q}/{p} outside the open interval (7/4, 3)"
        )));
    }
    let gap = 3 * pi - qi;
    let slope = 8 * qi - 14 * pi;
    let s_min = Ratio::new(6 * gap, slope) + Ratio::from_integer(floor as i128);
    let s = s_min.ceil().to_integer();
    let base = Ratio::from_integer(slope * s + 5 * qi - 3 * pi);
    let half = Ratio::new(5 * pi, 8);
    let a = (base - half) / gap;
    let b = (base + half) / gap;
    let t = a.ceil().to_integer();
    if Ratio::from_integer(t) > b {
        return Err(Error::Precondition(format!(
            "no integer t in [{a}, {b}]"
        )));
    }
    let s = s as u64;
    let t = t as u64;
    let plan = FamilyPlan {
        p,
        q,
        floor,
        s,
        a,
        b,
        t,
        n: 8 * s + t + 5,
        edges: 14 * s + 3 * t + 3,
    };
    if !(plan.within_margin() && plan.within_margin_scaled()) {
        return Err(Error::Precondition(format!(
            "plan {plan:?} misses the 5/8 density margin"
        )));
    }
    Ok(plan)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedStatus {
    /// Certified critical by the exact solver.
    Certified,
    /// Too large for the solver caps; criticality taken on trust.
    Unverified,
}

#[derive(Clone, Debug)]
pub struct AssembledFamily {
    pub graph: MultiGraph,
    pub seed: SeedStatus,
}

/// `seed ⊕ K⁺_{3,t−3}` along the first edge of each.
///
/// The seed must have exactly `8s + 7` vertices and `14s + 12` edges. Seeds
/// small enough for the solver are certified here and rejected if not
/// critical.
pub fn assemble_density_family(plan: &FamilyPlan, seed: &MultiGraph) -> Result<AssembledFamily> {
    if seed.n() as u64 != plan.seed_vertices() || seed.m() as u64 != plan.seed_edges() {
        return Err(Error::Precondition(format!(
            "seed shape mismatch: have {} vertices and {} edges, plan needs {} and {}",
            seed.n(),
            seed.m(),
            plan.seed_vertices(),
            plan.seed_edges()
        )));
    }
    let partner = k3plus(plan.t as usize)?;
    let status = if seed.n() <= SOLVER_MAX_VERTICES {
        match is_3_flow_critical(seed)?.verdict {
            Verdict::Critical => SeedStatus::Certified,
            Verdict::NotCritical => {
                return Err(Error::Precondition("seed is not 3-flow-critical".into()))
            }
        }
    } else {
        SeedStatus::Unverified
    };
    let e1 = seed
        .edge_ids()
        .next()
        .ok_or_else(|| Error::Precondition("seed has no edges".into()))?;
    let e2 = partner.edge_ids().next().expect("K+ has edges");
    let graph = two_sum(&TwoSumSpec {
        g1: seed,
        e1,
        g2: &partner,
        e2,
        flip: false,
    })?;
    if graph.n() as u64 != plan.n || graph.m() as u64 != plan.edges {
        return Err(Error::Precondition(format!(
            "assembled graph has ({}, {}), plan predicted ({}, {})",
            graph.n(),
            graph.m(),
            plan.n,
            plan.edges
        )));
    }
    Ok(AssembledFamily {
        graph,
        seed: status,
    })
}
