//! The partition potential ρ, the reduction dichotomy it controls, and the
//! edge-density report for critical graphs.

use std::sync::atomic::{AtomicI64, Ordering};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criticality::{z3_reduce, CriticalityCertificate};
use crate::error::{ensure_cap, Error, Result};
use crate::flow::{is_z3_connected, Z3_MAX_VERTICES};
use crate::format::to_edge_list;
use crate::families::k3plus;
use crate::graph::{bit, mask_vertices, MultiGraph, SmallGraph, VertexPartition};
use crate::iso::is_isomorphic;

/// Largest graph accepted by [`rho_min`] (Bell(13) ≈ 2.8·10⁷ partitions).
pub const RHO_MAX_VERTICES: usize = 13;

/// `Σ d(Xᵢ) − 8t + 20` over the `t` blocks of `p`.
pub fn rho_of_partition(g: &MultiGraph, p: &VertexPartition) -> Result<i64> {
    if p.n() != g.n() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} vertices, graph has {}",
            p.n(),
            g.n()
        )));
    }
    let cut: usize = p.block_masks().iter().map(|&b| g.cut_size(b)).sum();
    Ok(cut as i64 - 8 * p.num_blocks() as i64 + 20)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimizerKind {
    /// Every block is a single vertex.
    Trivial,
    /// One block induces a simple `K2`, the rest are singletons.
    K2Trivial,
    /// One block induces a simple `K3`, the rest are singletons.
    K3Trivial,
    Other,
}

pub fn minimizer_kind(g: &MultiGraph, p: &VertexPartition) -> MinimizerKind {
    let big: Vec<u64> = p
        .block_masks()
        .into_iter()
        .filter(|b| b.count_ones() > 1)
        .collect();
    match big.as_slice() {
        [] => MinimizerKind::Trivial,
        [b] => match g.induced(*b).renumbered().recognize_small() {
            SmallGraph::K2 => MinimizerKind::K2Trivial,
            SmallGraph::K3 => MinimizerKind::K3Trivial,
            _ => MinimizerKind::Other,
        },
        _ => MinimizerKind::Other,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoResult {
    pub value: i64,
    pub partition: VertexPartition,
    pub kind: MinimizerKind,
}

/// Exact `ρ(G)`, minimized over all set partitions.
///
/// Partitions are enumerated as restricted growth strings. A prefix is cut
/// when a lower bound on every completion cannot beat the best value found so
/// far. The returned minimizer is the first one in restricted-growth order,
/// whatever the number of worker threads.
pub fn rho_min(g: &MultiGraph) -> Result<RhoResult> {
    ensure_cap("rho vertex count", RHO_MAX_VERTICES, g.n())?;
    if g.n() == 0 {
        return Err(Error::Precondition("rho needs at least one vertex".into()));
    }
    let n = g.n();
    let mut mult = vec![vec![0i64; n]; n];
    for e in g.edges() {
        mult[e.u][e.v] += 1;
        mult[e.v][e.u] += 1;
    }
    let search = RhoSearch {
        n,
        mult,
        shared: AtomicI64::new(12),
    };
    let depth = n.min(4);
    let prefixes = rgs_prefixes(depth);
    let results: Vec<Option<(i64, Vec<usize>)>> = prefixes
        .par_iter()
        .map(|prefix| search.run(prefix))
        .collect();
    let (value, labels) = results
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(i64, Vec<usize>)>, cand| match best {
            Some(b) if b.0 <= cand.0 => Some(b),
            _ => Some(cand),
        })
        .expect("the single-block partition is always reached");
    let partition = VertexPartition::from_labels(&labels);
    let kind = minimizer_kind(g, &partition);
    Ok(RhoResult {
        value,
        partition,
        kind,
    })
}

/// All restricted growth strings of the given length, in lexicographic order.
fn rgs_prefixes(len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, blocks: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 1 } else { blocks + 1 };
        for l in 0..limit {
            cur.push(l);
            rec(len, blocks.max(l + 1), cur, out);
            cur.pop();
        }
    }
    rec(len, 0, &mut cur, &mut out);
    out
}

struct RhoSearch {
    n: usize,
    mult: Vec<Vec<i64>>,
    /// Best value seen by any worker. Only strictly worse prefixes are cut
    /// against it, so each worker still finds its own first minimizer.
    shared: AtomicI64,
}

struct Local {
    labels: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
}

impl RhoSearch {
    fn run(&self, prefix: &[usize]) -> Option<(i64, Vec<usize>)> {
        let mut local = Local {
            labels: prefix.to_vec(),
            best: None,
        };
        let blocks = prefix.iter().max().map_or(0, |&m| m + 1);
        let mut cross = 0;
        for i in 0..prefix.len() {
            for j in 0..i {
                if prefix[i] != prefix[j] {
                    cross += self.mult[i][j];
                }
            }
        }
        self.dfs(&mut local, blocks, cross);
        local.best
    }

    /// Lower bound on ρ over all completions: each unplaced vertex either
    /// joins its cheapest existing block or opens a block of its own, edges
    /// between unplaced vertices are ignored.
    fn lower_bound(&self, labels: &[usize], blocks: usize, cross: i64) -> i64 {
        let mut lb = 2 * cross - 8 * blocks as i64 + 20;
        let mut to_block = vec![0i64; blocks];
        for w in labels.len()..self.n {
            to_block.iter_mut().for_each(|x| *x = 0);
            let mut total = 0;
            for (v, &l) in labels.iter().enumerate() {
                to_block[l] += self.mult[w][v];
                total += self.mult[w][v];
            }
            let join = to_block.iter().map(|&e| 2 * (total - e)).min();
            let open = 2 * total - 8;
            lb += join.map_or(open, |j| j.min(open));
        }
        lb
    }

    fn dfs(&self, local: &mut Local, blocks: usize, cross: i64) {
        let i = local.labels.len();
        if i == self.n {
            let value = 2 * cross - 8 * blocks as i64 + 20;
            if local.best.as_ref().is_none_or(|b| value < b.0) {
                local.best = Some((value, local.labels.clone()));
                self.shared.fetch_min(value, Ordering::Relaxed);
            }
            return;
        }
        let lb = self.lower_bound(&local.labels, blocks, cross);
        if lb > self.shared.load(Ordering::Relaxed)
            || local.best.as_ref().is_some_and(|b| lb >= b.0)
        {
            return;
        }
        for l in 0..=blocks {
            let added: i64 = local
                .labels
                .iter()
                .enumerate()
                .filter(|&(_, &lv)| lv != l)
                .map(|(v, _)| self.mult[i][v])
                .sum();
            local.labels.push(l);
            self.dfs(local, blocks.max(l + 1), cross + added);
            local.labels.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum DichotomyBranch {
    Z3Connected,
    ReducesTo { target: SmallGraph },
    /// Neither alternative; `reduced` is the end of the reduction.
    Neither { reduced: MultiGraph },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub rho: i64,
    /// `ρ(G) ≥ 0`. The branch is computed either way.
    pub hypothesis_met: bool,
    pub branch: DichotomyBranch,
}

impl DichotomyReport {
    /// False only when the hypothesis held and neither alternative did.
    pub fn holds(&self) -> bool {
        !self.hypothesis_met || !matches!(self.branch, DichotomyBranch::Neither { .. })
    }
}

/// For connected `G` with `ρ(G) ≥ 0`, checks that `G` is Z3-connected or
/// Z3-reduces to one of `K2`, `K3`, `P3`, `K4`.
pub fn check_rho_dichotomy(g: &MultiGraph) -> Result<DichotomyReport> {
    ensure_cap("rho dichotomy vertex count", Z3_MAX_VERTICES, g.n())?;
    if !g.is_connected() {
        return Err(Error::Precondition("graph must be connected".into()));
    }
    let rho = rho_min(g)?.value;
    let branch = if is_z3_connected(g)?.connected {
        DichotomyBranch::Z3Connected
    } else {
        let reduced = z3_reduce(g)?.reduced;
        match reduced.recognize_small() {
            target @ (SmallGraph::K2 | SmallGraph::K3 | SmallGraph::P3 | SmallGraph::K4) => {
                DichotomyBranch::ReducesTo { target }
            }
            _ => DichotomyBranch::Neither { reduced },
        }
    };
    Ok(DichotomyReport {
        rho,
        hypothesis_met: rho >= 0,
        branch,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundStatus {
    Proven,
    Conjectured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// The inequality in terms of `m`, `n`, `n3`, `n8`.
    pub statement: String,
    /// Right-hand side evaluated on this graph.
    pub limit: String,
    pub status: BoundStatus,
    pub applicable: bool,
    pub holds: bool,
    /// `m` equals the limit.
    pub tight: bool,
}

impl BoundCheck {
    fn new(statement: &str, limit: Ratio<i64>, status: BoundStatus, applicable: bool, holds: bool, m: i64) -> Self {
        BoundCheck {
            statement: statement.into(),
            limit: limit.to_string(),
            status,
            applicable,
            holds,
            tight: Ratio::from_integer(m) == limit,
        }
    }

    /// A conjectured bound that applies and fails.
    pub fn flagged(&self) -> bool {
        self.status == BoundStatus::Conjectured && self.applicable && !self.holds
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub n: usize,
    pub m: usize,
    /// Vertices of degree 3.
    pub n3: usize,
    /// Vertices of degree at most 8.
    pub n8: usize,
    pub is_k4: bool,
    pub lower: BoundCheck,
    pub upper: BoundCheck,
    /// `m ≤ 3n − 8` when `n ≥ 9` and all but three vertices have degree 3,
    /// with equality only for `K⁺_{3,n−3}`.
    pub cubic_heavy: BoundCheck,
    pub three_n_minus_8: BoundCheck,
    pub five_halves_plus_n3: BoundCheck,
    pub five_halves_plus_9n8: BoundCheck,
    /// Names of conjectured bounds that failed.
    pub flags: Vec<String>,
}

impl DensityReport {
    pub fn checks(&self) -> [(&'static str, &BoundCheck); 6] {
        [
            ("lower", &self.lower),
            ("upper", &self.upper),
            ("cubic-heavy", &self.cubic_heavy),
            ("3n-8", &self.three_n_minus_8),
            ("5n/2+n3", &self.five_halves_plus_n3),
            ("5n/2+9n8", &self.five_halves_plus_9n8),
        ]
    }
}

/// `K⁺_{3,n−3}` up to relabeling: three hubs joined to all other vertices,
/// exactly one edge among the hubs, every other vertex of degree 3.
pub fn is_k3plus(g: &MultiGraph) -> bool {
    let n = g.n();
    if n < 6 || !g.is_simple() || g.m() != 3 * n - 8 {
        return false;
    }
    if n == 6 {
        // The hub outside the extra edge has degree 3 here, like the others.
        let target = k3plus(6).expect("n = 6 is valid");
        return is_isomorphic(g, &target).unwrap_or(false);
    }
    let deg = g.degrees();
    let hubs = (0..n)
        .filter(|&v| deg[v] != 3)
        .fold(0u64, |m, v| m | bit(v));
    if hubs.count_ones() != 3 {
        return false;
    }
    let adj = g.neighbor_masks();
    let rest = g.vertex_mask() & !hubs;
    mask_vertices(rest).all(|v| adj[v] == hubs) && g.inner_edge_count(hubs) == 1
}

/// Evaluates the edge-count bounds on a certified-critical graph.
///
/// A failed proven bound is returned as [`Error::ProvenBoundViolated`] with
/// the graph and certificate attached; failed conjectured bounds are listed
/// in `flags`.
pub fn density_report(g: &MultiGraph, cert: &CriticalityCertificate) -> Result<DensityReport> {
    if !cert.is_critical() {
        return Err(Error::Precondition(
            "density report needs a critical certificate".into(),
        ));
    }
    if (cert.n, cert.m) != (g.n(), g.m()) {
        return Err(Error::Precondition(
            "certificate does not match the graph".into(),
        ));
    }
    let report = density_bounds(g);
    for (name, check) in report.checks() {
        if check.status == BoundStatus::Proven && check.applicable && !check.holds {
            return Err(Error::ProvenBoundViolated {
                bound: format!("{name}: {} with limit {}", check.statement, check.limit),
                diagnostic: format!(
                    "graph:\n{}certificate:\n{}",
                    to_edge_list(g),
                    serde_json::to_string(cert).unwrap_or_default()
                ),
            });
        }
    }
    Ok(report)
}

/// The bound arithmetic alone, without any criticality precondition.
pub fn density_bounds(g: &MultiGraph) -> DensityReport {
    let n = g.n() as i64;
    let m = g.m() as i64;
    let deg = g.degrees();
    let n3 = deg.iter().filter(|&&d| d == 3).count();
    let n8 = deg.iter().filter(|&&d| d <= 8).count();
    let is_k4 = g.recognize_small() == SmallGraph::K4;
    let r = |num: i64, den: i64| Ratio::new(num, den);
    use BoundStatus::*;

    let lower = if is_k4 {
        let lim = r(8 * n - 2, 5);
        BoundCheck::new("m >= (8n-2)/5", lim, Proven, true, Ratio::from_integer(m) >= lim, m)
    } else {
        let lim = r(8 * n + 2, 5);
        BoundCheck::new("m >= (8n+2)/5", lim, Proven, true, Ratio::from_integer(m) >= lim, m)
    };
    let upper = if is_k4 {
        BoundCheck::new("m <= 4n-10", r(4 * n - 10, 1), Proven, true, m <= 4 * n - 10, m)
    } else {
        BoundCheck::new("m <= 4n-11", r(4 * n - 11, 1), Proven, true, m <= 4 * n - 11, m)
    };
    let heavy_applies = n >= 9 && n3 as i64 >= n - 3;
    let heavy_holds = m < 3 * n - 8 || (m == 3 * n - 8 && is_k3plus(g));
    let cubic_heavy = BoundCheck::new(
        "m <= 3n-8, equality only for K+(3,n-3) (n >= 9, n3 >= n-3)",
        r(3 * n - 8, 1),
        Proven,
        heavy_applies,
        heavy_holds,
        m,
    );
    let three_n_minus_8 = BoundCheck::new(
        "m <= 3n-8 (n >= 7)",
        r(3 * n - 8, 1),
        Conjectured,
        n >= 7,
        m <= 3 * n - 8,
        m,
    );
    let five_halves_plus_n3 = BoundCheck::new(
        "m < 5n/2 + n3",
        r(5 * n + 2 * n3 as i64, 2),
        Conjectured,
        true,
        2 * m < 5 * n + 2 * n3 as i64,
        m,
    );
    let five_halves_plus_9n8 = BoundCheck::new(
        "m < 5n/2 + 9n8",
        r(5 * n + 18 * n8 as i64, 2),
        Proven,
        true,
        2 * m < 5 * n + 18 * n8 as i64,
        m,
    );
    let mut report = DensityReport {
        n: g.n(),
        m: g.m(),
        n3,
        n8,
        is_k4,
        lower,
        upper,
        cubic_heavy,
        three_n_minus_8,
        five_halves_plus_n3,
        five_halves_plus_9n8,
        flags: Vec::new(),
    };
    report.flags = report
        .checks()
        .iter()
        .filter(|(_, c)| c.flagged())
        .map(|(name, _)| name.to_string())
        .collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criticality::is_3_flow_critical;
    use crate::families::{complete, wheel};

    fn path3() -> MultiGraph {
        MultiGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap()
    }

    /// Every set partition of `0..n`, independent of the RGS code above:
    /// insert each vertex into an existing block or a new one.
    fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
        let mut parts: Vec<Vec<Vec<usize>>> = vec![vec![]];
        for v in 0..n {
            let mut next = Vec::new();
            for p in &parts {
                for i in 0..p.len() {
                    let mut q = p.clone();
                    q[i].push(v);
                    next.push(q);
                }
                let mut q = p.clone();
                q.push(vec![v]);
                next.push(q);
            }
            parts = next;
        }
        parts
    }

    fn brute_rho(g: &MultiGraph) -> i64 {
        all_partitions(g.n())
            .into_iter()
            .map(|b| rho_of_partition(g, &VertexPartition::new(g.n(), b).unwrap()).unwrap())
            .min()
            .unwrap()
    }

    #[test]
    fn fixed_values() {
        let k2 = complete(2);
        assert_eq!(rho_of_partition(&k2, &VertexPartition::trivial(2)).unwrap(), 6);
        assert_eq!(rho_of_partition(&complete(4), &VertexPartition::trivial(4)).unwrap(), 0);
        assert_eq!(rho_of_partition(&complete(5), &VertexPartition::whole(5)).unwrap(), 12);
        for (g, want) in [(complete(2), 6), (complete(3), 2), (path3(), 0), (complete(4), 0)] {
            let r = rho_min(&g).unwrap();
            assert_eq!(r.value, want);
            assert_eq!(r.kind, MinimizerKind::Trivial);
            assert_eq!(rho_of_partition(&g, &r.partition).unwrap(), want);
        }
    }

    #[test]
    fn k4_partitions_by_hand() {
        let k4 = complete(4);
        let values: Vec<i64> = all_partitions(4)
            .into_iter()
            .map(|b| rho_of_partition(&k4, &VertexPartition::new(4, b).unwrap()).unwrap())
            .collect();
        assert_eq!(values.len(), 15);
        assert_eq!(values.iter().filter(|&&v| v == 0).count(), 1);
        assert!(values.iter().all(|&v| v >= 0));
    }

    #[test]
    fn matches_brute_force() {
        let graphs = [
            wheel(5).unwrap(),
            k3plus(6).unwrap(),
            complete(6),
            MultiGraph::from_pairs(5, &[(0, 1), (0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)])
                .unwrap(),
            MultiGraph::from_pairs(6, &[(0, 1), (2, 3), (4, 5)]).unwrap(),
        ];
        for g in graphs {
            assert_eq!(rho_min(&g).unwrap().value, brute_rho(&g));
        }
    }

    #[test]
    fn minimizer_is_first_in_rgs_order() {
        // An edgeless graph on 3 vertices: the trivial partition gives -4 and
        // is the unique minimum; two disjoint double edges tie several ways.
        let g = MultiGraph::new(3).unwrap();
        assert_eq!(rho_min(&g).unwrap().value, -4);
        let g = MultiGraph::from_pairs(4, &[(0, 1); 4]).unwrap();
        let r = rho_min(&g).unwrap();
        let again = rho_min(&g).unwrap();
        assert_eq!(r, again);
        assert_eq!(r.value, brute_rho(&g));
    }

    #[test]
    fn kinds() {
        let g = complete(4);
        let p = VertexPartition::new(4, vec![vec![0, 1], vec![2], vec![3]]).unwrap();
        assert_eq!(minimizer_kind(&g, &p), MinimizerKind::K2Trivial);
        let p = VertexPartition::new(4, vec![vec![0, 1, 2], vec![3]]).unwrap();
        assert_eq!(minimizer_kind(&g, &p), MinimizerKind::K3Trivial);
        let p = VertexPartition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(minimizer_kind(&g, &p), MinimizerKind::Other);
    }

    #[test]
    fn dichotomy_examples() {
        let r = check_rho_dichotomy(&complete(4)).unwrap();
        assert!(r.hypothesis_met);
        assert_eq!(r.branch, DichotomyBranch::ReducesTo { target: SmallGraph::K4 });
        // rho(W4) = 16 - 40 + 20 < 0, yet the conclusion still holds.
        let r = check_rho_dichotomy(&wheel(4).unwrap()).unwrap();
        assert_eq!((r.rho, r.hypothesis_met), (-4, false));
        assert_eq!(r.branch, DichotomyBranch::Z3Connected);
        let r = check_rho_dichotomy(&complete(2)).unwrap();
        assert_eq!(r.branch, DichotomyBranch::ReducesTo { target: SmallGraph::K2 });
        let r = check_rho_dichotomy(&crate::families::cycle(6).unwrap()).unwrap();
        assert!(!r.hypothesis_met && r.holds());
        assert!(matches!(r.branch, DichotomyBranch::Neither { .. }));
    }

    #[test]
    fn reports() {
        let k4 = complete(4);
        let r = density_report(&k4, &is_3_flow_critical(&k4).unwrap()).unwrap();
        assert!(r.is_k4 && r.lower.tight && r.upper.tight);

        let g = k3plus(6).unwrap();
        let r = density_report(&g, &is_3_flow_critical(&g).unwrap()).unwrap();
        assert!(r.three_n_minus_8.tight && !r.three_n_minus_8.applicable);
        assert!(r.flags.is_empty());

        let w5 = wheel(5).unwrap();
        let r = density_report(&w5, &is_3_flow_critical(&w5).unwrap()).unwrap();
        assert!(r.lower.holds && r.lower.tight);

        let w4 = wheel(4).unwrap();
        assert!(density_report(&w4, &is_3_flow_critical(&w4).unwrap()).is_err());
    }

    #[test]
    fn k3plus_recognition() {
        for n in 6..12 {
            let g = k3plus(n).unwrap();
            assert!(is_k3plus(&g));
            let perm: Vec<usize> = (0..n).rev().collect();
            assert!(is_k3plus(&g.permuted(&perm)));
        }
        assert!(!is_k3plus(&complete(4)));
        assert!(!is_k3plus(&wheel(5).unwrap()));
    }
}
