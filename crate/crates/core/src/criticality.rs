//! 3-flow-criticality certificates, Z3-reduction and the structure checks
//! every critical graph must pass.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectivity::{edge_connectivity, essential_edge_connectivity};
use crate::error::{ensure_cap, Result};
use crate::flow::{has_mod3_orientation, is_z3_connected, Z3_MAX_VERTICES};
use crate::graph::{bit, mask_vertices, EdgeId, MultiGraph, VertexPartition};
use crate::iso::canonical_form;
use crate::orientation::Orientation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Critical,
    NotCritical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NotCriticalReason {
    Disconnected,
    Bridge { edge: EdgeId },
    /// The graph itself has a modulo-3 orientation.
    AdmitsFlow { orientation: Orientation },
    /// Contracting this edge leaves a graph with no modulo-3 orientation.
    ContractionWithoutFlow { edge: EdgeId },
}

/// A modulo-3 orientation of `G/e`, labeled as [`MultiGraph::contract_edge`]
/// labels the contraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub edge: EdgeId,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalityCertificate {
    pub verdict: Verdict,
    pub n: usize,
    pub m: usize,
    /// What backs the claim that `G` itself has no modulo-3 orientation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_scope: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub witnesses: Vec<EdgeWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<NotCriticalReason>,
}

impl CriticalityCertificate {
    pub fn is_critical(&self) -> bool {
        self.verdict == Verdict::Critical
    }

    fn not_critical(g: &MultiGraph, reason: NotCriticalReason) -> Self {
        CriticalityCertificate {
            verdict: Verdict::NotCritical,
            n: g.n(),
            m: g.m(),
            search_scope: None,
            witnesses: Vec::new(),
            reason: Some(reason),
        }
    }

    /// Re-checks every witness against `g`. For a critical verdict this
    /// recomputes each contraction and also reruns the exhaustive search on
    /// `g` itself.
    pub fn verify(&self, g: &MultiGraph) -> std::result::Result<(), String> {
        if (self.n, self.m) != (g.n(), g.m()) {
            return Err("certificate is for a different graph".into());
        }
        match self.verdict {
            Verdict::Critical => {
                let ids: Vec<EdgeId> = g.edge_ids().collect();
                let got: Vec<EdgeId> = self.witnesses.iter().map(|w| w.edge).collect();
                if ids != got {
                    return Err("witnesses do not cover the edges in order".into());
                }
                for w in &self.witnesses {
                    let c = g.contract_edge(w.edge).map_err(|e| e.to_string())?;
                    w.orientation
                        .verify_mod3(&c.graph)
                        .map_err(|msg| format!("witness for {}: {msg}", w.edge))?;
                }
                let base = has_mod3_orientation(g).map_err(|e| e.to_string())?;
                if base.admits {
                    return Err("graph admits a modulo-3 orientation".into());
                }
                Ok(())
            }
            Verdict::NotCritical => match &self.reason {
                Some(NotCriticalReason::Disconnected) => {
                    if g.is_connected() {
                        Err("graph is connected".into())
                    } else {
                        Ok(())
                    }
                }
                Some(NotCriticalReason::Bridge { edge }) => {
                    if g.bridges().contains(edge) {
                        Ok(())
                    } else {
                        Err(format!("{edge} is not a bridge"))
                    }
                }
                Some(NotCriticalReason::AdmitsFlow { orientation }) => orientation.verify_mod3(g),
                Some(NotCriticalReason::ContractionWithoutFlow { edge }) => {
                    let c = g.contract_edge(*edge).map_err(|e| e.to_string())?;
                    let d = has_mod3_orientation(&c.graph).map_err(|e| e.to_string())?;
                    if d.admits {
                        Err(format!("G/{edge} admits a modulo-3 orientation"))
                    } else {
                        Ok(())
                    }
                }
                None => Err("not-critical verdict without a reason".into()),
            },
        }
    }
}

/// Decides 3-flow-criticality: no modulo-3 orientation of `G`, but one of
/// `G/e` for every edge `e`.
///
/// Disconnected and bridged inputs are classified not-critical with a reason.
/// Contractions are solved in parallel; the certificate is assembled in edge
/// order, and on failure the first failing edge is reported.
pub fn is_3_flow_critical(g: &MultiGraph) -> Result<CriticalityCertificate> {
    if !g.is_connected() {
        return Ok(CriticalityCertificate::not_critical(
            g,
            NotCriticalReason::Disconnected,
        ));
    }
    if let Some(&edge) = g.bridges().first() {
        return Ok(CriticalityCertificate::not_critical(
            g,
            NotCriticalReason::Bridge { edge },
        ));
    }
    let base = has_mod3_orientation(g)?;
    if let Some(orientation) = base.orientation {
        return Ok(CriticalityCertificate::not_critical(
            g,
            NotCriticalReason::AdmitsFlow { orientation },
        ));
    }
    let ids: Vec<EdgeId> = g.edge_ids().collect();
    let results: Vec<(EdgeId, Option<Orientation>)> = ids
        .par_iter()
        .map(|&id| -> Result<_> {
            let c = g.contract_edge(id)?;
            Ok((id, has_mod3_orientation(&c.graph)?.orientation))
        })
        .collect::<Result<_>>()?;
    let mut witnesses = Vec::with_capacity(results.len());
    for (edge, o) in results {
        match o {
            Some(orientation) => witnesses.push(EdgeWitness { edge, orientation }),
            None => {
                return Ok(CriticalityCertificate::not_critical(
                    g,
                    NotCriticalReason::ContractionWithoutFlow { edge },
                ))
            }
        }
    }
    Ok(CriticalityCertificate {
        verdict: Verdict::Critical,
        n: g.n(),
        m: g.m(),
        search_scope: Some(format!(
            "exhaustive pruned backtracking over all 2^{} orientations",
            g.m()
        )),
        witnesses,
        reason: None,
    })
}

/// Whether `G − e` has a modulo-3 orientation for every edge `e`.
pub fn check_deletion_flow(g: &MultiGraph) -> Result<bool> {
    let ids: Vec<EdgeId> = g.edge_ids().collect();
    let all: Vec<bool> = ids
        .par_iter()
        .map(|&id| Ok(has_mod3_orientation(&g.delete_edge(id)?)?.admits))
        .collect::<Result<_>>()?;
    Ok(all.into_iter().all(|x| x))
}

/// k-subsets of `0..n` in lexicographic order of their sorted vertex lists.
fn subsets_lex(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().fold(0u64, |m, &v| m | bit(v)));
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Quick necessary conditions for `G[S]` to be Z3-connected: connected, no
/// vertex of degree one, no bridge.
fn may_be_z3_connected(h: &MultiGraph) -> bool {
    h.is_connected() && h.degrees().iter().all(|&d| d >= 2) && !h.has_bridge()
}

/// The smallest vertex set (ties broken lexicographically) of size `≥ 2`
/// inducing a Z3-connected subgraph.
pub fn smallest_z3_connected_subset(g: &MultiGraph) -> Result<Option<u64>> {
    ensure_cap("Z3-reduction vertex count", Z3_MAX_VERTICES, g.n())?;
    for k in 2..=g.n() {
        let candidates = subsets_lex(g.n(), k);
        let hit = candidates
            .par_iter()
            .map(|&s| -> Result<bool> {
                let h = g.induced(s);
                Ok(may_be_z3_connected(&h) && is_z3_connected(&h)?.connected)
            })
            .collect::<Result<Vec<bool>>>()?;
        if let Some(i) = hit.iter().position(|&x| x) {
            return Ok(Some(candidates[i]));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z3ReducedDecision {
    pub reduced: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offending: Option<Vec<usize>>,
}

/// Whether `G` has no nontrivial Z3-connected subgraph.
///
/// Only induced subgraphs are tested: any subgraph is spanning in the
/// subgraph induced by its vertex set, and adding edges keeps a graph
/// Z3-connected.
pub fn is_z3_reduced(g: &MultiGraph) -> Result<Z3ReducedDecision> {
    let hit = smallest_z3_connected_subset(g)?;
    Ok(Z3ReducedDecision {
        reduced: hit.is_none(),
        offending: hit.map(|s| mask_vertices(s).collect()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    /// Vertices of the graph before this step.
    pub contracted: Vec<usize>,
    /// The same set in original labels.
    pub original: Vec<usize>,
    pub graph: MultiGraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    pub reduced: MultiGraph,
    /// Blocks of original vertices; block `i` became vertex `i` of `reduced`.
    pub partition: VertexPartition,
}

/// Contracts Z3-connected induced subgraphs until none is left, always
/// taking the smallest set and, among those, the lexicographically first.
pub fn z3_reduce(g: &MultiGraph) -> Result<ReductionTrace> {
    ensure_cap("Z3-reduction vertex count", Z3_MAX_VERTICES, g.n())?;
    let mut current = g.clone();
    // owner[v] = vertex of `current` that original vertex v lives in.
    let mut owner: Vec<usize> = (0..g.n()).collect();
    let mut steps = Vec::new();
    while let Some(set) = smallest_z3_connected_subset(&current)? {
        let q = current.quotient(&merge_partition(current.n(), set))?;
        let original = (0..g.n())
            .filter(|&v| set & bit(owner[v]) != 0)
            .collect();
        for o in owner.iter_mut() {
            *o = q.vertex_map[*o];
        }
        steps.push(ReductionStep {
            contracted: mask_vertices(set).collect(),
            original,
            graph: q.graph.clone(),
        });
        current = q.graph;
    }
    let partition = VertexPartition::from_labels(&owner);
    Ok(ReductionTrace {
        steps,
        reduced: current,
        partition,
    })
}

fn merge_partition(n: usize, set: u64) -> VertexPartition {
    let mut blocks = vec![mask_vertices(set).collect::<Vec<_>>()];
    blocks.extend((0..n).filter(|&v| set & bit(v) == 0).map(|v| vec![v]));
    VertexPartition::new(n, blocks).expect("set plus singletons is a partition")
}

/// Largest graph for which [`reduction_orders`] explores every order.
pub const ALL_ORDERS_MAX_VERTICES: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionOrders {
    /// Terminal graphs reached, one per isomorphism class.
    pub terminals: Vec<MultiGraph>,
    pub agree: bool,
}

/// Tries every order of contracting Z3-connected induced subgraphs and
/// collects the terminal graphs up to isomorphism.
pub fn reduction_orders(g: &MultiGraph) -> Result<ReductionOrders> {
    ensure_cap(
        "all-orders reduction vertex count",
        ALL_ORDERS_MAX_VERTICES,
        g.n(),
    )?;
    let mut seen = HashSet::new();
    let mut terminal_forms = HashSet::new();
    let mut terminals = Vec::new();
    explore(g, &mut seen, &mut terminal_forms, &mut terminals)?;
    Ok(ReductionOrders {
        agree: terminals.len() == 1,
        terminals,
    })
}

type Form = (usize, Vec<(usize, usize)>);

fn explore(
    g: &MultiGraph,
    seen: &mut HashSet<Form>,
    terminal_forms: &mut HashSet<Form>,
    terminals: &mut Vec<MultiGraph>,
) -> Result<()> {
    if !seen.insert(canonical_form(g)?) {
        return Ok(());
    }
    let mut any = false;
    for k in 2..=g.n() {
        for s in subsets_lex(g.n(), k) {
            let h = g.induced(s);
            if may_be_z3_connected(&h) && is_z3_connected(&h)?.connected {
                any = true;
                let q = g.quotient(&merge_partition(g.n(), s))?;
                explore(&q.graph, seen, terminal_forms, terminals)?;
            }
        }
    }
    if !any && terminal_forms.insert(canonical_form(g)?) {
        terminals.push(g.clone());
    }
    Ok(())
}

/// `g ≅ W_k` for odd `k ≥ 3`: a hub of degree `k` over an induced `k`-cycle.
pub fn is_odd_wheel(g: &MultiGraph) -> bool {
    let n = g.n();
    if n < 4 || !n.is_multiple_of(2) || g.m() != 2 * (n - 1) || !g.is_simple() {
        return false;
    }
    let deg = g.degrees();
    (0..n).filter(|&h| deg[h] == n - 1).any(|hub| {
        let rim = g.vertex_mask() & !bit(hub);
        let cycle = g.induced(rim);
        cycle.degrees().iter().all(|&d| d == 2) && cycle.is_connected()
    })
}

/// Whether the subgraph induced by degree-3 vertices has no cycle.
pub fn degree3_subgraph_is_forest(g: &MultiGraph) -> bool {
    let deg = g.degrees();
    let v3 = (0..g.n())
        .filter(|&v| deg[v] == 3)
        .fold(0u64, |m, v| m | bit(v));
    let h = g.induced(v3);
    h.m() + h.components().len() == h.n()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    /// The input was certified critical. When false every check below is
    /// vacuous: it still runs but proves nothing.
    pub critical_input: bool,
    pub vacuous: bool,
    /// Every `G − e` has a modulo-3 orientation.
    pub deletion_flows: bool,
    pub edge_connectivity: usize,
    /// `None` when no essential cut exists.
    pub essential_edge_connectivity: Option<usize>,
    /// 3-edge-connected and essentially 4-edge-connected.
    pub connectivity_ok: bool,
    /// `None` when the graph exceeds the Z3 vertex cap.
    pub z3_reduced: Option<bool>,
    pub odd_wheel: bool,
    /// `G[V₃]` is acyclic, or `G` is an odd wheel.
    pub v3_forest_or_odd_wheel: bool,
    /// All four checks hold (a skipped check counts as not holding).
    pub all_hold: bool,
}

/// Runs the four structure checks. Criticality is decided here too so that
/// reports on non-critical input are labelled vacuous.
pub fn verify_structure(g: &MultiGraph) -> Result<StructureReport> {
    let critical = is_3_flow_critical(g)?.is_critical();
    verify_structure_with(g, critical)
}

/// [`verify_structure`] for a caller that already knows the verdict.
pub fn verify_structure_with(g: &MultiGraph, critical_input: bool) -> Result<StructureReport> {
    let deletion_flows = check_deletion_flow(g)?;
    let edge_connectivity = if g.n() >= 2 {
        edge_connectivity(g)?
    } else {
        0
    };
    let essential = essential_edge_connectivity(g)?;
    let connectivity_ok = edge_connectivity >= 3 && essential.is_none_or(|k| k >= 4);
    let z3_reduced = if g.n() <= Z3_MAX_VERTICES {
        Some(is_z3_reduced(g)?.reduced)
    } else {
        None
    };
    let odd_wheel = is_odd_wheel(g);
    let v3_ok = odd_wheel || degree3_subgraph_is_forest(g);
    Ok(StructureReport {
        critical_input,
        vacuous: !critical_input,
        deletion_flows,
        edge_connectivity,
        essential_edge_connectivity: essential,
        connectivity_ok,
        z3_reduced,
        odd_wheel,
        v3_forest_or_odd_wheel: v3_ok,
        all_hold: deletion_flows && connectivity_ok && z3_reduced == Some(true) && v3_ok,
    })
}
