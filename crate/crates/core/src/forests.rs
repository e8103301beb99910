//! Forest decompositions and spanning-tree packings via matroid union.
//!
//! Both problems are the union of `k` copies of the graphic matroid. Edges
//! are inserted one at a time along shortest augmenting paths in the
//! exchange graph; when no path exists the set of edges the search reached
//! carries a Nash-Williams style certificate.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bit, mask_vertices, EdgeId, MultiGraph, VertexPartition};

/// A subgraph with `|E(H)| > k(|V(H)| − 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseSubgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ForestDecomposition {
    Forests { forests: Vec<Vec<EdgeId>> },
    TooDense { subgraph: DenseSubgraph },
}

/// A partition `P` crossed by fewer than `k(|P| − 1)` edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsePartition {
    pub partition: VertexPartition,
    pub crossing_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum TreePacking {
    Trees { trees: Vec<Vec<EdgeId>> },
    TooSparse { certificate: SparsePartition },
}

/// Union of `k` graphic matroids over the edges of one graph.
struct ForestUnion<'a> {
    g: &'a MultiGraph,
    k: usize,
    color: Vec<Option<usize>>,
}

enum Search {
    Augmented,
    /// Edge indices reached without finding an augmenting path.
    Stuck(Vec<bool>),
}

impl<'a> ForestUnion<'a> {
    fn new(g: &'a MultiGraph, k: usize) -> Self {
        ForestUnion {
            g,
            k,
            color: vec![None; g.m()],
        }
    }

    /// Edge indices on the path from `s` to `t` in forest `f`, or `None` when
    /// `s` and `t` lie in different trees.
    fn forest_path(&self, f: usize, s: usize, t: usize) -> Option<Vec<usize>> {
        let n = self.g.n();
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut seen = bit(s);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            if x == t {
                let mut path = Vec::new();
                let mut y = t;
                while y != s {
                    let ei = via[y].expect("visited vertex has a parent edge");
                    path.push(ei);
                    y = self.g.edges()[ei].other(y);
                }
                return Some(path);
            }
            for (ei, e) in self.g.edges().iter().enumerate() {
                if self.color[ei] != Some(f) || (e.u != x && e.v != x) {
                    continue;
                }
                let y = e.other(x);
                if seen & bit(y) == 0 {
                    seen |= bit(y);
                    via[y] = Some(ei);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// Breadth-first search in the exchange graph from the given unassigned
    /// edges; augments along the first path found.
    fn augment_from(&mut self, sources: &[usize]) -> Search {
        let m = self.g.m();
        let mut visited = vec![false; m];
        // parent[y] = (x, f): x enters forest f in exchange for y.
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; m];
        let mut queue = VecDeque::new();
        for &s in sources {
            visited[s] = true;
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            let e = self.g.edges()[x];
            for f in 0..self.k {
                if self.color[x] == Some(f) {
                    continue;
                }
                match self.forest_path(f, e.u, e.v) {
                    None => {
                        let (mut cur, mut target) = (x, f);
                        loop {
                            let up = parent[cur];
                            self.color[cur] = Some(target);
                            match up {
                                None => break,
                                Some((p, pf)) => (cur, target) = (p, pf),
                            }
                        }
                        return Search::Augmented;
                    }
                    Some(path) => {
                        for y in path {
                            if !visited[y] {
                                visited[y] = true;
                                parent[y] = Some((x, f));
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
        Search::Stuck(visited)
    }

    fn classes(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.k];
        for (ei, c) in self.color.iter().enumerate() {
            if let Some(f) = c {
                out[*f].push(self.g.edges()[ei].id);
            }
        }
        out
    }

    /// Components of `(V, X)` for the edge indices marked in `x`.
    fn components_of(&self, x: &[bool]) -> Vec<u64> {
        let mut label: Vec<usize> = (0..self.g.n()).collect();
        for (ei, e) in self.g.edges().iter().enumerate() {
            if x[ei] {
                let (a, b) = (root(&mut label, e.u), root(&mut label, e.v));
                label[a.max(b)] = a.min(b);
            }
        }
        let mut masks: Vec<u64> = Vec::new();
        let mut root_slot = vec![usize::MAX; self.g.n()];
        for v in 0..self.g.n() {
            let r = root(&mut label, v);
            if root_slot[r] == usize::MAX {
                root_slot[r] = masks.len();
                masks.push(0);
            }
            masks[root_slot[r]] |= bit(v);
        }
        masks
    }
}

fn require_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    Ok(())
}

/// Splits `E(G)` into `k` forests (some possibly empty), or returns a
/// subgraph `H` with `|E(H)| > k(|V(H)| − 1)`.
pub fn decompose_into_forests(g: &MultiGraph, k: usize) -> Result<ForestDecomposition> {
    require_k(k)?;
    let mut u = ForestUnion::new(g, k);
    for ei in 0..g.m() {
        if let Search::Stuck(reached) = u.augment_from(&[ei]) {
            // Every reached edge is spanned by each forest restricted to the
            // reached set, so some component of (V, reached) is too dense.
            let subgraph = u
                .components_of(&reached)
                .into_iter()
                .find_map(|c| {
                    let edges: Vec<EdgeId> = g
                        .edges()
                        .iter()
                        .enumerate()
                        .filter(|(i, e)| reached[*i] && c & bit(e.u) != 0)
                        .map(|(_, e)| e.id)
                        .collect();
                    let nv = c.count_ones() as usize;
                    (edges.len() > k * (nv - 1)).then(|| DenseSubgraph {
                        vertices: mask_vertices(c).collect(),
                        edges,
                    })
                })
                .expect("a reached component violates the forest count");
            return Ok(ForestDecomposition::TooDense { subgraph });
        }
    }
    Ok(ForestDecomposition::Forests {
        forests: u.classes(),
    })
}

/// Finds `k` edge-disjoint spanning trees, or a partition `P` crossed by
/// fewer than `k(|P| − 1)` edges.
pub fn spanning_tree_packing(g: &MultiGraph, k: usize) -> Result<TreePacking> {
    require_k(k)?;
    if !g.is_connected() {
        return Err(Error::Precondition(
            "spanning tree packing needs a connected graph".into(),
        ));
    }
    let n = g.n();
    let mut u = ForestUnion::new(g, k);
    for ei in 0..g.m() {
        u.augment_from(&[ei]);
    }
    let trees = u.classes();
    if trees.iter().all(|t| t.len() + 1 == n) {
        return Ok(TreePacking::Trees { trees });
    }
    let unassigned: Vec<usize> = (0..g.m()).filter(|&i| u.color[i].is_none()).collect();
    let reached = match u.augment_from(&unassigned) {
        Search::Stuck(r) => r,
        Search::Augmented => unreachable!("an edge that failed to insert stays dependent"),
    };
    let blocks = u.components_of(&reached);
    let partition = VertexPartition::from_masks(n, &blocks)?;
    let label = partition.labels();
    let crossing_edges = g
        .edges()
        .iter()
        .filter(|e| label[e.u] != label[e.v])
        .count();
    Ok(TreePacking::TooSparse {
        certificate: SparsePartition {
            partition,
            crossing_edges,
        },
    })
}

/// Checks that `forests` partition `E(G)` into acyclic classes.
pub fn verify_forests(g: &MultiGraph, forests: &[Vec<EdgeId>]) -> std::result::Result<(), String> {
    let mut used = vec![false; g.m()];
    for (f, class) in forests.iter().enumerate() {
        let mut label: Vec<usize> = (0..g.n()).collect();
        for &id in class {
            let i = g
                .edge_index(id)
                .map_err(|_| format!("forest {f}: unknown edge {id}"))?;
            if std::mem::replace(&mut used[i], true) {
                return Err(format!("edge {id} used twice"));
            }
            let e = g.edges()[i];
            let (a, b) = (root(&mut label, e.u), root(&mut label, e.v));
            if a == b {
                return Err(format!("forest {f} has a cycle through {id}"));
            }
            label[a] = b;
        }
    }
    match used.iter().position(|&u| !u) {
        Some(i) => Err(format!("edge {} not covered", g.edges()[i].id)),
        None => Ok(()),
    }
}

/// Checks that each class is a spanning tree and the classes are disjoint.
pub fn verify_trees(g: &MultiGraph, trees: &[Vec<EdgeId>]) -> std::result::Result<(), String> {
    let mut used = vec![false; g.m()];
    for (t, class) in trees.iter().enumerate() {
        if class.len() + 1 != g.n() {
            return Err(format!("tree {t} has {} edges", class.len()));
        }
        let mut label: Vec<usize> = (0..g.n()).collect();
        for &id in class {
            let i = g
                .edge_index(id)
                .map_err(|_| format!("tree {t}: unknown edge {id}"))?;
            if std::mem::replace(&mut used[i], true) {
                return Err(format!("edge {id} used twice"));
            }
            let e = g.edges()[i];
            let (a, b) = (root(&mut label, e.u), root(&mut label, e.v));
            if a == b {
                return Err(format!("tree {t} has a cycle through {id}"));
            }
            label[a] = b;
        }
    }
    Ok(())
}

fn root(label: &mut [usize], v: usize) -> usize {
    let mut r = v;
    while label[r] != r {
        r = label[r];
    }
    label[v] = r;
    r
}
