//! Loopless multigraphs with stable edge identities.
//!
//! Vertices are dense indices `0..n`. Every edge carries an [`EdgeId`] that is
//! preserved by deletion and contraction, so "the same edge" stays meaningful
//! while a graph is reduced. Graphs are values: every operation returns a new
//! graph and never mutates shared state, which makes them safe to hand to
//! parallel workers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported vertex count. Vertex sets are `u64` bitmasks.
pub const MAX_VERTICES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// The endpoint opposite to `x`.
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        (1u64 << self.u) | (1u64 << self.v)
    }
}

/// Serialises as `{"n": .., "edges": [[id, u, v], ..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct MultiGraph {
    n: usize,
    /// Sorted by id; ids only ever grow.
    edges: Vec<Edge>,
    next_id: u32,
}

#[inline]
pub(crate) fn bit(v: usize) -> u64 {
    1u64 << v
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Iterates the set bits of a mask in increasing order.
pub(crate) fn mask_vertices(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

impl MultiGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::cap("vertex count", MAX_VERTICES, n));
        }
        Ok(MultiGraph {
            n,
            edges: Vec::new(),
            next_id: 0,
        })
    }

    /// Builds a graph whose `i`-th pair gets `EdgeId(i)`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut g = MultiGraph::new(n)?;
        for &(u, v) in pairs {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<EdgeId> {
        if u >= self.n || v >= self.n {
            return Err(Error::Precondition(format!(
                "edge {u}-{v} references a vertex outside 0..{}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::Precondition(format!("loop at vertex {u}")));
        }
        let id = EdgeId(self.next_id);
        self.next_id += 1;
        self.edges.push(Edge { id, u, v });
        Ok(id)
    }

    /// Copy of `self` with one extra edge `u v`.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut g = self.clone();
        g.add_edge(u, v)?;
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|e| e.id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub(crate) fn edge_index(&self, id: EdgeId) -> Result<usize> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .map_err(|_| Error::UnknownEdge(id))
    }

    pub fn vertex_mask(&self) -> u64 {
        full_mask(self.n)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.u == v || e.v == v).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for e in &self.edges {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.degrees().into_iter().min()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
            .count()
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        self.edges
            .iter()
            .all(|e| seen.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    /// Neighbour sets as bitmasks (multiplicity ignored).
    pub fn neighbor_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for e in &self.edges {
            adj[e.u] |= bit(e.v);
            adj[e.v] |= bit(e.u);
        }
        adj
    }

    /// Indices into [`edges`](Self::edges) of the edges incident to each vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }

    /// Number of edges with exactly one endpoint in `side`.
    pub fn cut_size(&self, side: u64) -> usize {
        self.edges
            .iter()
            .filter(|e| ((side >> e.u) & 1) != ((side >> e.v) & 1))
            .count()
    }

    /// Number of edges with both endpoints in `set`.
    pub fn inner_edge_count(&self, set: u64) -> usize {
        self.edges
            .iter()
            .filter(|e| set & bit(e.u) != 0 && set & bit(e.v) != 0)
            .count()
    }

    /// Vertices reachable from `start` inside `within`.
    pub fn reach(&self, start: usize, within: u64) -> u64 {
        let adj = self.neighbor_masks();
        reach_in(&adj, start, within)
    }

    /// Connected components, each as a vertex mask, ordered by smallest vertex.
    pub fn components(&self) -> Vec<u64> {
        let adj = self.neighbor_masks();
        let mut left = self.vertex_mask();
        let mut out = Vec::new();
        while left != 0 {
            let s = left.trailing_zeros() as usize;
            let c = reach_in(&adj, s, left);
            out.push(c);
            left &= !c;
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Whether the vertex set `set` induces a connected subgraph.
    pub fn induces_connected(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let s = set.trailing_zeros() as usize;
        self.reach(s, set) == set
    }

    /// Edges whose removal disconnects their endpoints.
    pub fn bridges(&self) -> Vec<EdgeId> {
        // Iterative lowpoint DFS, skipping only the tree edge itself so that
        // parallel copies count as back edges.
        let inc = self.incidence();
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut out = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // (vertex, edge index used to enter, next incidence position)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (v, via, ref mut pos)) = stack.last_mut() {
                if *pos < inc[v].len() {
                    let ei = inc[v][*pos];
                    *pos += 1;
                    if ei == via {
                        continue;
                    }
                    let w = self.edges[ei].other(v);
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, ei, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[v]);
                        if low[v] > disc[p] {
                            out.push(self.edges[via].id);
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn has_bridge(&self) -> bool {
        !self.bridges().is_empty()
    }

    /// `G - e`; all other edge ids are kept.
    pub fn delete_edge(&self, id: EdgeId) -> Result<MultiGraph> {
        let idx = self.edge_index(id)?;
        let mut g = self.clone();
        g.edges.remove(idx);
        Ok(g)
    }

    /// `G/e`: identifies the endpoints of `e` and drops every resulting loop.
    ///
    /// The merged vertex takes the smaller endpoint label; labels above the
    /// larger endpoint shift down by one. Surviving edges keep their ids.
    pub fn contract_edge(&self, id: EdgeId) -> Result<Contraction> {
        let idx = self.edge_index(id)?;
        let e = self.edges[idx];
        let (keep, gone) = (e.u.min(e.v), e.u.max(e.v));
        let vertex_map: Vec<usize> = (0..self.n)
            .map(|x| match x.cmp(&gone) {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Equal => keep,
                std::cmp::Ordering::Greater => x - 1,
            })
            .collect();
        let graph = self.relabel_merge(&vertex_map, self.n - 1);
        Ok(Contraction { graph, vertex_map })
    }

    /// Applies a vertex map, dropping edges that become loops.
    fn relabel_merge(&self, map: &[usize], new_n: usize) -> MultiGraph {
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                let (u, v) = (map[e.u], map[e.v]);
                (u != v).then_some(Edge { id: e.id, u, v })
            })
            .collect();
        MultiGraph {
            n: new_n,
            edges,
            next_id: self.next_id,
        }
    }

    /// `G/𝒳`: one vertex per block, ordered by each block's smallest vertex.
    pub fn quotient(&self, p: &VertexPartition) -> Result<Quotient> {
        if p.n() != self.n {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} vertices, graph has {}",
                p.n(),
                self.n
            )));
        }
        let mut order: Vec<usize> = (0..p.num_blocks()).collect();
        order.sort_by_key(|&b| p.blocks()[b][0]);
        let mut block_to_vertex = vec![0; p.num_blocks()];
        for (new, &b) in order.iter().enumerate() {
            block_to_vertex[b] = new;
        }
        let mut vertex_map = vec![0; self.n];
        for (b, block) in p.blocks().iter().enumerate() {
            for &v in block {
                vertex_map[v] = block_to_vertex[b];
            }
        }
        let graph = self.relabel_merge(&vertex_map, p.num_blocks());
        Ok(Quotient {
            graph,
            block_to_vertex,
            vertex_map,
        })
    }

    /// `G[S]` with vertices renumbered in increasing order; edge ids kept.
    pub fn induced(&self, set: u64) -> MultiGraph {
        let mut map = vec![usize::MAX; self.n];
        let mut k = 0;
        for v in mask_vertices(set & self.vertex_mask()) {
            map[v] = k;
            k += 1;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.u] != usize::MAX && map[e.v] != usize::MAX)
            .map(|e| Edge {
                id: e.id,
                u: map[e.u],
                v: map[e.v],
            })
            .collect();
        MultiGraph {
            n: k,
            edges,
            next_id: self.next_id,
        }
    }

    /// Same graph with edge ids renumbered `0..m` in current order.
    pub fn renumbered(&self) -> MultiGraph {
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| Edge {
                id: EdgeId(i as u32),
                ..*e
            })
            .collect();
        MultiGraph {
            n: self.n,
            next_id: edges.len() as u32,
            edges,
        }
    }

    /// Applies a vertex permutation (`perm[old] = new`).
    pub fn permuted(&self, perm: &[usize]) -> MultiGraph {
        self.relabel_merge(perm, self.n)
    }

    /// Endpoint pairs `(min, max)` in edge order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|e| (e.u.min(e.v), e.u.max(e.v)))
            .collect()
    }

    /// Endpoint pairs sorted, for order-insensitive comparison.
    pub fn sorted_pairs(&self) -> Vec<(usize, usize)> {
        let mut p = self.pairs();
        p.sort_unstable();
        p
    }

    /// Sorted degree sequence, largest first.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    /// Which of the five small named graphs this is, if any.
    pub fn recognize_small(&self) -> SmallGraph {
        if !self.is_simple() {
            return SmallGraph::Other;
        }
        match (self.n, self.m()) {
            (1, 0) => SmallGraph::K1,
            (2, 1) => SmallGraph::K2,
            (3, 3) => SmallGraph::K3,
            (3, 2) => SmallGraph::P3,
            (4, 6) => SmallGraph::K4,
            _ => SmallGraph::Other,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(EdgeId, usize, usize)>,
}

impl From<MultiGraph> for GraphRepr {
    fn from(g: MultiGraph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.iter().map(|e| (e.id, e.u, e.v)).collect(),
        }
    }
}

impl TryFrom<GraphRepr> for MultiGraph {
    type Error = Error;

    fn try_from(r: GraphRepr) -> Result<Self> {
        let mut g = MultiGraph::new(r.n)?;
        for (id, u, v) in r.edges {
            if id.0 < g.next_id {
                return Err(Error::Precondition(format!(
                    "edge ids must increase, {id} out of order"
                )));
            }
            g.next_id = id.0;
            g.add_edge(u, v)?;
        }
        Ok(g)
    }
}

pub(crate) fn reach_in(adj: &[u64], start: usize, within: u64) -> u64 {
    let mut seen = bit(start) & within;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        for v in mask_vertices(frontier) {
            next |= adj[v];
        }
        next &= within & !seen;
        seen |= next;
        frontier = next;
    }
    seen
}

/// Result of [`MultiGraph::contract_edge`].
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: MultiGraph,
    /// `vertex_map[old] = new`.
    pub vertex_map: Vec<usize>,
}

/// Result of [`MultiGraph::quotient`].
#[derive(Clone, Debug)]
pub struct Quotient {
    pub graph: MultiGraph,
    /// Indexed by block position in the partition as given.
    pub block_to_vertex: Vec<usize>,
    pub vertex_map: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SmallGraph {
    K1,
    K2,
    K3,
    P3,
    K4,
    Other,
}

impl fmt::Display for SmallGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SmallGraph::K1 => "K1",
            SmallGraph::K2 => "K2",
            SmallGraph::K3 => "K3",
            SmallGraph::P3 => "P3",
            SmallGraph::K4 => "K4",
            SmallGraph::Other => "other",
        };
        f.write_str(s)
    }
}

/// A partition of `0..n` into nonempty disjoint blocks.
///
/// Blocks are stored sorted internally; block order is whatever the caller
/// supplied.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct VertexPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl VertexPartition {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &v in block.iter() {
                if v >= n {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} outside 0..{n}"
                    )));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} appears twice"
                    )));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
        }
        Ok(VertexPartition { n, blocks })
    }

    /// Builds a partition from block labels, one per vertex.
    pub fn from_labels(labels: &[usize]) -> Self {
        let k = labels.iter().copied().max().map_or(0, |x| x + 1);
        let mut blocks = vec![Vec::new(); k];
        for (v, &b) in labels.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks.retain(|b| !b.is_empty());
        VertexPartition {
            n: labels.len(),
            blocks,
        }
    }

    pub fn from_masks(n: usize, masks: &[u64]) -> Result<Self> {
        Self::new(n, masks.iter().map(|&m| mask_vertices(m).collect()).collect())
    }

    /// All singletons.
    pub fn trivial(n: usize) -> Self {
        VertexPartition {
            n,
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    /// One block holding every vertex.
    pub fn whole(n: usize) -> Self {
        VertexPartition {
            n,
            blocks: if n == 0 { vec![] } else { vec![(0..n).collect()] },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_masks(&self) -> Vec<u64> {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0u64, |m, &v| m | bit(v)))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// Block labels in canonical form (blocks numbered by smallest vertex).
    pub fn labels(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.blocks.len()).collect();
        order.sort_by_key(|&b| self.blocks[b][0]);
        let mut labels = vec![0; self.n];
        for (k, &b) in order.iter().enumerate() {
            for &v in &self.blocks[b] {
                labels[v] = k;
            }
        }
        labels
    }
}

impl TryFrom<Vec<Vec<usize>>> for VertexPartition {
    type Error = Error;

    fn try_from(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.iter().map(Vec::len).sum();
        VertexPartition::new(n, blocks)
    }
}

impl From<VertexPartition> for Vec<Vec<usize>> {
    fn from(p: VertexPartition) -> Self {
        p.blocks
    }
}

/// An edge cut `[S, Sᶜ]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub side: Vec<usize>,
    pub edges: Vec<EdgeId>,
    pub size: usize,
}

impl Cut {
    pub fn of(g: &MultiGraph, side: u64) -> Cut {
        let edges: Vec<EdgeId> = g
            .edges()
            .iter()
            .filter(|e| ((side >> e.u) & 1) != ((side >> e.v) & 1))
            .map(|e| e.id)
            .collect();
        Cut {
            side: mask_vertices(side).collect(),
            size: edges.len(),
            edges,
        }
    }
}
