//! Orientations and Z3-boundaries, the witness objects of the flow engine.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Contraction, EdgeId, MultiGraph};

/// One oriented edge. Serialises as `[edge_id, tail, head]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(EdgeId, usize, usize)", into = "(EdgeId, usize, usize)")]
pub struct Arc {
    pub edge: EdgeId,
    pub tail: usize,
    pub head: usize,
}

impl From<(EdgeId, usize, usize)> for Arc {
    fn from((edge, tail, head): (EdgeId, usize, usize)) -> Self {
        Arc { edge, tail, head }
    }
}

impl From<Arc> for (EdgeId, usize, usize) {
    fn from(a: Arc) -> Self {
        (a.edge, a.tail, a.head)
    }
}

/// A direction for every edge of some graph, in the graph's edge order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Orientation {
    pub arcs: Vec<Arc>,
}

impl Orientation {
    /// `forward[i]` orients the `i`-th edge of `g` as `u → v`.
    pub fn from_directions(g: &MultiGraph, forward: &[bool]) -> Self {
        let arcs = g
            .edges()
            .iter()
            .zip(forward)
            .map(|(e, &f)| {
                let (tail, head) = if f { (e.u, e.v) } else { (e.v, e.u) };
                Arc {
                    edge: e.id,
                    tail,
                    head,
                }
            })
            .collect();
        Orientation { arcs }
    }

    /// `d⁺(v) − d⁻(v)` for every vertex.
    pub fn net_outflow(&self, n: usize) -> Vec<i64> {
        let mut net = vec![0i64; n];
        for a in &self.arcs {
            net[a.tail] += 1;
            net[a.head] -= 1;
        }
        net
    }

    /// The boundary this orientation realises, `d⁺ − d⁻ mod 3`.
    pub fn boundary(&self, n: usize) -> Z3Boundary {
        Z3Boundary {
            values: self
                .net_outflow(n)
                .into_iter()
                .map(|x| x.rem_euclid(3) as u8)
                .collect(),
        }
    }

    pub fn reversed(&self) -> Orientation {
        Orientation {
            arcs: self
                .arcs
                .iter()
                .map(|a| Arc {
                    edge: a.edge,
                    tail: a.head,
                    head: a.tail,
                })
                .collect(),
        }
    }

    /// Checks that the arcs cover exactly the edges of `g`, each with its own
    /// endpoints, and that every vertex balance matches `beta`.
    pub fn verify(&self, g: &MultiGraph, beta: &Z3Boundary) -> std::result::Result<(), String> {
        if beta.len() != g.n() {
            return Err(format!(
                "boundary has {} entries for {} vertices",
                beta.len(),
                g.n()
            ));
        }
        if self.arcs.len() != g.m() {
            return Err(format!("{} arcs for {} edges", self.arcs.len(), g.m()));
        }
        let mut arcs = self.arcs.clone();
        arcs.sort_by_key(|a| a.edge);
        for (a, e) in arcs.iter().zip(g.edges()) {
            if a.edge != e.id {
                return Err(format!("arc for {} where {} expected", a.edge, e.id));
            }
            let ok = (a.tail == e.u && a.head == e.v) || (a.tail == e.v && a.head == e.u);
            if !ok {
                return Err(format!(
                    "arc {}: {}→{} does not match endpoints {} {}",
                    a.edge, a.tail, a.head, e.u, e.v
                ));
            }
        }
        let got = self.boundary(g.n());
        if let Some(v) = (0..g.n()).find(|&v| got.values[v] != beta.values[v]) {
            return Err(format!(
                "vertex {v}: d+ - d- = {} mod 3, boundary asks {}",
                got.values[v], beta.values[v]
            ));
        }
        Ok(())
    }

    pub fn verify_mod3(&self, g: &MultiGraph) -> std::result::Result<(), String> {
        self.verify(g, &Z3Boundary::zero(g.n()))
    }

    /// Carries the arcs of surviving edges through a contraction.
    pub fn project(&self, c: &Contraction) -> Orientation {
        Orientation {
            arcs: self
                .arcs
                .iter()
                .filter(|a| c.vertex_map[a.tail] != c.vertex_map[a.head])
                .map(|a| Arc {
                    edge: a.edge,
                    tail: c.vertex_map[a.tail],
                    head: c.vertex_map[a.head],
                })
                .collect(),
        }
    }
}

/// `β: V → Z3` with `Σ β ≡ 0 (mod 3)`. Serialises as the list of values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Z3Boundary {
    values: Vec<u8>,
}

impl Z3Boundary {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        if let Some(&x) = values.iter().find(|&&x| x > 2) {
            return Err(Error::InvalidBoundary(format!("value {x} is not in Z3")));
        }
        let sum: u32 = values.iter().map(|&x| x as u32).sum();
        if !sum.is_multiple_of(3) {
            return Err(Error::InvalidBoundary(format!(
                "values sum to {sum}, not 0 mod 3"
            )));
        }
        Ok(Z3Boundary { values })
    }

    /// Reduces arbitrary integers mod 3 before validating.
    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|x| x.rem_euclid(3) as u8).collect())
    }

    pub fn zero(n: usize) -> Self {
        Z3Boundary {
            values: vec![0; n],
        }
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }

    pub fn neg(&self) -> Self {
        Z3Boundary {
            values: self.values.iter().map(|&x| (3 - x) % 3).collect(),
        }
    }

    /// Boundary from the first `n - 1` values; the last entry is the forced
    /// complement.
    pub(crate) fn completed(prefix: &[u8]) -> Self {
        let sum: u32 = prefix.iter().map(|&x| x as u32).sum();
        let mut values = prefix.to_vec();
        values.push(((3 - sum % 3) % 3) as u8);
        Z3Boundary { values }
    }
}

impl TryFrom<Vec<u8>> for Z3Boundary {
    type Error = Error;
    fn try_from(values: Vec<u8>) -> Result<Self> {
        Z3Boundary::new(values)
    }
}

impl From<Z3Boundary> for Vec<u8> {
    fn from(b: Z3Boundary) -> Self {
        b.values
    }
}

impl fmt::Display for Z3Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.values)
    }
}
