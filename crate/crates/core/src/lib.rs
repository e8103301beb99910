//! Exact decision procedures for modulo-3 orientations, Z3-connectivity and
//! 3-flow-criticality of small multigraphs, together with the partition
//! potential ρ, forest and tree packings, graph families and a batch scanner.
//!
//! All searches are exhaustive and return certificates that can be checked
//! independently of the search that produced them.

pub mod connectivity;
pub mod criticality;
pub mod density;
pub mod error;
pub mod families;
pub mod flow;
pub mod forests;
pub mod format;
pub mod graph;
pub mod iso;
pub mod orientation;
pub mod scan;

pub use error::{Error, Result};
pub use graph::{EdgeId, MultiGraph, VertexPartition};
pub use orientation::{Orientation, Z3Boundary};
