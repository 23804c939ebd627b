//! Signed diagrams: graphs, symmetry factors and Lie-algebra tensor factors.
//!
//! Signs at a vertex are fixed by reading its solid half-edges in the stored
//! cyclic order (anticlockwise as drawn for the built-in graphs). For graphs
//! supplied by the user the stored order is taken as given.

pub mod automorphism;
pub mod contract;
pub mod graph;

pub use automorphism::{automorphism_count, MAX_HALF_EDGES};
pub use contract::{contract, contract_courant, TensorFactor};
pub use graph::{
    eye_diagram, ggric_diagrams, preset_graph, rho_loop_graph, theta_graph, unsigned_eye_diagram,
    Edge, EdgeKind, End, Leaf, SignedGraph, SlotKind, Vertex, VertexKind, PRESET_GRAPHS,
};
