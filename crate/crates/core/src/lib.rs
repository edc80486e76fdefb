//! Colourful spanning structures in properly edge-coloured graphs of large
//! minimum degree: linear forests, Hamilton cycles, near-perfect and perfect
//! bipartite matchings, and permutations of Latin squares.

pub mod bitset;
pub mod certificate;
pub mod forest;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod hamilton;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod ratio;
pub mod validate;

pub use bitset::BitSet;
pub use graph::{build_graph, ColourSet, Colour, ColouredGraph, Edge, GraphError, Vertex};
pub use ratio::Ratio;
