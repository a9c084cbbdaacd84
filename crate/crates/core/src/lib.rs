//! Deterministic minimum-cut toolkit: Gomory-Hu Steiner trees, single-source
//! mincuts, guide trees, terminal vertex sparsifiers and k-edge-connected
//! components for undirected weighted graphs, with exhaustive oracles for
//! checking every stage on small instances.

pub mod cli;
pub mod ett;
pub mod expander;
pub mod fixtures;
pub mod flow;
pub mod ghtree;
pub mod graph;
pub mod hitmiss;
pub mod linkcut;
pub mod oracle;
pub mod packing;
pub mod sparsifier;
pub mod ssmc;

pub use graph::{contract, cut_value, parse_graph, VertexSet, Weight, WeightedGraph};
