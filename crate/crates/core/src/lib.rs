//! Core of the graph-to-instruction corpus compiler.
//!
//! Everything in this crate is pure and allocation-only (`no_std` + `alloc`):
//! attributed graph model, token counting, node energy, energy-guided
//! neighbor/walk selection, compact description rendering, instruction
//! records and packages, allocation planning, dataset splits and the text
//! and classification metrics. IO, configuration files and the CLI live in
//! the `graph-instruct` crate.

#![no_std]

extern crate alloc;

pub mod allocate;
pub mod apportion;
pub mod description;
pub mod energy;
pub mod graph;
pub mod instruct;
pub mod metrics;
pub mod seed;
pub mod selection;
pub mod split;
pub mod tokenize;

pub use description::{CompactDescription, DescriptionTemplate};
pub use energy::{Energies, LogBase, NodeEnergy};
pub use graph::{
    AttributedGraph, Edge, GraphBuilder, GraphError, Node, NodeIx, RelationId, Traversal,
};
pub use selection::{KeyNeighborSet, SelectionConfig, SelectionError, Walk};
pub use tokenize::{TokenizerConfig, TokenizerMode};
