//! A deterministic 7/9-approximation solver for symmetric maximum TSP.
//!
//! Pipeline: maximum-weight cycle cover, gadget-based b-matching against the
//! cover's bad cycles, a 4-regular combination graph, triangle eliminations,
//! a relaxed 2-coloring, and a five-way partition whose cheapest removal set
//! leaves a pair of path collections; the heavier one is patched into a tour.

pub mod blossom;
pub mod colorer;
pub mod error;
pub mod gadgets;
pub mod hgraph;
pub mod instance;
pub mod matching;
pub mod multigraph;
pub mod oracle;
pub mod partition;
pub mod pipeline;
pub mod reducer;
pub mod weight;
pub mod workgraph;

pub use error::{Error, Result};
