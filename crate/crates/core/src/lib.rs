//! Local eigenvector centrality for weighted directed and undirected graphs.
//!
//! The crate covers the full analysis chain: graph ingestion ([`ingest`]),
//! matrix construction ([`graph`]), eigen-decomposition and eigengap-guided
//! centrality ([`spectral`]), and comparison against reference centralities
//! ([`compare`]). The `localcent` binary wraps it as a batch CLI ([`cli`]).

pub mod cli;
pub mod compare;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod spectral;

pub use error::{Error, Result};
