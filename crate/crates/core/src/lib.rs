//! Graph pooling by diversity-guided edge contraction.
//!
//! Graphs are viewed as finite metric spaces under diffusion distances.
//! Edges are scored by how much contracting them would change the
//! magnitude or spread of that space, and the least influential edges are
//! contracted first, one matching per round, until the requested pooling
//! ratio is reached.
//!
//! Module map:
//! - [`graph`]: graphs, contraction, traces, assignment matrices, canonical forms
//! - [`diffusion`]: normalized Laplacian spectra, diffusion distances, similarities
//! - [`diversity`]: magnitude, spread, weightings, profiles
//! - [`pool`]: the pooling loop, edge scores and the random baseline
//! - [`eval`]: structure-preservation metrics and ratio sweeps
//! - [`io`]: dataset loading, generators and text formats
//! - [`cli`]: the `magpool` command-line tool

pub mod cli;
pub mod diffusion;
pub mod diversity;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod pool;

pub use error::{Error, Result};
