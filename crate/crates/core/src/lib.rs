//! Spanning-tree correlation laboratory.
//!
//! Exact and Monte Carlo computation of edge-pair probabilities and degree
//! second moments for uniform and minimal spanning trees, the root-degree law
//! of the wired minimal spanning forest on the Poisson weighted infinite tree,
//! and graphic-matroid polytope checks.
//!
//! Module map:
//! - [`graph`]: multigraphs, generators, structural queries, text format.
//! - [`spectral`]: Laplacian solves, effective resistance, transfer currents.
//! - [`ust`]: UST sampling and degree-moment identities on regular graphs.
//! - [`mst`]: MSTs under random weights, exact ordering enumeration, p-NC verdicts.
//! - [`pwit`]: survival-probability machinery and the root-degree sampler.
//! - [`polytope`]: graphic-matroid rank and forest-polytope membership.
//! - [`verify`]: the acceptance checks, callable from code and the CLI.

pub mod cli;
pub mod dsu;
pub mod enumerate;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod graph_desc;
pub mod mst;
pub mod numerics;
pub mod polytope;
pub mod pwit;
pub mod spectral;
pub mod ust;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{EdgeSubset, Graph};
pub use spectral::LaplacianSystem;
