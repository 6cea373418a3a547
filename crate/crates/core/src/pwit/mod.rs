//! Root degree of the wired minimal spanning forest on the Poisson weighted
//! infinite tree.
//!
//! The invasion time `X1` of the root's pond is drawn through
//! `theta(X1) ~ Uniform(0, 1)`; given `X1 = lambda` the pond size, in-pond
//! degree, attached-tree degree and outgoing-edge indicator are sampled from
//! their exact conditional laws.

mod moments;
mod pond;
mod theta;

pub use moments::*;
pub use pond::*;
pub use theta::*;
