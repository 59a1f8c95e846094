//! Tracial moment hierarchies for bipartite correlations and quantum graph
//! parameters.
//!
//! The crate is organised bottom-up:
//!
//! * [`ncwords`]: noncommutative words, involution, tracial canonical forms
//!   and monomial rewriting.
//! * [`momentize`]: moment and localizing matrices, truncated-ideal
//!   constraints, assembly into an [`momentize::SdpProblem`].
//! * [`conic`]: equality elimination, an embedded primal-dual interior-point
//!   solver, SDPA sparse file exchange, numerical rank and flatness.
//! * [`entdim`]: lower bounds on the average entanglement dimension.
//! * [`graphs`] and [`qgraph`]: graphs, graph products and the graph
//!   parameter hierarchies.
//! * [`corrlab`]: correlation generation, synchronous Gram constructions and
//!   classical membership by linear programming.

pub mod conic;
pub mod corrlab;
pub mod entdim;
mod error;
pub mod graphs;
pub mod momentize;
pub mod ncwords;
pub mod qgraph;

pub use error::{Error, Result};
