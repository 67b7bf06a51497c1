//! Low-energy spectral shift function and pinned Wiener sausage asymptotics
//! for compact planar obstacles.
//!
//! Every quantity is reachable three ways: exact coefficient algebra
//! ([`coeffs`]), the Dirichlet-disc partial-wave oracle ([`scatter`]), and
//! Monte-Carlo simulation of Brownian bridges ([`sausage`]).

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod lattice;
pub mod potential;
pub mod quad;
pub mod sausage;
pub mod scatter;
pub mod shape;
pub mod specfun;

pub use error::{Error, Result};
