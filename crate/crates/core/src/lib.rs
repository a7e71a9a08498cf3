//! Discrete divergence-equation toolkit on grid domains.
//!
//! Cells of an integer lattice form a domain `Ω`; scalar functions live on
//! cells and vector fields on the edges between adjacent cells. With that
//! staggering the discrete divergence and gradient are exact adjoints, so the
//! duality statements behind the solvers hold as identities:
//!
//! * [`flows::min_cost_flow`] solves `div v = F` with least `L1` mass and
//!   returns a 1-Lipschitz potential certifying optimality;
//! * [`flows::chebyshev_solve`] solves `div v = f` with least sup-norm and
//!   returns a cut certifying optimality;
//! * [`norms`] builds the Lipschitz-free norm, the strong-charge norm, the
//!   Cheeger/Poincaré brackets and the weak-`L^q` functionals on top;
//! * [`whitney`] and [`measures`] provide the Whitney partition of unity,
//!   Meyers–Ziemer diagnostics and variable-angle Koch measures.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod calculus;
pub mod constants;
pub mod distance;
mod error;
pub mod flows;
pub mod grid;
pub(crate) mod math;
pub mod measures;
pub mod norms;
pub mod whitney;

pub use error::{Error, Result};
pub use grid::{Cell, Connectivity, Edge, EdgeField, GridDomain, Mode, NodeFunction, Point};
