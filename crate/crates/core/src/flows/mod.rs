//! Exact combinatorial solvers for the two critical divergence problems.
//!
//! * `L1`: minimize `Σ |v_e|·length(e)` subject to `div v = F`
//!   ([`min_cost_flow`]); the certificate is a potential with
//!   `|u(head) − u(tail)| ≤ length(e)` and `⟨u, F⟩ = cost`.
//! * `L∞`: minimize `max_e |v_e| / w_e` subject to `div v = f`
//!   ([`chebyshev_solve`]); the certificate is a cut `S` with
//!   `|f(S)| / Per(S)` equal to the optimum.
//!
//! Node functions are densities with respect to the cell measure of the
//! chosen [`Mode`](crate::Mode); the flows are the resulting mass fluxes.

mod brute;
mod chebyshev;
pub(crate) mod maxflow;
mod mincost;
mod pencil;

pub use brute::{gale_hoffman_brute, gale_hoffman_brute_with_set, BRUTE_FORCE_LIMIT};
pub use chebyshev::{chebyshev_solve, sup_feasible, ChebyshevSolution};
pub use mincost::{min_cost_flow, FlowSolution};
pub use pencil::{decompose_pencil, PencilDecomposition, WeightedPath};

use crate::grid::{GridDomain, Mode, NodeFunction};
use crate::{Error, Result};
use alloc::vec::Vec;

/// Relative tolerance for "sums to zero" checks.
pub const BALANCE_TOL: f64 = 1e-9;

/// `f` scaled to masses (`f · |cell|`).
pub(crate) fn masses(domain: &GridDomain, f: &NodeFunction, mode: Mode) -> Result<Vec<f64>> {
    domain.check_nodes(f)?;
    let cm = domain.cell_measure(mode);
    Ok(f.iter().map(|v| v * cm).collect())
}

/// Per-component imbalance check shared by the solvers; returns the first
/// offending component and its sum.
pub(crate) fn first_imbalance(domain: &GridDomain, masses: &[f64]) -> Option<(usize, f64)> {
    let mut sums = alloc::vec![0.0; domain.component_count()];
    let mut scale = alloc::vec![0.0f64; domain.component_count()];
    for (i, m) in masses.iter().enumerate() {
        sums[domain.component(i)] += m;
        scale[domain.component(i)] += m.abs();
    }
    sums.iter()
        .zip(&scale)
        .enumerate()
        .find(|(_, (s, sc))| s.abs() > BALANCE_TOL * sc.max(1.0))
        .map(|(c, (s, _))| (c, *s))
}

pub(crate) fn check_balanced(domain: &GridDomain, masses: &[f64]) -> Result<()> {
    match first_imbalance(domain, masses) {
        None => Ok(()),
        Some((component, imbalance)) => {
            let total: f64 = masses.iter().sum();
            let scale: f64 = masses.iter().map(|m| m.abs()).sum();
            if domain.is_connected() || total.abs() > BALANCE_TOL * scale.max(1.0) {
                Err(Error::Unbalanced(if domain.is_connected() { imbalance } else { total }))
            } else {
                Err(Error::DisconnectedImbalance { component, imbalance })
            }
        }
    }
}
