//! The two dual norms computed by the flow solvers.

use alloc::vec::Vec;

use crate::flows::{chebyshev_solve, min_cost_flow, ChebyshevSolution, FlowSolution};
use crate::grid::{GridDomain, Mode, NodeFunction};
use crate::Result;

#[derive(Debug, Clone)]
pub struct FreeNorm {
    pub value: f64,
    /// Optimal 1-Lipschitz potential, zero at the basepoint.
    pub potential: NodeFunction,
    pub solution: FlowSolution,
}

/// Lipschitz-free norm `sup{⟨u, F⟩ : u(basepoint) = 0, |u(x) − u(y)| ≤
/// length(e) on edges}`.
///
/// Any imbalance is absorbed by an atom `−ΣF` at the basepoint, so `F` need
/// not sum to zero. Components without the basepoint must still balance.
pub fn free_norm(domain: &GridDomain, f: &NodeFunction, mode: Mode) -> Result<FreeNorm> {
    domain.check_nodes(f)?;
    let total = f.sum();
    let mut g = f.clone();
    if total != 0.0 {
        g[domain.basepoint()] -= total;
    }
    let solution = min_cost_flow(domain, &g, mode)?;
    Ok(FreeNorm { value: solution.cost, potential: solution.potential.clone(), solution })
}

#[derive(Debug, Clone)]
pub struct SchNorm {
    pub value: f64,
    /// Cut `S` whose indicator attains the supremum up to the tolerance.
    pub cut: Vec<bool>,
    /// `|f(S)| / Per(S)` of the cut.
    pub cut_ratio: f64,
    pub solution: ChebyshevSolution,
}

/// `sup{|⟨u, f⟩| : TV(u) ≤ 1}` for mean-zero `f`, equal to the least
/// sup-norm of a solution of `div v = f`.
pub fn sch_norm(domain: &GridDomain, f: &NodeFunction, mode: Mode, tol: f64) -> Result<SchNorm> {
    let solution = chebyshev_solve(domain, f, mode, tol)?;
    Ok(SchNorm { value: solution.value, cut: solution.cut.clone(), cut_ratio: solution.certificate_ratio, solution })
}
