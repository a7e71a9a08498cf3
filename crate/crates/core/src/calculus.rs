//! Discrete divergence, gradient and total variation.
//!
//! `div` and `-grad` are adjoint for the pairing `Σ_e a_e·b_e·length(e)`
//! against `Σ_c`. The boundary term vanishes because no edge crosses the mask.

use crate::grid::{EdgeField, GridDomain, Mode, NodeFunction};
use crate::math;
use crate::Result;

/// `(div v)(c) = Σ_{tail = c} v_e − Σ_{head = c} v_e`.
pub fn divergence(domain: &GridDomain, v: &EdgeField) -> Result<NodeFunction> {
    domain.check_edges(v)?;
    let mut out = NodeFunction::zeros(domain.len());
    for (e, &val) in domain.edges().iter().zip(v.iter()) {
        out[e.tail] += val;
        out[e.head] -= val;
    }
    Ok(out)
}

/// Divergence of the flux `w_e·v_e`, `w_e` the transversal weight.
pub fn weighted_divergence(domain: &GridDomain, v: &EdgeField, mode: Mode) -> Result<NodeFunction> {
    domain.check_edges(v)?;
    let mut out = NodeFunction::zeros(domain.len());
    for (k, (e, &val)) in domain.edges().iter().zip(v.iter()).enumerate() {
        let flux = val * domain.transversal_weight(k, mode);
        out[e.tail] += flux;
        out[e.head] -= flux;
    }
    Ok(out)
}

/// `(grad u)_e = (u(head) − u(tail)) / length(e)`.
pub fn gradient(domain: &GridDomain, u: &NodeFunction, mode: Mode) -> Result<EdgeField> {
    domain.check_nodes(u)?;
    let vals =
        domain.edges().iter().enumerate().map(|(k, e)| (u[e.head] - u[e.tail]) / domain.edge_length(k, mode)).collect();
    Ok(EdgeField(vals))
}

/// `TV(u) = Σ_e |u(head) − u(tail)|·w_e`; for an indicator this is the
/// crossing weight of the set.
pub fn total_variation(domain: &GridDomain, u: &NodeFunction, mode: Mode) -> Result<f64> {
    domain.check_nodes(u)?;
    Ok(domain
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| (u[e.head] - u[e.tail]).abs() * domain.transversal_weight(k, mode))
        .sum())
}

/// Crossing weight `Σ w_e` over edges with exactly one endpoint in `set`.
pub fn perimeter(domain: &GridDomain, set: &[bool], mode: Mode) -> f64 {
    domain
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| set[e.tail] != set[e.head])
        .map(|(k, _)| domain.transversal_weight(k, mode))
        .sum()
}

/// `Σ_c u(c)·f(c)·|cell|`.
pub fn pairing(domain: &GridDomain, u: &NodeFunction, f: &NodeFunction, mode: Mode) -> Result<f64> {
    domain.check_nodes(u)?;
    domain.check_nodes(f)?;
    let dot: f64 = u.iter().zip(f.iter()).map(|(a, b)| a * b).sum();
    Ok(dot * domain.cell_measure(mode))
}

/// Largest edgewise slope `max_e |u(head) − u(tail)| / length(e)`.
pub fn grad_sup(domain: &GridDomain, u: &NodeFunction, mode: Mode) -> Result<f64> {
    Ok(gradient(domain, u, mode)?.max_abs())
}

/// Lipschitz constant of `u` with respect to the Euclidean distance between
/// cell centers (quadratic in the number of cells).
pub fn euclidean_lipschitz(domain: &GridDomain, u: &NodeFunction, mode: Mode) -> Result<f64> {
    domain.check_nodes(u)?;
    let scale = domain.length_scale(mode) / domain.h();
    let mut best: f64 = 0.0;
    for a in 0..domain.len() {
        let pa = domain.center(a);
        for b in a + 1..domain.len() {
            let d = math::dist(&pa, &domain.center(b)) * scale;
            best = best.max((u[a] - u[b]).abs() / d);
        }
    }
    Ok(best)
}
