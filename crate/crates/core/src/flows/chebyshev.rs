//! Least sup-norm solution of `div v = f` with zero boundary flux.
//!
//! Feasibility of `max_e |v_e| / w_e ≤ t` is a capacitated transshipment
//! problem (capacity `t·w_e` in each direction), decided by one max-flow.
//! When it is infeasible the minimum cut `S` satisfies `f(S) > t·Per(S)`,
//! so `|f(S)| / Per(S)` is a strictly better lower bound. The search jumps to
//! that ratio (a Newton step for the fractional cut problem) and falls back
//! to bisection whenever rounding prevents progress.

use alloc::vec;
use alloc::vec::Vec;

use super::maxflow::MaxFlow;
use super::{first_imbalance, masses};
use crate::grid::{EdgeField, GridDomain, Mode, NodeFunction};
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const NEWTON_NUDGE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ChebyshevSolution {
    pub mode: Mode,
    /// Mass flux per edge.
    pub flow: EdgeField,
    /// `max_e |v_e| / w_e` of the returned flow.
    pub value: f64,
    /// Bracket on the exact optimum: `lower ≤ t* ≤ upper`.
    pub lower: f64,
    pub upper: f64,
    /// Cut certificate `S` and its ratio `|f(S)| / Per(S)` (equal to `lower`).
    pub cut: Vec<bool>,
    pub certificate_ratio: f64,
    pub iterations: usize,
    /// `max_c |(div v)(c) − f(c)·|cell||`.
    pub residual: f64,
}

/// Supply/demand network with zero edge capacities; returns the edge arcs.
/// Source and sink are nodes `n` and `n + 1`.
fn network(domain: &GridDomain, m: &[f64], supply: f64) -> (MaxFlow, Vec<usize>) {
    let n = domain.len();
    let mut net = MaxFlow::new(n + 2, 1e-15 * supply);
    for (i, &mi) in m.iter().enumerate() {
        if mi > 0.0 {
            net.add(n, i, mi, 0.0);
        } else if mi < 0.0 {
            net.add(i, n + 1, -mi, 0.0);
        }
    }
    let arcs = domain.edges().iter().map(|e| net.add(e.tail, e.head, 0.0, 0.0)).collect();
    (net, arcs)
}

/// Whether some `v` with `div v = f` has `|v_e| ≤ t·w_e` on every edge, up to
/// a routing gap of `1e-11` of the total supply.
pub fn sup_feasible(domain: &GridDomain, f: &NodeFunction, mode: Mode, t: f64) -> Result<bool> {
    if !(t >= 0.0) {
        return Err(Error::Invalid("level must be nonnegative"));
    }
    let m = masses(domain, f, mode)?;
    if let Some((component, sum)) = first_imbalance(domain, &m) {
        return Err(Error::NotMeanZero { component, sum });
    }
    let supply: f64 = m.iter().filter(|&&x| x > 0.0).sum();
    if supply == 0.0 {
        return Ok(true);
    }
    let n = domain.len();
    let (mut net, arcs) = network(domain, &m, supply);
    for (k, &a) in arcs.iter().enumerate() {
        let c = t * domain.transversal_weight(k, mode);
        net.set_capacity(a, c, c);
    }
    Ok(supply - net.run(n, n + 1) <= 1e-11 * supply)
}

pub fn chebyshev_solve(domain: &GridDomain, f: &NodeFunction, mode: Mode, tol: f64) -> Result<ChebyshevSolution> {
    if !(tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive"));
    }
    let m = masses(domain, f, mode)?;
    if let Some((component, sum)) = first_imbalance(domain, &m) {
        return Err(Error::NotMeanZero { component, sum });
    }
    let n = domain.len();
    let n_edges = domain.edges().len();
    let supply: f64 = m.iter().filter(|&&x| x > 0.0).sum();
    if supply == 0.0 {
        return Ok(ChebyshevSolution {
            mode,
            flow: EdgeField::zeros(n_edges),
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            cut: vec![false; n],
            certificate_ratio: 0.0,
            iterations: 0,
            residual: 0.0,
        });
    }
    let weights: Vec<f64> = (0..n_edges).map(|k| domain.transversal_weight(k, mode)).collect();

    let (s, t) = (n, n + 1);
    let (mut net, arcs) = network(domain, &m, supply);

    let ratio = |set: &[bool]| -> f64 {
        let fs: f64 = (0..n).filter(|&i| set[i]).map(|i| m[i]).sum();
        let per: f64 =
            domain.edges().iter().zip(&weights).filter(|(e, _)| set[e.tail] != set[e.head]).map(|(_, w)| w).sum();
        if per > 0.0 {
            fs.abs() / per
        } else {
            0.0
        }
    };

    // lower bound from singletons, upper bound from routing everything
    // through any spanning tree
    let mut cut = vec![false; n];
    let mut lower = 0.0;
    for i in 0..n {
        let mut single = vec![false; n];
        single[i] = true;
        let r = ratio(&single);
        if r > lower {
            lower = r;
            cut = single;
        }
    }
    let w_min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let mut upper = 2.0 * supply / w_min;
    let mut flow: Option<Vec<f64>> = None;
    let mut probe = lower * (1.0 + NEWTON_NUDGE);
    let mut iterations = 0;

    let feasible_gap = 1e-11 * supply;
    let converged = |lo: f64, hi: f64| hi - lo <= tol * (1.0 + hi);
    while !(flow.is_some() && converged(lower, upper)) {
        if iterations >= MAX_ITERATIONS {
            return Err(Error::ToleranceNotReached(iterations));
        }
        iterations += 1;
        let level = if probe > lower && probe < upper { probe } else { 0.5 * (lower + upper) };
        for (k, &a) in arcs.iter().enumerate() {
            let c = level * weights[k];
            net.set_capacity(a, c, c);
        }
        let routed = net.run(s, t);
        if supply - routed <= feasible_gap {
            upper = level;
            flow = Some(arcs.iter().map(|&a| net.net_flow(a)).collect());
            probe = 0.5 * (lower + upper);
        } else {
            let side = net.source_side(s);
            let set: Vec<bool> = side[..n].to_vec();
            let r = ratio(&set);
            if r > lower {
                lower = r;
                cut = set;
            }
            probe = if r > level { r * (1.0 + NEWTON_NUDGE) } else { 0.5 * (lower + upper) };
            if r <= level {
                // no certificate beyond `level`; keep the bound anyway
                lower = lower.max(level);
            }
        }
    }

    let flow = flow.expect("loop exits with a feasible flow");
    let value = flow.iter().zip(&weights).fold(0.0f64, |acc, (v, w)| acc.max(v.abs() / w));
    let flow = EdgeField(flow);
    let div = crate::calculus::divergence(domain, &flow)?;
    let residual = div.iter().zip(&m).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let certificate_ratio = ratio(&cut);
    Ok(ChebyshevSolution { mode, flow, value, lower, upper, cut, certificate_ratio, iterations, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Connectivity;
    use alloc::vec;

    #[test]
    fn two_cells() {
        let d = GridDomain::rectangle(2, 1, 1.0, Connectivity::Axis).unwrap();
        let sol = chebyshev_solve(&d, &NodeFunction(vec![1.0, -1.0]), Mode::Graph, 1e-6).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-6);
        assert!((sol.flow[0] - 1.0).abs() < 1e-9);
        assert!(sol.residual <= 1e-12);
    }

    #[test]
    fn path_of_four() {
        let d = GridDomain::rectangle(4, 1, 1.0, Connectivity::Axis).unwrap();
        let sol = chebyshev_solve(&d, &NodeFunction(vec![1.0, 1.0, -1.0, -1.0]), Mode::Graph, 1e-6).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-5);
        assert!((sol.certificate_ratio - 2.0).abs() < 1e-9);
        let s: Vec<bool> = sol.cut.clone();
        assert!(s == vec![true, true, false, false] || s == vec![false, false, true, true]);
        assert!((sol.flow[1] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let d = GridDomain::rectangle(2, 1, 1.0, Connectivity::Axis).unwrap();
        let err = chebyshev_solve(&d, &NodeFunction(vec![1.0, -0.5]), Mode::Graph, 1e-6).unwrap_err();
        assert!(matches!(err, Error::NotMeanZero { .. }));
    }

    #[test]
    fn zero_data_gives_zero() {
        let d = GridDomain::rectangle(3, 3, 1.0, Connectivity::Full).unwrap();
        let sol = chebyshev_solve(&d, &NodeFunction::zeros(9), Mode::Graph, 1e-6).unwrap();
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn mesh_mode_units() {
        // f = ±1 density on the two halves of a 4×2 strip with h = 0.5:
        // |f(S)| = 4 cells·0.25 = 1, Per = 2 edges·0.5 = 1 → t* = 1
        let d = GridDomain::rectangle(4, 2, 0.5, Connectivity::Axis).unwrap();
        let f: Vec<f64> = d.cells().iter().map(|c| if c[0] < 2 { 1.0 } else { -1.0 }).collect();
        let sol = chebyshev_solve(&d, &NodeFunction(f), Mode::Mesh, 1e-8).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-7);
    }
}
