//! Path decomposition of a dipole flow.
//!
//! A feasible flow for `F = θ·(δ_b − δ_a)` is first stripped of its
//! circulations (each cancellation removes at least one edge from the
//! support and strictly lowers `Σ |v_e|·length(e)`), then peeled into
//! source-to-sink paths. Normalized by `|θ|` the path weights form a
//! probability measure on paths from `a` to `b`.

use alloc::vec;
use alloc::vec::Vec;

use super::FlowSolution;
use crate::calculus::divergence;
use crate::grid::{EdgeField, GridDomain, Mode};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPath {
    /// Cells from `a` to `b`.
    pub nodes: Vec<usize>,
    /// Edges traversed, `edges[k]` joining `nodes[k]` and `nodes[k + 1]`.
    pub edges: Vec<usize>,
    pub weight: f64,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct PencilDecomposition {
    pub mode: Mode,
    pub from: usize,
    pub to: usize,
    /// Dipole strength: the flow solves `div v = θ·(δ_b − δ_a)`.
    pub theta: f64,
    pub paths: Vec<WeightedPath>,
    /// `ν_total = Σ weight·length`, per unit strength (the flow cost is
    /// `|θ|·ν_total`).
    pub total_mass: f64,
    /// Euclidean distance `|b − a|₂` in the units of `mode`.
    pub euclidean: f64,
    /// `Λ = ν_total / |b − a|₂`.
    pub lambda: f64,
    /// Input flow with every circulation removed.
    pub acyclic_flow: EdgeField,
    /// `Σ |v_e|·length(e)` before and after cycle cancellation.
    pub input_cost: f64,
    pub acyclic_cost: f64,
    pub cancelled_cycles: usize,
}

impl PencilDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.paths.iter().map(|p| p.weight).sum()
    }

    /// `−θ·Σ_k weight_k·P_k`, `P_k` the unit field along path `k` oriented
    /// from `a` to `b`. Equals [`acyclic_flow`](Self::acyclic_flow) up to
    /// rounding.
    pub fn superposition(&self, domain: &GridDomain) -> EdgeField {
        let mut out = EdgeField::zeros(domain.edges().len());
        for p in &self.paths {
            for (k, &e) in p.edges.iter().enumerate() {
                let sign = if domain.edges()[e].tail == p.nodes[k] { 1.0 } else { -1.0 };
                out[e] += -self.theta * p.weight * sign;
            }
        }
        out
    }
}

pub fn decompose_pencil(
    domain: &GridDomain,
    solution: &FlowSolution,
    a: usize,
    b: usize,
) -> Result<PencilDecomposition> {
    let n = domain.len();
    let supply = &solution.supply;
    if a >= n || b >= n {
        return Err(Error::CellOutside);
    }
    if a == b || supply.len() != n {
        return Err(Error::NotADipole);
    }
    let theta = supply[b];
    let scale = theta.abs();
    if theta == 0.0 || (supply[a] + theta).abs() > 1e-12 * scale {
        return Err(Error::NotADipole);
    }
    if (0..n).any(|i| i != a && i != b && supply[i].abs() > 1e-12 * scale) {
        return Err(Error::NotADipole);
    }
    let div = divergence(domain, &solution.flow)?;
    let residual = div.iter().zip(supply.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if residual > 1e-9 * scale.max(1.0) {
        return Err(Error::Invalid("flow does not solve div v = F"));
    }

    let mode = solution.mode;
    let lengths: Vec<f64> = (0..domain.edges().len()).map(|k| domain.edge_length(k, mode)).collect();
    let eps = 1e-12 * scale;
    let cost = |v: &[f64]| v.iter().zip(&lengths).map(|(x, l)| x.abs() * l).sum::<f64>();

    let mut flow = solution.flow.0.clone();
    for v in flow.iter_mut() {
        if v.abs() <= eps {
            *v = 0.0;
        }
    }
    let input_cost = cost(&solution.flow.0);
    let mut cancelled_cycles = 0;
    while let Some(cycle) = find_cycle(domain, &flow) {
        let amount = cycle.iter().map(|&(e, _)| flow[e].abs()).fold(f64::INFINITY, f64::min);
        for &(e, forward) in &cycle {
            flow[e] -= if forward { amount } else { -amount };
            if flow[e].abs() <= eps {
                flow[e] = 0.0;
            }
        }
        cancelled_cycles += 1;
    }
    let acyclic_flow = EdgeField(flow.clone());
    let acyclic_cost = cost(&flow);

    // mass leaves the cell with positive divergence
    let (source, sink) = if theta > 0.0 { (b, a) } else { (a, b) };
    let mut remaining = scale;
    let mut paths = Vec::new();
    while remaining > eps {
        let Some((nodes, edges)) = walk(domain, &mut flow, source, sink) else {
            break;
        };
        let amount = edges.iter().map(|&e| flow[e].abs()).fold(remaining, f64::min);
        for (k, &e) in edges.iter().enumerate() {
            let forward = domain.edges()[e].tail == nodes[k];
            flow[e] -= if forward { amount } else { -amount };
            if flow[e].abs() <= eps {
                flow[e] = 0.0;
            }
        }
        remaining -= amount;
        let length = edges.iter().map(|&e| lengths[e]).sum();
        let (mut nodes, mut edges) = (nodes, edges);
        if source != a {
            nodes.reverse();
            edges.reverse();
        }
        paths.push(WeightedPath { nodes, edges, weight: amount / scale, length });
    }

    let total_mass = paths.iter().map(|p| p.weight * p.length).sum();
    let euclidean = math::dist(&domain.center(a), &domain.center(b)) * domain.length_scale(mode) / domain.h();
    Ok(PencilDecomposition {
        mode,
        from: a,
        to: b,
        theta,
        paths,
        total_mass,
        euclidean,
        lambda: total_mass / euclidean,
        acyclic_flow,
        input_cost,
        acyclic_cost,
        cancelled_cycles,
    })
}

/// Arcs `x → y` carrying positive flow, as `(y, edge, forward)`.
fn out_arcs<'a>(domain: &'a GridDomain, flow: &'a [f64], x: usize) -> impl Iterator<Item = (usize, usize, bool)> + 'a {
    domain.neighbors(x).iter().filter_map(move |&(y, e)| {
        let forward = domain.edges()[e].tail == x;
        let along = if forward { flow[e] } else { -flow[e] };
        (along > 0.0).then_some((y, e, forward))
    })
}

/// A directed cycle in the support of `flow`, as `(edge, forward)` pairs.
fn find_cycle(domain: &GridDomain, flow: &[f64]) -> Option<Vec<(usize, bool)>> {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let n = domain.len();
    let mut color = vec![WHITE; n];
    let mut via: Vec<(usize, usize, bool)> = vec![(usize::MAX, 0, false); n];
    for root in 0..n {
        if color[root] != WHITE {
            continue;
        }
        // stack of (node, next neighbor position)
        let mut stack = vec![(root, 0usize)];
        color[root] = GRAY;
        while let Some(&mut (x, ref mut pos)) = stack.last_mut() {
            let arcs = domain.neighbors(x);
            let mut advanced = false;
            while *pos < arcs.len() {
                let (y, e) = arcs[*pos];
                *pos += 1;
                let forward = domain.edges()[e].tail == x;
                let along = if forward { flow[e] } else { -flow[e] };
                if along <= 0.0 {
                    continue;
                }
                match color[y] {
                    WHITE => {
                        color[y] = GRAY;
                        via[y] = (x, e, forward);
                        stack.push((y, 0));
                        advanced = true;
                        break;
                    }
                    GRAY => {
                        let mut cycle = vec![(e, forward)];
                        let mut z = x;
                        while z != y {
                            let (p, pe, pf) = via[z];
                            cycle.push((pe, pf));
                            z = p;
                        }
                        return Some(cycle);
                    }
                    _ => {}
                }
            }
            if !advanced {
                color[x] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

/// Follows positive flow from `source` until `sink` on an acyclic flow.
/// Dead ends (rounding leftovers) are zeroed and the walk restarts.
fn walk(domain: &GridDomain, flow: &mut [f64], source: usize, sink: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    'restart: loop {
        let mut nodes = vec![source];
        let mut edges = Vec::new();
        let mut x = source;
        while x != sink {
            let next = out_arcs(domain, flow, x).next().map(|(y, e, _)| (y, e));
            match next {
                Some((y, e)) => {
                    nodes.push(y);
                    edges.push(e);
                    x = y;
                }
                None => {
                    let e = *edges.last()?;
                    flow[e] = 0.0;
                    continue 'restart;
                }
            }
            if nodes.len() > domain.len() + 1 {
                return None;
            }
        }
        return Some((nodes, edges));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::min_cost_flow;
    use crate::grid::{Connectivity, NodeFunction};
    use alloc::vec;

    fn dipole(d: &GridDomain, a: usize, b: usize, theta: f64) -> NodeFunction {
        let mut f = NodeFunction::zeros(d.len());
        f[b] = theta;
        f[a] = -theta;
        f
    }

    #[test]
    fn single_path() {
        let d = GridDomain::rectangle(4, 1, 1.0, Connectivity::Axis).unwrap();
        let sol = min_cost_flow(&d, &dipole(&d, 0, 3, 1.0), Mode::Graph).unwrap();
        let p = decompose_pencil(&d, &sol, 0, 3).unwrap();
        assert_eq!(p.paths.len(), 1);
        assert_eq!(p.paths[0].nodes, vec![0, 1, 2, 3]);
        assert_eq!(p.paths[0].weight, 1.0);
        assert_eq!(p.total_mass, 3.0);
        assert_eq!(p.lambda, 1.0);
    }

    #[test]
    fn half_half_split() {
        let d = GridDomain::rectangle(2, 2, 1.0, Connectivity::Axis).unwrap();
        let a = d.index_of(&[0, 0, 0]).unwrap();
        let b = d.index_of(&[1, 1, 0]).unwrap();
        let sol0 = min_cost_flow(&d, &dipole(&d, a, b, 1.0), Mode::Graph).unwrap();
        // hand-built split: mass 1/2 along each monotone path from b to a
        let mut flow = EdgeField::zeros(4);
        for k in 0..4 {
            flow[k] = -0.5;
        }
        let sol = FlowSolution { flow, cost: 2.0, ..sol0 };
        let p = decompose_pencil(&d, &sol, a, b).unwrap();
        assert_eq!(p.paths.len(), 2);
        for path in &p.paths {
            assert_eq!(path.weight, 0.5);
            assert_eq!(path.nodes.first(), Some(&a));
            assert_eq!(path.nodes.last(), Some(&b));
        }
        assert_eq!(p.total_mass, 2.0);
        assert_eq!(p.cancelled_cycles, 0);
    }

    #[test]
    fn circulation_is_cancelled() {
        let d = GridDomain::rectangle(2, 2, 1.0, Connectivity::Axis).unwrap();
        let a = d.index_of(&[0, 0, 0]).unwrap();
        let b = d.index_of(&[1, 1, 0]).unwrap();
        let sol = min_cost_flow(&d, &dipole(&d, a, b, 1.0), Mode::Graph).unwrap();
        let clean = decompose_pencil(&d, &sol, a, b).unwrap();

        // add a unit circulation that agrees with the optimal path's direction
        let mut flow = sol.flow.clone();
        let used: Vec<usize> = (0..4).filter(|&k| flow[k] != 0.0).collect();
        assert_eq!(used.len(), 2);
        let cycle = [(0usize, 1usize), (1, 3), (3, 2), (2, 0)];
        let mut circ = EdgeField::zeros(4);
        for &(x, y) in &cycle {
            let k = d.edges().iter().position(|e| (e.tail, e.head) == (x.min(y), x.max(y))).unwrap();
            circ[k] = if d.edges()[k].tail == x { 1.0 } else { -1.0 };
        }
        let sign = if used.iter().all(|&k| circ[k] * flow[k] > 0.0) { 1.0 } else { -1.0 };
        for k in 0..4 {
            flow[k] += sign * circ[k];
        }
        let noisy = FlowSolution { flow, ..sol.clone() };
        let p = decompose_pencil(&d, &noisy, a, b).unwrap();
        assert_eq!(p.cancelled_cycles, 1);
        assert!(p.acyclic_cost < p.input_cost);
        assert_eq!(p.total_mass, clean.total_mass);
        assert_eq!(p.paths, clean.paths);
    }

    #[test]
    fn not_a_dipole() {
        let d = GridDomain::rectangle(3, 1, 1.0, Connectivity::Axis).unwrap();
        let sol = min_cost_flow(&d, &NodeFunction(vec![1.0, 1.0, -2.0]), Mode::Graph).unwrap();
        assert_eq!(decompose_pencil(&d, &sol, 0, 2).unwrap_err(), Error::NotADipole);
    }

    #[test]
    fn negative_theta_orientation() {
        let d = GridDomain::rectangle(3, 1, 1.0, Connectivity::Axis).unwrap();
        let sol = min_cost_flow(&d, &dipole(&d, 0, 2, -2.0), Mode::Graph).unwrap();
        let p = decompose_pencil(&d, &sol, 0, 2).unwrap();
        assert_eq!(p.paths[0].nodes, vec![0, 1, 2]);
        assert_eq!(p.weight_sum(), 1.0);
        let sup = p.superposition(&d);
        for k in 0..2 {
            assert!((sup[k] - p.acyclic_flow[k]).abs() < 1e-12);
        }
    }
}
