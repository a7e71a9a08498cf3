//! Successive shortest paths for the uncapacitated transshipment problem.
//!
//! Every edge can carry any amount in either direction at cost `length(e)`
//! per unit. The residual graph therefore always contains both "extend" arcs;
//! an edge already carrying flow additionally offers a "cancel" arc against
//! the flow at cost `−length(e)`, bounded by the current amount.
//!
//! Dijkstra runs on reduced costs `c + π(x) − π(y)`. Since both extend arcs
//! survive every iteration, the final potentials satisfy
//! `|π(x) − π(y)| ≤ length(e)` on every edge, and cancel arcs pin equality on
//! flow-carrying edges: `u = −π` is the optimal dual.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use super::{check_balanced, masses};
use crate::distance::HeapEntry;
use crate::grid::{EdgeField, GridDomain, Mode, NodeFunction};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct FlowSolution {
    pub mode: Mode,
    /// Mass flux per edge, positive from tail to head.
    pub flow: EdgeField,
    /// `Σ_e |v_e|·length(e)`.
    pub cost: f64,
    /// Dual potential, graph-1-Lipschitz, zero at the basepoint (or at the
    /// first cell of components without the basepoint).
    pub potential: NodeFunction,
    /// Right-hand side as masses.
    pub supply: NodeFunction,
    pub augmentations: usize,
}

impl FlowSolution {
    /// `⟨u, F⟩` for the returned potential.
    pub fn dual_value(&self) -> f64 {
        self.potential.iter().zip(self.supply.iter()).map(|(u, f)| u * f).sum()
    }

    /// `max_e (|u(head) − u(tail)| − length(e))`; nonpositive up to rounding.
    pub fn lipschitz_excess(&self, domain: &GridDomain) -> f64 {
        domain
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| (self.potential[e.head] - self.potential[e.tail]).abs() - domain.edge_length(k, self.mode))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_c |(div v)(c) − F(c)|` in mass units.
    pub fn residual(&self, domain: &GridDomain) -> f64 {
        let div = crate::calculus::divergence(domain, &self.flow).expect("flow matches domain");
        div.iter().zip(self.supply.iter()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

#[derive(Clone, Copy)]
struct Parent {
    node: usize,
    edge: usize,
    cancel: bool,
}

/// Cost-minimal `v` with `div v = F`, plus its dual potential.
pub fn min_cost_flow(domain: &GridDomain, f: &NodeFunction, mode: Mode) -> Result<FlowSolution> {
    let supply = masses(domain, f, mode)?;
    check_balanced(domain, &supply)?;

    let n = domain.len();
    let scale = supply.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let lengths: Vec<f64> = (0..domain.edges().len()).map(|k| domain.edge_length(k, mode)).collect();

    let mut flow = vec![0.0; domain.edges().len()];
    let mut excess = supply.clone();
    let mut pi = vec![0.0; n];
    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<Parent>> = vec![None; n];
    let mut augmentations = 0;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); domain.component_count()];
    for i in 0..n {
        members[domain.component(i)].push(i);
    }

    for comp in &members {
        loop {
            let sources: Vec<usize> = comp.iter().copied().filter(|&i| excess[i] > eps).collect();
            if sources.is_empty() {
                break;
            }
            for &i in comp {
                dist[i] = f64::INFINITY;
                parent[i] = None;
            }
            let mut heap = BinaryHeap::new();
            for &s in &sources {
                dist[s] = 0.0;
                heap.push(HeapEntry { dist: 0.0, node: s });
            }
            while let Some(HeapEntry { dist: d, node: x }) = heap.pop() {
                if d > dist[x] {
                    continue;
                }
                for &(y, e) in domain.neighbors(x) {
                    let forward = domain.edges()[e].tail == x;
                    let along = if forward { flow[e] } else { -flow[e] };
                    let cancel = along < -eps;
                    let cost = if cancel { -lengths[e] } else { lengths[e] };
                    let reduced = (cost + pi[x] - pi[y]).max(0.0);
                    let nd = d + reduced;
                    if nd < dist[y] {
                        dist[y] = nd;
                        parent[y] = Some(Parent { node: x, edge: e, cancel });
                        heap.push(HeapEntry { dist: nd, node: y });
                    }
                }
            }

            let sink = comp
                .iter()
                .copied()
                .filter(|&i| excess[i] < -eps && dist[i].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
            let Some(sink) = sink else {
                // balanced components always expose a reachable deficit
                return Err(Error::Unbalanced(excess.iter().sum()));
            };
            for &i in comp {
                if dist[i].is_finite() {
                    pi[i] += dist[i];
                }
            }

            let mut amount = -excess[sink];
            let mut x = sink;
            while let Some(p) = parent[x] {
                if p.cancel {
                    amount = amount.min(flow[p.edge].abs());
                }
                x = p.node;
            }
            let source = x;
            amount = amount.min(excess[source]);

            let mut x = sink;
            while let Some(p) = parent[x] {
                let forward = domain.edges()[p.edge].tail == p.node;
                if forward {
                    flow[p.edge] += amount;
                } else {
                    flow[p.edge] -= amount;
                }
                if p.cancel && flow[p.edge].abs() <= eps {
                    flow[p.edge] = 0.0;
                }
                x = p.node;
            }
            excess[source] -= amount;
            excess[sink] += amount;
            augmentations += 1;
        }
    }

    // u = −π, anchored per component
    let mut potential: Vec<f64> = pi.iter().map(|p| -p).collect();
    for comp in &members {
        let anchor = if comp.contains(&domain.basepoint()) { domain.basepoint() } else { comp[0] };
        let shift = potential[anchor];
        for &i in comp {
            potential[i] -= shift;
        }
    }

    let cost = flow.iter().zip(&lengths).map(|(v, l)| v.abs() * l).sum();
    Ok(FlowSolution {
        mode,
        flow: EdgeField(flow),
        cost,
        potential: NodeFunction(potential),
        supply: NodeFunction(supply),
        augmentations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::graph_distance;
    use crate::grid::Connectivity;
    use alloc::vec;

    #[test]
    fn path_of_three() {
        let d = GridDomain::rectangle(3, 1, 1.0, Connectivity::Axis).unwrap();
        let sol = min_cost_flow(&d, &NodeFunction(vec![-1.0, 0.0, 1.0]), Mode::Graph).unwrap();
        assert_eq!(sol.cost, 2.0);
        // mass leaves cell 2 towards cell 0
        assert_eq!(sol.flow.0, vec![-1.0, -1.0]);
        assert!((sol.dual_value() - 2.0).abs() < 1e-12);
        assert_eq!(sol.residual(&d), 0.0);
    }

    #[test]
    fn zero_data() {
        let d = GridDomain::rectangle(3, 3, 1.0, Connectivity::Full).unwrap();
        let sol = min_cost_flow(&d, &NodeFunction::zeros(9), Mode::Graph).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert!(sol.flow.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn square_dipole() {
        let d = GridDomain::rectangle(2, 2, 1.0, Connectivity::Axis).unwrap();
        let a = d.index_of(&[0, 0, 0]).unwrap();
        let b = d.index_of(&[1, 1, 0]).unwrap();
        let mut f = NodeFunction::zeros(4);
        f[a] = 1.0;
        f[b] = -1.0;
        let sol = min_cost_flow(&d, &f, Mode::Graph).unwrap();
        assert_eq!(sol.cost, 2.0);
        assert!((sol.dual_value() - 2.0).abs() < 1e-12);
        assert!(sol.lipschitz_excess(&d) <= 1e-12);
        // u is the graph distance to b up to a constant
        for i in 0..4 {
            let gd = graph_distance(&d, i, b, Mode::Graph).unwrap();
            assert!((sol.potential[i] - sol.potential[b] - gd).abs() < 1e-12);
        }
    }

    #[test]
    fn unbalanced_is_rejected() {
        let d = GridDomain::rectangle(3, 1, 1.0, Connectivity::Axis).unwrap();
        let err = min_cost_flow(&d, &NodeFunction(vec![1.0, 0.0, 0.0]), Mode::Graph).unwrap_err();
        assert!(matches!(err, Error::Unbalanced(_)));
    }

    #[test]
    fn imbalance_across_components() {
        let d = GridDomain::new(2, [[0, 0, 0], [1, 0, 0], [4, 0, 0], [5, 0, 0]], 1.0, Connectivity::Axis, [0, 0, 0])
            .unwrap();
        let f = NodeFunction(vec![1.0, 0.0, 0.0, -1.0]);
        let err = min_cost_flow(&d, &f, Mode::Graph).unwrap_err();
        assert!(matches!(err, Error::DisconnectedImbalance { component: 0, .. }));
        let ok = NodeFunction(vec![1.0, -1.0, 2.0, -2.0]);
        let sol = min_cost_flow(&d, &ok, Mode::Graph).unwrap();
        assert_eq!(sol.cost, 3.0);
    }

    #[test]
    fn mesh_mode_scales_lengths_and_masses() {
        let d = GridDomain::rectangle(4, 1, 0.5, Connectivity::Axis).unwrap();
        // densities: mass 1 at each end after multiplying by h^2 = 0.25
        let f = NodeFunction(vec![4.0, 0.0, 0.0, -4.0]);
        let sol = min_cost_flow(&d, &f, Mode::Mesh).unwrap();
        assert!((sol.cost - 1.5).abs() < 1e-12);
        assert!((sol.dual_value() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn cancelling_arcs_are_used() {
        // Two sources and two sinks where greedy pairing must later reroute.
        let d = GridDomain::rectangle(4, 1, 1.0, Connectivity::Axis).unwrap();
        let f = NodeFunction(vec![1.0, -1.0, 1.0, -1.0]);
        let sol = min_cost_flow(&d, &f, Mode::Graph).unwrap();
        assert_eq!(sol.cost, 2.0);
        assert!((sol.dual_value() - 2.0).abs() < 1e-12);
    }
}
