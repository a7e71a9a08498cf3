//! Euclidean distance to the complement and shortest-path distance on the
//! edge graph.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::grid::{Cell, GridDomain, Mode, Point};
use crate::math;
use crate::{Error, Result};

/// Euclidean distance from the center of cell `i` to `R^m \ Ω`, where `Ω` is
/// the union of the closed inside boxes. Always in mesh units.
pub fn boundary_distance(domain: &GridDomain, i: usize) -> Result<f64> {
    if i >= domain.len() {
        return Err(Error::CellOutside);
    }
    Ok(point_boundary_distance(domain, &domain.center(i)))
}

/// Same as [`boundary_distance`] for the cell with lattice coordinates `c`.
pub fn cell_boundary_distance(domain: &GridDomain, c: &Cell) -> Result<f64> {
    let i = domain.index_of(c).ok_or(Error::CellOutside)?;
    boundary_distance(domain, i)
}

/// `δ(x) = dist(x, R^m \ Ω)` for an arbitrary point; zero when the point
/// falls in an outside cell.
///
/// Outside lattice cells are scanned in Chebyshev rings around the cell of
/// `x`. A cell in ring `k` is at least `(k − 1)·h` away, which bounds the
/// search.
pub fn point_boundary_distance(domain: &GridDomain, p: &Point) -> f64 {
    let dim = domain.dim();
    let h = domain.h();
    let home = domain.cell_of_point(p);
    if !domain.contains(&home) {
        return 0.0;
    }
    let mut best2 = f64::INFINITY;
    let mut k: i32 = 1;
    loop {
        let lower = (k - 1) as f64 * h;
        if lower * lower >= best2 {
            break;
        }
        for_each_ring_cell(dim, k, |off| {
            let c = [home[0] + off[0], home[1] + off[1], home[2] + off[2]];
            if !domain.contains(&c) {
                let d2 = box_dist2(domain, &c, p);
                if d2 < best2 {
                    best2 = d2;
                }
            }
        });
        k += 1;
    }
    math::sqrt(best2)
}

/// `δ` at every cell center.
pub fn boundary_distances(domain: &GridDomain) -> Vec<f64> {
    (0..domain.len()).map(|i| point_boundary_distance(domain, &domain.center(i))).collect()
}

fn box_dist2(domain: &GridDomain, c: &Cell, p: &Point) -> f64 {
    let h = domain.h();
    let mut d2 = 0.0;
    for axis in 0..domain.dim() {
        let lo = c[axis] as f64 * h;
        let hi = lo + h;
        let gap = if p[axis] < lo {
            lo - p[axis]
        } else if p[axis] > hi {
            p[axis] - hi
        } else {
            0.0
        };
        d2 += gap * gap;
    }
    d2
}

fn for_each_ring_cell(dim: usize, k: i32, mut f: impl FnMut(Cell)) {
    let r = |axis: usize| if axis < dim { -k..=k } else { 0..=0 };
    for x in r(0) {
        for y in r(1) {
            for z in r(2) {
                if x.abs().max(y.abs()).max(z.abs()) == k {
                    f([x, y, z]);
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) struct HeapEntry {
    pub dist: f64,
    pub node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    // Reversed so BinaryHeap pops the smallest distance, ties by smallest index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path distances from `source` to every cell; `+∞` in other
/// components.
pub fn distances_from(domain: &GridDomain, source: usize, mode: Mode) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; domain.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry { dist: 0.0, node: source });
    while let Some(HeapEntry { dist: d, node: x }) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, e) in domain.neighbors(x) {
            let nd = d + domain.edge_length(e, mode);
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(HeapEntry { dist: nd, node: y });
            }
        }
    }
    dist
}

/// Length of a shortest edge path between two cells, `+∞` if they lie in
/// different components.
pub fn graph_distance(domain: &GridDomain, a: usize, b: usize, mode: Mode) -> Result<f64> {
    if a >= domain.len() || b >= domain.len() {
        return Err(Error::CellOutside);
    }
    if a == b {
        return Ok(0.0);
    }
    Ok(distances_from(domain, a, mode)[b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Connectivity;
    use core::f64::consts::SQRT_2;

    #[test]
    fn corner_cell_is_half_a_cell_from_the_boundary() {
        let d = GridDomain::rectangle(5, 4, 1.0, Connectivity::Axis).unwrap();
        assert_eq!(cell_boundary_distance(&d, &[0, 0, 0]).unwrap(), 0.5);
        let single = GridDomain::rectangle(1, 1, 1.0, Connectivity::Axis).unwrap();
        assert_eq!(boundary_distance(&single, 0).unwrap(), 0.5);
    }

    #[test]
    fn center_of_3x3() {
        let d = GridDomain::rectangle(3, 3, 1.0, Connectivity::Axis).unwrap();
        assert_eq!(cell_boundary_distance(&d, &[1, 1, 0]).unwrap(), 1.5);
    }

    #[test]
    fn center_of_plus_shape() {
        let rows: [&[bool]; 3] = [&[false, true, false], &[true, true, true], &[false, true, false]];
        let d = GridDomain::from_rows(&rows, 1.0, Connectivity::Full).unwrap();
        let got = cell_boundary_distance(&d, &[1, 1, 0]).unwrap();
        // oracle: densely sample the boundary of every outside box in a
        // neighbourhood and take the closest sample
        let center = [1.5, 1.5, 0.0];
        let mut best = f64::INFINITY;
        for &(ci, cj) in &[(0, 0), (2, 0), (0, 2), (2, 2)] {
            let n = 400;
            for s in 0..=n {
                let t = s as f64 / n as f64;
                for p in [
                    [ci as f64 + t, cj as f64],
                    [ci as f64 + t, cj as f64 + 1.0],
                    [ci as f64, cj as f64 + t],
                    [ci as f64 + 1.0, cj as f64 + t],
                ] {
                    let dx = p[0] - center[0];
                    let dy = p[1] - center[1];
                    best = best.min((dx * dx + dy * dy).sqrt());
                }
            }
        }
        assert!((got - 0.5 * SQRT_2).abs() < 1e-15, "{got}");
        assert!((got - best).abs() < 1e-12);
    }

    #[test]
    fn scaling_with_h() {
        let d = GridDomain::rectangle(3, 3, 0.1, Connectivity::Axis).unwrap();
        assert!((cell_boundary_distance(&d, &[1, 1, 0]).unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn outside_cell_is_an_error() {
        let d = GridDomain::rectangle(2, 2, 1.0, Connectivity::Axis).unwrap();
        assert_eq!(cell_boundary_distance(&d, &[5, 5, 0]), Err(Error::CellOutside));
    }

    #[test]
    fn graph_distances() {
        let d = GridDomain::rectangle(3, 3, 1.0, Connectivity::Full).unwrap();
        let a = d.index_of(&[0, 0, 0]).unwrap();
        let b = d.index_of(&[2, 2, 0]).unwrap();
        let c = d.index_of(&[1, 0, 0]).unwrap();
        assert_eq!(graph_distance(&d, a, a, Mode::Graph).unwrap(), 0.0);
        assert_eq!(graph_distance(&d, a, c, Mode::Graph).unwrap(), 1.0);
        assert!((graph_distance(&d, a, b, Mode::Graph).unwrap() - 2.0 * SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn graph_distance_across_components_is_infinite() {
        let d = GridDomain::new(2, [[0, 0, 0], [3, 0, 0]], 1.0, Connectivity::Full, [0, 0, 0]).unwrap();
        assert!(graph_distance(&d, 0, 1, Mode::Graph).unwrap().is_infinite());
    }

    #[test]
    fn one_dimensional_boundary_distance() {
        let d = GridDomain::new(1, (0..10).map(|i| [i, 0, 0]), 0.1, Connectivity::Axis, [0, 0, 0]).unwrap();
        let x = [0.37, 0.0, 0.0];
        assert!((point_boundary_distance(&d, &x) - 0.37).abs() < 1e-12);
    }
}
