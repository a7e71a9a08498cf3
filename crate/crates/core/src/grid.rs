//! Grid domains: a finite set of lattice cells with an adjacency graph.
//!
//! Cell `c` occupies the closed box `[c·h, (c+1)·h]` in `R^m` and its center is
//! `(c + 1/2)·h`. Edges join inside cells whose coordinates differ by at most
//! one in every axis (`Full`) or in exactly one axis (`Axis`). Each edge is
//! stored once, tail being the lexicographically smaller cell; since the cell
//! list is sorted this also means `tail < head` as indices.
//!
//! No edge ever leaves the mask, so every [`EdgeField`] has zero flux through
//! the boundary of the domain.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;
use crate::{Error, Result};

/// Integer lattice coordinates; unused trailing axes are zero.
pub type Cell = [i32; 3];

/// A point of `R^m`, padded with zeros beyond the dimension.
pub type Point = [f64; 3];

/// Neighborhood used to build edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Face neighbors only (4 in 2D, 6 in 3D).
    Axis,
    /// Face, edge and corner neighbors (8 in 2D, 26 in 3D).
    Full,
}

impl Connectivity {
    /// Parses the neighbor count used on the command line (`4`, `8`, `6`, `26`, `2`).
    pub fn from_neighbors(n: u32) -> Option<Self> {
        match n {
            2 | 4 | 6 => Some(Connectivity::Axis),
            8 | 26 => Some(Connectivity::Full),
            _ => None,
        }
    }

    pub fn neighbors(self, dim: usize) -> u32 {
        match self {
            Connectivity::Axis => 2 * dim as u32,
            Connectivity::Full => 3u32.pow(dim as u32) - 1,
        }
    }
}

/// Metric scaling.
///
/// `Graph` measures lengths in cell units and gives every cell unit measure.
/// `Mesh` multiplies lengths by `h`, cell measures by `h^m` and transversal
/// edge weights by `h^(m-1)`. Node functions handed to the solvers are
/// densities with respect to [`GridDomain::cell_measure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Graph,
    Mesh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    /// Number of axes in which the endpoints differ (1 = face neighbor).
    pub steps: u8,
}

impl Edge {
    /// Length in cell units: 1, √2 or √3.
    pub fn unit_length(&self) -> f64 {
        match self.steps {
            1 => 1.0,
            2 => core::f64::consts::SQRT_2,
            _ => math::sqrt(self.steps as f64),
        }
    }
}

/// Real values indexed by the cells of a domain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeFunction(pub Vec<f64>);

/// Real values indexed by the canonical edges of a domain. Positive values
/// point from tail to head.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeField(pub Vec<f64>);

macro_rules! impl_values {
    ($t:ident) => {
        impl $t {
            pub fn zeros(n: usize) -> Self {
                $t(vec![0.0; n])
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn iter(&self) -> core::slice::Iter<'_, f64> {
                self.0.iter()
            }

            pub fn sum(&self) -> f64 {
                self.0.iter().sum()
            }

            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
        }

        impl Index<usize> for $t {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl IndexMut<usize> for $t {
            fn index_mut(&mut self, i: usize) -> &mut f64 {
                &mut self.0[i]
            }
        }

        impl From<Vec<f64>> for $t {
            fn from(v: Vec<f64>) -> Self {
                $t(v)
            }
        }
    };
}

impl_values!(NodeFunction);
impl_values!(EdgeField);

const OUTSIDE: u32 = u32::MAX;

/// An immutable discretized open set.
#[derive(Debug, Clone)]
pub struct GridDomain {
    dim: usize,
    h: f64,
    connectivity: Connectivity,
    cells: Vec<Cell>,
    lo: Cell,
    extent: [usize; 3],
    lookup: Vec<u32>,
    edges: Vec<Edge>,
    // CSR adjacency: for cell i, entries adj[adj_start[i]..adj_start[i+1]] are (neighbor, edge).
    adj_start: Vec<usize>,
    adj: Vec<(usize, usize)>,
    basepoint: usize,
    component: Vec<usize>,
    n_components: usize,
}

impl GridDomain {
    /// Builds a domain from a set of cells. Duplicate cells are ignored.
    pub fn new(
        dim: usize,
        cells: impl IntoIterator<Item = Cell>,
        h: f64,
        connectivity: Connectivity,
        basepoint: Cell,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadCellSize);
        }
        let mut cells: Vec<Cell> = cells.into_iter().collect();
        if cells.iter().any(|c| c[dim..].iter().any(|&x| x != 0)) {
            return Err(Error::Invalid("cell has nonzero coordinates beyond the dimension"));
        }
        cells.sort_unstable();
        cells.dedup();
        if cells.is_empty() {
            return Err(Error::EmptyMask);
        }

        let mut lo = [0i32; 3];
        let mut hi = [0i32; 3];
        for axis in 0..dim {
            lo[axis] = cells.iter().map(|c| c[axis]).min().unwrap();
            hi[axis] = cells.iter().map(|c| c[axis]).max().unwrap();
        }
        let mut extent = [1usize; 3];
        for axis in 0..dim {
            extent[axis] = (hi[axis] - lo[axis]) as usize + 1;
        }
        let mut lookup = vec![OUTSIDE; extent[0] * extent[1] * extent[2]];
        for (i, c) in cells.iter().enumerate() {
            let slot = slot_of(c, &lo, &extent);
            lookup[slot] = i as u32;
        }

        let mut domain = GridDomain {
            dim,
            h,
            connectivity,
            cells,
            lo,
            extent,
            lookup,
            edges: Vec::new(),
            adj_start: Vec::new(),
            adj: Vec::new(),
            basepoint: 0,
            component: Vec::new(),
            n_components: 0,
        };
        domain.basepoint = domain.index_of(&basepoint).ok_or(Error::BasepointOutside)?;
        domain.build_edges();
        domain.build_components();
        Ok(domain)
    }

    /// Convenience constructor for 2D masks given as rows of booleans, row
    /// index being the second coordinate. The basepoint is the first inside
    /// cell in lexicographic order.
    pub fn from_rows(rows: &[&[bool]], h: f64, connectivity: Connectivity) -> Result<Self> {
        let cells: Vec<Cell> = rows
            .iter()
            .enumerate()
            .flat_map(|(j, row)| {
                row.iter().enumerate().filter(|(_, &inside)| inside).map(move |(i, _)| [i as i32, j as i32, 0])
            })
            .collect();
        let base = *cells.iter().min().ok_or(Error::EmptyMask)?;
        GridDomain::new(2, cells, h, connectivity, base)
    }

    /// Axis-aligned `nx × ny` rectangle starting at the origin.
    pub fn rectangle(nx: usize, ny: usize, h: f64, connectivity: Connectivity) -> Result<Self> {
        let cells = (0..ny).flat_map(|j| (0..nx).map(move |i| [i as i32, j as i32, 0]));
        GridDomain::new(2, cells, h, connectivity, [0, 0, 0])
    }

    fn build_edges(&mut self) {
        let offsets = positive_offsets(self.dim, self.connectivity);
        let mut edges = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            for off in &offsets {
                let n = [c[0] + off[0], c[1] + off[1], c[2] + off[2]];
                if let Some(j) = self.index_of(&n) {
                    let steps = off.iter().filter(|&&x| x != 0).count() as u8;
                    edges.push(Edge { tail: i, head: j, steps });
                }
            }
        }
        edges.sort_unstable_by_key(|e| (e.tail, e.head));

        let n = self.cells.len();
        let mut degree = vec![0usize; n + 1];
        for e in &edges {
            degree[e.tail] += 1;
            degree[e.head] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let mut adj = vec![(0usize, 0usize); start[n]];
        for (k, e) in edges.iter().enumerate() {
            adj[fill[e.tail]] = (e.head, k);
            fill[e.tail] += 1;
            adj[fill[e.head]] = (e.tail, k);
            fill[e.head] += 1;
        }
        // Neighbor lists in lexicographic order keep searches deterministic.
        for i in 0..n {
            adj[start[i]..start[i + 1]].sort_unstable();
        }
        self.edges = edges;
        self.adj_start = start;
        self.adj = adj;
    }

    fn build_components(&mut self) {
        let n = self.cells.len();
        let mut component = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if component[s] != usize::MAX {
                continue;
            }
            component[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in self.neighbors(x) {
                    if component[y] == usize::MAX {
                        component[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        self.component = component;
        self.n_components = count;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn connectivity(&self) -> Connectivity {
        self.connectivity
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// `(neighbor, edge index)` pairs of cell `i`, in increasing neighbor order.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adj[self.adj_start[i]..self.adj_start[i + 1]]
    }

    pub fn component(&self, i: usize) -> usize {
        self.component[i]
    }

    pub fn component_count(&self) -> usize {
        self.n_components
    }

    /// `false` when the mask splits into several components. Solvers then
    /// require balance on every component separately.
    pub fn is_connected(&self) -> bool {
        self.n_components == 1
    }

    pub fn index_of(&self, c: &Cell) -> Option<usize> {
        for axis in 0..3 {
            let off = c[axis] as i64 - self.lo[axis] as i64;
            if off < 0 || off >= self.extent[axis] as i64 {
                return None;
            }
        }
        match self.lookup[slot_of(c, &self.lo, &self.extent)] {
            OUTSIDE => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.index_of(c).is_some()
    }

    /// Index of the cell whose half-open box `[c·h, (c+1)·h)` holds `p`.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        self.index_of(&self.cell_of_point(p))
    }

    pub fn cell_of_point(&self, p: &Point) -> Cell {
        let mut c = [0i32; 3];
        for axis in 0..self.dim {
            c[axis] = math::floor(p[axis] / self.h) as i32;
        }
        c
    }

    pub fn center(&self, i: usize) -> Point {
        self.cell_center(&self.cells[i])
    }

    pub fn cell_center(&self, c: &Cell) -> Point {
        let mut p = [0.0; 3];
        for axis in 0..self.dim {
            p[axis] = (c[axis] as f64 + 0.5) * self.h;
        }
        p
    }

    /// Bounding box of the inside cells, as `(lo, extent)` in lattice units.
    pub fn bounds(&self) -> (Cell, [usize; 3]) {
        (self.lo, self.extent)
    }

    pub fn length_scale(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Graph => 1.0,
            Mode::Mesh => self.h,
        }
    }

    pub fn edge_length(&self, e: usize, mode: Mode) -> f64 {
        self.edges[e].unit_length() * self.length_scale(mode)
    }

    pub fn cell_measure(&self, mode: Mode) -> f64 {
        math::powi(self.length_scale(mode), self.dim as i32)
    }

    /// Transversal weight `h^(m-1)·(h / length(e))`: the face area an edge
    /// stands for. Used by total variation and cut capacities.
    pub fn transversal_weight(&self, e: usize, mode: Mode) -> f64 {
        math::powi(self.length_scale(mode), self.dim as i32 - 1) / self.edges[e].unit_length()
    }

    pub(crate) fn check_nodes(&self, f: &NodeFunction) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::ShapeMismatch { expected: self.len(), got: f.len() });
        }
        Ok(())
    }

    pub(crate) fn check_edges(&self, v: &EdgeField) -> Result<()> {
        if v.len() != self.edges.len() {
            return Err(Error::ShapeMismatch { expected: self.edges.len(), got: v.len() });
        }
        Ok(())
    }

    /// Sum of `f` over each connected component.
    pub fn component_sums(&self, f: &NodeFunction) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_components];
        for (i, v) in f.iter().enumerate() {
            sums[self.component[i]] += v;
        }
        sums
    }
}

fn slot_of(c: &Cell, lo: &Cell, extent: &[usize; 3]) -> usize {
    let x = (c[0] - lo[0]) as usize;
    let y = (c[1] - lo[1]) as usize;
    let z = (c[2] - lo[2]) as usize;
    (z * extent[1] + y) * extent[0] + x
}

/// Offsets with a positive first nonzero coordinate, so each undirected edge
/// is generated once from its lexicographically smaller endpoint.
fn positive_offsets(dim: usize, connectivity: Connectivity) -> Vec<Cell> {
    let mut out = Vec::new();
    let range = |axis: usize| if axis < dim { -1..=1 } else { 0..=0 };
    for dx in range(0) {
        for dy in range(1) {
            for dz in range(2) {
                let off = [dx, dy, dz];
                let nonzero = off.iter().filter(|&&x| x != 0).count();
                if nonzero == 0 {
                    continue;
                }
                if connectivity == Connectivity::Axis && nonzero != 1 {
                    continue;
                }
                let first = *off.iter().find(|&&x| x != 0).unwrap();
                if first > 0 {
                    out.push(off);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_has_no_edges() {
        let d = GridDomain::rectangle(1, 1, 1.0, Connectivity::Full).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.edges().is_empty());
    }

    #[test]
    fn square_2x2_axis() {
        let d = GridDomain::rectangle(2, 2, 1.0, Connectivity::Axis).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.edges().len(), 4);
        for e in 0..4 {
            assert_eq!(d.edge_length(e, Mode::Mesh), 1.0);
        }
    }

    #[test]
    fn square_2x2_full_has_diagonals() {
        let d = GridDomain::rectangle(2, 2, 0.5, Connectivity::Full).unwrap();
        assert_eq!(d.edges().len(), 6);
        let diag = d.edges().iter().filter(|e| e.steps == 2).count();
        assert_eq!(diag, 2);
        let e = d.edges().iter().position(|e| e.steps == 2).unwrap();
        assert!((d.edge_length(e, Mode::Mesh) - 0.5 * core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn canonical_orientation() {
        let d = GridDomain::rectangle(4, 3, 1.0, Connectivity::Full).unwrap();
        for e in d.edges() {
            assert!(e.tail < e.head);
            assert!(d.cell(e.tail) < d.cell(e.head));
        }
    }

    #[test]
    fn empty_mask_is_rejected() {
        let err = GridDomain::new(2, Vec::new(), 1.0, Connectivity::Axis, [0, 0, 0]).unwrap_err();
        assert_eq!(err, Error::EmptyMask);
    }

    #[test]
    fn basepoint_must_be_inside() {
        let err = GridDomain::new(2, [[0, 0, 0]], 1.0, Connectivity::Axis, [1, 0, 0]).unwrap_err();
        assert_eq!(err, Error::BasepointOutside);
    }

    #[test]
    fn disconnected_mask_is_flagged() {
        let d = GridDomain::new(2, [[0, 0, 0], [2, 0, 0]], 1.0, Connectivity::Full, [0, 0, 0]).unwrap();
        assert!(!d.is_connected());
        assert_eq!(d.component_count(), 2);
    }

    #[test]
    fn three_dimensional_full_connectivity() {
        let cells = (0..2).flat_map(|k| (0..2).flat_map(move |j| (0..2).map(move |i| [i, j, k])));
        let d = GridDomain::new(3, cells, 1.0, Connectivity::Full, [0, 0, 0]).unwrap();
        // complete graph on 8 vertices
        assert_eq!(d.edges().len(), 28);
        let axis = GridDomain::new(
            3,
            (0..2).flat_map(|k| (0..2).flat_map(move |j| (0..2).map(move |i| [i, j, k]))),
            1.0,
            Connectivity::Axis,
            [0, 0, 0],
        )
        .unwrap();
        assert_eq!(axis.edges().len(), 12);
    }

    #[test]
    fn transversal_weights() {
        let d = GridDomain::rectangle(2, 2, 0.5, Connectivity::Full).unwrap();
        for (k, e) in d.edges().iter().enumerate() {
            let w = d.transversal_weight(k, Mode::Mesh);
            let expected = 0.5 / e.unit_length();
            assert!((w - expected).abs() < 1e-15);
            assert!((d.transversal_weight(k, Mode::Graph) - 1.0 / e.unit_length()).abs() < 1e-15);
        }
    }
}
