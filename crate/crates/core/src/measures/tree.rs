//! Static k-d tree over weighted points with aggregated `|w|` per node.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::Point;

const LEAF: usize = 8;

struct Node {
    lo: Point,
    hi: Point,
    mass: f64,
    /// Range into `order` covered by this node.
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

pub(crate) struct KdTree {
    dim: usize,
    points: Vec<Point>,
    weights: Vec<f64>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    /// Tree over `points` with weights `|w|`.
    pub fn new(dim: usize, atoms: &[(Point, f64)]) -> Self {
        let points: Vec<Point> = atoms.iter().map(|a| a.0).collect();
        let weights: Vec<f64> = atoms.iter().map(|a| a.1.abs()).collect();
        let mut tree = KdTree { dim, order: (0..points.len()).collect(), points, weights, nodes: Vec::new() };
        if !tree.points.is_empty() {
            tree.build(0, tree.points.len());
        }
        tree
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        let mut mass = 0.0;
        for &i in &self.order[start..end] {
            for axis in 0..3 {
                lo[axis] = lo[axis].min(self.points[i][axis]);
                hi[axis] = hi[axis].max(self.points[i][axis]);
            }
            mass += self.weights[i];
        }
        let id = self.nodes.len();
        self.nodes.push(Node { lo, hi, mass, start, end, children: None });
        if end - start > LEAF {
            let axis = (0..self.dim).max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b]))).unwrap_or(0);
            let mid = start + (end - start) / 2;
            let points = &self.points;
            self.order[start..end]
                .select_nth_unstable_by(mid - start, |&a, &b| points[a][axis].total_cmp(&points[b][axis]));
            let left = self.build(start, mid);
            let right = self.build(mid, end);
            self.nodes[id].children = Some((left, right));
        }
        id
    }

    fn box_dist2(node: &Node, p: &Point) -> (f64, f64) {
        let mut near = 0.0;
        let mut far = 0.0;
        for axis in 0..3 {
            let a = node.lo[axis] - p[axis];
            let b = p[axis] - node.hi[axis];
            let gap = a.max(b).max(0.0);
            near += gap * gap;
            let span = (p[axis] - node.lo[axis]).abs().max((node.hi[axis] - p[axis]).abs());
            far += span * span;
        }
        (near, far)
    }

    /// `Σ |w_i|` over points in the closed ball `B(center, r)`.
    pub fn ball_mass(&self, center: &Point, r: f64) -> f64 {
        if self.nodes.is_empty() {
            return 0.0;
        }
        let r2 = r * r;
        let mut total = 0.0;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            let (near, far) = Self::box_dist2(node, center);
            if near > r2 {
                continue;
            }
            if far <= r2 {
                total += node.mass;
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    for &i in &self.order[node.start..node.end] {
                        if crate::math::dist2(&self.points[i], center) <= r2 {
                            total += self.weights[i];
                        }
                    }
                }
            }
        }
        total
    }

    /// Distance from point `k` to its nearest other point (`+∞` if alone).
    pub fn nearest_other(&self, k: usize) -> f64 {
        let p = self.points[k];
        let mut best2 = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if Self::box_dist2(node, &p).0 >= best2 {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    for &i in &self.order[node.start..node.end] {
                        if i != k {
                            best2 = best2.min(crate::math::dist2(&self.points[i], &p));
                        }
                    }
                }
            }
        }
        crate::math::sqrt(best2)
    }
}
