//! Partition of unity `χ_a = φ_a / Σ_b φ_b` subordinate to a scattered set.

use alloc::vec;
use alloc::vec::Vec;

use super::bump::BumpSpec;
use super::index::LevelIndex;
use super::scattered::{Candidate, ScatteredSet};
use crate::grid::Point;
use crate::math;
use crate::{Error, Result};

/// `18·392^m`, the overlap and gradient constant of the construction.
pub fn whitney_constant(m: usize) -> f64 {
    18.0 * math::powi(392.0, m as i32)
}

pub struct PartitionOfUnity {
    set: ScatteredSet,
    bump: BumpSpec,
    index: LevelIndex,
}

/// Value and gradient of one bump at the query point.
struct Term {
    center: usize,
    phi: f64,
    grad: Point,
}

impl PartitionOfUnity {
    pub fn new(set: ScatteredSet, bump: BumpSpec) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut index = LevelIndex::new(0.75 * set.tau);
        for (i, (c, d)) in set.centers.iter().zip(&set.deltas).enumerate() {
            index.insert(i, c, *d);
        }
        Ok(PartitionOfUnity { set, bump, index })
    }

    pub fn set(&self) -> &ScatteredSet {
        &self.set
    }

    pub fn bump(&self) -> &BumpSpec {
        &self.bump
    }

    fn terms(&self, x: &Point) -> Vec<Term> {
        let mut out = Vec::new();
        for &level in self.index.levels() {
            self.index.visit(level, x, self.index.cell_size(level), |a| {
                let scale = self.set.tau * self.set.deltas[a];
                let c = &self.set.centers[a];
                let r = math::dist(x, c);
                let t = r / scale;
                let phi = self.bump.value(t);
                if phi > 0.0 {
                    let mut grad = [0.0; 3];
                    if r > 0.0 {
                        let k = self.bump.derivative(t) / (scale * r);
                        for axis in 0..3 {
                            grad[axis] = k * (x[axis] - c[axis]);
                        }
                    }
                    out.push(Term { center: a, phi, grad });
                }
            });
        }
        out.sort_by_key(|t| t.center);
        out
    }

    /// `Σ_a φ_a(x)`.
    pub fn bump_sum(&self, x: &Point) -> f64 {
        self.terms(x).iter().map(|t| t.phi).sum()
    }

    /// Nonzero `χ_a(x)` as `(a, value)`, sorted by `a`.
    pub fn eval(&self, x: &Point) -> Result<Vec<(usize, f64)>> {
        let terms = self.terms(x);
        let sum: f64 = terms.iter().map(|t| t.phi).sum();
        if !(sum > 0.0) {
            return Err(Error::UncoveredPoint);
        }
        Ok(terms.iter().map(|t| (t.center, t.phi / sum)).collect())
    }

    pub fn chi(&self, a: usize, x: &Point) -> Result<f64> {
        Ok(self.eval(x)?.into_iter().find(|(c, _)| *c == a).map_or(0.0, |(_, v)| v))
    }

    /// `(a, χ_a(x), ∇χ_a(x))` for every `a` with `φ_a(x) > 0`.
    pub fn gradients(&self, x: &Point) -> Result<Vec<(usize, f64, Point)>> {
        let terms = self.terms(x);
        let sum: f64 = terms.iter().map(|t| t.phi).sum();
        if !(sum > 0.0) {
            return Err(Error::UncoveredPoint);
        }
        let mut grad_sum = [0.0; 3];
        for t in &terms {
            for axis in 0..3 {
                grad_sum[axis] += t.grad[axis];
            }
        }
        Ok(terms
            .iter()
            .map(|t| {
                let mut g = [0.0; 3];
                for axis in 0..3 {
                    g[axis] = (t.grad[axis] * sum - t.phi * grad_sum[axis]) / (sum * sum);
                }
                (t.center, t.phi / sum, g)
            })
            .collect())
    }

    /// `max_a |∇χ_a(x)|·τ·δ(x)`: the constant the gradient bound needs at `x`.
    pub fn gradient_constant(&self, x: &Point, delta_x: f64) -> Result<f64> {
        let zero = [0.0; 3];
        Ok(self.gradients(x)?.iter().map(|(_, _, g)| math::dist(g, &zero) * self.set.tau * delta_x).fold(0.0, f64::max))
    }
}

/// Pairwise checks of the ball system of a scattered set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverReport {
    pub centers: usize,
    /// Pairs whose inner balls `B(a, τδ(a)/8)` overlap.
    pub inner_overlaps: usize,
    /// Candidates outside every `B(a, τδ(a)/2)`.
    pub uncovered: usize,
    /// `max_a #{b : B̂_a ∩ B̂_b ≠ ∅}`, counting `b = a`.
    pub max_overlap: usize,
    pub overlap_bound: f64,
    /// Intersecting outer-ball pairs with `δ(a) ≤ δ(b)/7`.
    pub comparability_failures: usize,
    /// `min δ(a)/δ(b)` over intersecting outer-ball pairs.
    pub min_neighbor_ratio: f64,
}

impl CoverReport {
    pub fn passes(&self) -> bool {
        self.inner_overlaps == 0
            && self.uncovered == 0
            && (self.max_overlap as f64) <= self.overlap_bound
            && self.comparability_failures == 0
    }
}

/// Quadratic in the number of centers; every predicate is evaluated exactly
/// on every pair.
pub fn cover_report(set: &ScatteredSet, candidates: &[Candidate]) -> CoverReport {
    let k = set.len();
    let tau = set.tau;
    let mut inner_overlaps = 0;
    let mut overlap = vec![1usize; k];
    let mut comparability_failures = 0;
    let mut min_neighbor_ratio = f64::INFINITY;
    for i in 0..k {
        for j in 0..i {
            let d = math::dist(&set.centers[i], &set.centers[j]);
            let (di, dj) = (set.deltas[i], set.deltas[j]);
            if d < tau / 8.0 * (di + dj) {
                inner_overlaps += 1;
            }
            if d < 0.75 * tau * (di + dj) {
                overlap[i] += 1;
                overlap[j] += 1;
                let ratio = (di / dj).min(dj / di);
                min_neighbor_ratio = min_neighbor_ratio.min(ratio);
                if ratio <= 1.0 / 7.0 {
                    comparability_failures += 1;
                }
            }
        }
    }

    let mut index = LevelIndex::new(0.5 * tau);
    for (i, (c, d)) in set.centers.iter().zip(&set.deltas).enumerate() {
        index.insert(i, c, *d);
    }
    let uncovered = candidates
        .iter()
        .filter(|cand| {
            let mut hit = false;
            for &level in index.levels() {
                index.visit(level, &cand.point, index.cell_size(level), |a| {
                    hit |= math::dist(&cand.point, &set.centers[a]) < 0.5 * tau * set.deltas[a];
                });
                if hit {
                    break;
                }
            }
            !hit
        })
        .count();

    CoverReport {
        centers: k,
        inner_overlaps,
        uncovered,
        max_overlap: overlap.into_iter().max().unwrap_or(0),
        overlap_bound: whitney_constant(set.dim),
        comparability_failures,
        min_neighbor_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Connectivity, GridDomain};
    use crate::whitney::{cell_candidates, greedy_scattered_from, ScanOrder};

    fn square_partition(tau: f64) -> (PartitionOfUnity, Vec<Candidate>) {
        let d = GridDomain::rectangle(16, 16, 1.0 / 16.0, Connectivity::Full).unwrap();
        let candidates = cell_candidates(&d, 2).unwrap();
        let set = greedy_scattered_from(2, &candidates, tau, &ScanOrder::Seeded(1)).unwrap();
        (PartitionOfUnity::new(set, BumpSpec::default()).unwrap(), candidates)
    }

    #[test]
    fn isolated_center() {
        let set = ScatteredSet { dim: 2, tau: 1.0, centers: vec![[0.5, 0.5, 0.0]], deltas: vec![0.5] };
        let p = PartitionOfUnity::new(set, BumpSpec::default()).unwrap();
        assert_eq!(p.eval(&[0.5, 0.5, 0.0]).unwrap(), vec![(0, 1.0)]);
        assert_eq!(p.eval(&[0.5, 0.9, 0.0]).unwrap_err(), Error::UncoveredPoint);
    }

    #[test]
    fn sums_to_one_on_candidates() {
        let (p, candidates) = square_partition(0.5);
        for c in candidates.iter().step_by(7) {
            let vals = p.eval(&c.point).unwrap();
            let s: f64 = vals.iter().map(|v| v.1).sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(vals.iter().all(|v| v.1 >= 0.0 && v.1 <= 1.0));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (p, candidates) = square_partition(1.0);
        let step = 1e-6;
        for c in candidates.iter().step_by(37) {
            let x = c.point;
            for (a, _, g) in p.gradients(&x).unwrap() {
                for axis in 0..2 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[axis] += step;
                    xm[axis] -= step;
                    let fd = (p.chi(a, &xp).unwrap() - p.chi(a, &xm).unwrap()) / (2.0 * step);
                    let scale = g[axis].abs().max(1.0);
                    assert!((fd - g[axis]).abs() <= 1e-5 * scale, "fd {fd} vs {}", g[axis]);
                }
            }
        }
    }

    #[test]
    fn support_inside_outer_ball() {
        let (p, _) = square_partition(0.5);
        let set = p.set().clone();
        for a in (0..set.len()).step_by(11) {
            let (_, _, outer) = set.radii(a);
            let x = [set.centers[a][0] + outer * 1.000001, set.centers[a][1], 0.0];
            if let Ok(v) = p.chi(a, &x) {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn report_on_square() {
        let (p, candidates) = square_partition(0.5);
        let r = cover_report(p.set(), &candidates);
        assert!(r.passes(), "{r:?}");
        assert!(r.min_neighbor_ratio > 1.0 / 7.0);
    }
}
