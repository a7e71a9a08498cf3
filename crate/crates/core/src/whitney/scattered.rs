//! Greedy maximal scattered sets.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::index::{level_of, LevelIndex};
use crate::distance::point_boundary_distance;
use crate::grid::{GridDomain, Point};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub point: Point,
    /// Distance to the complement, `δ(point) > 0`.
    pub delta: f64,
}

/// Order in which candidates are offered to the greedy scan.
#[derive(Debug, Clone, PartialEq)]
pub enum ScanOrder {
    /// Candidate order as given (lattice order for cell centers).
    Lexicographic,
    /// Uniform shuffle driven by ChaCha8 with this seed.
    Seeded(u64),
    Permutation(Vec<usize>),
    /// Increasing distance from a point, ties by candidate order.
    NearestFirst(Point),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteredSet {
    pub dim: usize,
    pub tau: f64,
    pub centers: Vec<Point>,
    pub deltas: Vec<f64>,
}

impl ScatteredSet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Radii `(τ/8·δ, τ/2·δ, 3τ/4·δ)` of the inner, covering and outer balls.
    pub fn radii(&self, i: usize) -> (f64, f64, f64) {
        let s = self.tau * self.deltas[i];
        (s / 8.0, s / 2.0, 0.75 * s)
    }
}

/// `|a − b| ≥ (τ/4)·max(δ(a), δ(b))`.
pub fn scattered_pair(tau: f64, a: &Point, da: f64, b: &Point, db: f64) -> bool {
    math::dist(a, b) >= tau / 4.0 * da.max(db)
}

/// Centers of a `k^m` subdivision of every cell, with their `δ`.
pub fn cell_candidates(domain: &GridDomain, subdivision: usize) -> Result<Vec<Candidate>> {
    if subdivision == 0 {
        return Err(Error::Invalid("subdivision must be at least 1"));
    }
    let dim = domain.dim();
    let k = subdivision as i64;
    let h = domain.h();
    let per_axis = |axis: usize| if axis < dim { k } else { 1 };
    let mut out = Vec::with_capacity(domain.len() * subdivision.pow(dim as u32));
    for c in domain.cells() {
        for x in 0..per_axis(0) {
            for y in 0..per_axis(1) {
                for z in 0..per_axis(2) {
                    let sub = [x, y, z];
                    let mut p = [0.0; 3];
                    for axis in 0..dim {
                        p[axis] = (c[axis] as f64 + (sub[axis] as f64 + 0.5) / k as f64) * h;
                    }
                    out.push(Candidate { point: p, delta: point_boundary_distance(domain, &p) });
                }
            }
        }
    }
    Ok(out)
}

/// Greedy scan over the cell centers of `domain`.
pub fn greedy_scattered(domain: &GridDomain, tau: f64, order: &ScanOrder) -> Result<ScatteredSet> {
    greedy_scattered_from(domain.dim(), &cell_candidates(domain, 1)?, tau, order)
}

/// Accepts each candidate, in the given order, iff it is scattered against
/// everything accepted so far. The result is maximal in the candidate set.
pub fn greedy_scattered_from(
    dim: usize,
    candidates: &[Candidate],
    tau: f64,
    order: &ScanOrder,
) -> Result<ScatteredSet> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::BadTau);
    }
    if candidates.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if candidates.iter().any(|c| !(c.delta > 0.0) || !c.delta.is_finite()) {
        return Err(Error::Invalid("candidate distances must be positive"));
    }
    let n = candidates.len();
    let sequence: Vec<usize> = match order {
        ScanOrder::Lexicographic => (0..n).collect(),
        ScanOrder::Seeded(seed) => {
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            v
        }
        ScanOrder::Permutation(p) => {
            let mut seen = alloc::vec![false; n];
            if p.len() != n || p.iter().any(|&i| i >= n || core::mem::replace(&mut seen[i], true)) {
                return Err(Error::Invalid("scan order is not a permutation of the candidates"));
            }
            p.clone()
        }
        ScanOrder::NearestFirst(x) => {
            let mut v: Vec<usize> = (0..n).collect();
            v.sort_by(|&a, &b| math::dist2(&candidates[a].point, x).total_cmp(&math::dist2(&candidates[b].point, x)));
            v
        }
    };

    // A conflict needs |x − a| < τ·δ(x)/3, and then δ(a) lies within a
    // factor 4/3 of δ(x), so only neighboring levels can hold it.
    let mut index = LevelIndex::new(tau / 3.0);
    let mut set = ScatteredSet { dim, tau, centers: Vec::new(), deltas: Vec::new() };
    for i in sequence {
        let Candidate { point, delta } = candidates[i];
        let level = level_of(delta);
        let reach = tau * delta / 3.0;
        let mut ok = true;
        for l in level - 1..=level + 1 {
            index.visit(l, &point, reach, |a| {
                if ok && !scattered_pair(tau, &point, delta, &set.centers[a], set.deltas[a]) {
                    ok = false;
                }
            });
            if !ok {
                break;
            }
        }
        if ok {
            index.insert(set.centers.len(), &point, delta);
            set.centers.push(point);
            set.deltas.push(delta);
        }
    }
    Ok(set)
}
