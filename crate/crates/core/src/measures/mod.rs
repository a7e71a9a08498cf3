//! Finite signed atomic measures and the diagnostics built on them.

mod koch;
mod mz;
mod tree;

pub use koch::{koch_curve, AngleSequence, KochCurve, KochSpec};
pub use mz::{
    eta, mz_norm_above, upper_regularity_profile, CenterStrategy, MzEstimate, MzProfile, PROFILE_SLOPE_MARGIN,
};

use alloc::vec::Vec;

use crate::distance::point_boundary_distance;
use crate::grid::{GridDomain, Mode, NodeFunction, Point};
use crate::math;
use crate::{Error, Result};

/// Sum of point masses `Σ w_i·δ_{x_i}` in `R^m`, `m ≤ 3`.
///
/// Atoms are kept sorted by position; equal positions are merged and zero
/// weights dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    atoms: Vec<(Point, f64)>,
}

impl AtomicMeasure {
    pub fn new(dim: usize, atoms: impl IntoIterator<Item = (Point, f64)>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut list: Vec<(Point, f64)> = Vec::new();
        for (p, w) in atoms {
            if p.iter().any(|x| !x.is_finite()) || !w.is_finite() {
                return Err(Error::Invalid("atom coordinates and weights must be finite"));
            }
            if p[dim..].iter().any(|&x| x != 0.0) {
                return Err(Error::Invalid("atom has coordinates beyond the dimension"));
            }
            list.push((p, w));
        }
        list.sort_by(|a, b| cmp_points(&a.0, &b.0));
        let mut merged: Vec<(Point, f64)> = Vec::with_capacity(list.len());
        for (p, w) in list {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += w,
                _ => merged.push((p, w)),
            }
        }
        merged.retain(|a| a.1 != 0.0);
        Ok(AtomicMeasure { dim, atoms: merged })
    }

    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, [])
    }

    /// `θ·(δ_b − δ_a)`.
    pub fn dipole(dim: usize, a: Point, b: Point, theta: f64) -> Result<Self> {
        Self::new(dim, [(b, theta), (a, -theta)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(Point, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `|μ|(R^m)`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.1.abs()).sum()
    }

    /// `μ₁ + μ₂`.
    pub fn plus(&self, other: &AtomicMeasure) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Invalid("measures live in different dimensions"));
        }
        Self::new(self.dim, self.atoms.iter().chain(other.atoms.iter()).copied())
    }

    /// Pushforward under `x ↦ λ·x`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        let atoms = self.atoms.iter().map(|(p, w)| ([p[0] * lambda, p[1] * lambda, p[2] * lambda], *w));
        Self::new(self.dim, atoms)
    }

    /// Pushforward under `x ↦ x + t`.
    pub fn translate(&self, t: Point) -> Result<Self> {
        let atoms = self.atoms.iter().map(|(p, w)| ([p[0] + t[0], p[1] + t[1], p[2] + t[2]], *w));
        Self::new(self.dim, atoms)
    }

    /// Multiplies every weight by `c`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        Self::new(self.dim, self.atoms.iter().map(|(p, w)| (*p, w * c)))
    }
}

fn cmp_points(a: &Point, b: &Point) -> core::cmp::Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureStats {
    /// `μ(R^m)`.
    pub mass: f64,
    /// `|μ|(R^m)`.
    pub variation: f64,
    /// `|μ(R^m)| ≤ 1e-12·|μ|(R^m)`.
    pub balanced: bool,
    /// `∫ |x|₂ d|μ|`.
    pub first_moment: f64,
}

pub fn measure_stats(mu: &AtomicMeasure) -> MeasureStats {
    let mass: f64 = mu.atoms.iter().map(|a| a.1).sum();
    let variation = mu.total_variation();
    let origin = [0.0; 3];
    let first_moment = mu.atoms.iter().map(|(p, w)| math::dist(p, &origin) * w.abs()).sum();
    MeasureStats { mass, variation, balanced: mass.abs() <= 1e-12 * variation, first_moment }
}

#[derive(Debug, Clone)]
pub struct WeightedMeasure {
    /// `μ⌞h`.
    pub measure: AtomicMeasure,
    /// `|h(x)| ≤ c·δ(x)` at every atom of `μ`.
    pub bound_ok: bool,
    /// Largest `|h(x)| / δ(x)` over the atoms (`+∞` if `h ≠ 0` where `δ = 0`).
    pub bound_ratio: f64,
    /// `|∫ h dμ| ≤ 1e-12·|μ⌞h|(R^m)`.
    pub balanced: bool,
    /// `∫ h dμ`.
    pub integral: f64,
}

/// Reweights each atom by `h`, flagging the boundary bound and balance.
pub fn weight_by(
    mu: &AtomicMeasure,
    h: impl Fn(&Point) -> f64,
    domain: &GridDomain,
    c: f64,
) -> Result<WeightedMeasure> {
    let mut bound_ratio = 0.0f64;
    let mut bound_ok = true;
    let mut atoms = Vec::with_capacity(mu.len());
    for (p, w) in &mu.atoms {
        let hv = h(p);
        let delta = point_boundary_distance(domain, p);
        let limit = c * delta;
        if hv.abs() > limit * (1.0 + 1e-12) {
            bound_ok = false;
        }
        if hv != 0.0 {
            bound_ratio = bound_ratio.max(if delta > 0.0 { hv.abs() / delta } else { f64::INFINITY });
        }
        atoms.push((*p, w * hv));
    }
    let measure = AtomicMeasure::new(mu.dim, atoms)?;
    let integral: f64 = measure.atoms.iter().map(|a| a.1).sum();
    let balanced = integral.abs() <= 1e-12 * measure.total_variation();
    Ok(WeightedMeasure { measure, bound_ok, bound_ratio, balanced, integral })
}

/// Adds each atom's weight to the cell containing it; in mesh mode the
/// result is a density (divided by `h^m`).
pub fn rasterize(mu: &AtomicMeasure, domain: &GridDomain, mode: Mode) -> Result<NodeFunction> {
    if mu.dim != domain.dim() {
        return Err(Error::Invalid("measure and domain dimensions differ"));
    }
    let mut out = NodeFunction::zeros(domain.len());
    for (p, w) in &mu.atoms {
        let i = domain.locate(p).ok_or(Error::AtomOutside)?;
        out[i] += w;
    }
    let cm = domain.cell_measure(mode);
    if cm != 1.0 {
        for v in out.0.iter_mut() {
            *v /= cm;
        }
    }
    Ok(out)
}
