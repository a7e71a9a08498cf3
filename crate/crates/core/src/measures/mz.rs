//! Meyers–Ziemer type ball ratios `|μ|(B(x, r)) / r^{m−1}` (closed balls).

use alloc::vec;
use alloc::vec::Vec;

use super::tree::KdTree;
use super::AtomicMeasure;
use crate::distance::boundary_distances;
use crate::grid::{GridDomain, Point};
use crate::math;
use crate::{Error, Result};

/// Which ball centers [`mz_norm_above`] scans.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterStrategy {
    Atoms,
    /// Atoms plus the midpoint of every pair of atoms (quadratic in the
    /// number of atoms).
    AtomsAndMidpoints,
    Points(Vec<Point>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzEstimate {
    pub value: f64,
    pub center: Point,
    pub radius: f64,
}

/// `sup |μ|(B(x, r)) / r^{m−1}` over the chosen centers and all `r ≥ r_min`.
///
/// For a fixed center the ratio only increases at radii where an atom enters
/// the ball, so it is enough to test `r_min` and every atom distance above
/// it. Distances are bucketed; a bucket is resolved exactly only when the
/// bound `mass up to its outer edge / inner edge^{m−1}` beats the best value
/// so far.
pub fn mz_norm_above(mu: &AtomicMeasure, r_min: f64, centers: &CenterStrategy) -> Result<MzEstimate> {
    if !(r_min > 0.0) || !r_min.is_finite() {
        return Err(Error::NonpositiveRadius);
    }
    let mut best = MzEstimate { value: 0.0, center: [0.0; 3], radius: r_min };
    if mu.is_empty() {
        return Ok(best);
    }
    let atoms = mu.atoms();
    let mut scan = Scan::new(mu.dim(), r_min, atoms.len());
    let mut visit = |c: &Point, best: &mut MzEstimate| {
        if let Some((value, radius)) = scan.center(atoms, c, best.value) {
            *best = MzEstimate { value, center: *c, radius };
        }
    };
    match centers {
        CenterStrategy::Atoms => atoms.iter().for_each(|a| visit(&a.0, &mut best)),
        CenterStrategy::Points(points) => points.iter().for_each(|p| visit(p, &mut best)),
        CenterStrategy::AtomsAndMidpoints => {
            for (i, a) in atoms.iter().enumerate() {
                visit(&a.0, &mut best);
                for b in &atoms[i + 1..] {
                    let mid = [(a.0[0] + b.0[0]) / 2.0, (a.0[1] + b.0[1]) / 2.0, (a.0[2] + b.0[2]) / 2.0];
                    visit(&mid, &mut best);
                }
            }
        }
    }
    Ok(best)
}

struct Scan {
    power: i32,
    r_min: f64,
    dist: Vec<f64>,
    bins: Vec<u32>,
    start: Vec<usize>,
    bin_mass: Vec<f64>,
    sorted: Vec<(f64, f64)>,
}

impl Scan {
    fn new(dim: usize, r_min: f64, n: usize) -> Self {
        Scan {
            power: dim as i32 - 1,
            r_min,
            dist: vec![0.0; n],
            bins: vec![0; n],
            start: Vec::new(),
            bin_mass: Vec::new(),
            sorted: vec![(0.0, 0.0); n],
        }
    }

    fn ratio(&self, mass: f64, r: f64) -> f64 {
        mass / math::powi(r, self.power)
    }

    /// Best `(ratio, radius)` at center `c` if it beats `floor`.
    fn center(&mut self, atoms: &[(Point, f64)], c: &Point, floor: f64) -> Option<(f64, f64)> {
        let r_min = self.r_min;
        let mut base = 0.0;
        let mut far = 0.0f64;
        for (d, a) in self.dist.iter_mut().zip(atoms) {
            *d = math::dist(&a.0, c);
            if *d <= r_min {
                base += a.1.abs();
            } else {
                far = far.max(*d);
            }
        }
        let mut best = floor;
        let mut found = None;
        let r = self.ratio(base, r_min);
        if r > best {
            best = r;
            found = Some((r, r_min));
        }
        if far == 0.0 {
            return found;
        }

        let n = atoms.len();
        let width = (r_min / 8.0).max((far - r_min) / (4 * n + 16) as f64);
        let n_bins = ((far - r_min) / width) as usize + 1;
        self.start.clear();
        self.start.resize(n_bins + 1, 0);
        self.bin_mass.clear();
        self.bin_mass.resize(n_bins, 0.0);
        for (k, &d) in self.dist.iter().enumerate() {
            if d > r_min {
                let b = (((d - r_min) / width) as usize).min(n_bins - 1);
                self.bins[k] = b as u32;
                self.start[b + 1] += 1;
                self.bin_mass[b] += atoms[k].1.abs();
            }
        }
        for b in 0..n_bins {
            self.start[b + 1] += self.start[b];
        }
        let mut fill = self.start.clone();
        for (k, &d) in self.dist.iter().enumerate() {
            if d > r_min {
                let b = self.bins[k] as usize;
                self.sorted[fill[b]] = (d, atoms[k].1.abs());
                fill[b] += 1;
            }
        }

        let mut cum = base;
        for b in 0..n_bins {
            let inner = r_min + b as f64 * width;
            let after = cum + self.bin_mass[b];
            if self.bin_mass[b] > 0.0 && self.ratio(after, inner) > best {
                let power = self.power;
                let members = &mut self.sorted[self.start[b]..self.start[b + 1]];
                members.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
                let mut running = cum;
                let mut k = 0;
                while k < members.len() {
                    let d = members[k].0;
                    while k < members.len() && members[k].0 == d {
                        running += members[k].1;
                        k += 1;
                    }
                    let r = running / math::powi(d, power);
                    if r > best {
                        best = r;
                        found = Some((r, d));
                    }
                }
            }
            cum = after;
        }
        found
    }
}

/// `sup_x (1/δ(x))·|μ|(B(x, τδ(x))) / (τδ(x))^{m−1}` over cell centers `x`.
///
/// Cell centers are a finite subset of `Ω`, so this is a lower bound for the
/// supremum over all of `Ω`.
pub fn eta(mu: &AtomicMeasure, domain: &GridDomain, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::BadTau);
    }
    if mu.dim() != domain.dim() {
        return Err(Error::Invalid("measure and domain dimensions differ"));
    }
    if mu.atoms().iter().any(|a| domain.locate(&a.0).is_none()) {
        return Err(Error::AtomOutside);
    }
    if mu.is_empty() {
        return Ok(0.0);
    }
    let tree = KdTree::new(mu.dim(), mu.atoms());
    let power = mu.dim() as i32 - 1;
    let mut best = 0.0f64;
    for (i, delta) in boundary_distances(domain).into_iter().enumerate() {
        let rho = tau * delta;
        let mass = tree.ball_mass(&domain.center(i), rho);
        if mass > 0.0 {
            best = best.max(mass / (delta * math::powi(rho, power)));
        }
    }
    Ok(best)
}

/// Slope margin above which a profile counts as decaying towards small radii.
pub const PROFILE_SLOPE_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct MzProfile {
    pub radii: Vec<f64>,
    /// `sup` over atom-centered balls of `|μ|(B(x, r)) / r^{m−1}`.
    pub values: Vec<f64>,
    /// Largest nearest-neighbor distance between atoms.
    pub atom_scale: f64,
    /// Least-squares slope of `ln value` against `ln r` over radii at least
    /// twice the atom scale.
    pub slope: Option<f64>,
    /// Diagnostic: the fitted slope exceeds [`PROFILE_SLOPE_MARGIN`], i.e.
    /// the ratios shrink with the radius.
    pub vanishing: Option<bool>,
    /// `(τ, η(μ, τ))` rows, filled by [`MzProfile::add_eta`].
    pub eta: Vec<(f64, f64)>,
}

impl MzProfile {
    pub fn add_eta(&mut self, mu: &AtomicMeasure, domain: &GridDomain, taus: &[f64]) -> Result<()> {
        for &tau in taus {
            self.eta.push((tau, eta(mu, domain, tau)?));
        }
        Ok(())
    }
}

pub fn upper_regularity_profile(mu: &AtomicMeasure, radii: &[f64]) -> Result<MzProfile> {
    if radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::NonpositiveRadius);
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("radii must be strictly increasing"));
    }
    let power = mu.dim() as i32 - 1;
    let tree = KdTree::new(mu.dim(), mu.atoms());
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| mu.atoms().iter().map(|a| tree.ball_mass(&a.0, r) / math::powi(r, power)).fold(0.0, f64::max))
        .collect();
    let atom_scale = if mu.len() < 2 { 0.0 } else { (0..mu.len()).map(|k| tree.nearest_other(k)).fold(0.0, f64::max) };
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii
        .iter()
        .zip(&values)
        .filter(|(&r, &v)| r >= 2.0 * atom_scale && v > 0.0)
        .map(|(&r, &v)| (math::ln(r), math::ln(v)))
        .unzip();
    let slope = math::ls_slope(&xs, &ys);
    Ok(MzProfile {
        radii: radii.to_vec(),
        values,
        atom_scale,
        slope,
        vanishing: slope.map(|s| s > PROFILE_SLOPE_MARGIN),
        eta: Vec::new(),
    })
}
