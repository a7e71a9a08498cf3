//! Cheeger constant and `(p, 1)`-Poincaré brackets.
//!
//! Both quantities are suprema of `g(|S|) / Per(S)` over proper subsets, with
//! `g` depending on the set only through its size. It is therefore enough to
//! know, for every size `k`, the smallest perimeter of a `k`-cell set: exact
//! mode finds it by enumeration, heuristic mode bounds it from above with
//! sweeps over level sets, which gives lower bounds for both constants.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dual::free_norm;
use crate::distance::distances_from;
use crate::flows::BRUTE_FORCE_LIMIT;
use crate::grid::{Cell, Connectivity, GridDomain, Mode, NodeFunction};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CheegerMethod {
    /// All `2^n` subsets; at most [`BRUTE_FORCE_LIMIT`] cells.
    Exact,
    /// Level-set sweeps of distance functions and of random dual potentials.
    Heuristic { seed: u64, trials: usize },
}

/// Smallest perimeter found for each set size, with a witness.
struct PerimeterTable {
    min_per: Vec<f64>,
    witness: Vec<Option<Vec<bool>>>,
}

impl PerimeterTable {
    fn new(n: usize) -> Self {
        PerimeterTable { min_per: vec![f64::INFINITY; n + 1], witness: vec![None; n + 1] }
    }

    fn exact(domain: &GridDomain, mode: Mode) -> Result<Self> {
        let n = domain.len();
        if n > BRUTE_FORCE_LIMIT {
            return Err(Error::TooLarge { cells: n, limit: BRUTE_FORCE_LIMIT });
        }
        let weights: Vec<f64> = (0..domain.edges().len()).map(|k| domain.transversal_weight(k, mode)).collect();
        let mut table = PerimeterTable::new(n);
        let mut best_code = vec![0u32; n + 1];
        let mut inside = vec![false; n];
        let mut count = 0usize;
        let mut per = 0.0;
        let mut code = 0u32;
        for step in 1u32..(1u32 << n) {
            let bit = step.trailing_zeros() as usize;
            code ^= 1 << bit;
            let entering = !inside[bit];
            inside[bit] = entering;
            if entering {
                count += 1;
            } else {
                count -= 1;
            }
            for &(y, e) in domain.neighbors(bit) {
                if inside[y] == entering {
                    per -= weights[e];
                } else {
                    per += weights[e];
                }
            }
            if count < n && per < table.min_per[count] {
                table.min_per[count] = per;
                best_code[count] = code;
            }
        }
        for k in 1..n {
            let set: Vec<bool> = (0..n).map(|i| best_code[k] >> i & 1 == 1).collect();
            // recompute from scratch to shed accumulated rounding
            table.min_per[k] = crate::calculus::perimeter(domain, &set, mode);
            table.witness[k] = Some(set);
        }
        Ok(table)
    }

    /// Records every prefix of `order` as a candidate set.
    fn sweep(&mut self, domain: &GridDomain, mode: Mode, order: &[usize], weights: &[f64]) {
        let n = domain.len();
        let mut inside = vec![false; n];
        let mut per = 0.0;
        for (k, &i) in order[..n - 1].iter().enumerate() {
            inside[i] = true;
            for &(y, e) in domain.neighbors(i) {
                if inside[y] {
                    per -= weights[e];
                } else {
                    per += weights[e];
                }
            }
            let size = k + 1;
            if per < self.min_per[size] * (1.0 - 1e-12) {
                let set = inside.clone();
                self.min_per[size] = crate::calculus::perimeter(domain, &set, mode);
                self.witness[size] = Some(set);
            }
        }
    }

    fn heuristic(domain: &GridDomain, mode: Mode, seed: u64, trials: usize) -> Result<Self> {
        let n = domain.len();
        let mut table = PerimeterTable::new(n);
        if n < 2 {
            return Ok(table);
        }
        let weights: Vec<f64> = (0..domain.edges().len()).map(|k| domain.transversal_weight(k, mode)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sweep_by = |table: &mut PerimeterTable, values: &[f64]| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
            table.sweep(domain, mode, &order, &weights);
            order.reverse();
            table.sweep(domain, mode, &order, &weights);
        };
        let sources: Vec<usize> =
            if n <= 256 { (0..n).collect() } else { (0..trials).map(|_| rng.random_range(0..n)).collect() };
        for s in sources {
            sweep_by(&mut table, &distances_from(domain, s, mode));
        }
        for _ in 0..trials {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b || domain.component(a) != domain.component(b) {
                continue;
            }
            let mut f = NodeFunction::zeros(n);
            f[a] = 1.0;
            f[b] = -1.0;
            let u = free_norm(domain, &f, mode)?.potential;
            sweep_by(&mut table, &u.0);
        }
        Ok(table)
    }

    fn build(domain: &GridDomain, mode: Mode, method: &CheegerMethod) -> Result<Self> {
        match method {
            CheegerMethod::Exact => Self::exact(domain, mode),
            CheegerMethod::Heuristic { seed, trials } => Self::heuristic(domain, mode, *seed, *trials),
        }
    }

    /// `max_k g(k) / min_per[k]` over sizes `0 < k < n`, with its witness.
    fn best(&self, g: impl Fn(usize) -> f64) -> (f64, Vec<bool>) {
        let n = self.min_per.len() - 1;
        let mut value = 0.0;
        let mut witness = vec![false; n];
        for k in 1..n {
            let Some(set) = &self.witness[k] else { continue };
            let r = if self.min_per[k] > 0.0 { g(k) / self.min_per[k] } else { f64::INFINITY };
            if r > value {
                value = r;
                witness = set.clone();
            }
        }
        (value, witness)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cheeger {
    /// `max min(|S|, |S^c|) / Per(S)` over nonempty proper `S`; `+∞` for
    /// disconnected domains, 0 for a single cell.
    pub value: f64,
    pub witness: Vec<bool>,
    /// Whether `value` is the exact maximum (otherwise a lower bound).
    pub exact: bool,
}

/// `min(|S|, |S^c|) / Per(S)` for one set.
pub fn cheeger_ratio(domain: &GridDomain, set: &[bool], mode: Mode) -> f64 {
    let k = set.iter().filter(|&&b| b).count();
    let n = domain.len();
    if k == 0 || k == n {
        return 0.0;
    }
    let size = k.min(n - k) as f64 * domain.cell_measure(mode);
    let per = crate::calculus::perimeter(domain, set, mode);
    if per > 0.0 {
        size / per
    } else {
        f64::INFINITY
    }
}

pub fn cheeger_constant(domain: &GridDomain, mode: Mode, method: &CheegerMethod) -> Result<Cheeger> {
    let table = PerimeterTable::build(domain, mode, method)?;
    let n = domain.len();
    let cm = domain.cell_measure(mode);
    let (value, witness) = table.best(|k| k.min(n - k) as f64 * cm);
    Ok(Cheeger { value, witness, exact: *method == CheegerMethod::Exact })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareBracket {
    pub p: f64,
    /// `max_S ‖1_S − mean‖_p / Per(S)` over the scanned sets.
    pub lower: f64,
    /// `2·h*` for `p = 1` with exact enumeration; unknown otherwise.
    pub upper: Option<f64>,
    /// Set attaining `lower`.
    pub witness: Vec<bool>,
    pub cheeger: Option<f64>,
}

/// `‖1_S − |S|/|Ω|‖_{L^p} / Per(S)`.
pub fn indicator_ratio(domain: &GridDomain, set: &[bool], mode: Mode, p: f64) -> f64 {
    let k = set.iter().filter(|&&b| b).count();
    let per = crate::calculus::perimeter(domain, set, mode);
    let num = indicator_deviation(domain.len(), k, domain.cell_measure(mode), p);
    if num == 0.0 {
        0.0
    } else if per > 0.0 {
        num / per
    } else {
        f64::INFINITY
    }
}

fn indicator_deviation(n: usize, k: usize, cm: f64, p: f64) -> f64 {
    let rho = k as f64 / n as f64;
    let sum = k as f64 * math::powf(1.0 - rho, p) + (n - k) as f64 * math::powf(rho, p);
    math::powf(cm * sum, 1.0 / p)
}

/// Bracket `lower ≤ c_p(Ω) ≤ upper` for the best constant in
/// `‖u − mean u‖_p ≤ c_p·TV(u)`, `1 ≤ p ≤ m/(m−1)`.
pub fn poincare_bracket(domain: &GridDomain, mode: Mode, p: f64, method: &CheegerMethod) -> Result<PoincareBracket> {
    let m = domain.dim() as f64;
    let one_star = if domain.dim() > 1 { m / (m - 1.0) } else { f64::INFINITY };
    if !(p >= 1.0) || p > one_star {
        return Err(Error::BadExponent);
    }
    let table = PerimeterTable::build(domain, mode, method)?;
    let n = domain.len();
    let cm = domain.cell_measure(mode);
    let (lower, witness) = table.best(|k| indicator_deviation(n, k, cm, p));
    let exact = *method == CheegerMethod::Exact;
    let cheeger = exact.then(|| table.best(|k| k.min(n - k) as f64 * cm).0);
    let upper = if p == 1.0 { cheeger.map(|h| 2.0 * h) } else { None };
    Ok(PoincareBracket { p, lower, upper, witness, cheeger })
}

/// Two 3×3 rooms joined through their middle rows by a corridor one cell
/// wide and `length` cells long.
pub fn rooms_and_corridor(length: usize, h: f64, connectivity: Connectivity) -> Result<GridDomain> {
    let mut cells: Vec<Cell> = Vec::new();
    let right = 3 + length as i32;
    for j in 0..3 {
        for i in 0..3 {
            cells.push([i, j, 0]);
            cells.push([right + i, j, 0]);
        }
    }
    for i in 3..right {
        cells.push([i, 1, 0]);
    }
    GridDomain::new(2, cells, h, connectivity, [0, 0, 0])
}
