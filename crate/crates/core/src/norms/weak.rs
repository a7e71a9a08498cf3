//! Weak-Lebesgue functionals `ε_q(f, y) = d(f, y)·y^q`, where
//! `d(f, y) = |{|f| > y}|` is the distribution function.
//!
//! Two backends: cell values with a cell measure (a step function in `y`),
//! and radial profiles on `R^m` whose distribution function is known in
//! closed form or by inverting the profile. Verdicts drawn from a finite
//! grid of levels are diagnostics, not proofs.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::constants::unit_ball_volume;
use crate::grid::{GridDomain, Mode, NodeFunction};
use crate::math;
use crate::{Error, Result};

/// Nonincreasing radial profile `r ↦ f(r) ≥ 0`, or an expression built from
/// one. `level_radius(y)` is the radius of the ball `{f > y}`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    Zero,
    /// `height·1_{B(0, radius)}`.
    Indicator {
        radius: f64,
        height: f64,
    },
    /// `r^{−s}`.
    Power {
        s: f64,
    },
    /// `r^{−s}·(1 + |ln r|)^{−k}`; nonincreasing when `s ≥ k`.
    LogPower {
        s: f64,
        k: f64,
    },
    /// `c·f`.
    Scaled {
        c: f64,
        inner: Box<RadialProfile>,
    },
    /// `x ↦ f(x/λ)`.
    Dilated {
        lambda: f64,
        inner: Box<RadialProfile>,
    },
    /// `min(f, j)·1_{B(0, j)}`.
    Truncated {
        j: f64,
        inner: Box<RadialProfile>,
    },
    /// `f − min(f, j)·1_{B(0, j)}`; not monotone in `r`.
    Residual {
        j: f64,
        inner: Box<RadialProfile>,
    },
}

impl RadialProfile {
    /// Profile value at radius `r > 0`.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Indicator { radius, height } => {
                if r < *radius {
                    *height
                } else {
                    0.0
                }
            }
            RadialProfile::Power { s } => math::powf(r, -s),
            RadialProfile::LogPower { s, k } => math::powf(r, -s) * math::powf(1.0 + math::ln(r).abs(), -k),
            RadialProfile::Scaled { c, inner } => c * inner.value(r),
            RadialProfile::Dilated { lambda, inner } => inner.value(r / lambda),
            RadialProfile::Truncated { j, inner } => {
                if r < *j {
                    inner.value(r).abs().min(*j)
                } else {
                    0.0
                }
            }
            RadialProfile::Residual { j, inner } => {
                let f = inner.value(r);
                if r < *j {
                    f - f.abs().min(*j) * f.signum()
                } else {
                    f
                }
            }
        }
    }

    /// Radius of `{|f| > y}` for `y > 0`, or `None` when that set is not a
    /// centered ball.
    pub fn level_radius(&self, y: f64) -> Option<f64> {
        match self {
            RadialProfile::Zero => Some(0.0),
            RadialProfile::Indicator { radius, height } => Some(if y < height.abs() { *radius } else { 0.0 }),
            RadialProfile::Power { s } => Some(math::powf(y, -1.0 / s)),
            RadialProfile::LogPower { s, k } => Some(log_power_radius(*s, *k, y)),
            RadialProfile::Scaled { c, inner } => {
                if *c == 0.0 {
                    Some(0.0)
                } else {
                    inner.level_radius(y / c.abs())
                }
            }
            RadialProfile::Dilated { lambda, inner } => inner.level_radius(y).map(|r| lambda * r),
            RadialProfile::Truncated { j, inner } => {
                if y >= *j {
                    Some(0.0)
                } else {
                    inner.level_radius(y).map(|r| r.min(*j))
                }
            }
            RadialProfile::Residual { .. } => None,
        }
    }

    /// `d(f, y)` on `R^m`.
    pub fn distribution(&self, dim: usize, y: f64) -> Result<f64> {
        let alpha = unit_ball_volume(dim);
        match self {
            RadialProfile::Scaled { c, inner } if *c != 0.0 => inner.distribution(dim, y / c.abs()),
            RadialProfile::Dilated { lambda, inner } => {
                Ok(math::powi(*lambda, dim as i32) * inner.distribution(dim, y)?)
            }
            RadialProfile::Residual { j, inner } => {
                // Inside B(0, j) the residual is (|f| − j)_+, outside it is f.
                let inner_part = inner.level_radius(y + j).ok_or(Error::Invalid("profile is not monotone"))?;
                let outer = inner.level_radius(y).ok_or(Error::Invalid("profile is not monotone"))?;
                let m = dim as i32;
                let ball = math::powi(inner_part.min(*j), m);
                let shell = (math::powi(outer, m) - math::powi(*j, m)).max(0.0);
                Ok(alpha * (ball + shell))
            }
            _ => {
                let r = self.level_radius(y).ok_or(Error::Invalid("profile is not monotone"))?;
                Ok(alpha * math::powi(r, dim as i32))
            }
        }
    }
}

/// Solves `−s·t − k·ln(1 + |t|) = ln y` for `t = ln r` by bisection.
fn log_power_radius(s: f64, k: f64, y: f64) -> f64 {
    let target = math::ln(y);
    let g = |t: f64| -s * t - k * math::ln(1.0 + t.abs());
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g(lo) <= target {
        lo *= 2.0;
    }
    while g(hi) >= target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if g(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    math::exp(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// Cell values with a common cell measure; `radii` are the distances of
    /// the cell centers from the origin.
    Grid {
        values: Vec<f64>,
        cell_measure: f64,
        radii: Vec<f64>,
    },
    Radial {
        dim: usize,
        profile: RadialProfile,
    },
}

impl FunctionSpec {
    pub fn from_domain(domain: &GridDomain, f: &NodeFunction, mode: Mode) -> Result<Self> {
        domain.check_nodes(f)?;
        let zero = [0.0; 3];
        let scale = domain.length_scale(mode) / domain.h();
        let radii = (0..domain.len()).map(|i| math::dist(&domain.center(i), &zero) * scale).collect();
        Ok(FunctionSpec::Grid { values: f.0.clone(), cell_measure: domain.cell_measure(mode), radii })
    }

    /// `|x|^{−m/q}`: in `L_{q,∞}` but not in `L_{q,0}`.
    pub fn critical_power(dim: usize, q: f64) -> Self {
        FunctionSpec::Radial { dim, profile: RadialProfile::Power { s: dim as f64 / q } }
    }

    /// `|x|^{−m/q}·(1 + |ln|x||)^{−1/q}`: in `L_{q,0}` but not in `L_q`.
    pub fn log_corrected_power(dim: usize, q: f64) -> Self {
        FunctionSpec::Radial { dim, profile: RadialProfile::LogPower { s: dim as f64 / q, k: 1.0 / q } }
    }

    /// Indicator of the unit ball.
    pub fn unit_ball(dim: usize) -> Self {
        FunctionSpec::Radial { dim, profile: RadialProfile::Indicator { radius: 1.0, height: 1.0 } }
    }

    /// `d(f, y) = |{|f| > y}|`.
    pub fn distribution(&self, y: f64) -> Result<f64> {
        match self {
            FunctionSpec::Grid { values, cell_measure, .. } => {
                Ok(values.iter().filter(|v| v.abs() > y).count() as f64 * cell_measure)
            }
            FunctionSpec::Radial { dim, profile } => profile.distribution(*dim, y),
        }
    }
}

fn check_exponent(q: f64) -> Result<()> {
    if q > 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::BadExponent)
    }
}

/// `ε_q(f, y) = d(f, y)·y^q`.
pub fn epsilon_q(f: &FunctionSpec, q: f64, y: f64) -> Result<f64> {
    check_exponent(q)?;
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Invalid("level must be positive"));
    }
    Ok(f.distribution(y)? * math::powf(y, q))
}

/// `n` levels per decade from `10^lo` to `10^hi`, both included.
pub fn log_grid(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
    let steps = (hi - lo) as usize * per_decade;
    (0..=steps).map(|k| math::powf(10.0, lo as f64 + k as f64 / per_decade as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakThresholds {
    /// `L_q` needs `ε` to decay at both ends at least like `y^{±margin}`.
    pub power_margin: f64,
    /// `L_{q,0}` accepts an end where `ε` drops by at least this factor per
    /// decade.
    pub decade_ratio: f64,
    /// ... or where its end value is below this fraction of `sup ε`.
    pub vanish_fraction: f64,
    /// Smallest accepted span of the level grid, in decades.
    pub min_decades: f64,
}

impl Default for WeakThresholds {
    fn default() -> Self {
        WeakThresholds { power_margin: 0.1, decade_ratio: 0.99, vanish_fraction: 1e-3, min_decades: 6.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakVerdict {
    Lq,
    Lq0,
    LqInf,
}

impl WeakVerdict {
    pub fn name(self) -> &'static str {
        match self {
            WeakVerdict::Lq => "Lq",
            WeakVerdict::Lq0 => "Lq0",
            WeakVerdict::LqInf => "LqInf",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakLqProfile {
    pub q: f64,
    pub levels: Vec<f64>,
    pub values: Vec<f64>,
    /// `sup_y ε^{1/q}` over the grid.
    pub quasi_norm: f64,
    /// Slopes of `log ε` against `log y` fitted over the lowest and highest
    /// decade; `±∞` when `ε` vanishes there.
    pub low_slope: f64,
    pub high_slope: f64,
    pub verdict: Option<WeakVerdict>,
    /// Always true: the verdict is read off finitely many levels.
    pub diagnostic: bool,
    pub thresholds: WeakThresholds,
}

fn end_slope(levels: &[f64], values: &[f64], low: bool) -> f64 {
    let (first, last) = (levels[0], levels[levels.len() - 1]);
    let (xs, ys): (Vec<f64>, Vec<f64>) = levels
        .iter()
        .zip(values)
        .filter(|(y, e)| **e > 0.0 && if low { **y <= first * 10.0 } else { **y >= last / 10.0 })
        .map(|(y, e)| (math::log10(*y), math::log10(*e)))
        .unzip();
    let vanished = if low { f64::INFINITY } else { f64::NEG_INFINITY };
    if xs.len() < 2 {
        return vanished;
    }
    math::ls_slope(&xs, &ys).unwrap_or(vanished)
}

pub fn classify_weak(f: &FunctionSpec, q: f64, levels: &[f64], thresholds: WeakThresholds) -> Result<WeakLqProfile> {
    check_exponent(q)?;
    if levels.len() < 2 || levels.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0] && w[1].is_finite())) {
        return Err(Error::Invalid("levels must be positive and increasing"));
    }
    if math::log10(levels[levels.len() - 1] / levels[0]) < thresholds.min_decades - 1e-9 {
        return Err(Error::GridTooNarrow);
    }
    let values = levels.iter().map(|&y| epsilon_q(f, q, y)).collect::<Result<Vec<f64>>>()?;
    let sup = values.iter().cloned().fold(0.0, f64::max);
    let low_slope = end_slope(levels, &values, true);
    let high_slope = end_slope(levels, &values, false);

    let verdict = if !sup.is_finite() {
        None
    } else if sup == 0.0 || (low_slope > thresholds.power_margin && high_slope < -thresholds.power_margin) {
        Some(WeakVerdict::Lq)
    } else {
        let per_decade = -math::log10(thresholds.decade_ratio);
        let floor = thresholds.vanish_fraction * sup;
        let low_ok = values[0] <= floor || low_slope >= per_decade;
        let high_ok = values[values.len() - 1] <= floor || high_slope <= -per_decade;
        Some(if low_ok && high_ok { WeakVerdict::Lq0 } else { WeakVerdict::LqInf })
    };
    Ok(WeakLqProfile {
        q,
        levels: levels.to_vec(),
        values,
        quasi_norm: math::powf(sup, 1.0 / q),
        low_slope,
        high_slope,
        verdict,
        diagnostic: true,
        thresholds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    /// `min(|f|, j)·sign f·1_{B(0, j)}`.
    pub approximant: FunctionSpec,
    /// `sup_y ε_q(f − f_j, y)^{1/q}` over the level grid.
    pub estimate: f64,
}

/// Height-`j`, ball-`j` truncation and its weak-`L^q` distance from `f`.
pub fn truncation_approximant(f: &FunctionSpec, j: f64, q: f64, levels: &[f64]) -> Result<Truncation> {
    check_exponent(q)?;
    if !(j >= 1.0 && j.is_finite()) {
        return Err(Error::Invalid("truncation index must be at least 1"));
    }
    let (approximant, residual) = match f {
        FunctionSpec::Grid { values, cell_measure, radii } => {
            let cut: Vec<f64> =
                values.iter().zip(radii).map(|(v, r)| if *r < j { v.clamp(-j, j) } else { 0.0 }).collect();
            let rest: Vec<f64> = values.iter().zip(&cut).map(|(v, c)| v - c).collect();
            let spec = |values| FunctionSpec::Grid { values, cell_measure: *cell_measure, radii: radii.clone() };
            (spec(cut), spec(rest))
        }
        FunctionSpec::Radial { dim, profile } => {
            if profile.level_radius(1.0).is_none() {
                return Err(Error::Invalid("profile is not monotone"));
            }
            let inner = Box::new(profile.clone());
            (
                FunctionSpec::Radial { dim: *dim, profile: RadialProfile::Truncated { j, inner: inner.clone() } },
                FunctionSpec::Radial { dim: *dim, profile: RadialProfile::Residual { j, inner } },
            )
        }
    };
    let mut sup: f64 = 0.0;
    for &y in levels {
        sup = sup.max(epsilon_q(&residual, q, y)?);
    }
    Ok(Truncation { approximant, estimate: math::powf(sup, 1.0 / q) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Connectivity;
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn zero_function() {
        let z = FunctionSpec::Radial { dim: 2, profile: RadialProfile::Zero };
        for y in [1e-3, 1.0, 1e3] {
            assert_eq!(epsilon_q(&z, 2.0, y).unwrap(), 0.0);
        }
        let p = classify_weak(&z, 2.0, &log_grid(-4, 4, 5), WeakThresholds::default()).unwrap();
        assert_eq!(p.verdict, Some(WeakVerdict::Lq));
        assert_eq!(truncation_approximant(&z, 3.0, 2.0, &log_grid(-4, 4, 5)).unwrap().estimate, 0.0);
    }

    #[test]
    fn ball_indicator() {
        let f = FunctionSpec::unit_ball(2);
        for q in [1.5, 2.0, 3.0] {
            assert!((epsilon_q(&f, q, 0.5).unwrap() - PI * math::powf(0.5, q)).abs() < 1e-15);
            assert_eq!(epsilon_q(&f, q, 1.0).unwrap(), 0.0);
            assert_eq!(epsilon_q(&f, q, 2.0).unwrap(), 0.0);
        }
        let t = truncation_approximant(&f, 1.0, 2.0, &log_grid(-3, 3, 10)).unwrap();
        assert_eq!(t.estimate, 0.0);
    }

    #[test]
    fn critical_power_is_flat() {
        for dim in 1..=3 {
            let g = FunctionSpec::critical_power(dim, 2.0);
            let alpha = unit_ball_volume(dim);
            for y in log_grid(-3, 3, 4) {
                let e = epsilon_q(&g, 2.0, y).unwrap();
                assert!((e - alpha).abs() <= 1e-12 * alpha);
            }
        }
    }

    #[test]
    fn log_power_inverts() {
        let profile = RadialProfile::LogPower { s: 1.0, k: 0.5 };
        for y in [1e-6, 0.1, 1.0, 7.0, 1e6] {
            let r = profile.level_radius(y).unwrap();
            assert!((profile.value(r) - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn scaling_laws() {
        let base = RadialProfile::LogPower { s: 1.0, k: 0.5 };
        let f = FunctionSpec::Radial { dim: 2, profile: base.clone() };
        let scaled =
            FunctionSpec::Radial { dim: 2, profile: RadialProfile::Scaled { c: -3.0, inner: Box::new(base.clone()) } };
        let dilated =
            FunctionSpec::Radial { dim: 2, profile: RadialProfile::Dilated { lambda: 2.5, inner: Box::new(base) } };
        for y in [0.01, 0.3, 4.0] {
            let e = epsilon_q(&scaled, 2.0, y).unwrap();
            let expected = epsilon_q(&f, 2.0, y / 3.0).unwrap() * 9.0;
            assert!((e - expected).abs() <= 1e-12 * expected);
            let e = epsilon_q(&dilated, 2.0, y).unwrap();
            let expected = epsilon_q(&f, 2.0, y).unwrap() * 6.25;
            assert!((e - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn grid_backend_is_a_right_continuous_step() {
        let d = GridDomain::rectangle(3, 1, 0.5, Connectivity::Axis).unwrap();
        let f = FunctionSpec::from_domain(&d, &NodeFunction(vec![1.0, -2.0, 0.5]), Mode::Mesh).unwrap();
        assert_eq!(f.distribution(0.5).unwrap(), 0.5);
        assert_eq!(f.distribution(0.4999).unwrap(), 0.75);
        assert_eq!(f.distribution(1.0).unwrap(), 0.25);
        assert_eq!(f.distribution(2.0).unwrap(), 0.0);
        let t = truncation_approximant(&f, 1.0, 2.0, &log_grid(-2, 2, 10)).unwrap();
        let FunctionSpec::Grid { values, .. } = &t.approximant else { panic!() };
        // the third center sits at radius 1.25, outside the unit ball
        assert_eq!(values, &vec![1.0, -1.0, 0.0]);
    }

    #[test]
    fn canonical_chain() {
        let levels = log_grid(-8, 8, 20);
        let th = WeakThresholds::default();
        let verdict = |f: &FunctionSpec| classify_weak(f, 2.0, &levels, th).unwrap().verdict;
        assert_eq!(verdict(&FunctionSpec::unit_ball(2)), Some(WeakVerdict::Lq));
        assert_eq!(verdict(&FunctionSpec::log_corrected_power(2, 2.0)), Some(WeakVerdict::Lq0));
        assert_eq!(verdict(&FunctionSpec::critical_power(2, 2.0)), Some(WeakVerdict::LqInf));
    }

    #[test]
    fn truncations_improve() {
        let levels = log_grid(-8, 8, 20);
        let f = FunctionSpec::log_corrected_power(2, 2.0);
        let e: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&j| truncation_approximant(&f, j, 2.0, &levels).unwrap().estimate)
            .collect();
        assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    }

    #[test]
    fn errors() {
        let f = FunctionSpec::unit_ball(2);
        assert_eq!(epsilon_q(&f, 1.0, 1.0).unwrap_err(), Error::BadExponent);
        assert_eq!(
            classify_weak(&f, 2.0, &log_grid(-2, 2, 5), WeakThresholds::default()).unwrap_err(),
            Error::GridTooNarrow
        );
    }
}
