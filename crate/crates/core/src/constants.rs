//! Dimensional constants of the isoperimetric / Sobolev inequality.

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub dim: usize,
    /// Volume of the unit ball, `π^{m/2} / Γ(m/2 + 1)`.
    pub alpha: f64,
    /// Sharp Gagliardo–Nirenberg–Sobolev constant `m^{-1}·α(m)^{-1/m}`.
    pub kappa: f64,
    /// Sobolev exponent `1* = m / (m − 1)`, the Hölder conjugate of `m`.
    pub one_star: f64,
}

/// Volume of the unit ball of `R^m` (any `m ≥ 1`).
pub fn unit_ball_volume(m: usize) -> f64 {
    let half = m as f64 / 2.0;
    math::powf(core::f64::consts::PI, half) / math::tgamma(half + 1.0)
}

pub fn sobolev_constants(m: usize) -> Result<Constants> {
    if m < 2 {
        return Err(Error::DimensionTooSmall(m));
    }
    let md = m as f64;
    let alpha = unit_ball_volume(m);
    Ok(Constants { dim: m, alpha, kappa: math::powf(alpha, -1.0 / md) / md, one_star: md / (md - 1.0) })
}
