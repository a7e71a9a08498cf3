//! Even `C¹` bump equal to 1 on `[−1/2, 1/2]` and vanishing outside
//! `(−3/4, 3/4)`, with slope at most 5.
//!
//! A trapezoid ramps from 1 to 0 with slope `s` over a window of width `1/s`
//! centered at `5/8`; averaging it over a box of width `w` makes it `C¹`
//! without raising the slope.

use crate::{Error, Result};

const CENTER: f64 = 0.625;
const PLATEAU: f64 = 0.5;
const SUPPORT: f64 = 0.75;
pub const MAX_SLOPE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    slope: f64,
    width: f64,
    /// Ramp window `[lo, hi]` of the trapezoid.
    lo: f64,
    hi: f64,
}

impl Default for BumpSpec {
    fn default() -> Self {
        Self::new(4.5, 0.01).expect("default bump is feasible")
    }
}

impl BumpSpec {
    pub fn new(slope: f64, width: f64) -> Result<Self> {
        if !(slope > 0.0) || slope > MAX_SLOPE || !(width >= 0.0) {
            return Err(Error::InfeasibleSpec);
        }
        let half = 0.5 / slope;
        let (lo, hi) = (CENTER - half, CENTER + half);
        if lo - width / 2.0 < PLATEAU || hi + width / 2.0 >= SUPPORT {
            return Err(Error::InfeasibleSpec);
        }
        Ok(BumpSpec { slope, width, lo, hi })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// `φ(t) = 0` for `|t| ≥` this radius.
    pub fn support_radius(&self) -> f64 {
        self.hi + self.width / 2.0
    }

    fn trapezoid(&self, t: f64) -> f64 {
        (self.slope * (self.hi - t.abs())).clamp(0.0, 1.0)
    }

    /// `∫_0^t` of the trapezoid; odd in `t`.
    fn primitive(&self, t: f64) -> f64 {
        let x = t.abs();
        let v = if x <= self.lo {
            x
        } else if x <= self.hi {
            let r = self.hi - x;
            self.lo + (1.0 / self.slope - self.slope * r * r) / 2.0
        } else {
            self.lo + 0.5 / self.slope
        };
        v.copysign(t)
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.width == 0.0 {
            return self.trapezoid(t);
        }
        let x = t.abs();
        if x <= self.lo - self.width / 2.0 {
            return 1.0;
        }
        if x >= self.support_radius() {
            return 0.0;
        }
        let h = self.width / 2.0;
        ((self.primitive(x + h) - self.primitive(x - h)) / self.width).clamp(0.0, 1.0)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if self.width == 0.0 {
            let x = t.abs();
            return if x > self.lo && x < self.hi { -self.slope.copysign(t) } else { 0.0 };
        }
        let h = self.width / 2.0;
        (self.trapezoid(t + h) - self.trapezoid(t - h)) / self.width
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support() {
        let b = BumpSpec::default();
        assert_eq!(b.value(0.0), 1.0);
        assert_eq!(b.value(0.5), 1.0);
        assert_eq!(b.value(-0.5), 1.0);
        assert_eq!(b.value(0.75), 0.0);
        assert_eq!(b.value(-0.9), 0.0);
        assert!(b.support_radius() < 0.75);
    }

    #[test]
    fn slope_bound_and_derivative() {
        let b = BumpSpec::default();
        let n = 100_000;
        let mut max = 0.0f64;
        for k in 0..=n {
            let t = 0.5 + 0.25 * k as f64 / n as f64;
            max = max.max(b.derivative(t).abs());
        }
        assert!(max <= 5.0 && max <= b.slope() + 1e-12);
        for k in 1..200 {
            let t = 0.5 + 0.25 * k as f64 / 200.0;
            let fd = (b.value(t + 1e-7) - b.value(t - 1e-7)) / 2e-7;
            assert!((fd - b.derivative(t)).abs() < 1e-5, "t = {t}");
        }
    }

    #[test]
    fn even_and_monotone() {
        let b = BumpSpec::default();
        let mut prev = 1.0;
        for k in 0..=1000 {
            let t = k as f64 * 0.001;
            assert_eq!(b.value(t), b.value(-t));
            assert!(b.value(t) <= prev + 1e-15);
            prev = b.value(t);
        }
    }

    #[test]
    fn infeasible_specs() {
        assert_eq!(BumpSpec::new(6.0, 0.01).unwrap_err(), Error::InfeasibleSpec);
        assert_eq!(BumpSpec::new(4.0, 0.0).unwrap_err(), Error::InfeasibleSpec);
        assert_eq!(BumpSpec::new(4.5, 0.05).unwrap_err(), Error::InfeasibleSpec);
        assert!(BumpSpec::new(5.0, 0.0).is_ok());
    }
}
