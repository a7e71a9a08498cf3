//! Koch-type curves with a different generator angle at every level.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::AtomicMeasure;
use crate::math;
use crate::{Error, Result};

/// Generator angle per level `j = 1, 2, …`.
#[derive(Debug, Clone, PartialEq)]
pub enum AngleSequence {
    Constant(f64),
    /// `θ_j = scale·j^{−exponent}`.
    PowerDecay {
        scale: f64,
        exponent: f64,
    },
    Explicit(Vec<f64>),
}

impl AngleSequence {
    pub fn angle(&self, j: usize) -> Option<f64> {
        match self {
            AngleSequence::Constant(t) => Some(*t),
            AngleSequence::PowerDecay { scale, exponent } => Some(scale * math::powf(j as f64, -exponent)),
            AngleSequence::Explicit(list) => list.get(j.checked_sub(1)?).copied(),
        }
    }

    /// Whether `Π_j 2/(1 + cos θ_j)` stays bounded as `j → ∞`. The product
    /// converges iff `Σ θ_j²` does, so this is decided by the rule; explicit
    /// lists give no information about later levels.
    pub fn bounded_length(&self) -> Option<bool> {
        match self {
            AngleSequence::Constant(_) => Some(false),
            AngleSequence::PowerDecay { exponent, .. } => Some(*exponent > 0.5),
            AngleSequence::Explicit(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KochSpec {
    pub angles: AngleSequence,
    pub level: usize,
    pub a: [f64; 2],
    pub b: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct KochCurve {
    /// `4^n + 1` vertices from `a` to `b`.
    pub polyline: Vec<[f64; 2]>,
    /// One atom of weight `4^{−n}` at each segment midpoint.
    pub measure: AtomicMeasure,
    /// Sum of segment lengths.
    pub length: f64,
    /// `|b − a|·Π_{j ≤ n} 2/(1 + cos θ_j)`.
    pub predicted_length: f64,
    /// See [`AngleSequence::bounded_length`].
    pub bounded_length: Option<bool>,
}

/// Level-`n` curve: every segment `[p, q]` becomes `p, p + s·u, apex,
/// q − s·u, q` with `s = |q − p| / (2(1 + cos θ))`, the apex on the left.
pub fn koch_curve(spec: &KochSpec) -> Result<KochCurve> {
    let mut angles = Vec::with_capacity(spec.level);
    for j in 1..=spec.level {
        match spec.angles.angle(j) {
            Some(t) if t > 0.0 && t < FRAC_PI_2 => angles.push(t),
            _ => return Err(Error::BadAngle),
        }
    }
    let mut poly = alloc::vec![spec.a, spec.b];
    for &theta in &angles {
        let (c, s) = (math::cos(theta), math::sin(theta));
        let mut next = Vec::with_capacity(4 * (poly.len() - 1) + 1);
        next.push(poly[0]);
        for w in poly.windows(2) {
            let (p, q) = (w[0], w[1]);
            let dx = q[0] - p[0];
            let dy = q[1] - p[1];
            let k = 1.0 / (2.0 * (1.0 + c));
            let (sx, sy) = (dx * k, dy * k);
            let first = [p[0] + sx, p[1] + sy];
            let apex = [first[0] + c * sx - s * sy, first[1] + s * sx + c * sy];
            next.extend([first, apex, [q[0] - sx, q[1] - sy], q]);
        }
        poly = next;
    }
    let n_seg = poly.len() - 1;
    let weight = 1.0 / n_seg as f64;
    let mut length = 0.0;
    let mut atoms = Vec::with_capacity(n_seg);
    for w in poly.windows(2) {
        length += math::sqrt(math::powi(w[1][0] - w[0][0], 2) + math::powi(w[1][1] - w[0][1], 2));
        atoms.push(([(w[0][0] + w[1][0]) / 2.0, (w[0][1] + w[1][1]) / 2.0, 0.0], weight));
    }
    let base = math::sqrt(math::powi(spec.b[0] - spec.a[0], 2) + math::powi(spec.b[1] - spec.a[1], 2));
    let predicted_length = angles.iter().fold(base, |acc, &t| acc * 2.0 / (1.0 + math::cos(t)));
    Ok(KochCurve {
        polyline: poly,
        measure: AtomicMeasure::new(2, atoms)?,
        length,
        predicted_length,
        bounded_length: spec.angles.bounded_length(),
    })
}
