//! Worked examples that span several modules.

use divflow_core::distance::boundary_distances;
use divflow_core::flows::min_cost_flow;
use divflow_core::measures::{eta, koch_curve, upper_regularity_profile, AngleSequence, AtomicMeasure, KochSpec};
use divflow_core::norms::{cheeger_constant, poincare_bracket, CheegerMethod};
use divflow_core::{Connectivity, GridDomain, Mode, NodeFunction};

/// `sup_x (1/δ)·|μ|(B(x, τδ))/(τδ)` over cell centers by a linear scan.
fn eta_by_scan(mu: &AtomicMeasure, d: &GridDomain, tau: f64) -> f64 {
    let deltas = boundary_distances(d);
    (0..d.len())
        .map(|i| {
            let x = d.center(i);
            let r = tau * deltas[i];
            let mass: f64 = mu
                .atoms()
                .iter()
                .filter(|a| ((a.0[0] - x[0]).powi(2) + (a.0[1] - x[1]).powi(2)).sqrt() <= r)
                .map(|a| a.1.abs())
                .sum();
            mass / (deltas[i] * r)
        })
        .fold(0.0, f64::max)
}

#[test]
fn segment_eta_does_not_vanish() {
    // unit linear density on the middle half of the midline: a ball of radius
    // τδ inside the segment carries 2τδ, so the ratio is 2/δ, largest at the
    // first center whose ball clears the end, δ = 1/(4(1 − τ))
    let n = 1000;
    let mu =
        AtomicMeasure::new(2, (0..n).map(|k| ([0.25 + 0.5 * (k as f64 + 0.5) / n as f64, 0.5, 0.0], 0.5 / n as f64)))
            .unwrap();
    let d = GridDomain::rectangle(65, 65, 1.0 / 65.0, Connectivity::Full).unwrap();
    let mut values = Vec::new();
    for tau in [0.2, 0.1, 0.05] {
        let e = eta(&mu, &d, tau).unwrap();
        let oracle = eta_by_scan(&mu, &d, tau);
        assert!((e - oracle).abs() <= 1e-12 * oracle, "{e} vs {oracle}");
        assert!((e / (8.0 * (1.0 - tau)) - 1.0).abs() < 0.05, "τ = {tau}: {e}");
        values.push(e);
    }
    assert!(values[2] > values[0]);
}

#[test]
fn koch_profile_decays_towards_small_radii() {
    let spec = KochSpec {
        angles: AngleSequence::PowerDecay { scale: 1.0, exponent: 0.5 },
        level: 8,
        a: [0.0, 0.0],
        b: [1.0, 0.0],
    };
    let k = koch_curve(&spec).unwrap();
    assert_eq!(k.bounded_length, Some(false));
    let radii: Vec<f64> = (1..=10).rev().map(|j| 0.5f64.powi(j)).collect();
    let p = upper_regularity_profile(&k.measure, &radii).unwrap();
    assert!(p.slope.unwrap() > 0.0);
    assert_eq!(p.vanishing, Some(true));
    assert!(p.values[0] < p.values[radii.len() - 2]);
}

#[test]
fn solve_l1_on_a_dipole_matches_the_distance() {
    let d = GridDomain::rectangle(6, 6, 1.0, Connectivity::Full).unwrap();
    let mut f = NodeFunction::zeros(36);
    f[35] = 1.0;
    f[0] = -1.0;
    let sol = min_cost_flow(&d, &f, Mode::Graph).unwrap();
    assert!((sol.cost - 5.0 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn poincare_bracket_contains_cheeger_constant() {
    let rows: [&[bool]; 4] = [
        &[true, true, true, true],
        &[true, false, false, true],
        &[true, false, false, true],
        &[true, true, true, true],
    ];
    let d = GridDomain::from_rows(&rows, 1.0, Connectivity::Axis).unwrap();
    let h = cheeger_constant(&d, Mode::Graph, &CheegerMethod::Exact).unwrap().value;
    let b = poincare_bracket(&d, Mode::Graph, 1.0, &CheegerMethod::Exact).unwrap();
    assert!(b.lower >= h - 1e-12);
    assert_eq!(b.upper, Some(2.0 * h));
    // a ring of 12 cells: cutting it into two arcs of 6 crosses two edges
    assert_eq!(h, 3.0);
}
