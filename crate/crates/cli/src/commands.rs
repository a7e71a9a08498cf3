//! One function per subcommand. Each writes its CSV files and returns the
//! JSON summary.

use divflow_core::calculus::perimeter;
use divflow_core::constants::sobolev_constants;
use divflow_core::distance::{boundary_distances, distances_from, graph_distance};
use divflow_core::flows::{
    chebyshev_solve, decompose_pencil, gale_hoffman_brute, min_cost_flow, FlowSolution, BRUTE_FORCE_LIMIT,
};
use divflow_core::measures::{
    koch_curve, measure_stats, mz_norm_above, rasterize, upper_regularity_profile, AngleSequence, AtomicMeasure,
    CenterStrategy, KochSpec,
};
use divflow_core::norms::{
    cheeger_constant, cheeger_ratio, classify_weak, free_norm, indicator_ratio, log_grid, poincare_bracket,
    rooms_and_corridor, sch_norm, truncation_approximant, CheegerMethod, FunctionSpec,
};
use divflow_core::whitney::{
    cell_candidates, cover_report, greedy_scattered_from, BumpSpec, PartitionOfUnity, ScanOrder,
};
use divflow_core::{Connectivity, GridDomain, Mode, NodeFunction, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::error::CliError;
use crate::io::{self, DomainFile, Output};
use crate::pool;

/// Relative agreement demanded by `--check` for sup-norm values.
const CHECK_LINF: f64 = 1e-6;
/// Relative agreement demanded by `--check` for identities.
const CHECK_EXACT: f64 = 1e-9;

pub struct Ctx {
    pub out: Output,
    pub seed: u64,
    pub check: bool,
    pub mode: Mode,
    pub tol: f64,
}

/// JSON number, or a string for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Graph => "graph",
        Mode::Mesh => "mesh",
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Check(what()))
    }
}

fn header(command: &str, ctx: &Ctx, d: &GridDomain) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("mode".into(), json!(mode_name(ctx.mode)));
    m.insert("cells".into(), json!(d.len()));
    m.insert("edges".into(), json!(d.edges().len()));
    m.insert("components".into(), json!(d.component_count()));
    m
}

fn extend(mut m: Map<String, Value>, rest: Value) -> Value {
    if let Value::Object(r) = rest {
        m.extend(r);
    }
    Value::Object(m)
}

pub fn has_domain(a: &DomainArgs) -> bool {
    a.domain.is_some() || a.rect.is_some()
}

pub fn load_domain(a: &DomainArgs) -> Result<GridDomain, CliError> {
    let mut file = match (&a.domain, &a.rect) {
        (Some(path), _) => io::read_domain_file(path)?,
        (None, Some(r)) => rect_file(r)?,
        (None, None) => return Err(CliError::Usage("a domain is required (--domain FILE or --rect NXxNY)".into())),
    };
    if let Some(h) = a.h {
        file.h = h;
    }
    if let Some(c) = a.connectivity {
        file.connectivity = c;
    }
    if let Some(b) = &a.basepoint {
        let dim = file.dim.unwrap_or_else(|| file.cells.first().map_or(2, Vec::len));
        file.basepoint = Some(io::parse_cell(b)?[..dim].to_vec());
    }
    file.build()
}

fn rect_file(spec: &str) -> Result<DomainFile, CliError> {
    let bad = || CliError::Usage(format!("expected NXxNY, got {spec:?}"));
    let (nx, ny) = spec.split_once('x').ok_or_else(bad)?;
    let nx: i32 = nx.trim().parse().map_err(|_| bad())?;
    let ny: i32 = ny.trim().parse().map_err(|_| bad())?;
    let cells = (0..ny).flat_map(|j| (0..nx).map(move |i| vec![i, j])).collect();
    Ok(DomainFile { dim: Some(2), cells, h: 1.0, connectivity: 8, basepoint: None })
}

fn cell_index(d: &GridDomain, s: &str) -> Result<usize, CliError> {
    Ok(d.index_of(&io::parse_cell(s)?).ok_or(divflow_core::Error::CellOutside)?)
}

/// Right-hand side as a density with respect to the cell measure.
fn load_source(ctx: &Ctx, d: &GridDomain, s: &SourceArgs) -> Result<NodeFunction, CliError> {
    let cm = d.cell_measure(ctx.mode);
    if let Some(path) = &s.f {
        io::read_node_function(path, d.len())
    } else if let Some(path) = &s.atoms {
        Ok(rasterize(&io::read_atoms(path)?, d, ctx.mode)?)
    } else if let Some(spec) = &s.dipole {
        let (a, b) = spec.split_once(':').ok_or_else(|| CliError::Usage(format!("expected i,j:k,l, got {spec:?}")))?;
        let (a, b) = (cell_index(d, a)?, cell_index(d, b)?);
        let mut f = NodeFunction::zeros(d.len());
        f[a] += 1.0 / cm;
        f[b] -= 1.0 / cm;
        Ok(f)
    } else if s.random {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut f = NodeFunction((0..d.len()).map(|_| rng.random_range(-1.0..=1.0)).collect());
        let sums = d.component_sums(&f);
        let mut sizes = vec![0usize; sums.len()];
        for i in 0..d.len() {
            sizes[d.component(i)] += 1;
        }
        for i in 0..d.len() {
            let c = d.component(i);
            f[i] -= sums[c] / sizes[c] as f64;
        }
        Ok(f)
    } else {
        Err(CliError::Usage("a right-hand side is required (--f, --atoms, --dipole or --random)".into()))
    }
}

pub fn domain(ctx: &Ctx, action: &DomainAction) -> Result<Value, CliError> {
    match action {
        DomainAction::Build(a) => {
            let d = load_domain(a)?;
            ctx.out.json("domain.json", &DomainFile::from_domain(&d))?;
            if d.dim() == 2 {
                ctx.out.text("mask.pgm", &io::mask_pgm(&d))?;
            }
            write_edges(ctx, &d)?;
            Ok(extend(header("domain build", ctx, &d), domain_facts(&d)))
        }
        DomainAction::Info(a) => {
            let d = load_domain(a)?;
            let delta = boundary_distances(&d);
            let from_base = distances_from(&d, d.basepoint(), ctx.mode);
            #[derive(Serialize)]
            struct Row {
                index: usize,
                i: i32,
                j: i32,
                k: i32,
                component: usize,
                boundary_distance: f64,
                basepoint_distance: f64,
            }
            ctx.out.csv(
                "cells.csv",
                (0..d.len()).map(|idx| {
                    let c = d.cell(idx);
                    Row {
                        index: idx,
                        i: c[0],
                        j: c[1],
                        k: c[2],
                        component: d.component(idx),
                        boundary_distance: delta[idx],
                        basepoint_distance: from_base[idx],
                    }
                }),
            )?;
            let inner = delta.iter().cloned().fold(0.0, f64::max);
            Ok(extend(
                header("domain info", ctx, &d),
                extend(domain_facts(&d).as_object().cloned().unwrap(), json!({ "max_boundary_distance": inner })),
            ))
        }
    }
}

fn domain_facts(d: &GridDomain) -> Value {
    let (lo, extent) = d.bounds();
    json!({
        "dim": d.dim(),
        "h": d.h(),
        "connectivity": d.connectivity().neighbors(d.dim()),
        "connected": d.is_connected(),
        "basepoint": d.cell(d.basepoint())[..d.dim()],
        "bounds_lo": lo[..d.dim()],
        "bounds_extent": extent[..d.dim()],
    })
}

fn write_edges(ctx: &Ctx, d: &GridDomain) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Row {
        index: usize,
        tail: usize,
        head: usize,
        length: f64,
    }
    ctx.out.csv(
        "edges.csv",
        d.edges().iter().enumerate().map(|(k, e)| Row {
            index: k,
            tail: e.tail,
            head: e.head,
            length: d.edge_length(k, ctx.mode),
        }),
    )
}

/// Duality gap, Lipschitz bound, residual, and the graph distance when the
/// supply is a dipole.
fn check_l1(d: &GridDomain, sol: &FlowSolution) -> Result<(), CliError> {
    let dual = sol.dual_value();
    ensure(rel_close(sol.cost, dual, CHECK_EXACT), || format!("cost {} but certificate {}", sol.cost, dual))?;
    let lip = sol.lipschitz_excess(d);
    ensure(lip <= CHECK_EXACT, || format!("potential exceeds the edge lengths by {lip:e}"))?;
    let res = sol.residual(d);
    ensure(res <= CHECK_EXACT * sol.supply.max_abs().max(1.0), || format!("residual {res:e}"))?;
    let support: Vec<usize> = (0..d.len()).filter(|&i| sol.supply[i] != 0.0).collect();
    if let [a, b] = support[..] {
        let (sa, sb) = (sol.supply[a], sol.supply[b]);
        if rel_close(sa, -sb, 1e-12) {
            let oracle = sa.abs() * graph_distance(d, a, b, sol.mode)?;
            ensure(rel_close(sol.cost, oracle, CHECK_EXACT), || {
                format!("cost {} but graph distance {oracle}", sol.cost)
            })?;
        }
    }
    Ok(())
}

fn check_linf(ctx: &Ctx, d: &GridDomain, f: &NodeFunction, value: f64, residual: f64) -> Result<(), CliError> {
    ensure(residual <= CHECK_EXACT * f.max_abs().max(1.0), || format!("residual {residual:e}"))?;
    if d.len() <= BRUTE_FORCE_LIMIT {
        let brute = gale_hoffman_brute(d, f, ctx.mode)?;
        ensure(rel_close(value, brute, CHECK_LINF), || format!("value {value} but enumeration gives {brute}"))?;
    }
    Ok(())
}

pub fn solve_l1(ctx: &Ctx, a: &SolveArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let f = load_source(ctx, &d, &a.source)?;
    let sol = min_cost_flow(&d, &f, ctx.mode)?;
    if ctx.check {
        check_l1(&d, &sol)?;
    }
    ctx.out.edge_field("flow.csv", &d, &sol.flow)?;
    ctx.out.node_function("potential.csv", &d, &sol.potential)?;
    Ok(extend(header("solve-l1", ctx, &d), l1_facts(&d, &sol)))
}

fn l1_facts(d: &GridDomain, sol: &FlowSolution) -> Value {
    json!({
        "value": num(sol.cost),
        "certificate": num(sol.dual_value()),
        "iterations": sol.augmentations,
        "residual": num(sol.residual(d)),
        "lipschitz_violation": num(sol.lipschitz_excess(d).max(0.0)),
    })
}

pub fn solve_linf(ctx: &Ctx, a: &SolveArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let f = load_source(ctx, &d, &a.source)?;
    let sol = chebyshev_solve(&d, &f, ctx.mode, ctx.tol)?;
    if ctx.check {
        check_linf(ctx, &d, &f, sol.value, sol.residual)?;
    }
    ctx.out.edge_field("flow.csv", &d, &sol.flow)?;
    ctx.out.cell_set("cut.csv", &d, &sol.cut)?;
    Ok(extend(
        header("solve-linf", ctx, &d),
        json!({
            "value": num(sol.value),
            "certificate": num(sol.certificate_ratio),
            "lower": num(sol.lower),
            "upper": num(sol.upper),
            "iterations": sol.iterations,
            "residual": num(sol.residual),
        }),
    ))
}

pub fn free_norm_cmd(ctx: &Ctx, a: &SolveArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let f = load_source(ctx, &d, &a.source)?;
    let norm = free_norm(&d, &f, ctx.mode)?;
    if ctx.check {
        check_l1(&d, &norm.solution)?;
    }
    ctx.out.node_function("potential.csv", &d, &norm.potential)?;
    ctx.out.edge_field("flow.csv", &d, &norm.solution.flow)?;
    let mut facts = l1_facts(&d, &norm.solution);
    facts["value"] = num(norm.value);
    facts["imbalance"] = num(f.sum() * d.cell_measure(ctx.mode));
    Ok(extend(header("free-norm", ctx, &d), facts))
}

pub fn sch_norm_cmd(ctx: &Ctx, a: &SolveArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let f = load_source(ctx, &d, &a.source)?;
    let norm = sch_norm(&d, &f, ctx.mode, ctx.tol)?;
    if ctx.check {
        check_linf(ctx, &d, &f, norm.value, norm.solution.residual)?;
    }
    ctx.out.cell_set("cut.csv", &d, &norm.cut)?;
    ctx.out.edge_field("flow.csv", &d, &norm.solution.flow)?;
    Ok(extend(
        header("sch-norm", ctx, &d),
        json!({
            "value": num(norm.value),
            "cut_ratio": num(norm.cut_ratio),
            "cut_size": norm.cut.iter().filter(|&&b| b).count(),
            "lower": num(norm.solution.lower),
            "upper": num(norm.solution.upper),
            "iterations": norm.solution.iterations,
            "residual": num(norm.solution.residual),
        }),
    ))
}

pub fn pencil(ctx: &Ctx, a: &PencilArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let (from, to) = (cell_index(&d, &a.from)?, cell_index(&d, &a.to)?);
    let cm = d.cell_measure(ctx.mode);
    let mut f = NodeFunction::zeros(d.len());
    f[to] += a.theta / cm;
    f[from] -= a.theta / cm;
    let sol = min_cost_flow(&d, &f, ctx.mode)?;
    let p = decompose_pencil(&d, &sol, from, to)?;
    let sup = p.superposition(&d);
    let superposition_error = sup.iter().zip(p.acyclic_flow.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let dist = graph_distance(&d, from, to, ctx.mode)?;
    if ctx.check {
        check_l1(&d, &sol)?;
        ensure(rel_close(p.weight_sum(), 1.0, CHECK_EXACT), || format!("weights sum to {}", p.weight_sum()))?;
        let mass = p.total_mass * p.theta.abs();
        ensure(rel_close(mass, p.acyclic_cost, CHECK_EXACT), || {
            format!("path mass {mass} but flow cost {}", p.acyclic_cost)
        })?;
        ensure(superposition_error <= CHECK_EXACT * a.theta.abs().max(1.0), || {
            format!("superposition differs by {superposition_error:e}")
        })?;
    }
    #[derive(Serialize)]
    struct Row {
        path: usize,
        weight: f64,
        length: f64,
        cells: String,
    }
    ctx.out.csv(
        "paths.csv",
        p.paths.iter().enumerate().map(|(k, w)| Row {
            path: k,
            weight: w.weight,
            length: w.length,
            cells: w
                .nodes
                .iter()
                .map(|&i| d.cell(i)[..d.dim()].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":"))
                .collect::<Vec<_>>()
                .join(" "),
        }),
    )?;
    ctx.out.edge_field("flow.csv", &d, &p.acyclic_flow)?;
    Ok(extend(
        header("pencil", ctx, &d),
        json!({
            "from": d.cell(from)[..d.dim()],
            "to": d.cell(to)[..d.dim()],
            "theta": num(p.theta),
            "paths": p.paths.len(),
            "weight_sum": num(p.weight_sum()),
            "total_mass": num(p.total_mass),
            "cost": num(sol.cost),
            "euclidean": num(p.euclidean),
            "graph_distance": num(dist),
            "lambda": num(p.lambda),
            "metric_ratio": num(p.euclidean / dist),
            "cancelled_cycles": p.cancelled_cycles,
            "superposition_error": num(superposition_error),
        }),
    ))
}

pub fn whitney(ctx: &Ctx, a: &WhitneyArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let candidates = cell_candidates(&d, a.subdivision)?;
    let order = match a.scan {
        ScanArg::Lexicographic => ScanOrder::Lexicographic,
        ScanArg::Seeded => ScanOrder::Seeded(ctx.seed),
    };
    let set = greedy_scattered_from(d.dim(), &candidates, a.tau, &order)?;
    let report = cover_report(&set, &candidates);
    let bump = BumpSpec::new(a.slope, 0.01)?;
    let pou = PartitionOfUnity::new(set, bump)?;

    // Coverage is only guaranteed on the candidate set, so samples are drawn from it.
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5eed);
    let (mut sum_error, mut grad_const) = (0.0f64, 0.0f64);
    for _ in 0..a.samples {
        let c = &candidates[rng.random_range(0..candidates.len())];
        let s: f64 = pou.eval(&c.point)?.iter().map(|v| v.1).sum();
        sum_error = sum_error.max((s - 1.0).abs());
        grad_const = grad_const.max(pou.gradient_constant(&c.point, c.delta)?);
    }
    let support = bump.support_radius();
    let slope = (0..=100_000).map(|k| bump.derivative(support * k as f64 / 100_000.0).abs()).fold(0.0, f64::max);
    if ctx.check {
        ensure(report.passes(), || format!("ball system fails: {report:?}"))?;
        ensure(sum_error <= CHECK_EXACT, || format!("partition sums deviate by {sum_error:e}"))?;
        ensure(grad_const <= report.overlap_bound, || format!("gradient constant {grad_const}"))?;
    }

    let set = pou.set();
    #[derive(Serialize)]
    struct CoverRow {
        index: usize,
        x: f64,
        y: f64,
        z: f64,
        delta: f64,
        r_inner: f64,
        r_cover: f64,
        r_outer: f64,
    }
    ctx.out.csv(
        "cover.csv",
        (0..set.len()).map(|i| {
            let (r_inner, r_cover, r_outer) = set.radii(i);
            let c = set.centers[i];
            CoverRow { index: i, x: c[0], y: c[1], z: c[2], delta: set.deltas[i], r_inner, r_cover, r_outer }
        }),
    )?;
    #[derive(Serialize)]
    struct Layer {
        point: usize,
        x: f64,
        y: f64,
        z: f64,
        center: usize,
        chi: f64,
    }
    let mut layers = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let x = c.point;
        for (center, chi) in pou.eval(&x)? {
            layers.push(Layer { point: i, x: x[0], y: x[1], z: x[2], center, chi });
        }
    }
    ctx.out.csv("partition.csv", layers)?;
    Ok(extend(
        header("whitney", ctx, &d),
        json!({
            "tau": a.tau,
            "candidates": candidates.len(),
            "centers": report.centers,
            "inner_overlaps": report.inner_overlaps,
            "uncovered": report.uncovered,
            "max_overlap": report.max_overlap,
            "overlap_bound": num(report.overlap_bound),
            "comparability_failures": report.comparability_failures,
            "min_neighbor_ratio": num(report.min_neighbor_ratio),
            "passes": report.passes(),
            "samples": a.samples,
            "partition_sum_error": num(sum_error),
            "gradient_constant": num(grad_const),
            "bump_slope": num(slope),
        }),
    ))
}

fn method(ctx: &Ctx, d: &GridDomain, a: &MethodArgs) -> CheegerMethod {
    if a.heuristic || d.len() > BRUTE_FORCE_LIMIT {
        CheegerMethod::Heuristic { seed: ctx.seed, trials: a.trials }
    } else {
        CheegerMethod::Exact
    }
}

pub fn cheeger(ctx: &Ctx, a: &CheegerArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let m = method(ctx, &d, &a.method);
    let c = cheeger_constant(&d, ctx.mode, &m)?;
    if ctx.check && d.is_connected() && d.len() > 1 {
        let again = cheeger_ratio(&d, &c.witness, ctx.mode);
        ensure(rel_close(again, c.value, 1e-12), || format!("witness ratio {again} but value {}", c.value))?;
        if !c.exact && d.len() <= BRUTE_FORCE_LIMIT {
            let exact = cheeger_constant(&d, ctx.mode, &CheegerMethod::Exact)?.value;
            ensure(c.value <= exact * (1.0 + 1e-12), || format!("heuristic {} above exact {exact}", c.value))?;
        }
    }
    ctx.out.cell_set("witness.csv", &d, &c.witness)?;
    Ok(extend(
        header("cheeger", ctx, &d),
        json!({
            "value": num(c.value),
            "exact": c.exact,
            "witness_size": c.witness.iter().filter(|&&b| b).count(),
            "witness_perimeter": num(perimeter(&d, &c.witness, ctx.mode)),
        }),
    ))
}

pub fn poincare(ctx: &Ctx, a: &PoincareArgs) -> Result<Value, CliError> {
    let d = load_domain(&a.domain)?;
    let m = method(ctx, &d, &a.method);
    let b = poincare_bracket(&d, ctx.mode, a.p, &m)?;
    if ctx.check && d.is_connected() && d.len() > 1 {
        let again = indicator_ratio(&d, &b.witness, ctx.mode, a.p);
        ensure(rel_close(again, b.lower, 1e-12), || format!("witness ratio {again} but lower {}", b.lower))?;
        if m != CheegerMethod::Exact && d.len() <= BRUTE_FORCE_LIMIT {
            let exact = poincare_bracket(&d, ctx.mode, a.p, &CheegerMethod::Exact)?.lower;
            ensure(b.lower <= exact * (1.0 + 1e-12), || format!("heuristic {} above exact {exact}", b.lower))?;
        }
    }
    ctx.out.cell_set("witness.csv", &d, &b.witness)?;
    Ok(extend(
        header("poincare", ctx, &d),
        json!({
            "p": a.p,
            "lower": num(b.lower),
            "upper": b.upper.map(num),
            "cheeger": b.cheeger.map(num),
            "exact": m == CheegerMethod::Exact,
        }),
    ))
}

pub fn weaklq(ctx: &Ctx, a: &WeakArgs) -> Result<Value, CliError> {
    let (spec, source) = match (a.profile, &a.f) {
        (Some(p), None) => {
            let spec = match p {
                ProfileArg::Critical => FunctionSpec::critical_power(a.dim, a.q),
                ProfileArg::Log => FunctionSpec::log_corrected_power(a.dim, a.q),
                ProfileArg::Ball => FunctionSpec::unit_ball(a.dim),
            };
            (spec, format!("{p:?}").to_lowercase())
        }
        (None, Some(path)) => {
            let d = load_domain(&a.domain)?;
            let f = io::read_node_function(path, d.len())?;
            (FunctionSpec::from_domain(&d, &f, ctx.mode)?, "grid".to_string())
        }
        _ => return Err(CliError::Usage("give exactly one of --profile or --f".into())),
    };
    if a.hi <= a.lo || a.per_decade == 0 {
        return Err(CliError::Usage("need lo < hi and a positive --per-decade".into()));
    }
    let levels = log_grid(a.lo, a.hi, a.per_decade);
    let profile = classify_weak(&spec, a.q, &levels, Default::default())?;
    let mut truncations = Vec::new();
    if let Some(list) = &a.truncate {
        for j in io::parse_list::<f64>(list)? {
            let t = truncation_approximant(&spec, j, a.q, &levels)?;
            truncations.push(json!({ "j": j, "estimate": num(t.estimate) }));
        }
    }
    #[derive(Serialize)]
    struct Row {
        y: f64,
        epsilon: f64,
    }
    ctx.out.csv("profile.csv", levels.iter().zip(&profile.values).map(|(&y, &epsilon)| Row { y, epsilon }))?;
    let th = profile.thresholds;
    let alpha = if a.dim >= 2 { sobolev_constants(a.dim).ok().map(|c| c.alpha) } else { None };
    Ok(json!({
        "command": "weaklq",
        "function": source,
        "dim": a.dim,
        "q": a.q,
        "levels": levels.len(),
        "quasi_norm": num(profile.quasi_norm),
        "low_slope": num(profile.low_slope),
        "high_slope": num(profile.high_slope),
        "verdict": profile.verdict.map(|v| v.name()),
        "diagnostic": profile.diagnostic,
        "unit_ball_volume": alpha.map(num),
        "thresholds": {
            "power_margin": th.power_margin,
            "decade_ratio": th.decade_ratio,
            "vanish_fraction": th.vanish_fraction,
            "min_decades": th.min_decades,
        },
        "truncations": truncations,
    }))
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
}

/// `max |μ|(B(x, r)) / r^{m−1}` by direct summation over every center and
/// every radius at which an atom enters.
fn mz_naive(mu: &AtomicMeasure, r_min: f64, centers: &[Point]) -> f64 {
    let power = mu.dim() as i32 - 1;
    let mut best = 0.0f64;
    for c in centers {
        let mut by_dist: Vec<(f64, f64)> = mu
            .atoms()
            .iter()
            .map(|(p, w)| ((0..3).map(|k| (p[k] - c[k]).powi(2)).sum::<f64>().sqrt(), w.abs()))
            .collect();
        by_dist.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut radii: Vec<f64> = vec![r_min];
        radii.extend(by_dist.iter().map(|x| x.0).filter(|&r| r > r_min));
        for r in radii {
            let mass: f64 = by_dist.iter().filter(|x| x.0 <= r).map(|x| x.1).sum();
            best = best.max(mass / r.powi(power));
        }
    }
    best
}

pub fn mz(ctx: &Ctx, a: &MzArgs) -> Result<Value, CliError> {
    let mu = io::read_atoms(&a.atoms)?;
    let centers = match a.centers {
        CentersArg::Atoms => CenterStrategy::Atoms,
        CentersArg::Midpoints => CenterStrategy::AtomsAndMidpoints,
    };
    let est = mz_norm_above(&mu, a.r_min, &centers)?;
    if ctx.check && mu.len() <= 400 {
        let mut points: Vec<Point> = mu.atoms().iter().map(|x| x.0).collect();
        if a.centers == CentersArg::Midpoints {
            let atoms = mu.atoms();
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    points.push(core::array::from_fn(|k| (atoms[i].0[k] + atoms[j].0[k]) / 2.0));
                }
            }
        }
        let naive = mz_naive(&mu, a.r_min, &points);
        ensure(rel_close(est.value, naive, 1e-12), || format!("value {} but direct scan gives {naive}", est.value))?;
    }
    let radii = match &a.radii {
        Some(spec) => {
            let parts = io::parse_list::<f64>(spec)?;
            match parts[..] {
                [lo, hi, count] if lo > 0.0 && hi > lo && count >= 1.0 => log_spaced(lo, hi, count as usize),
                _ => return Err(CliError::Usage(format!("expected lo,hi,count with 0 < lo < hi, got {spec:?}"))),
            }
        }
        None => {
            let atoms = mu.atoms();
            let span = atoms
                .iter()
                .flat_map(|p| atoms.iter().map(move |q| (0..3).map(|k| (p.0[k] - q.0[k]).powi(2)).sum::<f64>()))
                .take(1 << 22)
                .fold(0.0, f64::max)
                .sqrt();
            log_spaced(a.r_min, span.max(10.0 * a.r_min), 24)
        }
    };
    let mut profile = upper_regularity_profile(&mu, &radii)?;
    if let Some(list) = &a.taus {
        if !has_domain(&a.domain) {
            return Err(CliError::Usage("--taus needs a domain".into()));
        }
        let d = load_domain(&a.domain)?;
        profile.add_eta(&mu, &d, &io::parse_list::<f64>(list)?)?;
        #[derive(Serialize)]
        struct EtaRow {
            tau: f64,
            eta: f64,
        }
        ctx.out.csv("eta.csv", profile.eta.iter().map(|&(tau, eta)| EtaRow { tau, eta }))?;
    }
    #[derive(Serialize)]
    struct Row {
        r: f64,
        value: f64,
    }
    ctx.out.csv("profile.csv", profile.radii.iter().zip(&profile.values).map(|(&r, &value)| Row { r, value }))?;
    let stats = measure_stats(&mu);
    Ok(json!({
        "command": "mz",
        "dim": mu.dim(),
        "atoms": mu.len(),
        "r_min": a.r_min,
        "value": num(est.value),
        "center": est.center[..mu.dim()],
        "radius": num(est.radius),
        "mass": num(stats.mass),
        "variation": num(stats.variation),
        "balanced": stats.balanced,
        "atom_scale": num(profile.atom_scale),
        "slope": profile.slope.map(num),
        "vanishing": profile.vanishing,
        "eta": profile.eta.iter().map(|&(t, e)| json!({ "tau": t, "eta": num(e) })).collect::<Vec<_>>(),
    }))
}

pub fn koch(ctx: &Ctx, a: &KochArgs) -> Result<Value, CliError> {
    let angles = match (a.angle, a.decay) {
        (Some(t), None) => AngleSequence::Constant(t),
        (None, Some(e)) => AngleSequence::PowerDecay { scale: a.scale, exponent: e },
        _ => return Err(CliError::Usage("give exactly one of --angle or --decay".into())),
    };
    let (pa, pb) = (io::parse_point(&a.a)?, io::parse_point(&a.b)?);
    let spec = KochSpec { angles, level: a.level, a: [pa[0], pa[1]], b: [pb[0], pb[1]] };
    let curve = koch_curve(&spec)?;
    let chord = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
    if ctx.check {
        ensure(rel_close(curve.length, curve.predicted_length, CHECK_EXACT), || {
            format!("length {} but product formula {}", curve.length, curve.predicted_length)
        })?;
    }
    let radii = log_spaced(chord * 4f64.powi(-(a.level as i32)), chord, a.radii.max(2));
    let profile = upper_regularity_profile(&curve.measure, &radii)?;
    #[derive(Serialize)]
    struct Vertex {
        x: f64,
        y: f64,
    }
    ctx.out.csv("polyline.csv", curve.polyline.iter().map(|p| Vertex { x: p[0], y: p[1] }))?;
    #[derive(Serialize)]
    struct Atom {
        x: f64,
        y: f64,
        weight: f64,
    }
    ctx.out.csv("atoms.csv", curve.measure.atoms().iter().map(|(p, w)| Atom { x: p[0], y: p[1], weight: *w }))?;
    #[derive(Serialize)]
    struct Row {
        r: f64,
        value: f64,
    }
    ctx.out.csv("profile.csv", profile.radii.iter().zip(&profile.values).map(|(&r, &value)| Row { r, value }))?;
    Ok(json!({
        "command": "koch",
        "level": a.level,
        "vertices": curve.polyline.len(),
        "length": num(curve.length),
        "predicted_length": num(curve.predicted_length),
        "bounded_length": curve.bounded_length,
        "mass": num(curve.measure.total_variation()),
        "profile_slope": profile.slope.map(num),
        "vanishing": profile.vanishing,
    }))
}

pub fn nikodym(ctx: &Ctx, a: &NikodymArgs) -> Result<Value, CliError> {
    let conn = Connectivity::from_neighbors(a.connectivity)
        .filter(|c| c.neighbors(2) == a.connectivity)
        .ok_or_else(|| CliError::Usage(format!("connectivity {} is not valid in 2D", a.connectivity)))?;
    let lengths: Vec<usize> = (1..=a.max_length).collect();
    let results = pool::map_ordered(lengths.len(), a.jobs.unwrap_or_else(pool::default_workers), |k| {
        let length = lengths[k];
        let d = rooms_and_corridor(length, 1.0, conn)?;
        let exact = d.len() <= BRUTE_FORCE_LIMIT;
        let m = if exact {
            CheegerMethod::Exact
        } else {
            CheegerMethod::Heuristic { seed: ctx.seed.wrapping_add(length as u64), trials: a.trials }
        };
        let b = poincare_bracket(&d, ctx.mode, a.p, &m)?;
        Ok::<_, divflow_core::Error>((length, d.len(), exact, b))
    });
    #[derive(Serialize)]
    struct Row {
        length: usize,
        cells: usize,
        exact: bool,
        lower: f64,
        upper: Option<f64>,
        cheeger: Option<f64>,
    }
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        let (length, cells, exact, b) = r?;
        rows.push(Row { length, cells, exact, lower: b.lower, upper: b.upper, cheeger: b.cheeger });
    }
    let increasing = rows.windows(2).all(|w| w[1].lower > w[0].lower);
    let table: Vec<Value> =
        rows.iter().map(|r| json!({ "length": r.length, "lower": num(r.lower), "upper": r.upper.map(num) })).collect();
    ctx.out.csv("nikodym.csv", &rows)?;
    Ok(json!({
        "command": "experiment nikodym",
        "mode": mode_name(ctx.mode),
        "p": a.p,
        "connectivity": a.connectivity,
        "lower_increasing": increasing,
        "rows": table,
    }))
}

pub fn refine(ctx: &Ctx, a: &RefineArgs) -> Result<Value, CliError> {
    let conn = Connectivity::from_neighbors(a.connectivity)
        .filter(|c| c.neighbors(2) == a.connectivity)
        .ok_or_else(|| CliError::Usage(format!("connectivity {} is not valid in 2D", a.connectivity)))?;
    let sizes = io::parse_list::<usize>(&a.sizes)?;
    if sizes.iter().any(|&n| n < 2) {
        return Err(CliError::Usage("grid sizes must be at least 2".into()));
    }
    let mode = Mode::Mesh;
    let results = pool::map_ordered(sizes.len(), a.jobs.unwrap_or_else(pool::default_workers), |k| {
        let n = sizes[k];
        let d = GridDomain::rectangle(n, n, 1.0 / n as f64, conn)?;
        let dipole = AtomicMeasure::dipole(2, [0.75, 0.5, 0.0], [0.25, 0.5, 0.0], 1.0)?;
        let free = free_norm(&d, &rasterize(&dipole, &d, mode)?, mode)?.value;
        let mut f = NodeFunction((0..d.len()).map(|i| if d.center(i)[0] < 0.5 { 1.0 } else { -1.0 }).collect());
        let mean = f.sum() / d.len() as f64;
        f.0.iter_mut().for_each(|v| *v -= mean);
        let sch = sch_norm(&d, &f, mode, ctx.tol)?;
        let brute =
            if ctx.check && d.len() <= BRUTE_FORCE_LIMIT { Some(gale_hoffman_brute(&d, &f, mode)?) } else { None };
        Ok::<_, divflow_core::Error>((n, free, sch.value, sch.cut_ratio, brute))
    });
    #[derive(Serialize)]
    struct Row {
        n: usize,
        h: f64,
        free_norm: f64,
        sch_norm: f64,
        sch_cut_ratio: f64,
    }
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        let (n, free, sch, ratio, brute) = r?;
        if let Some(b) = brute {
            ensure(rel_close(sch, b, CHECK_LINF), || format!("n = {n}: value {sch} but enumeration gives {b}"))?;
        }
        rows.push(Row { n, h: 1.0 / n as f64, free_norm: free, sch_norm: sch, sch_cut_ratio: ratio });
    }
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "n": r.n, "h": r.h, "free_norm": num(r.free_norm), "sch_norm": num(r.sch_norm) }))
        .collect();
    ctx.out.csv("refine.csv", &rows)?;
    Ok(json!({
        "command": "experiment refine",
        "mode": "mesh",
        "connectivity": a.connectivity,
        "dipole": { "plus": [0.75, 0.5], "minus": [0.25, 0.5] },
        "step": "sign(x1 - 1/2) minus its mean",
        "rows": table,
    }))
}
