#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use divflow_core::{Cell, Connectivity, GridDomain, NodeFunction};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Grows a connected set of `size` cells inside a `w × h` box by repeatedly
/// adding a random boundary cell.
pub fn random_connected_mask<R: Rng>(rng: &mut R, w: usize, h: usize, size: usize, conn: Connectivity) -> GridDomain {
    let size = size.clamp(1, w * h);
    let start = [rng.random_range(0..w) as i32, rng.random_range(0..h) as i32, 0];
    let mut cells: BTreeSet<Cell> = BTreeSet::from([start]);
    let offsets: &[(i32, i32)] = match conn {
        Connectivity::Axis => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Full => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    };
    while cells.len() < size {
        let frontier: Vec<Cell> = cells
            .iter()
            .flat_map(|c| offsets.iter().map(move |(dx, dy)| [c[0] + dx, c[1] + dy, 0]))
            .filter(|c| c[0] >= 0 && c[1] >= 0 && c[0] < w as i32 && c[1] < h as i32 && !cells.contains(c))
            .collect();
        cells.insert(*frontier.choose(rng).expect("box has room"));
    }
    let base = *cells.iter().next().unwrap();
    GridDomain::new(2, cells, 1.0, conn, base).unwrap()
}

/// Random values in `[-1, 1)` shifted to sum to zero.
pub fn mean_zero<R: Rng>(rng: &mut R, n: usize) -> NodeFunction {
    let mut f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = f.iter().sum::<f64>() / n as f64;
    f.iter_mut().for_each(|v| *v -= mean);
    NodeFunction(f)
}

/// Integer supplies in `[-3, 3]` adjusted at one cell to balance exactly.
pub fn balanced_integers<R: Rng>(rng: &mut R, n: usize) -> NodeFunction {
    let mut f: Vec<f64> = (0..n).map(|_| rng.random_range(-3i32..=3) as f64).collect();
    let s: f64 = f.iter().sum();
    let k = rng.random_range(0..n);
    f[k] -= s;
    NodeFunction(f)
}

fn normalize(cells: &[(i32, i32)]) -> Vec<(i32, i32)> {
    let mx = cells.iter().map(|c| c.0).min().unwrap();
    let my = cells.iter().map(|c| c.1).min().unwrap();
    let mut v: Vec<(i32, i32)> = cells.iter().map(|c| (c.0 - mx, c.1 - my)).collect();
    v.sort_unstable();
    v
}

fn canonical(cells: &[(i32, i32)]) -> Vec<(i32, i32)> {
    let maps: [fn((i32, i32)) -> (i32, i32); 8] = [
        |(x, y)| (x, y),
        |(x, y)| (-x, y),
        |(x, y)| (x, -y),
        |(x, y)| (-x, -y),
        |(x, y)| (y, x),
        |(x, y)| (-y, x),
        |(x, y)| (y, -x),
        |(x, y)| (-y, -x),
    ];
    maps.iter().map(|m| normalize(&cells.iter().map(|&c| m(c)).collect::<Vec<_>>())).min().unwrap()
}

/// Every edge-connected cell set of `1..=max` cells, one per class under
/// translations, rotations and reflections.
pub fn free_polyominoes(max: usize) -> Vec<Vec<(i32, i32)>> {
    let mut all = Vec::new();
    let mut layer: BTreeSet<Vec<(i32, i32)>> = BTreeSet::from([vec![(0, 0)]]);
    for size in 1..=max {
        all.extend(layer.iter().cloned());
        if size == max {
            break;
        }
        let mut next = BTreeSet::new();
        for p in &layer {
            for &(x, y) in p {
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let c = (x + dx, y + dy);
                    if !p.contains(&c) {
                        let mut q = p.clone();
                        q.push(c);
                        next.insert(canonical(&q));
                    }
                }
            }
        }
        layer = next;
    }
    all
}

pub fn polyomino_domain(cells: &[(i32, i32)], conn: Connectivity) -> GridDomain {
    let cells: Vec<Cell> = cells.iter().map(|&(x, y)| [x, y, 0]).collect();
    let base = *cells.iter().min().unwrap();
    GridDomain::new(2, cells, 1.0, conn, base).unwrap()
}

/// Every nonempty subset of a `w × h` box that is connected under `conn`.
pub fn connected_subsets(w: usize, h: usize, conn: Connectivity) -> Vec<GridDomain> {
    let n = w * h;
    let mut out = Vec::new();
    for code in 1u32..(1u32 << n) {
        let cells: Vec<Cell> =
            (0..n).filter(|&i| code >> i & 1 == 1).map(|i| [(i % w) as i32, (i / w) as i32, 0]).collect();
        if is_connected(&cells, conn) {
            let base = cells[0];
            out.push(GridDomain::new(2, cells, 1.0, conn, base).unwrap());
        }
    }
    out
}

fn is_connected(cells: &[Cell], conn: Connectivity) -> bool {
    let set: BTreeSet<Cell> = cells.iter().copied().collect();
    let mut seen = BTreeSet::from([cells[0]]);
    let mut queue = VecDeque::from([cells[0]]);
    while let Some(c) = queue.pop_front() {
        for dx in -1..=1 {
            for dy in -1..=1 {
                if (dx == 0 && dy == 0) || (conn == Connectivity::Axis && dx != 0 && dy != 0) {
                    continue;
                }
                let d = [c[0] + dx, c[1] + dy, 0];
                if set.contains(&d) && seen.insert(d) {
                    queue.push_back(d);
                }
            }
        }
    }
    seen.len() == cells.len()
}

/// `sup_u ‖u − med u‖₁ / TV(u)` over `u` with values in `{0, 1/4, …, 1}`,
/// unit cells and unit edge weights; the minimum over constants of
/// `‖u − c‖₁` is attained at one of the five levels.
pub fn quantized_median_constant(domain: &GridDomain) -> f64 {
    let n = domain.len();
    let levels = 5usize;
    let edges: Vec<(usize, usize)> = domain.edges().iter().map(|e| (e.tail, e.head)).collect();
    let mut u = vec![0usize; n];
    let mut count = [0usize; 5];
    count[0] = n;
    let mut tv: i64 = 0;
    let mut best = 0.0f64;
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &edges {
        incident[a].push(b);
        incident[b].push(a);
    }
    loop {
        let mut k = 0;
        loop {
            if k == n {
                return best;
            }
            let old = u[k];
            let new = if old + 1 == levels { 0 } else { old + 1 };
            for &y in &incident[k] {
                let v = u[y] as i64;
                tv += (new as i64 - v).abs() - (old as i64 - v).abs();
            }
            count[old] -= 1;
            count[new] += 1;
            u[k] = new;
            if new != 0 {
                break;
            }
            k += 1;
        }
        if tv > 0 {
            let dev = (0..levels)
                .map(|c| (0..levels).map(|l| count[l] as i64 * (l as i64 - c as i64).abs()).sum::<i64>())
                .min()
                .unwrap();
            best = best.max(dev as f64 / tv as f64);
        }
    }
}
