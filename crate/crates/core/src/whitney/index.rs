//! Spatial hash for points whose interaction radius scales with `δ`.
//!
//! Points are grouped by dyadic level `⌊log₂ δ⌋`; level `ℓ` is hashed on a
//! grid of cell size `scale·2^{ℓ+1}`, so every lookup touches a bounded
//! number of cells per level.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::grid::Point;
use crate::math;

pub(crate) struct LevelIndex {
    scale: f64,
    cells: BTreeMap<(i32, [i64; 3]), Vec<usize>>,
    levels: Vec<i32>,
}

pub(crate) fn level_of(delta: f64) -> i32 {
    math::floor(math::log2(delta)) as i32
}

impl LevelIndex {
    pub fn new(scale: f64) -> Self {
        LevelIndex { scale, cells: BTreeMap::new(), levels: Vec::new() }
    }

    pub fn cell_size(&self, level: i32) -> f64 {
        self.scale * math::exp2((level + 1) as f64)
    }

    fn key(&self, level: i32, p: &Point) -> [i64; 3] {
        let c = self.cell_size(level);
        [math::floor(p[0] / c) as i64, math::floor(p[1] / c) as i64, math::floor(p[2] / c) as i64]
    }

    pub fn insert(&mut self, id: usize, p: &Point, delta: f64) {
        let level = level_of(delta);
        if let Err(pos) = self.levels.binary_search(&level) {
            self.levels.insert(pos, level);
        }
        let key = self.key(level, p);
        self.cells.entry((level, key)).or_default().push(id);
    }

    pub fn levels(&self) -> &[i32] {
        &self.levels
    }

    /// Calls `f` with every id stored at `level` within the box of
    /// half-width `radius` around `p` (possibly more).
    pub fn visit(&self, level: i32, p: &Point, radius: f64, mut f: impl FnMut(usize)) {
        let lo = self.key(level, &[p[0] - radius, p[1] - radius, p[2] - radius]);
        let hi = self.key(level, &[p[0] + radius, p[1] + radius, p[2] + radius]);
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if let Some(ids) = self.cells.get(&(level, [x, y, z])) {
                        ids.iter().for_each(|&i| f(i));
                    }
                }
            }
        }
    }
}
