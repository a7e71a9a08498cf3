//! Subset enumeration oracle for the sup-norm problem.

use alloc::vec;
use alloc::vec::Vec;

use super::masses;
use crate::grid::{GridDomain, Mode, NodeFunction};
use crate::{Error, Result};

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// `max |f(S)| / Per(S)` over nonempty proper subsets with `Per(S) > 0`.
pub fn gale_hoffman_brute(domain: &GridDomain, f: &NodeFunction, mode: Mode) -> Result<f64> {
    gale_hoffman_brute_with_set(domain, f, mode).map(|(v, _)| v)
}

/// As [`gale_hoffman_brute`], also returning a maximizing subset.
///
/// Subsets are visited in Gray-code order so each step toggles one cell and
/// updates `f(S)` and `Per(S)` from its incident edges.
pub fn gale_hoffman_brute_with_set(domain: &GridDomain, f: &NodeFunction, mode: Mode) -> Result<(f64, Vec<bool>)> {
    let n = domain.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { cells: n, limit: BRUTE_FORCE_LIMIT });
    }
    let m = masses(domain, f, mode)?;
    let weights: Vec<f64> = (0..domain.edges().len()).map(|k| domain.transversal_weight(k, mode)).collect();
    let mut inside = vec![false; n];
    let mut fs = 0.0;
    let mut per = 0.0;
    let mut best = 0.0;
    let mut best_code = 0u32;
    let mut code = 0u32;
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros() as usize;
        code ^= 1 << bit;
        let entering = !inside[bit];
        inside[bit] = entering;
        fs += if entering { m[bit] } else { -m[bit] };
        for &(y, e) in domain.neighbors(bit) {
            // edge crosses iff endpoints differ
            if inside[y] == entering {
                per -= weights[e];
            } else {
                per += weights[e];
            }
        }
        if code == (1u32 << n) - 1 {
            continue;
        }
        if per > 1e-12 {
            let r = fs.abs() / per;
            if r > best {
                best = r;
                best_code = code;
            }
        }
    }
    let set: Vec<bool> = (0..n).map(|i| best_code >> i & 1 == 1).collect();
    // recompute the winner from scratch
    if best_code != 0 {
        let fs: f64 = (0..n).filter(|&i| set[i]).map(|i| m[i]).sum();
        let per = crate::calculus::perimeter(domain, &set, mode);
        best = fs.abs() / per;
    }
    Ok((best, set))
}
