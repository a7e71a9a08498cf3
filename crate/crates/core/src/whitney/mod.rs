//! Whitney-type decomposition of a grid domain.
//!
//! A scattered set `D ⊂ Ω` satisfies `|a − b| ≥ (τ/4)·max(δ(a), δ(b))`.
//! Around each `a ∈ D` sit three concentric balls of radii `τδ(a)/8`,
//! `τδ(a)/2` and `3τδ(a)/4`: the inner balls are disjoint, the middle ones
//! cover `Ω` when `D` is maximal, and the outer ones carry the bumps of the
//! partition of unity.

mod bump;
mod index;
mod partition;
mod scattered;

pub use bump::{BumpSpec, MAX_SLOPE};
pub use partition::{cover_report, whitney_constant, CoverReport, PartitionOfUnity};
pub use scattered::{
    cell_candidates, greedy_scattered, greedy_scattered_from, scattered_pair, Candidate, ScanOrder, ScatteredSet,
};
