//! Norms and constants built on the solvers.

mod cheeger;
mod dual;
mod weak;

pub use cheeger::{
    cheeger_constant, cheeger_ratio, indicator_ratio, poincare_bracket, rooms_and_corridor, Cheeger, CheegerMethod,
    PoincareBracket,
};
pub use dual::{free_norm, sch_norm, FreeNorm, SchNorm};
pub use weak::{
    classify_weak, epsilon_q, log_grid, truncation_approximant, FunctionSpec, RadialProfile, Truncation, WeakLqProfile,
    WeakThresholds, WeakVerdict,
};
