//! Probabilistic estimates behind the autocorrelation bounds: concentration
//! of bounded sums, lagged-product tails, per-scale kernel bounds, and the
//! density dichotomy.
//!
//! Monte Carlo trial `t` always reads stream `t` of its seed, so results do
//! not depend on scheduling or thread count.

mod cancels;
mod chernoff;
mod corollary;
mod dichotomy;
mod sufficient;

pub use cancels::{
    cancels_bound, cancels_tail_verify, partition_is_valid, shift_partition, CancelsOutcome,
    CancelsReport,
};
pub use chernoff::{
    centered_bernoulli_family, chernoff_bound, chernoff_grid, chernoff_verify, exact_tails,
    rademacher_family, ChernoffMode, ChernoffReport, ChernoffTrialConfig, VariableSpec,
    EXACT_MAX_VARIABLES, THRESHOLD_REL_SLACK,
};
pub use corollary::{
    corollary_bound_verify, corollary_tail_bound, decay_quantity, fit_decay, CorollaryReport,
    CorollaryRow, DecayFit, ORIGIN_REL_TOL, STABILIZATION_FACTOR,
};
pub use dichotomy::{
    banach_dichotomy_experiment, block_tail_check, poisson_binomial_tail, sequence_seed,
    BlockSpec, BlockTailReport, DichotomyConfig, DichotomyReport, SeedOutcome, WindowSummary,
    MIN_LENGTH,
};
pub use sufficient::{sufficient_condition_check, SufficientReport, SufficientRow, DEFAULT_FIT_TOLERANCE};

/// Default number of Monte Carlo trials.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Trials per parallel work unit.
pub(crate) const MC_CHUNK: u64 = 1024;

/// `frequency + 3 SE <= bound`.
pub fn mc_satisfied(frequency: f64, standard_error: f64, bound: f64) -> bool {
    frequency + 3.0 * standard_error <= bound
}

/// `|a - b| <= tol |b|` (absolute when `b = 0`).
pub fn rel_error_within(a: f64, b: f64, tol: f64) -> bool {
    corollary::rel_error(a, b) <= tol
}
