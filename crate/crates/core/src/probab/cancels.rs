//! Off-origin autocorrelation tails of random centered signals, and the
//! two-colouring of the index set that makes lagged products independent.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mc_satisfied, MC_CHUNK};
use crate::error::{invalid, Result};
use crate::kernel::{autocorrelate, IntegerSignal};
use crate::rng::CounterRng;
use crate::selector::TauProfile;
use crate::stats::binomial_se;

/// Split `e` by the parity of `floor(n / |k|)`. Neither part contains a
/// pair `(n, n + k)`. Duplicates in `e` are dropped; both parts are sorted.
pub fn shift_partition(e: &[i64], k: i64) -> Result<(Vec<i64>, Vec<i64>)> {
    if k == 0 {
        return Err(invalid("shift must be nonzero"));
    }
    let width = k.unsigned_abs() as i64;
    let set: BTreeSet<i64> = e.iter().copied().collect();
    Ok(set.into_iter().partition(|n| n.div_euclid(width) % 2 == 0))
}

/// Exhaustive check of `E1 u E2 = E`, `E1 n E2 = {}` and `Ei n (Ei - k) = {}`.
pub fn partition_is_valid(e: &[i64], k: i64, e1: &[i64], e2: &[i64]) -> bool {
    let all: BTreeSet<i64> = e.iter().copied().collect();
    let s1: BTreeSet<i64> = e1.iter().copied().collect();
    let s2: BTreeSet<i64> = e2.iter().copied().collect();
    if !s1.is_disjoint(&s2) || s1.union(&s2).copied().collect::<BTreeSet<_>>() != all {
        return false;
    }
    [&s1, &s2]
        .iter()
        .all(|s| s.iter().all(|n| n.checked_add(k).is_none_or(|m| !s.contains(&m))))
}

/// `4 |E|^2 max(e^{-theta^2/16}, e^{-theta/4})`.
pub fn cancels_bound(support: usize, theta: f64) -> f64 {
    let e = support as f64;
    4.0 * e * e * (-theta * theta / 16.0).exp().max((-theta / 4.0).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CancelsOutcome {
    Verdict {
        frequency: f64,
        standard_error: f64,
        satisfied: bool,
    },
    /// The bound is at least 1, so no trial can contradict it.
    VacuousBound,
    /// `sum Var(X_n)^2 < 1`.
    HypothesisFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CancelsReport {
    pub n: usize,
    pub theta: f64,
    pub trials: u64,
    pub sum_var_sq: f64,
    /// `theta (sum Var(X_n)^2)^{1/2}`.
    pub threshold: f64,
    pub bound: f64,
    pub hits: u64,
    pub outcome: CancelsOutcome,
}

impl CancelsReport {
    pub fn is_satisfied(&self) -> Option<bool> {
        match self.outcome {
            CancelsOutcome::Verdict { satisfied, .. } => Some(satisfied),
            _ => None,
        }
    }
}

/// Monte Carlo frequency of `||X * X~||_{l^inf(Z \ 0)} >= threshold` for
/// `X = sum_{n <= N} (xi_n - tau_n) delta_n`.
pub fn cancels_tail_verify(
    n: usize,
    tau: &TauProfile,
    theta: f64,
    trials: u64,
    seed: u64,
) -> Result<CancelsReport> {
    if n == 0 {
        return Err(invalid("signal length must be at least 1"));
    }
    if !(theta > 0.0) {
        return Err(invalid(format!("theta must be positive, got {theta}")));
    }
    tau.validate(n)?;
    let taus: Vec<f64> = (1..=n).map(|k| tau.tau(k)).collect();
    let sum_var_sq: f64 = taus.iter().map(|t| (t * (1.0 - t)).powi(2)).sum();
    let threshold = theta * sum_var_sq.sqrt();
    let bound = cancels_bound(n, theta);
    let mut report = CancelsReport {
        n,
        theta,
        trials,
        sum_var_sq,
        threshold,
        bound,
        hits: 0,
        outcome: CancelsOutcome::HypothesisFailed,
    };
    if sum_var_sq < 1.0 {
        return Ok(report);
    }
    if bound >= 1.0 {
        report.outcome = CancelsOutcome::VacuousBound;
        return Ok(report);
    }
    if trials == 0 {
        return Err(invalid("Monte Carlo check needs at least one trial"));
    }
    let hits: u64 = (0..trials.div_ceil(MC_CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * MC_CHUNK..((c + 1) * MC_CHUNK).min(trials))
                .filter(|&t| off_origin_sup(&taus, seed, t) >= threshold)
                .count() as u64
        })
        .sum();
    let frequency = hits as f64 / trials as f64;
    let standard_error = binomial_se(frequency, trials);
    report.hits = hits;
    report.outcome = CancelsOutcome::Verdict {
        frequency,
        standard_error,
        satisfied: mc_satisfied(frequency, standard_error, bound),
    };
    Ok(report)
}

fn off_origin_sup(taus: &[f64], seed: u64, trial: u64) -> f64 {
    let mut rng = CounterRng::new(seed, trial);
    let x: Vec<f64> = taus
        .iter()
        .map(|&t| if rng.next_f64() < t { 1.0 - t } else { -t })
        .collect();
    autocorrelate(&IntegerSignal::new(1, x)).sup_off_origin()
}
