//! Tail probabilities of sums of bounded mean-zero variables against
//! `P(|X| >= lambda sigma) <= 2 max(e^{-lambda^2/4}, e^{-lambda sigma/2})`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mc_satisfied, MC_CHUNK};
use crate::error::{invalid, Result};
use crate::rng::CounterRng;
use crate::selector::TauProfile;
use crate::stats::binomial_se;

/// Largest family size accepted by exact enumeration.
pub const EXACT_MAX_VARIABLES: usize = 22;

/// Relative slack on the event threshold: `|X| >= lambda sigma (1 - slack)`.
/// Borderline patterns are counted, so rounding can only raise the tail.
pub const THRESHOLD_REL_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VariableSpec {
    /// `+1` or `-1` with probability 1/2 each.
    Rademacher,
    /// `xi - tau` with `xi ~ Bernoulli(tau)`.
    CenteredBernoulli { tau: f64 },
}

impl VariableSpec {
    /// `(value, probability)` for the "high" and "low" outcome.
    pub fn outcomes(&self) -> [(f64, f64); 2] {
        match *self {
            VariableSpec::Rademacher => [(1.0, 0.5), (-1.0, 0.5)],
            VariableSpec::CenteredBernoulli { tau } => [(1.0 - tau, tau), (-tau, 1.0 - tau)],
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            VariableSpec::Rademacher => 1.0,
            VariableSpec::CenteredBernoulli { tau } => tau * (1.0 - tau),
        }
    }

    fn validate(&self) -> Result<()> {
        if let VariableSpec::CenteredBernoulli { tau } = *self {
            if !(0.0..=1.0).contains(&tau) {
                return Err(invalid(format!("Bernoulli mean {tau} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

pub fn rademacher_family(n: usize) -> Vec<VariableSpec> {
    vec![VariableSpec::Rademacher; n]
}

/// `xi_k - tau_k` for `k = 1..=n`.
pub fn centered_bernoulli_family(tau: &TauProfile, n: usize) -> Vec<VariableSpec> {
    (1..=n)
        .map(|k| VariableSpec::CenteredBernoulli { tau: tau.tau(k) })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ChernoffMode {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffTrialConfig {
    pub variables: Vec<VariableSpec>,
    pub lambda: f64,
    pub mode: ChernoffMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffReport {
    pub n: usize,
    pub lambda: f64,
    pub sigma: f64,
    pub empirical_p: f64,
    /// Binomial standard error; zero in exact mode.
    pub standard_error: f64,
    /// `None` in exact mode.
    pub trials: Option<u64>,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn chernoff_bound(lambda: f64, sigma: f64) -> f64 {
    2.0 * (-lambda * lambda / 4.0).exp().max((-lambda * sigma / 2.0).exp())
}

pub fn chernoff_verify(cfg: &ChernoffTrialConfig) -> Result<ChernoffReport> {
    Ok(chernoff_grid(&cfg.variables, &[cfg.lambda], cfg.mode)?.remove(0))
}

/// One report per `lambda`, sharing a single enumeration or trial set.
pub fn chernoff_grid(
    vars: &[VariableSpec],
    lambdas: &[f64],
    mode: ChernoffMode,
) -> Result<Vec<ChernoffReport>> {
    if lambdas.is_empty() {
        return Err(invalid("Chernoff check needs at least one lambda"));
    }
    if let Some(l) = lambdas.iter().find(|&&l| !(l > 0.0)) {
        return Err(invalid(format!("lambda must be positive, got {l}")));
    }
    for v in vars {
        v.validate()?;
    }
    let sigma = vars.iter().map(VariableSpec::variance).sum::<f64>().sqrt();
    let thresholds: Vec<f64> = lambdas
        .iter()
        .map(|l| l * sigma * (1.0 - THRESHOLD_REL_SLACK))
        .collect();
    let (probs, trials) = match mode {
        ChernoffMode::Exact => {
            if vars.len() > EXACT_MAX_VARIABLES {
                return Err(invalid(format!(
                    "exact enumeration supports at most {EXACT_MAX_VARIABLES} variables, got {}",
                    vars.len()
                )));
            }
            (exact_tails(vars, &thresholds), None)
        }
        ChernoffMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(invalid("Monte Carlo mode needs at least one trial"));
            }
            let hits = mc_tail_hits(vars, &thresholds, trials, seed);
            (
                hits.iter().map(|&h| h as f64 / trials as f64).collect(),
                Some(trials),
            )
        }
    };
    Ok(lambdas
        .iter()
        .zip(probs)
        .map(|(&lambda, p)| {
            let bound = chernoff_bound(lambda, sigma);
            let (standard_error, satisfied) = match trials {
                None => (0.0, p <= bound),
                Some(t) => {
                    let se = binomial_se(p, t);
                    (se, mc_satisfied(p, se, bound))
                }
            };
            ChernoffReport {
                n: vars.len(),
                lambda,
                sigma,
                empirical_p: p,
                standard_error,
                trials,
                bound,
                satisfied,
            }
        })
        .collect())
}

/// Number of leading variables enumerated as independent parallel chunks.
const SPLIT_BITS: usize = 8;

/// `P(|X| >= t)` for each threshold, by summing over all `2^n` patterns.
///
/// The partial sums are reduced in a fixed chunk order, so the result does
/// not depend on the thread count.
pub fn exact_tails(vars: &[VariableSpec], thresholds: &[f64]) -> Vec<f64> {
    let head = vars.len().min(SPLIT_BITS);
    let (lead, rest) = vars.split_at(head);
    let chunks: Vec<Vec<f64>> = (0..1usize << head)
        .into_par_iter()
        .map(|mask| {
            let mut sum = 0.0;
            let mut prob = 1.0;
            for (i, v) in lead.iter().enumerate() {
                let (x, p) = v.outcomes()[(mask >> i) & 1];
                sum += x;
                prob *= p;
            }
            let mut acc = vec![0.0; thresholds.len()];
            if prob > 0.0 {
                walk(rest, sum, prob, thresholds, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; thresholds.len()];
    for c in chunks {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    total
}

fn walk(vars: &[VariableSpec], sum: f64, prob: f64, thresholds: &[f64], acc: &mut [f64]) {
    match vars.split_first() {
        None => {
            let a = sum.abs();
            for (slot, &t) in acc.iter_mut().zip(thresholds) {
                if a >= t {
                    *slot += prob;
                }
            }
        }
        Some((v, rest)) => {
            for (x, p) in v.outcomes() {
                if p > 0.0 {
                    walk(rest, sum + x, prob * p, thresholds, acc);
                }
            }
        }
    }
}

/// Trial `t` draws its variables from stream `t` of `seed`.
fn mc_tail_hits(vars: &[VariableSpec], thresholds: &[f64], trials: u64, seed: u64) -> Vec<u64> {
    let chunks = trials.div_ceil(MC_CHUNK);
    let partial: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut hits = vec![0u64; thresholds.len()];
            for t in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(trials) {
                let mut rng = CounterRng::new(seed, t);
                let sum: f64 = vars
                    .iter()
                    .map(|v| {
                        let [(hi, p), (lo, _)] = v.outcomes();
                        if rng.next_f64() < p {
                            hi
                        } else {
                            lo
                        }
                    })
                    .sum();
                for (h, &th) in hits.iter_mut().zip(thresholds) {
                    if sum.abs() >= th {
                        *h += 1;
                    }
                }
            }
            hits
        })
        .collect();
    let mut total = vec![0u64; thresholds.len()];
    for p in partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rademacher_exact() {
        let cfg = ChernoffTrialConfig {
            variables: rademacher_family(2),
            lambda: 1.0,
            mode: ChernoffMode::Exact,
        };
        let r = chernoff_verify(&cfg).unwrap();
        assert_eq!(r.empirical_p, 0.5);
        assert!((r.bound - 2.0 * (-0.25f64).exp()).abs() < 1e-15);
        assert!((r.bound - 1.5576).abs() < 1e-4);
        assert!(r.satisfied);
    }

    #[test]
    fn huge_lambda_has_empty_tail() {
        let r = chernoff_grid(&rademacher_family(10), &[1e6], ChernoffMode::Exact).unwrap();
        assert_eq!(r[0].empirical_p, 0.0);
        assert!(r[0].satisfied);
    }

    #[test]
    fn exact_matches_binomial_closed_form() {
        // sum of n Rademachers is 2 Bin(n, 1/2) - n
        let n = 12;
        let t = 4.0;
        let p = exact_tails(&rademacher_family(n), &[t])[0];
        let mut oracle = 0.0;
        let mut c = 1.0f64;
        for k in 0..=n {
            if k > 0 {
                c = c * (n - k + 1) as f64 / k as f64;
            }
            if ((2 * k) as f64 - n as f64).abs() >= t {
                oracle += c / 4096.0;
            }
        }
        assert!((p - oracle).abs() < 1e-15);
    }

    #[test]
    fn centered_bernoulli_exact_suite() {
        let vars = centered_bernoulli_family(&TauProfile::power_law(0.25), 20);
        for r in chernoff_grid(&vars, &[1.0, 2.0, 3.0, 4.0], ChernoffMode::Exact).unwrap() {
            assert!(r.satisfied, "{r:?}");
        }
    }

    #[test]
    fn monte_carlo_tracks_exact() {
        let vars = centered_bernoulli_family(&TauProfile::power_law(0.5), 14);
        let exact = chernoff_grid(&vars, &[1.0], ChernoffMode::Exact).unwrap();
        let mc = chernoff_grid(&vars, &[1.0], ChernoffMode::MonteCarlo { trials: 40_000, seed: 3 }).unwrap();
        assert!((mc[0].empirical_p - exact[0].empirical_p).abs() < 4.0 * mc[0].standard_error + 1e-12);
        assert_eq!(mc[0].trials, Some(40_000));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(chernoff_grid(&rademacher_family(23), &[1.0], ChernoffMode::Exact).is_err());
        assert!(chernoff_grid(&rademacher_family(3), &[0.0], ChernoffMode::Exact).is_err());
        assert!(chernoff_grid(&rademacher_family(3), &[], ChernoffMode::Exact).is_err());
    }
}
