//! Block-sum tail probabilities, sup-window densities and long runs of
//! selections: the two regimes of Banach density for selector sequences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MC_CHUNK;
use crate::error::{invalid, Result};
use crate::rng::{derive_seed, CounterRng};
use crate::selector::{generate, SelectorConfig, TauProfile};
use crate::stats::binomial_se;

/// Smallest sequence length accepted by the experiment.
pub const MIN_LENGTH: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    /// Block length.
    pub r: usize,
    /// Count threshold.
    pub m: usize,
    /// Block index: the block is `[r n, r (n + 1))`.
    pub n: usize,
    pub trials: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockTailReport {
    pub spec: BlockSpec,
    /// `2^{-r} tau_{r(n+1)}^m`.
    pub lower: f64,
    /// `P(sum_{rn <= i < r(n+1)} xi_i >= m)` by dynamic programming.
    pub exact: f64,
    /// `2^r tau_{rn}^m`.
    pub upper: f64,
    pub frequency: f64,
    /// Binomial standard error at the exact probability.
    pub standard_error: f64,
    pub exact_within_bounds: bool,
    /// `|frequency - exact| <= 3 SE`.
    pub mc_consistent: bool,
    /// The bounds are not contradicted at 3 SE.
    pub mc_within_bounds: bool,
}

impl BlockTailReport {
    pub fn verified(&self) -> bool {
        self.exact_within_bounds && self.mc_consistent && self.mc_within_bounds
    }
}

/// `P(sum of independent Bernoulli(p_i) >= m)`.
pub fn poisson_binomial_tail(ps: &[f64], m: usize) -> f64 {
    let mut dist = vec![0.0; ps.len() + 1];
    dist[0] = 1.0;
    for (i, &p) in ps.iter().enumerate() {
        for k in (0..=i + 1).rev() {
            let from_zero = dist[k] * (1.0 - p);
            let from_one = if k > 0 { dist[k - 1] * p } else { 0.0 };
            dist[k] = from_zero + from_one;
        }
    }
    dist[m.min(ps.len() + 1)..].iter().sum()
}

pub fn block_tail_check(tau: &TauProfile, spec: BlockSpec, seed: u64) -> Result<BlockTailReport> {
    let BlockSpec { r, m, n, trials } = spec;
    if r == 0 || n == 0 {
        return Err(invalid("block length and index must be at least 1"));
    }
    if m == 0 || m > r {
        return Err(invalid(format!("count threshold {m} outside [1, {r}]")));
    }
    if trials == 0 {
        return Err(invalid("Monte Carlo check needs at least one trial"));
    }
    let first = r * n;
    tau.validate(first + r)?;
    let ps: Vec<f64> = (first..first + r).map(|i| tau.tau(i)).collect();
    let lower = 0.5f64.powi(r as i32) * tau.tau(first + r).powi(m as i32);
    let upper = 2f64.powi(r as i32) * tau.tau(first).powi(m as i32);
    let exact = poisson_binomial_tail(&ps, m);

    let hits: u64 = (0..trials.div_ceil(MC_CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * MC_CHUNK..((c + 1) * MC_CHUNK).min(trials))
                .filter(|&t| {
                    let mut rng = CounterRng::new(seed, t);
                    ps.iter().filter(|&&p| rng.next_f64() < p).count() >= m
                })
                .count() as u64
        })
        .sum();
    let frequency = hits as f64 / trials as f64;
    let se = binomial_se(exact, trials);
    Ok(BlockTailReport {
        spec,
        lower,
        exact,
        upper,
        frequency,
        standard_error: se,
        exact_within_bounds: lower <= exact && exact <= upper,
        mc_consistent: (frequency - exact).abs() <= 3.0 * se,
        mc_within_bounds: frequency + 3.0 * se >= lower && frequency - 3.0 * se <= upper,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyConfig {
    pub tau: TauProfile,
    pub length: usize,
    pub seeds: u64,
    pub master_seed: u64,
    /// Window lengths for the sup-density scan.
    pub windows: Vec<usize>,
    pub density_threshold: f64,
    /// Length of the runs of consecutive selections searched for.
    pub run_length: usize,
    pub block: Option<BlockSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub count: usize,
    /// Sup-window density for each configured window length.
    pub sup_density: Vec<f64>,
    pub witness_start: Vec<usize>,
    /// Same scan restricted to windows inside the second half of the range.
    pub tail_sup_density: Vec<f64>,
    /// Number of maximal runs of at least `run_length` selections.
    pub runs: usize,
    pub first_run_start: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub m: usize,
    pub seeds_below: u64,
    pub fraction_below: f64,
    pub tail_seeds_below: u64,
    pub mean_sup_density: f64,
    pub max_sup_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub block: Option<BlockTailReport>,
    pub windows: Vec<WindowSummary>,
    pub seeds_with_run: u64,
    pub fraction_with_run: f64,
    pub per_seed: Vec<SeedOutcome>,
}

/// Seed of the `i`-th sequence of an experiment.
pub fn sequence_seed(master: u64, i: u64) -> u64 {
    derive_seed(master, &format!("dichotomy/sequence/{i}"))
}

pub fn banach_dichotomy_experiment(cfg: &DichotomyConfig) -> Result<DichotomyReport> {
    if cfg.length < MIN_LENGTH {
        return Err(invalid(format!(
            "sequence length {} below the minimum {MIN_LENGTH}",
            cfg.length
        )));
    }
    if cfg.seeds == 0 {
        return Err(invalid("experiment needs at least one seed"));
    }
    if cfg.windows.iter().any(|&m| m == 0 || m > cfg.length / 2) {
        return Err(invalid("window lengths must lie in [1, N/2]"));
    }
    cfg.tau.validate(cfg.length)?;
    let block = match cfg.block {
        Some(spec) => Some(block_tail_check(
            &cfg.tau,
            spec,
            derive_seed(cfg.master_seed, "dichotomy/block"),
        )?),
        None => None,
    };

    let per_seed: Vec<SeedOutcome> = (0..cfg.seeds)
        .into_par_iter()
        .map(|i| -> Result<SeedOutcome> {
            let seed = sequence_seed(cfg.master_seed, i);
            let s = generate(&SelectorConfig::new(cfg.length, cfg.tau.clone(), seed))?;
            let d = s.banach_density(&cfg.windows)?;
            let tail_from = cfg.length / 2 + 1;
            let runs = if cfg.run_length > 0 {
                s.runs_at_least(cfg.run_length)
            } else {
                Vec::new()
            };
            Ok(SeedOutcome {
                seed,
                count: s.count,
                sup_density: d.windows.iter().map(|w| w.sup_density).collect(),
                witness_start: d.windows.iter().map(|w| w.witness_start).collect(),
                tail_sup_density: cfg
                    .windows
                    .iter()
                    .map(|&m| sup_window_from(&s.bits, m, tail_from))
                    .collect(),
                runs: runs.len(),
                first_run_start: runs.first().map(|r| r.0),
            })
        })
        .collect::<Result<_>>()?;

    let k = cfg.seeds as f64;
    let windows = cfg
        .windows
        .iter()
        .enumerate()
        .map(|(w, &m)| {
            let below = per_seed
                .iter()
                .filter(|o| o.sup_density[w] < cfg.density_threshold)
                .count() as u64;
            WindowSummary {
                m,
                seeds_below: below,
                fraction_below: below as f64 / k,
                tail_seeds_below: per_seed
                    .iter()
                    .filter(|o| o.tail_sup_density[w] < cfg.density_threshold)
                    .count() as u64,
                mean_sup_density: per_seed.iter().map(|o| o.sup_density[w]).sum::<f64>() / k,
                max_sup_density: per_seed.iter().map(|o| o.sup_density[w]).fold(0.0, f64::max),
            }
        })
        .collect();
    let seeds_with_run = per_seed.iter().filter(|o| o.runs > 0).count() as u64;
    Ok(DichotomyReport {
        block,
        windows,
        seeds_with_run,
        fraction_with_run: seeds_with_run as f64 / k,
        per_seed,
    })
}

/// Sup density over windows `[start, start + m)` with `start >= from`
/// (1-based) inside `[1, bits.len()]`.
fn sup_window_from(bits: &[u8], m: usize, from: usize) -> f64 {
    let n = bits.len();
    if from == 0 || from + m > n + 1 {
        return 0.0;
    }
    let mut c: usize = bits[from - 1..from - 1 + m].iter().map(|&b| b as usize).sum();
    let mut best = c;
    for start in from + 1..=n - m + 1 {
        c = c + bits[start + m - 2] as usize - bits[start - 2] as usize;
        best = best.max(c);
    }
    best as f64 / m as f64
}
