//! Concrete measure-preserving systems and subsequence averages along
//! selector sequences.
//!
//! On the shift `T x = x + 1` the average `A_N phi(x) = beta(N)^{-1}
//! sum_n xi_n phi(x + n)` is the convolution `phi * reflect(mu)`, which is
//! what `transference_check` compares.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::{build_triple, convolve, IntegerSignal};
use crate::rng::CounterRng;
use crate::selector::{SelectorSequence, TauProfile};

/// Steps between exact recomputations of a rotation orbit point.
pub const RENORMALIZE_EVERY: u64 = 4096;

/// Relative tolerance of the transference identity.
pub const TRANSFER_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DynSystem {
    /// `x -> x + angle mod 1` on `[0, 1)` with Lebesgue measure.
    CircleRotation { angle: f64 },
    /// `x -> x + 1` on `Z` with counting measure.
    IntegerShift,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum State {
    Circle(f64),
    Integer(i64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// `1[a, b)` on the circle, `0 <= a <= b <= 1`.
    IntervalIndicator { a: f64, b: f64 },
    /// A finitely supported function on `Z`.
    FiniteSignal { signal: IntegerSignal },
    Constant { value: f64 },
}

impl Observable {
    /// Integral against the invariant measure.
    pub fn integral(&self) -> f64 {
        match self {
            Observable::IntervalIndicator { a, b } => b - a,
            Observable::FiniteSignal { signal } => signal.sum(),
            Observable::Constant { value } => *value,
        }
    }

    pub fn eval(&self, x: State) -> f64 {
        match (self, x) {
            (Observable::IntervalIndicator { a, b }, State::Circle(t)) => {
                if *a <= t && t < *b {
                    1.0
                } else {
                    0.0
                }
            }
            (Observable::FiniteSignal { signal }, State::Integer(n)) => signal.get(n),
            (Observable::Constant { value }, _) => *value,
            _ => 0.0,
        }
    }
}

impl DynSystem {
    pub fn validate(&self, f: &Observable, x0: State) -> Result<()> {
        match (self, x0) {
            (DynSystem::CircleRotation { angle }, State::Circle(t)) => {
                if !(angle.is_finite() && *angle > 0.0 && *angle < 1.0) {
                    return Err(invalid(format!("rotation angle {angle} outside (0, 1)")));
                }
                if !(0.0..1.0).contains(&t) {
                    return Err(invalid(format!("circle state {t} outside [0, 1)")));
                }
            }
            (DynSystem::IntegerShift, State::Integer(_)) => {}
            _ => return Err(invalid("state does not belong to the system")),
        }
        match (self, f) {
            (DynSystem::CircleRotation { .. }, Observable::FiniteSignal { .. })
            | (DynSystem::IntegerShift, Observable::IntervalIndicator { .. }) => {
                Err(invalid("observable does not live on the system's space"))
            }
            (_, Observable::IntervalIndicator { a, b }) if !(0.0 <= *a && a <= b && *b <= 1.0) => {
                Err(invalid(format!("interval [{a}, {b}) not inside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// `T^n x0` for `n = 1, 2, ...`.
    pub fn orbit(&self, x0: State) -> Orbit {
        Orbit { sys: *self, x0, x: x0, n: 0 }
    }
}

pub struct Orbit {
    sys: DynSystem,
    x0: State,
    x: State,
    n: u64,
}

impl Iterator for Orbit {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        self.n += 1;
        self.x = match (self.sys, self.x) {
            (DynSystem::CircleRotation { angle }, State::Circle(t)) => {
                if self.n.is_multiple_of(RENORMALIZE_EVERY) {
                    let State::Circle(t0) = self.x0 else { unreachable!() };
                    State::Circle((t0 + (self.n as f64 * angle).fract()).fract())
                } else {
                    let mut y = t + angle;
                    if y >= 1.0 {
                        y -= 1.0;
                    }
                    State::Circle(y)
                }
            }
            (DynSystem::IntegerShift, State::Integer(k)) => State::Integer(k + 1),
            (_, x) => x,
        };
        Some(self.x)
    }
}

/// `beta(N)^{-1} sum_{n <= N} w_n f(T^n x0)` at every checkpoint in one
/// pass. Checkpoints must be increasing.
fn weighted_averages(
    sys: &DynSystem,
    f: &Observable,
    x0: State,
    weight: impl Fn(usize) -> f64,
    tau: &TauProfile,
    checkpoints: &[usize],
) -> Vec<f64> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let (mut sum, mut beta) = (0.0, 0.0);
    let mut orbit = sys.orbit(x0);
    let mut n = 0usize;
    for &c in checkpoints {
        while n < c {
            n += 1;
            let x = orbit.next().unwrap();
            beta += tau.tau(n);
            let w = weight(n);
            if w != 0.0 {
                sum += w * f.eval(x);
            }
        }
        out.push(sum / beta);
    }
    out
}

fn check_checkpoints(checkpoints: &[usize], limit: usize) -> Result<()> {
    if checkpoints.is_empty() || checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("checkpoints must be positive and strictly increasing"));
    }
    let last = *checkpoints.last().unwrap();
    if last > limit {
        return Err(Error::OutOfRange {
            what: "average length",
            value: last as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

/// `A_N f(x0) = beta(N)^{-1} sum_{n <= N} xi_n f(T^n x0)`.
pub fn subsequence_average(
    sys: &DynSystem,
    f: &Observable,
    s: &SelectorSequence,
    n: usize,
    x0: State,
) -> Result<f64> {
    sys.validate(f, x0)?;
    check_checkpoints(&[n], s.len())?;
    Ok(weighted_averages(sys, f, x0, |k| s.bit(k) as f64, &s.config.tau, &[n])[0])
}

/// `E A_N f(x0) = beta(N)^{-1} sum_{n <= N} tau_n f(T^n x0)`.
pub fn expected_average(
    sys: &DynSystem,
    f: &Observable,
    tau: &TauProfile,
    n: usize,
    x0: State,
) -> Result<f64> {
    sys.validate(f, x0)?;
    tau.validate(n)?;
    check_checkpoints(&[n], usize::MAX)?;
    Ok(weighted_averages(sys, f, x0, |k| tau.tau(k), tau, &[n])[0])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferenceReport {
    pub j: u32,
    /// Half-open window `[lo, hi)` on which both sides were evaluated.
    pub window: (i64, i64),
    pub max_discrepancy: f64,
    /// `max |A_{2^j} phi|` over the window.
    pub scale: f64,
    pub relative_discrepancy: f64,
    pub holds: bool,
}

/// Orbit evaluation of `A_{2^j} phi` on the shift against
/// `phi * reflect(mu_j)`, at every point where either can be nonzero.
pub fn transference_check(phi: &IntegerSignal, s: &SelectorSequence, j: u32) -> Result<TransferenceReport> {
    let t = build_triple(s, j)?;
    let m = 1usize << j;
    let conv = convolve(phi, &t.mu.reflect());
    let (lo, hi) = if phi.is_zero() {
        (0, 1)
    } else {
        (phi.offset() - m as i64, phi.end())
    };
    let f = Observable::FiniteSignal { signal: phi.clone() };
    let sys = DynSystem::IntegerShift;
    let direct: Vec<f64> = (lo..hi)
        .into_par_iter()
        .map(|x| weighted_averages(&sys, &f, State::Integer(x), |k| s.bit(k) as f64, &s.config.tau, &[m])[0])
        .collect();
    let mut max_discrepancy = 0.0f64;
    let mut scale = 0.0f64;
    for (x, d) in (lo..hi).zip(&direct) {
        max_discrepancy = max_discrepancy.max((d - conv.get(x)).abs());
        scale = scale.max(d.abs());
    }
    // nothing may leak outside the window
    let outside = conv.iter().filter(|&(x, _)| x < lo || x >= hi).map(|(_, v)| v.abs()).fold(0.0, f64::max);
    max_discrepancy = max_discrepancy.max(outside);
    let relative_discrepancy = if scale > 0.0 { max_discrepancy / scale } else { max_discrepancy };
    Ok(TransferenceReport {
        j,
        window: (lo, hi),
        max_discrepancy,
        scale,
        relative_discrepancy,
        holds: relative_discrepancy <= TRANSFER_REL_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridTrace {
    pub x: f64,
    /// `A_N f(x)` at each checkpoint.
    pub values: Vec<f64>,
    /// Largest `|A_{N_{i+1}} - A_{N_i}|` over consecutive checkpoints.
    pub max_gap: f64,
    /// Gap between the last two checkpoints.
    pub final_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub checkpoints: Vec<usize>,
    pub tolerance: f64,
    pub traces: Vec<GridTrace>,
    /// Fraction of grid points with `final_gap < tolerance`.
    pub converged_fraction: f64,
}

impl ConvergenceReport {
    /// Columns `x,checkpoint,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,checkpoint,value\n");
        for t in &self.traces {
            for (c, v) in self.checkpoints.iter().zip(&t.values) {
                let _ = writeln!(out, "{:?},{c},{v:?}", t.x);
            }
        }
        out
    }
}

/// Cauchy gaps of `A_N f(x)` over increasing checkpoints for each circle
/// point in `x_grid`.
pub fn convergence_diagnostic(
    sys: &DynSystem,
    f: &Observable,
    s: &SelectorSequence,
    checkpoints: &[usize],
    x_grid: &[f64],
    tolerance: f64,
) -> Result<ConvergenceReport> {
    check_checkpoints(checkpoints, s.len())?;
    if x_grid.is_empty() {
        return Err(invalid("grid is empty"));
    }
    for &x in x_grid {
        sys.validate(f, State::Circle(x))?;
    }
    let traces: Vec<GridTrace> = x_grid
        .par_iter()
        .map(|&x| {
            let values = weighted_averages(sys, f, State::Circle(x), |k| s.bit(k) as f64, &s.config.tau, checkpoints);
            let gaps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
            GridTrace {
                x,
                max_gap: gaps.iter().copied().fold(0.0, f64::max),
                final_gap: gaps.last().copied().unwrap_or(0.0),
                values,
            }
        })
        .collect();
    let converged = traces.iter().filter(|t| t.final_gap < tolerance).count();
    Ok(ConvergenceReport {
        checkpoints: checkpoints.to_vec(),
        tolerance,
        converged_fraction: converged as f64 / traces.len() as f64,
        traces,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples`
/// and the uniform law on `[0, 1)`.
pub fn ks_uniform(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// KS distance to uniform of `T^steps x` for `samples` uniform starting
/// points drawn from stream 0 of `seed`.
pub fn rotation_pushforward_ks(angle: f64, steps: u64, samples: usize, seed: u64) -> Result<f64> {
    let sys = DynSystem::CircleRotation { angle };
    let mut rng = CounterRng::new(seed, 0);
    let mut pushed = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x0 = State::Circle(rng.next_f64());
        sys.validate(&Observable::Constant { value: 1.0 }, x0)?;
        let x = if steps == 0 { x0 } else { sys.orbit(x0).nth(steps as usize - 1).unwrap() };
        let State::Circle(t) = x else { unreachable!() };
        pushed.push(t);
    }
    Ok(ks_uniform(&pushed))
}
