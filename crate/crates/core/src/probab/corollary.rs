//! Per-scale autocorrelation bounds for the centered kernels `nu_j`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernel::{autocorrelate, build_triple, convolve};
use crate::selector::{SelectorSequence, TauProfile};
use crate::stats::least_squares;

/// Relative tolerance of the origin identity.
pub const ORIGIN_REL_TOL: f64 = 1e-12;

/// Per-seed maxima count as stabilized when the maximum of `rho_j` over the
/// upper half of the scale range is at most this multiple of the maximum
/// over the lower half.
pub const STABILIZATION_FACTOR: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRow {
    pub j: u32,
    pub beta: f64,
    /// `nu_j * nu_j~ (0)` from the autocorrelation.
    pub origin_value: f64,
    /// `beta^{-2} sum_{n <= 2^j} (xi_n - tau_n)^2`.
    pub origin_identity: f64,
    pub origin_rel_error: f64,
    /// Origin value of the unsymmetrized convolution `nu * reflect(nu)`.
    pub raw_origin_rel_error: f64,
    /// `beta nu_j * nu_j~ (0)`.
    pub origin_ratio: f64,
    pub off_origin_sup: f64,
    /// `beta^2 sup_{x != 0} |nu_j * nu_j~ (x)| / (2^{kappa j} (sum tau^2)^{1/2})`.
    pub rho: f64,
    /// `beta^{-2} 2^{kappa j} (sum tau^2)^{1/2}`.
    pub decay_quantity: f64,
    /// `4 2^{2j} max(e^{-theta^2/16}, e^{-theta/4})` at `theta = 2^{kappa j}`.
    pub tail_bound: f64,
    /// `tail_bound >= 1`: the probabilistic estimate says nothing at this `j`.
    pub tail_vacuous: bool,
    pub within_c: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Slope of `log2 decay_quantity` against `j`.
    pub slope: f64,
    pub intercept: f64,
    /// `-(3/2 - alpha - kappa)` for a power-law profile.
    pub expected_slope: Option<f64>,
    /// `-slope - 1`, the exponent `eps` in `R_j^{-(1+eps)}`.
    pub fitted_eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub seed: u64,
    pub kappa: f64,
    pub c_limit: f64,
    pub per_j: Vec<CorollaryRow>,
    pub origin_identity_holds: bool,
    pub max_rho: f64,
    pub max_origin_ratio: f64,
    pub lower_half_max_rho: f64,
    pub upper_half_max_rho: f64,
    pub stabilized: bool,
    pub all_within_c: bool,
    /// Scales at which the tail estimate is vacuous.
    pub vacuous_scales: Vec<u32>,
    pub decay_fit: Option<DecayFit>,
}

impl CorollaryReport {
    /// Columns `j,origin_rel_error,origin_ratio,rho,decay_quantity,tail_bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,origin_rel_error,origin_ratio,rho,decay_quantity,tail_bound\n");
        for r in &self.per_j {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{:?},{:?},{:?}",
                r.j, r.origin_rel_error, r.origin_ratio, r.rho, r.decay_quantity, r.tail_bound
            );
        }
        out
    }
}

/// `beta(2^j)^{-2} 2^{kappa j} (sum_{n <= 2^j} tau_n^2)^{1/2}`.
pub fn decay_quantity(tau: &TauProfile, j: u32, kappa: f64) -> f64 {
    let m = 1usize << j;
    let beta = tau.beta(m);
    2f64.powf(kappa * j as f64) * tau.sum_sq(m).sqrt() / (beta * beta)
}

pub fn corollary_tail_bound(j: u32, kappa: f64) -> f64 {
    let theta = 2f64.powf(kappa * j as f64);
    4.0 * 4f64.powi(j as i32) * (-theta * theta / 16.0).exp().max((-theta / 4.0).exp())
}

/// Least-squares slope of `log2 decay_quantity` against `j`.
pub fn fit_decay(tau: &TauProfile, js: &[u32], kappa: f64) -> Option<DecayFit> {
    let xs: Vec<f64> = js.iter().map(|&j| j as f64).collect();
    let ys: Vec<f64> = js.iter().map(|&j| decay_quantity(tau, j, kappa).log2()).collect();
    let (slope, intercept) = least_squares(&xs, &ys)?;
    let expected_slope = match tau {
        TauProfile::PowerLaw { alpha } => Some(-(1.5 - alpha - kappa)),
        TauProfile::Explicit { .. } => None,
    };
    Some(DecayFit {
        slope,
        intercept,
        expected_slope,
        fitted_eps: -slope - 1.0,
    })
}

pub fn corollary_bound_verify(
    s: &SelectorSequence,
    js: &[u32],
    kappa: f64,
    c_limit: f64,
) -> Result<CorollaryReport> {
    if js.is_empty() {
        return Err(invalid("scale range is empty"));
    }
    if !(kappa > 0.0) {
        return Err(invalid(format!("kappa must be positive, got {kappa}")));
    }
    let tau = &s.config.tau;
    let per_j: Vec<CorollaryRow> = js
        .par_iter()
        .map(|&j| -> Result<CorollaryRow> {
            let t = build_triple(s, j)?;
            let m = 1usize << j;
            let auto = autocorrelate(&t.nu);
            let origin_value = auto.get(0);
            let sq: f64 = (1..=m)
                .map(|n| {
                    let d = s.bit(n) as f64 - s.tau(n);
                    d * d
                })
                .sum();
            let origin_identity = sq / (t.beta * t.beta);
            let raw = convolve(&t.nu, &t.nu.reflect()).get(0);
            let off = auto.sup_off_origin();
            let sum_sq = tau.sum_sq(m);
            let rho = t.beta * t.beta * off / (2f64.powf(kappa * j as f64) * sum_sq.sqrt());
            let origin_ratio = t.beta * origin_value;
            let tail_bound = corollary_tail_bound(j, kappa);
            Ok(CorollaryRow {
                j,
                beta: t.beta,
                origin_value,
                origin_identity,
                origin_rel_error: rel_error(origin_value, origin_identity),
                raw_origin_rel_error: rel_error(raw, origin_identity),
                origin_ratio,
                off_origin_sup: off,
                rho,
                decay_quantity: decay_quantity(tau, j, kappa),
                tail_bound,
                tail_vacuous: tail_bound >= 1.0,
                within_c: rho <= c_limit && origin_ratio <= c_limit,
            })
        })
        .collect::<Result<_>>()?;

    let half = per_j.len() / 2;
    let max_rho_of = |rows: &[CorollaryRow]| rows.iter().map(|r| r.rho).fold(0.0f64, f64::max);
    let (lower, upper) = if per_j.len() < 2 {
        (max_rho_of(&per_j), max_rho_of(&per_j))
    } else {
        (max_rho_of(&per_j[..half]), max_rho_of(&per_j[half..]))
    };
    Ok(CorollaryReport {
        seed: s.config.seed,
        kappa,
        c_limit,
        origin_identity_holds: per_j.iter().all(|r| r.origin_rel_error <= ORIGIN_REL_TOL),
        max_rho: max_rho_of(&per_j),
        max_origin_ratio: per_j.iter().map(|r| r.origin_ratio).fold(0.0, f64::max),
        lower_half_max_rho: lower,
        upper_half_max_rho: upper,
        stabilized: upper <= STABILIZATION_FACTOR * lower,
        all_within_c: per_j.iter().all(|r| r.within_c),
        vacuous_scales: per_j.iter().filter(|r| r.tail_vacuous).map(|r| r.j).collect(),
        decay_fit: fit_decay(tau, js, kappa),
        per_j,
    })
}

/// `|a - b| / |b|`, or `|a|` when `b = 0`.
pub(crate) fn rel_error(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}
