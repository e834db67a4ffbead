//! Decay test `beta(2^j)^{-2} (sum_{n <= 2^j} tau_n^2)^{1/2} <= C 2^{-(1+eps) j}`
//! for arbitrary nonincreasing profiles.

use serde::{Deserialize, Serialize};

use super::corollary::decay_quantity;
use crate::error::{invalid, Result};
use crate::selector::TauProfile;
use crate::stats::least_squares;

/// Default allowance on the fitted slope for finite-range curvature.
pub const DEFAULT_FIT_TOLERANCE: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SufficientRow {
    pub j: u32,
    pub quantity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SufficientReport {
    pub eps: f64,
    pub fit_tolerance: f64,
    pub per_j: Vec<SufficientRow>,
    /// Slope of `log2 quantity` against `j`.
    pub fitted_exponent: f64,
    /// `2^intercept` of the fit.
    pub fitted_c: f64,
    /// Smallest `C` with `quantity_j <= C 2^{-(1+eps) j}` on the range.
    pub required_c: f64,
    /// `fitted_exponent <= -(1 + eps) + fit_tolerance`.
    pub satisfied: bool,
}

pub fn sufficient_condition_check(
    tau: &TauProfile,
    js: &[u32],
    eps: f64,
    fit_tolerance: f64,
) -> Result<SufficientReport> {
    if js.len() < 2 {
        return Err(invalid("decay fit needs at least two scales"));
    }
    if !(eps > 0.0) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let jmax = *js.iter().max().unwrap();
    if jmax >= usize::BITS - 1 {
        return Err(invalid(format!("scale {jmax} too large")));
    }
    tau.validate(1usize << jmax)?;
    let per_j: Vec<SufficientRow> = js
        .iter()
        .map(|&j| SufficientRow {
            j,
            quantity: decay_quantity(tau, j, 0.0),
        })
        .collect();
    let xs: Vec<f64> = per_j.iter().map(|r| r.j as f64).collect();
    let ys: Vec<f64> = per_j.iter().map(|r| r.quantity.log2()).collect();
    let (slope, intercept) =
        least_squares(&xs, &ys).ok_or_else(|| invalid("scales must not all coincide"))?;
    let required_c = per_j
        .iter()
        .map(|r| r.quantity * 2f64.powf((1.0 + eps) * r.j as f64))
        .fold(0.0, f64::max);
    Ok(SufficientReport {
        eps,
        fit_tolerance,
        per_j,
        fitted_exponent: slope,
        fitted_c: 2f64.powf(intercept),
        required_c,
        satisfied: slope <= -(1.0 + eps) + fit_tolerance,
    })
}
