//! Dyadic maximal operator `M phi = sup_j |phi * mu_j|` and weak-type
//! (1,1) profiles `lambda -> lambda |{M phi > lambda}| / ||phi||_1`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernel::{convolve, IntegerSignal, KernelTriple};

/// Number of points in the default height grid.
pub const DEFAULT_GRID_POINTS: usize = 48;
/// The default grid spans `[||M phi||_inf / 2^16, ||M phi||_inf]`.
pub const DEFAULT_GRID_SPAN: f64 = 65536.0;

pub fn maximal_function(phi: &IntegerSignal, triples: &[KernelTriple]) -> Result<IntegerSignal> {
    if triples.is_empty() {
        return Err(invalid("maximal function needs at least one kernel"));
    }
    let parts: Vec<IntegerSignal> = triples.par_iter().map(|t| convolve(phi, &t.mu)).collect();
    Ok(pointwise_sup_abs(&parts))
}

/// `x -> max_i |s_i(x)|`.
pub fn pointwise_sup_abs(signals: &[IntegerSignal]) -> IntegerSignal {
    let live: Vec<&IntegerSignal> = signals.iter().filter(|s| !s.is_zero()).collect();
    let Some(lo) = live.iter().map(|s| s.offset()).min() else {
        return IntegerSignal::zero();
    };
    let hi = live.iter().map(|s| s.end()).max().unwrap();
    let mut acc = vec![0.0f64; (hi - lo) as usize];
    for s in live {
        let base = (s.offset() - lo) as usize;
        for (slot, v) in acc[base..].iter_mut().zip(s.values()) {
            *slot = slot.max(v.abs());
        }
    }
    IntegerSignal::new(lo, acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeProfile {
    pub lambdas: Vec<f64>,
    /// `|{M phi > lambda}|`, exact counts.
    pub superlevel_sizes: Vec<u64>,
    pub weak_constants: Vec<f64>,
    #[serde(rename = "fitted_C")]
    pub fitted_c: f64,
    pub witness_lambda: f64,
    pub phi_l1: f64,
}

impl WeakTypeProfile {
    /// CSV with columns `lambda,size,weak_constant`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,size,weak_constant\n");
        for ((l, n), c) in self.lambdas.iter().zip(&self.superlevel_sizes).zip(&self.weak_constants) {
            let _ = writeln!(out, "{l:?},{n},{c:?}");
        }
        out
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "fitted_C": self.fitted_c,
            "witness_lambda": self.witness_lambda,
            "phi_l1": self.phi_l1,
            "grid_points": self.lambdas.len(),
        })
    }
}

/// `DEFAULT_GRID_POINTS` log-spaced heights ending at `top`.
pub fn default_lambda_grid(top: f64) -> Vec<f64> {
    let n = DEFAULT_GRID_POINTS;
    let lo = top / DEFAULT_GRID_SPAN;
    (0..n)
        .map(|i| lo * DEFAULT_GRID_SPAN.powf(i as f64 / (n - 1) as f64))
        .collect()
}

pub fn weak_type_profile(
    phi: &IntegerSignal,
    triples: &[KernelTriple],
    lambdas: &[f64],
) -> Result<WeakTypeProfile> {
    let m = maximal_function(phi, triples)?;
    profile_of(phi.l1(), &m, lambdas)
}

/// Profile of a precomputed maximal function; an empty grid selects the
/// default grid.
pub fn profile_of(phi_l1: f64, maximal: &IntegerSignal, lambdas: &[f64]) -> Result<WeakTypeProfile> {
    if !(phi_l1 > 0.0) {
        return Err(invalid("weak-type profile needs a nonzero signal"));
    }
    let grid = if lambdas.is_empty() {
        default_lambda_grid(maximal.linf())
    } else {
        lambdas.to_vec()
    };
    if grid.iter().any(|&l| !(l > 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("height grid must be positive and strictly increasing"));
    }
    let mut values: Vec<f64> = maximal.values().iter().map(|v| v.abs()).collect();
    values.sort_by(f64::total_cmp);
    let superlevel_sizes: Vec<u64> = grid
        .iter()
        .map(|&l| (values.len() - values.partition_point(|&v| v <= l)) as u64)
        .collect();
    let weak_constants: Vec<f64> = grid
        .iter()
        .zip(&superlevel_sizes)
        .map(|(&l, &n)| l * n as f64 / phi_l1)
        .collect();
    let (mut fitted_c, mut witness_lambda) = (0.0, grid[0]);
    for (&l, &c) in grid.iter().zip(&weak_constants) {
        if c > fitted_c {
            fitted_c = c;
            witness_lambda = l;
        }
    }
    Ok(WeakTypeProfile {
        lambdas: grid,
        superlevel_sizes,
        weak_constants,
        fitted_c,
        witness_lambda,
        phi_l1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AdversarialKind {
    PointMass,
    TwoScaleBlocks,
    LacunaryCombs,
}

/// Largest comb size whose dense representation stays below 2^22 points.
pub const MAX_COMB_TEETH: usize = 12;

/// Deterministic stress inputs for weak-type constants.
///
/// * `PointMass`: `delta_0` for every size.
/// * `TwoScaleBlocks`: `1[0, size) + size * delta_{4 size}`, a unit block
///   and a spike of the same mass at a coarser scale.
/// * `LacunaryCombs`: `sum_{i < size} delta_{4^i}`; support extent grows
///   fourfold per tooth.
pub fn adversarial_phi(kind: AdversarialKind, size: usize) -> Result<IntegerSignal> {
    if size == 0 {
        return Err(invalid("adversarial signal size must be at least 1"));
    }
    Ok(match kind {
        AdversarialKind::PointMass => IntegerSignal::delta(0, 1.0),
        AdversarialKind::TwoScaleBlocks => {
            let n = size as i64;
            IntegerSignal::block(0, n, 1.0).add(&IntegerSignal::delta(4 * n, size as f64))
        }
        AdversarialKind::LacunaryCombs => {
            if size > MAX_COMB_TEETH {
                return Err(invalid(format!(
                    "lacunary comb with {size} teeth exceeds the {MAX_COMB_TEETH}-tooth limit"
                )));
            }
            let pts: Vec<(i64, f64)> = (0..size as u32).map(|i| (4i64.pow(i), 1.0)).collect();
            IntegerSignal::from_points(&pts)
        }
    })
}
