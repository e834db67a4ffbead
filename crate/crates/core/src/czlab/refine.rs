use serde::{Deserialize, Serialize};

use super::DyadicDecomposition;
use crate::kernel::IntegerSignal;

/// `s(j) = min { s : 2^s >= R_j }`.
pub fn split_index(big_r: u64) -> u32 {
    big_r.max(1).next_power_of_two().trailing_zeros()
}

/// Threshold split of the near-range bad part at scale `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedBadParts {
    pub j: u32,
    /// `lambda * r_j`.
    pub threshold: f64,
    /// `s(j)`; only cubes with `s < s(j)` contribute.
    pub split_scale: u32,
    /// `b^{(j)} = b 1(|b| > lambda r_j)`.
    pub small: IntegerSignal,
    /// `B^{(j)} = b 1(|b| <= lambda r_j)`.
    pub large: IntegerSignal,
}

pub fn refine_bad_parts(d: &DyadicDecomposition, j: u32, r_j: u64, big_r: u64) -> RefinedBadParts {
    let split_scale = split_index(big_r);
    let threshold = d.lambda * r_j as f64;
    let near = d.bad_scales(|s| s < split_scale);
    RefinedBadParts {
        j,
        threshold,
        split_scale,
        small: near.map(|_, v| if v.abs() > threshold { v } else { 0.0 }),
        large: near.map(|_, v| if v.abs() > threshold { 0.0 } else { v }),
    }
}
