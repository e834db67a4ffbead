//! Dyadic Calderon-Zygmund decomposition on Z and the scale-dependent
//! refinements used to control `sup_j |phi * mu_j|`.

mod decompose;
mod esets;
mod refine;
mod wall;

pub use decompose::{cz_decompose, BadPart, CzInvariantReport, CzWitnesses, DyadicCube, DyadicDecomposition};
pub use esets::{eset_check_with, eset_decomposition_check, EsetReport, EsetSizes};
pub use refine::{refine_bad_parts, split_index, RefinedBadParts};
pub use wall::{
    measured_constants, minimal_height, wall_inequality_check, WallHypothesis, WallParams, WallReport,
    BOUND_REL_SLACK,
};
