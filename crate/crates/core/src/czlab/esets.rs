//! Pointwise construction of the level sets used in the weak (1,1)
//! argument, and verification of the inclusions between them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cz_decompose, refine_bad_parts, split_index, DyadicDecomposition};
use crate::error::Result;
use crate::kernel::{convolve, IntegerSignal, KernelTriple};

/// Sizes of the level sets.
///
/// `top = {sup_j |phi*mu_j| > 6 lambda}`; `e1..e4` cover it and `e5..e7`
/// cover `e4`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EsetSizes {
    pub top: u64,
    pub e1: u64,
    pub e2: u64,
    pub e3: u64,
    pub e4: u64,
    pub e5: u64,
    pub e6: u64,
    pub e7: u64,
}

impl EsetSizes {
    pub fn as_array(&self) -> [u64; 8] {
        [
            self.top, self.e1, self.e2, self.e3, self.e4, self.e5, self.e6, self.e7,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsetReport {
    pub lambda: f64,
    pub phi_l1: f64,
    pub scales: Vec<u32>,
    pub sizes: EsetSizes,
    /// `lambda |E_i| / ||phi||_1` in the order of `EsetSizes::as_array`.
    pub normalized: Vec<f64>,
    pub top_covered: bool,
    pub e4_covered: bool,
    /// First point violating either inclusion.
    pub violation: Option<i64>,
    /// Far-range level set of each `j` lies in the threefold expansions of
    /// the cubes with `s >= s(j)`.
    pub e3_in_expanded_cubes: bool,
    /// `|E6| <= sum_j r_j |supp b^{(j)}|`.
    pub e6_support_bound: bool,
    pub e6_support_budget: u64,
}

impl EsetReport {
    pub fn inclusions_hold(&self) -> bool {
        self.top_covered && self.e4_covered
    }
}

/// Running `sup_j |.|` over a common window.
struct SupField {
    lo: i64,
    vals: Vec<f64>,
}

impl SupField {
    fn new(lo: i64, hi: i64) -> Self {
        Self {
            lo,
            vals: vec![0.0; (hi - lo).max(0) as usize],
        }
    }

    fn absorb(&mut self, s: &IntegerSignal) {
        for (x, v) in s.iter() {
            let slot = &mut self.vals[(x - self.lo) as usize];
            *slot = slot.max(v.abs());
        }
    }

    fn merge(&mut self, other: &SupField) {
        for (a, b) in self.vals.iter_mut().zip(&other.vals) {
            *a = a.max(*b);
        }
    }

    fn above(&self, t: f64) -> Vec<bool> {
        self.vals.iter().map(|&v| v > t).collect()
    }
}

struct PerScale {
    fields: [SupField; 8],
    e3_outside: bool,
    e6_budget: u64,
}

pub fn eset_decomposition_check(
    phi: &IntegerSignal,
    lambda: f64,
    triples: &[KernelTriple],
) -> Result<EsetReport> {
    let d = cz_decompose(phi, lambda)?;
    Ok(eset_check_with(phi, &d, triples))
}

/// Same as [`eset_decomposition_check`] with a precomputed decomposition.
#[allow(clippy::needless_range_loop)]
pub fn eset_check_with(phi: &IntegerSignal, d: &DyadicDecomposition, triples: &[KernelTriple]) -> EsetReport {
    let lambda = d.lambda;
    let scales: Vec<u32> = triples.iter().map(|t| t.j).collect();
    if phi.is_zero() || triples.is_empty() {
        return EsetReport {
            lambda,
            phi_l1: phi.l1(),
            scales,
            sizes: EsetSizes::default(),
            normalized: vec![0.0; 8],
            top_covered: true,
            e4_covered: true,
            violation: None,
            e3_in_expanded_cubes: true,
            e6_support_bound: true,
            e6_support_budget: 0,
        };
    }
    // every convolved operand is supported inside phi's bounding interval
    let k_lo = triples
        .iter()
        .flat_map(|t| [&t.mu, &t.mean_mu, &t.nu])
        .filter(|s| !s.is_zero())
        .map(|s| s.offset())
        .min()
        .unwrap_or(0);
    let k_hi = triples
        .iter()
        .flat_map(|t| [&t.mu, &t.mean_mu, &t.nu])
        .filter(|s| !s.is_zero())
        .map(|s| s.end())
        .max()
        .unwrap_or(1);
    let lo = phi.offset() + k_lo;
    let hi = phi.end() + k_hi - 1;
    let b = d.bad();

    let per_scale: Vec<PerScale> = triples
        .par_iter()
        .map(|t| {
            let s_j = split_index(t.big_r);
            let far = d.bad_scales(|s| s >= s_j);
            let near = d.bad_scales(|s| s < s_j);
            let refined = refine_bad_parts(d, t.j, t.r, t.big_r);
            let parts = [
                convolve(phi, &t.mu),
                convolve(&d.good, &t.mu),
                convolve(&b, &t.mean_mu),
                convolve(&far, &t.nu),
                convolve(&near, &t.nu),
                convolve(&refined.small, &t.mean_mu),
                convolve(&refined.small, &t.mu),
                convolve(&refined.large, &t.nu),
            ];
            let fields = parts.map(|p| {
                let mut f = SupField::new(lo, hi);
                f.absorb(&p);
                f
            });

            let mut cover = vec![false; (hi - lo) as usize];
            for c in d.cubes().filter(|c| c.s >= s_j) {
                let (a, e) = c.expanded();
                for x in a.max(lo)..e.min(hi) {
                    cover[(x - lo) as usize] = true;
                }
            }
            let e3_outside = fields[3]
                .vals
                .iter()
                .zip(&cover)
                .any(|(&v, &c)| v > lambda && !c);
            PerScale {
                fields,
                e3_outside,
                e6_budget: t.r * refined.small.support_size() as u64,
            }
        })
        .collect();

    let mut sup: [SupField; 8] = std::array::from_fn(|_| SupField::new(lo, hi));
    let mut e3_outside = false;
    let mut e6_budget = 0u64;
    for ps in &per_scale {
        for (acc, f) in sup.iter_mut().zip(&ps.fields) {
            acc.merge(f);
        }
        e3_outside |= ps.e3_outside;
        e6_budget += ps.e6_budget;
    }

    let thresholds = [6.0, 1.0, 1.0, 1.0, 3.0, 1.0, 1.0, 1.0].map(|c| c * lambda);
    let sets: Vec<Vec<bool>> = sup.iter().zip(thresholds).map(|(f, t)| f.above(t)).collect();
    let count = |v: &Vec<bool>| v.iter().filter(|&&b| b).count() as u64;

    let mut violation = None;
    let mut top_covered = true;
    let mut e4_covered = true;
    for i in 0..sets[0].len() {
        if sets[0][i] && !(sets[1][i] || sets[2][i] || sets[3][i] || sets[4][i]) {
            top_covered = false;
            violation.get_or_insert(lo + i as i64);
        }
        if sets[4][i] && !(sets[5][i] || sets[6][i] || sets[7][i]) {
            e4_covered = false;
            violation.get_or_insert(lo + i as i64);
        }
    }
    let sizes = EsetSizes {
        top: count(&sets[0]),
        e1: count(&sets[1]),
        e2: count(&sets[2]),
        e3: count(&sets[3]),
        e4: count(&sets[4]),
        e5: count(&sets[5]),
        e6: count(&sets[6]),
        e7: count(&sets[7]),
    };
    let phi_l1 = phi.l1();
    EsetReport {
        lambda,
        phi_l1,
        scales,
        normalized: sizes.as_array().iter().map(|&n| lambda * n as f64 / phi_l1).collect(),
        e6_support_bound: sizes.e6 <= e6_budget,
        e6_support_budget: e6_budget,
        sizes,
        top_covered,
        e4_covered,
        violation,
        e3_in_expanded_cubes: !e3_outside,
    }
}
