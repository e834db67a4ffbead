//! Bilinear bound `|<f*nu, g*nu>| <= A0 r^{-1} |<f,g>| + 10 A1 lambda R^{-eps} ||f||_1`
//! for kernels whose autocorrelation is small off the origin.

use serde::{Deserialize, Serialize};

use super::split_index;
use crate::kernel::{autocorrelate, convolve, IntegerSignal};

/// Relative slack granted to floating-point evaluation of a bound.
pub const BOUND_REL_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallParams {
    pub a0: f64,
    pub a1: f64,
    pub r_j: u64,
    pub big_r: u64,
    pub eps: f64,
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallHypothesis {
    /// `supp nu` must lie in `[-R, R]`.
    KernelSupport,
    /// `sum_{Q_{s(j),k}} |g| <= lambda 2^{s(j)}` for every `k`.
    CubeSum,
    /// `|nu * nu~(x)| <= A0 r^{-1} delta_0(x) + A1 R^{-(1+eps)}`.
    Autocorrelation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WallReport {
    Verdict {
        lhs: f64,
        rhs: f64,
        satisfied: bool,
    },
    HypothesisViolation {
        hypothesis: WallHypothesis,
        /// Offending point, or cube index for `CubeSum`.
        witness: i64,
        value: f64,
        limit: f64,
    },
}

impl WallReport {
    pub fn is_satisfied(&self) -> Option<bool> {
        match self {
            WallReport::Verdict { satisfied, .. } => Some(*satisfied),
            WallReport::HypothesisViolation { .. } => None,
        }
    }
}

/// Check the hypotheses on `g` and `nu`, then evaluate both sides.
pub fn wall_inequality_check(
    f: &IntegerSignal,
    g: &IntegerSignal,
    nu: &IntegerSignal,
    p: &WallParams,
) -> WallReport {
    let big_r = p.big_r as f64;
    let radius = p.big_r as i64;
    if !nu.is_zero() && (nu.offset() < -radius || nu.end() - 1 > radius) {
        let witness = if nu.offset() < -radius { nu.offset() } else { nu.end() - 1 };
        return WallReport::HypothesisViolation {
            hypothesis: WallHypothesis::KernelSupport,
            witness,
            value: witness.unsigned_abs() as f64,
            limit: big_r,
        };
    }

    let s = split_index(p.big_r);
    let cube_cap = p.lambda * 2f64.powi(s as i32);
    if let Some((k, sum)) = cube_sums(g, s).find(|&(_, sum)| sum > cube_cap) {
        return WallReport::HypothesisViolation {
            hypothesis: WallHypothesis::CubeSum,
            witness: k,
            value: sum,
            limit: cube_cap,
        };
    }

    let floor = p.a1 * big_r.powf(-(1.0 + p.eps));
    let auto = autocorrelate(nu);
    for (x, v) in auto.iter() {
        let limit = if x == 0 { p.a0 / p.r_j as f64 + floor } else { floor };
        if v.abs() > limit {
            return WallReport::HypothesisViolation {
                hypothesis: WallHypothesis::Autocorrelation,
                witness: x,
                value: v.abs(),
                limit,
            };
        }
    }

    let lhs = convolve(f, nu).inner(&convolve(g, nu)).abs();
    let rhs = p.a0 / p.r_j as f64 * f.inner(g).abs()
        + 10.0 * p.a1 * p.lambda * big_r.powf(-p.eps) * f.l1();
    WallReport::Verdict {
        lhs,
        rhs,
        satisfied: lhs <= rhs * (1.0 + BOUND_REL_SLACK),
    }
}

/// `(k, sum_{Q_{s,k}} |g|)` for every scale-`s` cube meeting `supp g`.
fn cube_sums(g: &IntegerSignal, s: u32) -> impl Iterator<Item = (i64, f64)> + '_ {
    let (k_lo, k_hi) = if g.is_zero() {
        (1, 0)
    } else {
        (g.offset() >> s, (g.end() - 1) >> s)
    };
    (k_lo..=k_hi).map(move |k| {
        let lo = k << s;
        let hi = (k + 1) << s;
        (k, g.restrict(lo, hi).l1())
    })
}

/// Smallest constants `(A0, A1)` for which `nu` satisfies the
/// autocorrelation hypothesis at `(r, R, eps)`, inflated by `BOUND_REL_SLACK`.
pub fn measured_constants(nu: &IntegerSignal, r_j: u64, big_r: u64, eps: f64) -> (f64, f64) {
    let auto = autocorrelate(nu);
    let scale = (big_r as f64).powf(1.0 + eps);
    let a1 = auto.sup_off_origin() * scale;
    let a0 = auto.get(0).abs() * r_j as f64;
    (a0 * (1.0 + BOUND_REL_SLACK), a1 * (1.0 + BOUND_REL_SLACK))
}

/// Smallest height for which `g` satisfies the cube-sum hypothesis at `R`.
pub fn minimal_height(g: &IntegerSignal, big_r: u64) -> f64 {
    let s = split_index(big_r);
    let cap = 2f64.powi(s as i32);
    cube_sums(g, s).fold(0.0f64, |m, (_, sum)| m.max(sum / cap)) * (1.0 + BOUND_REL_SLACK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a0: f64, a1: f64, r_j: u64, big_r: u64, lambda: f64) -> WallParams {
        WallParams {
            a0,
            a1,
            r_j,
            big_r,
            eps: 0.1,
            lambda,
        }
    }

    #[test]
    fn zero_f_is_trivially_satisfied() {
        let g = IntegerSignal::block(0, 8, 0.5);
        let nu = IntegerSignal::new(1, vec![0.3, -0.2]);
        let (a0, a1) = measured_constants(&nu, 2, 4, 0.1);
        let rep = wall_inequality_check(&IntegerSignal::zero(), &g, &nu, &params(a0, a1, 2, 4, 1.0));
        match rep {
            WallReport::Verdict { lhs, satisfied, .. } => {
                assert_eq!(lhs, 0.0);
                assert!(satisfied);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_kernel_hits_first_term() {
        let f = IntegerSignal::new(-2, vec![1.0, -3.0, 2.0]);
        let g = IntegerSignal::new(-1, vec![0.5, 0.25, 1.0, 1.0]);
        let r_j = 4;
        let nu = IntegerSignal::delta(0, 1.0);
        let rep = wall_inequality_check(&f, &g, &nu, &params(r_j as f64, 0.0, r_j, 2, 10.0));
        match rep {
            WallReport::Verdict { lhs, rhs, satisfied } => {
                assert_eq!(lhs, f.inner(&g).abs());
                assert_eq!(rhs, lhs);
                assert!(satisfied);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hypothesis_violations_are_reported() {
        let f = IntegerSignal::delta(0, 1.0);
        let g = IntegerSignal::delta(5, 100.0);
        let nu = IntegerSignal::delta(0, 1.0);
        let rep = wall_inequality_check(&f, &g, &nu, &params(1.0, 0.0, 1, 2, 1.0));
        assert!(matches!(
            rep,
            WallReport::HypothesisViolation { hypothesis: WallHypothesis::CubeSum, witness: 2, .. }
        ));
        let rep = wall_inequality_check(&f, &IntegerSignal::zero(), &nu, &params(0.5, 0.0, 1, 2, 1.0));
        assert!(matches!(
            rep,
            WallReport::HypothesisViolation { hypothesis: WallHypothesis::Autocorrelation, witness: 0, .. }
        ));
        let wide = IntegerSignal::delta(9, 1.0);
        let rep = wall_inequality_check(&f, &IntegerSignal::zero(), &wide, &params(1.0, 1.0, 1, 4, 1.0));
        assert!(matches!(
            rep,
            WallReport::HypothesisViolation { hypothesis: WallHypothesis::KernelSupport, witness: 9, .. }
        ));
    }

    #[test]
    fn measured_constants_pass_their_own_check() {
        let nu = IntegerSignal::new(1, vec![0.4, -0.1, 0.0, -0.2, 0.3, -0.4, 0.1, 0.05]);
        let f = IntegerSignal::new(0, vec![1.0, 2.0, -1.0, 4.0, 0.5]);
        let g = IntegerSignal::new(-3, vec![3.0, -1.0, 2.0, 0.0, 0.0, 5.0, 1.0]);
        let big_r = 16;
        let lambda = minimal_height(&g, big_r);
        let (a0, a1) = measured_constants(&nu, 5, big_r, 0.2);
        let p = WallParams { a0, a1, r_j: 5, big_r, eps: 0.2, lambda };
        assert_eq!(wall_inequality_check(&f, &g, &nu, &p).is_satisfied(), Some(true));
    }
}
