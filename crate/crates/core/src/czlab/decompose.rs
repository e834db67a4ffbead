use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernel::IntegerSignal;

/// `Q_{s,k} = [k 2^s, (k+1) 2^s)`, grid anchored at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub s: u32,
    pub k: i64,
}

impl DyadicCube {
    pub fn new(s: u32, k: i64) -> Self {
        Self { s, k }
    }

    /// The scale-`s` cube containing `x`.
    pub fn containing(s: u32, x: i64) -> Self {
        Self { s, k: x >> s }
    }

    pub fn start(&self) -> i64 {
        self.k << self.s
    }

    /// Exclusive.
    pub fn end(&self) -> i64 {
        (self.k + 1) << self.s
    }

    pub fn len(&self) -> u64 {
        1u64 << self.s
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        x >> self.s == self.k
    }

    pub fn parent(&self) -> Self {
        Self {
            s: self.s + 1,
            k: self.k >> 1,
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.end() <= other.start() || other.end() <= self.start()
    }

    /// Concentric threefold expansion `Q*`, as a half-open interval.
    pub fn expanded(&self) -> (i64, i64) {
        let l = self.len() as i64;
        (self.start() - l, self.end() + l)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadPart {
    #[serde(flatten)]
    pub cube: DyadicCube,
    /// `phi` restricted to the cube.
    pub signal: IntegerSignal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CzWitnesses {
    pub g_inf: f64,
    #[serde(rename = "sum_Q")]
    pub sum_q: u64,
    /// `max ||b_{s,k}||_1 / (lambda 2^s)`; at most 2 by parent maximality.
    pub max_bad_ratio: f64,
}

/// Height-`lambda` split `phi = g + sum b_{s,k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicDecomposition {
    pub lambda: f64,
    pub good: IntegerSignal,
    #[serde(rename = "bad")]
    pub bad_parts: Vec<BadPart>,
    pub witnesses: CzWitnesses,
}

struct Level {
    k0: i64,
    sums: Vec<f64>,
}

/// Select the maximal dyadic cubes on which the average of `|phi|`
/// strictly exceeds `lambda`; `b_{s,k}` is `phi` on each selected cube and
/// `g` is `phi` off them.
pub fn cz_decompose(phi: &IntegerSignal, lambda: f64) -> Result<DyadicDecomposition> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("height must be positive and finite, got {lambda}")));
    }
    if phi.is_zero() {
        return Ok(DyadicDecomposition {
            lambda,
            good: IntegerSignal::zero(),
            bad_parts: Vec::new(),
            witnesses: CzWitnesses {
                g_inf: 0.0,
                sum_q: 0,
                max_bad_ratio: 0.0,
            },
        });
    }

    // Bottom-up cube sums of |phi|. Once no cube at a level exceeds the
    // height, no coarser cube can: a parent's average is the mean of its
    // children's.
    let mut levels = vec![Level {
        k0: phi.offset(),
        sums: phi.values().iter().map(|v| v.abs()).collect(),
    }];
    loop {
        let s = levels.len() as i32 - 1;
        let top = levels.last().unwrap();
        let height = lambda * 2f64.powi(s);
        if top.sums.iter().all(|&v| v <= height) {
            break;
        }
        let k0 = top.k0 >> 1;
        let k1 = (top.k0 + top.sums.len() as i64 - 1) >> 1;
        let mut sums = vec![0.0; (k1 - k0 + 1) as usize];
        for (i, &v) in top.sums.iter().enumerate() {
            let k = top.k0 + i as i64;
            sums[((k >> 1) - k0) as usize] += v;
        }
        levels.push(Level { k0, sums });
    }

    // Top-down: select cubes above height not inside an already selected one.
    let top = levels.len() - 1;
    let mut covered = vec![false; levels[top].sums.len()];
    let mut cubes = Vec::new();
    for s in (0..top).rev() {
        let lvl = &levels[s];
        let parent_k0 = levels[s + 1].k0;
        let height = lambda * 2f64.powi(s as i32);
        let mut next = vec![false; lvl.sums.len()];
        for (i, &v) in lvl.sums.iter().enumerate() {
            let k = lvl.k0 + i as i64;
            let p = ((k >> 1) - parent_k0) as usize;
            if covered[p] {
                next[i] = true;
            } else if v > height {
                cubes.push(DyadicCube::new(s as u32, k));
                next[i] = true;
            }
        }
        covered = next;
    }
    cubes.sort_by_key(|c| c.start());

    let mut good = phi.values().to_vec();
    let mut bad_parts = Vec::with_capacity(cubes.len());
    let mut max_bad_ratio = 0.0f64;
    let mut sum_q = 0u64;
    for cube in cubes {
        let signal = phi.restrict(cube.start(), cube.end());
        let a = (cube.start().max(phi.offset()) - phi.offset()) as usize;
        let b = (cube.end().min(phi.end()) - phi.offset()) as usize;
        good[a..b].iter_mut().for_each(|v| *v = 0.0);
        max_bad_ratio = max_bad_ratio.max(signal.l1() / (lambda * cube.len() as f64));
        sum_q += cube.len();
        bad_parts.push(BadPart { cube, signal });
    }
    let good = IntegerSignal::new(phi.offset(), good);
    Ok(DyadicDecomposition {
        lambda,
        witnesses: CzWitnesses {
            g_inf: good.linf(),
            sum_q,
            max_bad_ratio,
        },
        good,
        bad_parts,
    })
}

/// Sum of a collection of finitely supported signals.
pub(crate) fn sum_signals<'a>(parts: impl IntoIterator<Item = &'a IntegerSignal>) -> IntegerSignal {
    let parts: Vec<&IntegerSignal> = parts.into_iter().filter(|p| !p.is_zero()).collect();
    let Some(lo) = parts.iter().map(|p| p.offset()).min() else {
        return IntegerSignal::zero();
    };
    let hi = parts.iter().map(|p| p.end()).max().unwrap();
    let mut acc = vec![0.0; (hi - lo) as usize];
    for p in parts {
        let base = (p.offset() - lo) as usize;
        for (i, &v) in p.values().iter().enumerate() {
            acc[base + i] += v;
        }
    }
    IntegerSignal::new(lo, acc)
}

/// Measured status of each structural property of a decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CzInvariantReport {
    pub reconstruction_error: f64,
    pub good_bounded: bool,
    pub parts_supported: bool,
    pub cubes_disjoint: bool,
    pub bad_mass_bounded: bool,
    pub total_measure_bounded: bool,
    pub maximal: bool,
}

impl CzInvariantReport {
    pub fn all_hold(&self, reconstruction_tol: f64) -> bool {
        self.reconstruction_error <= reconstruction_tol
            && self.good_bounded
            && self.parts_supported
            && self.cubes_disjoint
            && self.bad_mass_bounded
            && self.total_measure_bounded
            && self.maximal
    }
}

impl DyadicDecomposition {
    pub fn cubes(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        self.bad_parts.iter().map(|p| p.cube)
    }

    /// `b = sum b_{s,k}`.
    pub fn bad(&self) -> IntegerSignal {
        sum_signals(self.bad_parts.iter().map(|p| &p.signal))
    }

    /// `sum_{s : keep(s)} b_s`.
    pub fn bad_scales(&self, keep: impl Fn(u32) -> bool) -> IntegerSignal {
        sum_signals(
            self.bad_parts
                .iter()
                .filter(|p| keep(p.cube.s))
                .map(|p| &p.signal),
        )
    }

    pub fn reconstruct(&self) -> IntegerSignal {
        self.good.add(&self.bad())
    }

    pub fn check_invariants(&self, phi: &IntegerSignal) -> CzInvariantReport {
        let lambda = self.lambda;
        let recon = self.reconstruct();
        let lo = recon.offset().min(phi.offset());
        let hi = recon.end().max(phi.end());
        let reconstruction_error = (lo..hi)
            .map(|x| (recon.get(x) - phi.get(x)).abs())
            .fold(0.0, f64::max);

        let parts_supported = self.bad_parts.iter().all(|p| {
            p.signal.is_zero()
                || (p.signal.offset() >= p.cube.start() && p.signal.end() <= p.cube.end())
        });
        let mut sorted: Vec<DyadicCube> = self.cubes().collect();
        sorted.sort_by_key(|c| c.start());
        let cubes_disjoint = sorted.windows(2).all(|w| w[0].end() <= w[1].start());
        let bad_mass_bounded = self
            .bad_parts
            .iter()
            .all(|p| p.signal.l1() <= 2.0 * lambda * p.cube.len() as f64);
        let sum_q: u64 = self.cubes().map(|c| c.len()).sum();
        let total_measure_bounded = sum_q as f64 <= phi.l1() / lambda;
        let maximal = self.cubes().all(|c| {
            let own = phi.restrict(c.start(), c.end()).l1();
            let p = c.parent();
            let parent = phi.restrict(p.start(), p.end()).l1();
            own > lambda * c.len() as f64 && parent <= lambda * p.len() as f64
        });
        CzInvariantReport {
            reconstruction_error,
            good_bounded: self.good.linf() <= lambda,
            parts_supported,
            cubes_disjoint,
            bad_mass_bounded,
            total_measure_bounded,
            maximal,
        }
    }
}
