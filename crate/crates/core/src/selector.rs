//! Random selector sequences `{n : xi_n = 1}` with independent
//! `P(xi_n = 1) = tau_n`, and their density and growth statistics.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{unit_f64, CounterRng};
use crate::stats::least_squares;

/// Stream used for selector bits; other consumers of a seed use other streams.
const SELECTOR_STREAM: u64 = 0;

/// Probability profile `n -> tau_n` for `n >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TauProfile {
    /// `tau_n = n^{-alpha}`, `alpha` in `[0, 1)`.
    PowerLaw { alpha: f64 },
    /// `values[n - 1] = tau_n`; must be nonincreasing and in `(0, 1]`.
    Explicit { values: Vec<f64> },
}

impl TauProfile {
    pub fn power_law(alpha: f64) -> Self {
        TauProfile::PowerLaw { alpha }
    }

    pub fn constant(p: f64, len: usize) -> Self {
        TauProfile::Explicit {
            values: vec![p; len],
        }
    }

    /// `tau_n = 1 / ln(n + 2)`, decaying slower than every power law.
    pub fn inverse_log(len: usize) -> Self {
        TauProfile::Explicit {
            values: (1..=len).map(|n| 1.0 / ((n + 2) as f64).ln()).collect(),
        }
    }

    /// `tau_n` for 1-based `n`. Callers must stay within a validated length.
    #[inline]
    pub fn tau(&self, n: usize) -> f64 {
        match self {
            TauProfile::PowerLaw { alpha } => {
                if *alpha == 0.0 {
                    1.0
                } else {
                    (n as f64).powf(-alpha)
                }
            }
            TauProfile::Explicit { values } => values[n - 1],
        }
    }

    /// Check that the profile is a valid nonincreasing probability
    /// sequence on `1..=len`.
    pub fn validate(&self, len: usize) -> Result<()> {
        match self {
            TauProfile::PowerLaw { alpha } => {
                if !(0.0..1.0).contains(alpha) {
                    return Err(Error::InvalidTau(format!(
                        "power-law exponent {alpha} outside [0, 1)"
                    )));
                }
            }
            TauProfile::Explicit { values } => {
                if values.len() < len {
                    return Err(Error::InvalidTau(format!(
                        "explicit profile has {} entries, need {len}",
                        values.len()
                    )));
                }
                let mut prev = f64::INFINITY;
                for (i, &t) in values[..len].iter().enumerate() {
                    if !(t > 0.0 && t <= 1.0) {
                        return Err(Error::InvalidTau(format!(
                            "tau_{} = {t} outside (0, 1]",
                            i + 1
                        )));
                    }
                    if t > prev {
                        return Err(Error::InvalidTau(format!(
                            "tau_{} = {t} exceeds tau_{} = {prev}",
                            i + 1,
                            i
                        )));
                    }
                    prev = t;
                }
            }
        }
        Ok(())
    }

    /// `beta(m) = sum_{n <= m} tau_n`.
    pub fn beta(&self, m: usize) -> f64 {
        (1..=m).map(|n| self.tau(n)).sum()
    }

    /// `sum_{n <= m} tau_n^2`.
    pub fn sum_sq(&self, m: usize) -> f64 {
        (1..=m)
            .map(|n| {
                let t = self.tau(n);
                t * t
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    pub length: usize,
    pub tau: TauProfile,
    pub seed: u64,
}

impl SelectorConfig {
    pub fn new(length: usize, tau: TauProfile, seed: u64) -> Self {
        Self { length, tau, seed }
    }

    pub fn power_law(length: usize, alpha: f64, seed: u64) -> Self {
        Self::new(length, TauProfile::power_law(alpha), seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(invalid("selector length must be at least 1"));
        }
        self.tau.validate(self.length)
    }
}

/// One realization `xi_1 .. xi_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectorSequence {
    pub config: SelectorConfig,
    /// `bits[n - 1] = xi_n`, each 0 or 1.
    pub bits: Vec<u8>,
    pub count: usize,
    pub beta: f64,
}

/// Bit `xi_n` of the sequence generated from `config`, computed without
/// generating any other bit.
pub fn selector_bit(config: &SelectorConfig, n: usize) -> u8 {
    let u = unit_f64(CounterRng::word_at(
        config.seed,
        SELECTOR_STREAM,
        (n - 1) as u64,
    ));
    u8::from(u < config.tau.tau(n))
}

pub fn generate(config: &SelectorConfig) -> Result<SelectorSequence> {
    config.validate()?;
    let mut rng = CounterRng::new(config.seed, SELECTOR_STREAM);
    let mut bits = Vec::with_capacity(config.length);
    let mut beta = 0.0;
    for n in 1..=config.length {
        let t = config.tau.tau(n);
        beta += t;
        bits.push(u8::from(rng.next_f64() < t));
    }
    let count = bits.iter().filter(|&&b| b == 1).count();
    Ok(SelectorSequence {
        config: config.clone(),
        bits,
        count,
        beta,
    })
}

impl SelectorSequence {
    /// Wrap an externally supplied bit pattern (test fixtures, imported data).
    /// The seed is recorded as 0 and plays no role.
    pub fn from_bits(tau: TauProfile, bits: Vec<u8>) -> Result<Self> {
        let config = SelectorConfig::new(bits.len(), tau, 0);
        config.validate()?;
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(invalid(format!("bit {} is {}, not 0/1", i + 1, bits[i])));
        }
        let beta = config.tau.beta(bits.len());
        let count = bits.iter().filter(|&&b| b == 1).count();
        Ok(Self {
            config,
            bits,
            count,
            beta,
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn bit(&self, n: usize) -> u8 {
        self.bits[n - 1]
    }

    #[inline]
    pub fn tau(&self, n: usize) -> f64 {
        self.config.tau.tau(n)
    }

    pub fn beta_at(&self, m: usize) -> f64 {
        self.config.tau.beta(m)
    }

    /// Positions with `xi_n = 1`, increasing.
    pub fn enumerate(&self) -> Vec<u64> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| (i + 1) as u64)
            .collect()
    }

    /// Sup over all windows `[start, start + m)` inside `[1, N]` of the
    /// in-window density, for each requested `m`.
    pub fn banach_density(&self, window_lengths: &[usize]) -> Result<DensityReport> {
        let n = self.len();
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0u32);
        let mut acc = 0u32;
        for &b in &self.bits {
            acc += b as u32;
            prefix.push(acc);
        }
        let mut windows = Vec::with_capacity(window_lengths.len());
        for &m in window_lengths {
            if m == 0 || m > n {
                return Err(Error::OutOfRange {
                    what: "window length",
                    value: m as u64,
                    limit: n as u64,
                });
            }
            let (mut best, mut witness) = (0u32, 1usize);
            for start in 1..=n - m + 1 {
                let c = prefix[start - 1 + m] - prefix[start - 1];
                if c > best {
                    best = c;
                    witness = start;
                }
            }
            windows.push(WindowDensity {
                m,
                sup_density: best as f64 / m as f64,
                witness_start: witness,
            });
        }
        Ok(DensityReport::from_windows(windows))
    }

    /// Least-squares slope of `ln n_k` against `ln k` over 1-based
    /// `k` in `[k_lo, k_hi]`.
    pub fn growth_exponent(&self, k_lo: usize, k_hi: usize) -> Result<f64> {
        if k_lo == 0 || k_hi <= k_lo {
            return Err(invalid(format!("degenerate fit range [{k_lo}, {k_hi}]")));
        }
        if k_hi > self.count {
            return Err(Error::OutOfRange {
                what: "fit range end",
                value: k_hi as u64,
                limit: self.count as u64,
            });
        }
        let positions = self.enumerate();
        let xs: Vec<f64> = (k_lo..=k_hi).map(|k| (k as f64).ln()).collect();
        let ys: Vec<f64> = (k_lo..=k_hi)
            .map(|k| (positions[k - 1] as f64).ln())
            .collect();
        least_squares(&xs, &ys)
            .map(|(slope, _)| slope)
            .ok_or_else(|| invalid("degenerate fit"))
    }

    /// `beta(N')^{-1} sum_{n <= N'} xi_n` at each checkpoint `N'`.
    pub fn normalization_ratio(&self, checkpoints: &[usize]) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..checkpoints.len()).collect();
        order.sort_by_key(|&i| checkpoints[i]);
        let mut out = vec![0.0; checkpoints.len()];
        let (mut beta, mut count, mut n) = (0.0, 0usize, 0usize);
        for i in order {
            let target = checkpoints[i];
            if target == 0 || target > self.len() {
                return Err(Error::OutOfRange {
                    what: "checkpoint",
                    value: target as u64,
                    limit: self.len() as u64,
                });
            }
            while n < target {
                n += 1;
                beta += self.tau(n);
                count += self.bit(n) as usize;
            }
            out[i] = count as f64 / beta;
        }
        Ok(out)
    }

    /// Maximal runs of at least `run` consecutive selected integers,
    /// reported as `(start, length)`.
    pub fn runs_at_least(&self, run: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0usize;
        let mut len = 0usize;
        for (i, &b) in self.bits.iter().enumerate() {
            if b == 1 {
                if len == 0 {
                    start = i + 1;
                }
                len += 1;
            } else {
                if len >= run && run > 0 {
                    out.push((start, len));
                }
                len = 0;
            }
        }
        if len >= run && run > 0 {
            out.push((start, len));
        }
        out
    }

    /// One selected position per line.
    pub fn to_newline_integers(&self) -> String {
        let mut s = String::new();
        for p in self.enumerate() {
            s.push_str(&p.to_string());
            s.push('\n');
        }
        s
    }

    /// 8-byte little-endian length `N`, then `ceil(N / 8)` bytes with
    /// `xi_n` at bit `(n - 1) % 8` (LSB first) of byte `(n - 1) / 8`.
    pub fn to_packed_bits(&self) -> Vec<u8> {
        pack_bits(&self.bits)
    }
}

pub fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + bits.len().div_ceil(8));
    out.extend_from_slice(&(bits.len() as u64).to_le_bytes());
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            byte |= (b & 1) << i;
        }
        out.push(byte);
    }
    out
}

pub fn unpack_bits(bytes: &[u8]) -> Result<Vec<u8>> {
    if bytes.len() < 8 {
        return Err(Error::Parse("packed bit stream shorter than header".into()));
    }
    let mut header = [0u8; 8];
    header.copy_from_slice(&bytes[..8]);
    let n = u64::from_le_bytes(header) as usize;
    let body = &bytes[8..];
    if body.len() != n.div_ceil(8) {
        return Err(Error::Parse(format!(
            "packed bit stream declares {n} bits but carries {} bytes",
            body.len()
        )));
    }
    Ok((0..n).map(|i| (body[i / 8] >> (i % 8)) & 1).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowDensity {
    pub m: usize,
    pub sup_density: f64,
    /// Earliest window start attaining the sup.
    pub witness_start: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityTrend {
    Falling,
    Flat,
    Rising,
}

/// Finite-range surrogate for Banach density: sup-window densities over a
/// ladder of window lengths. A trend is reported, never a limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub windows: Vec<WindowDensity>,
    pub extrapolated_density: f64,
    pub trend: DensityTrend,
}

impl DensityReport {
    fn from_windows(windows: Vec<WindowDensity>) -> Self {
        let mut sorted: Vec<&WindowDensity> = windows.iter().collect();
        sorted.sort_by_key(|w| w.m);
        let (extrapolated_density, trend) = match (sorted.first(), sorted.last()) {
            (Some(lo), Some(hi)) => {
                let trend = if hi.sup_density < lo.sup_density {
                    DensityTrend::Falling
                } else if hi.sup_density > lo.sup_density {
                    DensityTrend::Rising
                } else {
                    DensityTrend::Flat
                };
                (hi.sup_density, trend)
            }
            _ => (0.0, DensityTrend::Flat),
        };
        Self {
            windows,
            extrapolated_density,
            trend,
        }
    }
}
