use serde::{Deserialize, Serialize};

use super::IntegerSignal;
use crate::error::{Error, Result};
use crate::selector::SelectorSequence;

/// Random kernel, mean kernel and centered kernel at dyadic scale `2^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelTriple {
    pub j: u32,
    /// `beta(2^j)^{-1} xi_n` on `[1, 2^j]`.
    pub mu: IntegerSignal,
    /// `beta(2^j)^{-1} tau_n` on `[1, 2^j]`.
    pub mean_mu: IntegerSignal,
    /// `mu - mean_mu`.
    pub nu: IntegerSignal,
    /// Number of nonzero entries of `mu`.
    pub r: u64,
    /// `2^{j+1}`; `supp nu` lies in `[-R, R]`.
    pub big_r: u64,
    /// `beta(2^j)`.
    pub beta: f64,
}

pub fn build_triple(s: &SelectorSequence, j: u32) -> Result<KernelTriple> {
    let scale = 1usize
        .checked_shl(j)
        .filter(|&m| m <= s.len())
        .ok_or(Error::OutOfRange {
            what: "2^j",
            value: 1u64.checked_shl(j).unwrap_or(u64::MAX),
            limit: s.len() as u64,
        })?;
    let beta = s.beta_at(scale);
    let mut mu = Vec::with_capacity(scale);
    let mut mean = Vec::with_capacity(scale);
    let mut nu = Vec::with_capacity(scale);
    let mut r = 0u64;
    for n in 1..=scale {
        let xi = s.bit(n) as f64;
        let a = xi / beta;
        let b = s.tau(n) / beta;
        r += s.bit(n) as u64;
        mu.push(a);
        mean.push(b);
        nu.push(a - b);
    }
    Ok(KernelTriple {
        j,
        mu: IntegerSignal::new(1, mu),
        mean_mu: IntegerSignal::new(1, mean),
        nu: IntegerSignal::new(1, nu),
        r,
        big_r: 1u64 << (j + 1),
        beta,
    })
}

/// Triples for every `j` in `js`.
pub fn build_triples(s: &SelectorSequence, js: impl IntoIterator<Item = u32>) -> Result<Vec<KernelTriple>> {
    js.into_iter().map(|j| build_triple(s, j)).collect()
}

/// Default scale range `3 ..= floor(log2 N)`.
pub fn default_scales(n: usize) -> std::ops::RangeInclusive<u32> {
    3..=n.max(1).ilog2()
}
