//! Random test inputs shared by the integration and acceptance targets.

#![allow(dead_code)]

use ergolab::rng::CounterRng;
use ergolab::IntegerSignal;

pub struct Draw(CounterRng);

impl Draw {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self(CounterRng::new(seed, stream))
    }

    pub fn unit(&mut self) -> f64 {
        self.0.next_f64()
    }

    /// Uniform on `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        (self.unit() * n as f64) as u64 % n.max(1)
    }

    /// Uniform on `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + self.unit() * (hi.ln() - lo.ln())).exp()
    }

    /// Signed value with a Pareto(1.5) magnitude.
    pub fn heavy(&mut self) -> f64 {
        let mag = (1.0 - self.unit()).powf(-1.0 / 1.5);
        if self.unit() < 0.5 {
            -mag
        } else {
            mag
        }
    }

    pub fn gaussianish(&mut self) -> f64 {
        (0..4).map(|_| self.unit() - 0.5).sum::<f64>()
    }

    /// Mixture of point masses, constant blocks and dense noise inside
    /// `[-extent, extent]`.
    pub fn signal(&mut self, extent: i64) -> IntegerSignal {
        let mut acc = IntegerSignal::zero();
        let parts = 1 + self.below(4);
        for _ in 0..parts {
            let a = self.range(-extent, extent);
            let piece = match self.below(3) {
                0 => IntegerSignal::delta(a, self.heavy()),
                1 => {
                    let len = 1 + self.below((extent - a + 1).clamp(1, 64) as u64) as i64;
                    IntegerSignal::block(a, a + len, self.heavy())
                }
                _ => {
                    let len = 1 + self.below((extent - a + 1).clamp(1, 128) as u64) as usize;
                    let vals = (0..len).map(|_| self.gaussianish()).collect();
                    IntegerSignal::new(a, vals)
                }
            };
            acc = acc.add(&piece);
        }
        acc
    }

    /// Nonzero signal of exactly `len` dense samples starting at `offset`.
    pub fn dense(&mut self, offset: i64, len: usize) -> IntegerSignal {
        let mut vals: Vec<f64> = (0..len).map(|_| self.unit() * 2.0 - 1.0).collect();
        if let Some(v) = vals.first_mut() {
            *v = 1.0;
        }
        if let Some(v) = vals.last_mut() {
            *v = -1.0;
        }
        IntegerSignal::new(offset, vals)
    }
}

/// Reference convolution by the defining double sum, independent of the
/// library's summation code.
pub fn naive_convolve(f: &IntegerSignal, g: &IntegerSignal) -> Vec<(i64, f64)> {
    if f.is_zero() || g.is_zero() {
        return Vec::new();
    }
    let lo = f.offset() + g.offset();
    let hi = f.end() + g.end() - 1;
    let mut out = vec![0.0; (hi - lo) as usize];
    for (x, a) in f.iter() {
        for (y, b) in g.iter() {
            out[(x + y - lo) as usize] += a * b;
        }
    }
    out.into_iter().enumerate().map(|(i, v)| (lo + i as i64, v)).collect()
}
