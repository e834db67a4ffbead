use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finitely supported real function on Z, stored densely over its
/// bounding interval `[offset, offset + values.len())`.
///
/// The first and last stored values are nonzero; the zero signal has no
/// stored values and offset 0. Derived equality is therefore pointwise
/// equality on Z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignal", into = "RawSignal")]
pub struct IntegerSignal {
    offset: i64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSignal {
    offset: i64,
    values: Vec<f64>,
}

impl TryFrom<RawSignal> for IntegerSignal {
    type Error = Error;

    fn try_from(raw: RawSignal) -> Result<Self> {
        if raw.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("signal values must be finite".into()));
        }
        Ok(IntegerSignal::new(raw.offset, raw.values))
    }
}

impl From<IntegerSignal> for RawSignal {
    fn from(s: IntegerSignal) -> Self {
        RawSignal {
            offset: s.offset,
            values: s.values,
        }
    }
}

impl Default for IntegerSignal {
    fn default() -> Self {
        Self::zero()
    }
}

impl IntegerSignal {
    pub fn new(offset: i64, mut values: Vec<f64>) -> Self {
        let Some(first) = values.iter().position(|&v| v != 0.0) else {
            return Self::zero();
        };
        let last = values.iter().rposition(|&v| v != 0.0).unwrap();
        values.truncate(last + 1);
        values.drain(..first);
        // normalize -0.0 so serialized forms are canonical
        for v in values.iter_mut() {
            if *v == 0.0 {
                *v = 0.0;
            }
        }
        Self {
            offset: offset + first as i64,
            values,
        }
    }

    pub fn zero() -> Self {
        Self {
            offset: 0,
            values: Vec::new(),
        }
    }

    /// `value * delta_x`.
    pub fn delta(x: i64, value: f64) -> Self {
        Self::new(x, vec![value])
    }

    /// `value` on `[a, b)`.
    pub fn block(a: i64, b: i64, value: f64) -> Self {
        if b <= a {
            return Self::zero();
        }
        Self::new(a, vec![value; (b - a) as usize])
    }

    pub fn from_points(points: &[(i64, f64)]) -> Self {
        if points.is_empty() {
            return Self::zero();
        }
        let lo = points.iter().map(|p| p.0).min().unwrap();
        let hi = points.iter().map(|p| p.0).max().unwrap();
        let mut values = vec![0.0; (hi - lo + 1) as usize];
        for &(x, v) in points {
            values[(x - lo) as usize] += v;
        }
        Self::new(lo, values)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// One past the last stored point.
    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn get(&self, x: i64) -> f64 {
        if x < self.offset || x >= self.end() {
            0.0
        } else {
            self.values[(x - self.offset) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let o = self.offset;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (o + i as i64, v))
    }

    /// Number of points where the signal is nonzero.
    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.offset, self.values.iter().map(|v| c * v).collect())
    }

    pub fn abs(&self) -> Self {
        Self::new(self.offset, self.values.iter().map(|v| v.abs()).collect())
    }

    pub fn map(&self, f: impl Fn(i64, f64) -> f64) -> Self {
        Self::new(self.offset, self.iter().map(|(x, v)| f(x, v)).collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        if self.is_zero() && other.is_zero() {
            return Self::zero();
        }
        let lo = match (self.is_zero(), other.is_zero()) {
            (true, _) => other.offset,
            (_, true) => self.offset,
            _ => self.offset.min(other.offset),
        };
        let hi = self.end().max(other.end());
        let values = (lo..hi).map(|x| f(self.get(x), other.get(x))).collect();
        Self::new(lo, values)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// Restriction to `[lo, hi)`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        let a = lo.max(self.offset);
        let b = hi.min(self.end());
        if b <= a {
            return Self::zero();
        }
        let s = (a - self.offset) as usize;
        let e = (b - self.offset) as usize;
        Self::new(a, self.values[s..e].to_vec())
    }

    /// `sum_x f(x) g(x)`.
    pub fn inner(&self, other: &Self) -> f64 {
        let a = self.offset.max(other.offset);
        let b = self.end().min(other.end());
        (a..b).map(|x| self.get(x) * other.get(x)).sum()
    }

    /// `f~(x) = f(-x)`.
    pub fn reflect(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut values = self.values.clone();
        values.reverse();
        Self::new(-(self.end() - 1), values)
    }

    /// Max of `|f(x)|` over `x != 0`.
    pub fn sup_off_origin(&self) -> f64 {
        self.iter()
            .filter(|&(x, _)| x != 0)
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    /// Little-endian binary form: `i64` offset, `u64` length, `f64` values.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.values.len());
        out.extend_from_slice(&self.offset.to_le_bytes());
        out.extend_from_slice(&(self.values.len() as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 16 {
            return Err(Error::Parse("signal binary shorter than header".into()));
        }
        let word = |i: usize| {
            let mut b = [0u8; 8];
            b.copy_from_slice(&bytes[i..i + 8]);
            b
        };
        let offset = i64::from_le_bytes(word(0));
        let len = u64::from_le_bytes(word(8)) as usize;
        if bytes.len() != 16 + 8 * len {
            return Err(Error::Parse(format!(
                "signal binary declares {len} values but has {} payload bytes",
                bytes.len() - 16
            )));
        }
        let values: Vec<f64> = (0..len).map(|i| f64::from_le_bytes(word(16 + 8 * i))).collect();
        RawSignal { offset, values }.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimming_normalizes_representation() {
        let s = IntegerSignal::new(-3, vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0]);
        assert_eq!(s.offset(), -1);
        assert_eq!(s.values(), &[1.0, 0.0, 2.0]);
        assert_eq!(IntegerSignal::new(7, vec![0.0, -0.0]), IntegerSignal::zero());
        assert_eq!(s, IntegerSignal::from_points(&[(1, 2.0), (-1, 1.0)]));
    }

    #[test]
    fn reflection() {
        assert_eq!(IntegerSignal::delta(3, 1.0).reflect(), IntegerSignal::delta(-3, 1.0));
        let f = IntegerSignal::new(2, vec![1.0, -2.0, 5.0]);
        assert_eq!(f.reflect().reflect(), f);
        assert_eq!(f.reflect().get(-4), 5.0);
        let even = IntegerSignal::new(-1, vec![1.0, 2.0, 1.0]);
        assert_eq!(even.reflect(), even);
    }

    #[test]
    fn sup_off_origin_cases() {
        assert_eq!(IntegerSignal::delta(0, 9.0).sup_off_origin(), 0.0);
        assert_eq!(IntegerSignal::new(-1, vec![1.0, 2.0, 1.0]).sup_off_origin(), 1.0);
        assert_eq!(IntegerSignal::new(-2, vec![-4.0, 0.0, 8.0]).sup_off_origin(), 4.0);
    }

    #[test]
    fn arithmetic_and_restriction() {
        let a = IntegerSignal::block(0, 4, 1.0);
        let b = IntegerSignal::delta(6, 2.0);
        let s = a.add(&b);
        assert_eq!(s.len(), 7);
        assert_eq!(s.sub(&b), a);
        assert_eq!(s.restrict(2, 7), IntegerSignal::new(2, vec![1.0, 1.0, 0.0, 0.0, 2.0]));
        assert_eq!(s.restrict(4, 6), IntegerSignal::zero());
        assert_eq!(a.inner(&s), 4.0);
        assert_eq!(s.l1(), 6.0);
        assert_eq!(s.linf(), 2.0);
    }

    #[test]
    fn binary_and_json_forms() {
        let s = IntegerSignal::new(-5, vec![1.5, 0.0, -2.25]);
        let bin = s.to_binary();
        assert_eq!(&bin[..8], &(-5i64).to_le_bytes());
        assert_eq!(&bin[8..16], &3u64.to_le_bytes());
        assert_eq!(IntegerSignal::from_binary(&bin).unwrap(), s);
        assert!(IntegerSignal::from_binary(&bin[..20]).is_err());
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"offset":-5,"values":[1.5,0.0,-2.25]}"#);
        let untrimmed: IntegerSignal =
            serde_json::from_str(r#"{"offset":0,"values":[0.0,1.0]}"#).unwrap();
        assert_eq!(untrimmed, IntegerSignal::delta(1, 1.0));
    }
}
