use std::cell::RefCell;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::IntegerSignal;

/// Product of support lengths above which the FFT path is used.
pub const DEFAULT_FAST_THRESHOLD: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvolveOptions {
    pub fast_threshold: usize,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        Self {
            fast_threshold: DEFAULT_FAST_THRESHOLD,
        }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `(f * g)(x) = sum_y f(y) g(x - y)`.
pub fn convolve(f: &IntegerSignal, g: &IntegerSignal) -> IntegerSignal {
    convolve_with(f, g, ConvolveOptions::default())
}

pub fn convolve_with(f: &IntegerSignal, g: &IntegerSignal, opts: ConvolveOptions) -> IntegerSignal {
    if f.len().saturating_mul(g.len()) > opts.fast_threshold {
        convolve_fft(f, g)
    } else {
        convolve_direct(f, g)
    }
}

/// Schoolbook summation, skipping zero entries of the shorter operand.
pub fn convolve_direct(f: &IntegerSignal, g: &IntegerSignal) -> IntegerSignal {
    if f.is_zero() || g.is_zero() {
        return IntegerSignal::zero();
    }
    let (a, b) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    let bv = b.values();
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &av) in a.values().iter().enumerate() {
        if av == 0.0 {
            continue;
        }
        for (o, &w) in out[i..i + bv.len()].iter_mut().zip(bv) {
            *o += av * w;
        }
    }
    IntegerSignal::new(f.offset() + g.offset(), out)
}

pub fn convolve_fft(f: &IntegerSignal, g: &IntegerSignal) -> IntegerSignal {
    if f.is_zero() || g.is_zero() {
        return IntegerSignal::zero();
    }
    let out_len = f.len() + g.len() - 1;
    let n = out_len.next_power_of_two();
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });
    // pack f in the real part and g in the imaginary part: one forward transform
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for (c, &v) in buf.iter_mut().zip(f.values()) {
        c.re = v;
    }
    for (c, &v) in buf.iter_mut().zip(g.values()) {
        c.im = v;
    }
    fwd.process(&mut buf);
    // F[k] = (Z[k] + conj Z[n-k]) / 2, G[k] = (Z[k] - conj Z[n-k]) / 2i,
    // so F G = (Z[k]^2 - conj(Z[n-k])^2) / 4i
    let mut prod = vec![Complex::new(0.0, 0.0); n];
    for k in 0..n {
        let z = buf[k];
        let zc = buf[(n - k) % n].conj();
        let d = z * z - zc * zc;
        prod[k] = Complex::new(d.im / 4.0, -d.re / 4.0);
    }
    inv.process(&mut prod);
    let scale = 1.0 / n as f64;
    let values = prod[..out_len].iter().map(|c| c.re * scale).collect();
    IntegerSignal::new(f.offset() + g.offset(), values)
}

/// `f * f~`, symmetric about 0 with the origin value set to `sum f(x)^2`.
pub fn autocorrelate(f: &IntegerSignal) -> IntegerSignal {
    autocorrelate_with(f, ConvolveOptions::default())
}

pub fn autocorrelate_with(f: &IntegerSignal, opts: ConvolveOptions) -> IntegerSignal {
    if f.is_zero() {
        return IntegerSignal::zero();
    }
    let raw = convolve_with(f, &f.reflect(), opts);
    let half = f.len() as i64 - 1;
    let mut values = vec![0.0; 2 * f.len() - 1];
    values[half as usize] = f.l2_sq();
    for k in 1..=half {
        let v = 0.5 * (raw.get(k) + raw.get(-k));
        values[(half + k) as usize] = v;
        values[(half - k) as usize] = v;
    }
    IntegerSignal::new(-half, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_oracle(f: &[(i64, f64)], g: &[(i64, f64)]) -> IntegerSignal {
        let mut pts = Vec::new();
        for &(x, a) in f {
            for &(y, b) in g {
                pts.push((x + y, a * b));
            }
        }
        IntegerSignal::from_points(&pts)
    }

    #[test]
    fn point_masses_translate() {
        let r = convolve(&IntegerSignal::delta(2, 1.0), &IntegerSignal::delta(5, 1.0));
        assert_eq!(r, IntegerSignal::delta(7, 1.0));
    }

    #[test]
    fn box_self_convolution() {
        let b = IntegerSignal::block(0, 2, 1.0);
        let oracle = direct_oracle(&[(0, 1.0), (1, 1.0)], &[(0, 1.0), (1, 1.0)]);
        assert_eq!(oracle, IntegerSignal::new(0, vec![1.0, 2.0, 1.0]));
        assert_eq!(convolve_direct(&b, &b), oracle);
        let fast = convolve_fft(&b, &b);
        for x in 0..3 {
            assert!((fast.get(x) - oracle.get(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_annihilates() {
        let f = IntegerSignal::block(-3, 9, 2.0);
        assert!(convolve(&f, &IntegerSignal::zero()).is_zero());
        assert!(convolve_fft(&IntegerSignal::zero(), &f).is_zero());
    }

    #[test]
    fn autocorrelation_examples() {
        assert_eq!(autocorrelate(&IntegerSignal::delta(5, 1.0)), IntegerSignal::delta(0, 1.0));
        let b = IntegerSignal::block(0, 2, 1.0);
        assert_eq!(autocorrelate(&b), IntegerSignal::new(-1, vec![1.0, 2.0, 1.0]));
    }

    #[test]
    fn fft_path_agrees_on_signed_input() {
        let f = IntegerSignal::new(-7, (0..300).map(|i| ((i * 37 % 11) as f64) - 5.0).collect());
        let g = IntegerSignal::new(3, (0..200).map(|i| ((i * 13 % 7) as f64) * 0.5 - 1.0).collect());
        let d = convolve_direct(&f, &g);
        let q = convolve_fft(&f, &g);
        let scale = d.linf();
        for x in d.offset()..d.end() {
            assert!((d.get(x) - q.get(x)).abs() <= 1e-12 * scale);
        }
        let forced = convolve_with(&f, &g, ConvolveOptions { fast_threshold: 0 });
        assert_eq!(forced, q);
    }
}
