mod common;

use common::Draw;
use ergolab::dynsys::{
    convergence_diagnostic, expected_average, ks_uniform, rotation_pushforward_ks, subsequence_average,
    transference_check, DynSystem, Observable, State,
};
use ergolab::kernel::build_triple;
use ergolab::selector::generate;
use ergolab::{IntegerSignal, SelectorConfig, TauProfile};

const THETA: f64 = std::f64::consts::SQRT_2 - 1.0;

fn rotation() -> DynSystem {
    DynSystem::CircleRotation { angle: THETA }
}

fn half() -> Observable {
    Observable::IntervalIndicator { a: 0.0, b: 0.5 }
}

/// Visits to `[0, 1/2)` among `x0 + n theta`, `n = 1..=big_n`, with each
/// point placed independently of the previous one.
fn direct_visits(x0: f64, big_n: usize) -> Vec<u32> {
    let mut acc = 0;
    (1..=big_n)
        .map(|n| {
            let y = (x0 + (n as f64 * THETA).fract()).fract();
            acc += u32::from(y < 0.5);
            acc
        })
        .collect()
}

#[test]
fn constant_observable_averages_to_one() {
    let s = generate(&SelectorConfig::power_law(5000, 0.0, 1)).unwrap();
    let one = Observable::Constant { value: 1.0 };
    for n in [1, 2, 17, 5000] {
        assert_eq!(subsequence_average(&rotation(), &one, &s, n, State::Circle(0.3)).unwrap(), 1.0);
    }
    for n in [1, 50, 4999] {
        let e = expected_average(&rotation(), &one, &TauProfile::power_law(0.4), n, State::Circle(0.1)).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rotation_equidistributes() {
    let n = 1_000_000;
    let s = generate(&SelectorConfig::power_law(n, 0.0, 2)).unwrap();
    let a = subsequence_average(&rotation(), &half(), &s, n, State::Circle(0.0)).unwrap();
    assert!((a - 0.5).abs() < 0.01);
    let e = expected_average(&rotation(), &half(), &TauProfile::power_law(0.25), n, State::Circle(0.0)).unwrap();
    assert!((e - 0.5).abs() < 0.01);
    let s = generate(&SelectorConfig::power_law(n, 0.25, 3)).unwrap();
    let a = subsequence_average(&rotation(), &half(), &s, n, State::Circle(0.2)).unwrap();
    assert!((a - 0.5).abs() < 0.01);
}

#[test]
fn birkhoff_average_matches_direct_orbit() {
    let n = 200_000;
    let s = generate(&SelectorConfig::power_law(n, 0.0, 4)).unwrap();
    for x0 in [0.0, 0.123, 0.77] {
        let visits = direct_visits(x0, n);
        for big_n in [1usize, 10, 4095, 4096, 4097, 99_999, n] {
            let a = subsequence_average(&rotation(), &half(), &s, big_n, State::Circle(x0)).unwrap();
            let oracle = visits[big_n - 1] as f64 / big_n as f64;
            // a point within rounding of 1/2 may be counted differently
            assert!((a - oracle).abs() <= 1.0 / big_n as f64 + 1e-12, "x0 {x0} N {big_n}");
        }
    }
}

#[test]
fn unit_tau_expected_equals_birkhoff() {
    let n = 10_000;
    let tau = TauProfile::constant(1.0, n);
    let s = generate(&SelectorConfig::new(n, tau.clone(), 5)).unwrap();
    for big_n in [1, 100, n] {
        let a = subsequence_average(&rotation(), &half(), &s, big_n, State::Circle(0.4)).unwrap();
        let e = expected_average(&rotation(), &half(), &tau, big_n, State::Circle(0.4)).unwrap();
        assert_eq!(a, e);
    }
}

#[test]
fn birkhoff_gaps_follow_ostrowski_bound() {
    // theta = [0; 2, 2, 2, ...], so |S_N - N/2| <= 2 * 2 * (digits + 1)
    // with at most log_{1 + sqrt 2} N Ostrowski digits
    let n = 1 << 20;
    let s = generate(&SelectorConfig::power_law(n, 0.0, 6)).unwrap();
    let checkpoints: Vec<usize> = (4..=20).map(|k| 1usize << k).collect();
    let grid: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
    let rep = convergence_diagnostic(&rotation(), &half(), &s, &checkpoints, &grid, 0.02).unwrap();
    for t in &rep.traces {
        for (&big_n, &v) in checkpoints.iter().zip(&t.values) {
            let digits = (big_n as f64).ln() / (1.0 + 2f64.sqrt()).ln();
            let bound = 4.0 * (digits + 1.0) / big_n as f64;
            assert!((v - 0.5).abs() <= bound + 1e-12, "x {} N {big_n}", t.x);
        }
    }
    assert_eq!(rep.converged_fraction, 1.0);
}

#[test]
fn constant_observable_has_no_gaps() {
    let s = generate(&SelectorConfig::new(4096, TauProfile::constant(1.0, 4096), 7)).unwrap();
    let one = Observable::Constant { value: 1.0 };
    let rep = convergence_diagnostic(&rotation(), &one, &s, &[64, 512, 4096], &[0.0, 0.5], 1e-9).unwrap();
    for t in &rep.traces {
        assert_eq!(t.max_gap, 0.0);
    }
}

#[test]
fn diagnostic_rejects_bad_input() {
    let s = generate(&SelectorConfig::power_law(100, 0.0, 7)).unwrap();
    assert!(convergence_diagnostic(&rotation(), &half(), &s, &[10, 5], &[0.0], 0.1).is_err());
    assert!(convergence_diagnostic(&rotation(), &half(), &s, &[10, 200], &[0.0], 0.1).is_err());
    assert!(convergence_diagnostic(&rotation(), &half(), &s, &[10], &[], 0.1).is_err());
    assert!(convergence_diagnostic(&rotation(), &half(), &s, &[10], &[1.5], 0.1).is_err());
    let shift = DynSystem::IntegerShift;
    assert!(subsequence_average(&shift, &half(), &s, 10, State::Integer(0)).is_err());
    assert!(subsequence_average(&rotation(), &half(), &s, 10, State::Integer(0)).is_err());
    let bad = DynSystem::CircleRotation { angle: 1.5 };
    assert!(subsequence_average(&bad, &half(), &s, 10, State::Circle(0.0)).is_err());
}

#[test]
fn shift_average_of_point_mass_reads_the_kernel() {
    let s = generate(&SelectorConfig::power_law(256, 0.3, 8)).unwrap();
    let t = build_triple(&s, 8).unwrap();
    let f = Observable::FiniteSignal { signal: IntegerSignal::delta(0, 1.0) };
    for x in -256i64..=3 {
        let a = subsequence_average(&DynSystem::IntegerShift, &f, &s, 256, State::Integer(x)).unwrap();
        assert!((a - t.mu.get(-x)).abs() <= 1e-15, "x {x}");
    }
    let rep = transference_check(&IntegerSignal::delta(0, 1.0), &s, 8).unwrap();
    assert!(rep.holds);
    assert_eq!(rep.window, (-256, 1));
    assert!((rep.scale - t.mu.linf()).abs() <= 1e-15);
}

#[test]
fn transference_of_zero_and_random_signals() {
    let s = generate(&SelectorConfig::power_law(1 << 10, 0.25, 9)).unwrap();
    let rep = transference_check(&IntegerSignal::zero(), &s, 6).unwrap();
    assert_eq!(rep.max_discrepancy, 0.0);
    assert!(rep.holds);
    let mut r = Draw::new(10, 0);
    for j in [0, 3, 7, 10] {
        let phi = r.signal(300);
        let rep = transference_check(&phi, &s, j).unwrap();
        assert!(rep.holds, "j {j}: {}", rep.relative_discrepancy);
    }
    assert!(transference_check(&IntegerSignal::delta(0, 1.0), &s, 11).is_err());
}

#[test]
fn pushforward_stays_uniform() {
    let samples = 1000;
    let mut ok = 0;
    for trial in 0..100u64 {
        let d = rotation_pushforward_ks(THETA, trial * 37 + 1, samples, trial).unwrap();
        if d <= 2.0 / (samples as f64).sqrt() {
            ok += 1;
        }
    }
    assert!(ok >= 95, "{ok}");
}

#[test]
fn ks_examples() {
    assert!((ks_uniform(&[0.5]) - 0.5).abs() < 1e-15);
    let grid: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
    assert!((ks_uniform(&grid) - 0.005).abs() < 1e-12);
    assert!((ks_uniform(&[0.0; 10]) - 1.0).abs() < 1e-15);
}
