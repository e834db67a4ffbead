use ergolab::selector::{generate, pack_bits, selector_bit, unpack_bits};
use ergolab::{SelectorConfig, SelectorSequence, TauProfile};
use proptest::prelude::*;

fn sqrt_weights(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / (k as f64).sqrt()).sum()
}

/// Sup over every window by recounting each one from scratch.
fn scan_density(bits: &[u8], m: usize) -> f64 {
    (0..=bits.len() - m)
        .map(|s| bits[s..s + m].iter().map(|&b| b as usize).sum::<usize>())
        .max()
        .unwrap() as f64
        / m as f64
}

#[test]
fn deterministic_selectors_are_all_ones() {
    let s = generate(&SelectorConfig::power_law(5, 0.0, 1)).unwrap();
    assert_eq!(s.bits, vec![1; 5]);
    assert_eq!(s.beta, 5.0);
    assert_eq!(s.count, 5);
    assert_eq!(s.enumerate(), vec![1, 2, 3, 4, 5]);
}

#[test]
fn beta_matches_direct_sum() {
    let s = generate(&SelectorConfig::power_law(4, 0.5, 9)).unwrap();
    assert!((s.beta - sqrt_weights(4)).abs() < 1e-15);
    assert!((s.beta - 2.78445).abs() < 1e-5);
}

#[test]
fn regeneration_is_bit_identical() {
    let cfg = SelectorConfig::power_law(100_000, 0.3, 42);
    assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    let other = generate(&SelectorConfig::power_law(100_000, 0.3, 43)).unwrap();
    assert_ne!(generate(&cfg).unwrap().bits, other.bits);
}

#[test]
fn bits_are_addressable_in_isolation() {
    let cfg = SelectorConfig::power_law(5000, 0.25, 7);
    let s = generate(&cfg).unwrap();
    for n in [1usize, 2, 3, 1000, 4097, 5000] {
        assert_eq!(selector_bit(&cfg, n), s.bit(n));
    }
    // a prefix of a longer run is the shorter run
    let short = generate(&SelectorConfig::power_law(1000, 0.25, 7)).unwrap();
    assert_eq!(&s.bits[..1000], &short.bits[..]);
}

#[test]
fn rejects_invalid_configs() {
    assert!(generate(&SelectorConfig::power_law(0, 0.5, 1)).is_err());
    assert!(generate(&SelectorConfig::new(3, TauProfile::Explicit { values: vec![0.5, 0.0, 0.0] }, 1)).is_err());
    assert!(generate(&SelectorConfig::new(2, TauProfile::Explicit { values: vec![1.5, 0.5] }, 1)).is_err());
    // increasing profile
    assert!(generate(&SelectorConfig::new(2, TauProfile::Explicit { values: vec![0.2, 0.5] }, 1)).is_err());
    // ties are allowed
    assert!(generate(&SelectorConfig::new(2, TauProfile::Explicit { values: vec![0.5, 0.5] }, 1)).is_ok());
}

#[test]
fn enumerate_readout() {
    let s = SelectorSequence::from_bits(TauProfile::power_law(0.5), vec![1, 0, 1, 1]).unwrap();
    assert_eq!(s.enumerate(), vec![1, 3, 4]);
    let z = SelectorSequence::from_bits(TauProfile::power_law(0.5), vec![0; 6]).unwrap();
    assert!(z.enumerate().is_empty());
}

#[test]
fn density_examples() {
    let even: Vec<u8> = (1..=100).map(|n| u8::from(n % 2 == 0)).collect();
    let s = SelectorSequence::from_bits(TauProfile::constant(0.5, 100), even.clone()).unwrap();
    let r = s.banach_density(&[10]).unwrap();
    assert_eq!(r.windows[0].sup_density, scan_density(&even, 10));
    assert_eq!(r.windows[0].sup_density, 0.5);

    let powers: Vec<u8> = (1..=4096usize).map(|n| u8::from(n.is_power_of_two())).collect();
    let s = SelectorSequence::from_bits(TauProfile::constant(0.5, 4096), powers).unwrap();
    let r = s.banach_density(&[64, 512, 4096]).unwrap();
    for w in &r.windows {
        assert!(w.sup_density <= 13.0 / w.m as f64, "{w:?}");
    }
    assert!(r.windows[2].sup_density < r.windows[0].sup_density);
    assert_eq!(r.extrapolated_density, 13.0 / 4096.0);

    let ones = generate(&SelectorConfig::power_law(300, 0.0, 5)).unwrap();
    for w in ones.banach_density(&[1, 17, 300]).unwrap().windows {
        assert_eq!(w.sup_density, 1.0);
    }
    assert!(ones.banach_density(&[301]).is_err());
}

#[test]
fn density_report_json_fields() {
    let s = generate(&SelectorConfig::power_law(1000, 0.5, 5)).unwrap();
    let v = serde_json::to_value(s.banach_density(&[10, 100]).unwrap()).unwrap();
    for w in v["windows"].as_array().unwrap() {
        for key in ["m", "sup_density", "witness_start"] {
            assert!(w.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn growth_of_birkhoff_sequence() {
    let s = generate(&SelectorConfig::power_law(10_000, 0.0, 3)).unwrap();
    assert!((s.growth_exponent(1, 10_000).unwrap() - 1.0).abs() < 1e-6);
    assert!(s.growth_exponent(5, 5).is_err());
    assert!(s.growth_exponent(0, 50).is_err());
    assert!(s.growth_exponent(5, 10_001).is_err());
}

#[test]
fn growth_at_half_is_near_two() {
    for seed in 0..5 {
        let s = generate(&SelectorConfig::power_law(1_000_000, 0.5, seed)).unwrap();
        let slope = s.growth_exponent(100, s.count).unwrap();
        assert!((slope - 2.0).abs() < 0.1, "seed {seed}: {slope}");
    }
}

#[test]
fn normalization_concentrates() {
    let n = 1_000_000;
    let mut ratios = Vec::new();
    for seed in 0..100 {
        let s = generate(&SelectorConfig::power_law(n, 0.25, 1000 + seed)).unwrap();
        ratios.push(s.normalization_ratio(&[n]).unwrap()[0]);
    }
    let inside = ratios.iter().filter(|r| (0.9..=1.1).contains(*r)).count();
    assert!(inside >= 99, "{inside}");
    let (_, sd) = ergolab::stats::mean_and_std(&ratios);
    let beta = TauProfile::power_law(0.25).beta(n);
    assert!(sd <= 3.0 / beta.sqrt(), "sd {sd}");
}

#[test]
fn normalization_edge_cases() {
    let s = generate(&SelectorConfig::power_law(1000, 0.0, 1)).unwrap();
    assert!(s.normalization_ratio(&[1, 10, 999, 1000]).unwrap().iter().all(|&r| r == 1.0));
    let z = SelectorSequence::from_bits(TauProfile::power_law(0.9), vec![0; 50]).unwrap();
    assert_eq!(z.normalization_ratio(&[50, 10]).unwrap(), vec![0.0, 0.0]);
    assert!(z.normalization_ratio(&[51]).is_err());
}

#[test]
fn exports() {
    let s = SelectorSequence::from_bits(TauProfile::power_law(0.5), vec![1, 0, 1, 1, 0, 0, 0, 0, 1]).unwrap();
    assert_eq!(s.to_newline_integers(), "1\n3\n4\n9\n");
    let packed = s.to_packed_bits();
    assert_eq!(&packed[..8], &9u64.to_le_bytes());
    assert_eq!(&packed[8..], &[0b0000_1101, 0b1]);
    assert_eq!(unpack_bits(&packed).unwrap(), s.bits);
    assert!(unpack_bits(&packed[..9]).is_err());
}

proptest! {
    #[test]
    fn enumeration_is_increasing_with_count_entries(seed in any::<u64>(), n in 1usize..3000, alpha in 0.0f64..0.99) {
        let s = generate(&SelectorConfig::power_law(n, alpha, seed)).unwrap();
        let e = s.enumerate();
        prop_assert_eq!(e.len(), s.count);
        prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(e.iter().all(|&p| p >= 1 && p as usize <= n));
    }

    #[test]
    fn density_matches_exhaustive_scan(seed in any::<u64>(), n in 1usize..800, alpha in 0.0f64..0.99, frac in 0.0f64..1.0) {
        let s = generate(&SelectorConfig::power_law(n, alpha, seed)).unwrap();
        let m = 1 + ((n - 1) as f64 * frac) as usize;
        let r = s.banach_density(&[m]).unwrap();
        let w = &r.windows[0];
        prop_assert_eq!(w.sup_density, scan_density(&s.bits, m));
        // the witness attains the sup
        let c: usize = s.bits[w.witness_start - 1..w.witness_start - 1 + m].iter().map(|&b| b as usize).sum();
        prop_assert_eq!(c as f64 / m as f64, w.sup_density);
    }

    #[test]
    fn packed_bits_roundtrip(bits in proptest::collection::vec(0u8..2, 0..200)) {
        prop_assert_eq!(unpack_bits(&pack_bits(&bits)).unwrap(), bits);
    }
}
