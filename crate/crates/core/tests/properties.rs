use std::f64::consts::PI;

use cwshape_core::analysis::{pacf_with, DelayExclusion};
use cwshape_core::io::{read_waveform, write_waveform};
use cwshape_core::wavegen::default_taps;
use cwshape_core::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn complex_vec(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b)), len)
}

fn unit_vec(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((0.0f64..1.0).prop_map(|t| Complex64::from_polar(1.0, 2.0 * PI * t)), len)
}

fn wave(s: Vec<Complex64>) -> Waveform {
    let n = s.len() as f64;
    Waveform::periodic(s, n * 10.0, "prop").unwrap()
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `|Σ_n s1(n)·conj(s2((n+k) mod N))·e^{-j2π m n/N}|`, straight from the definition.
fn direct_ambiguity(s1: &[Complex64], s2: &[Complex64], k: usize, m: i64) -> f64 {
    let n = s1.len();
    (0..n)
        .map(|i| {
            let ph = -2.0 * PI * (m as f64) * (i as f64) / n as f64;
            s1[i] * s2[(i + k) % n].conj() * Complex64::from_polar(1.0, ph)
        })
        .sum::<Complex64>()
        .norm()
}

fn energy(s: &[Complex64]) -> f64 {
    s.iter().map(|x| x.norm_sqr()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pacf_matches_direct_oracle(s in complex_vec(2..=64)) {
        prop_assume!(energy(&s) > 1e-3);
        let p = pacf(&wave(s.clone())).unwrap();
        let e = energy(&s);
        for k in 0..s.len() {
            prop_assert!((p.magnitudes[k] - direct_ambiguity(&s, &s, k, 0) / e).abs() < 1e-10);
        }
    }

    #[test]
    fn paaf_and_cross_match_direct_oracle(s1 in complex_vec(2..=48), seed in 0u64..1000) {
        prop_assume!(energy(&s1) > 1e-3);
        let n = s1.len();
        let s2 = gen_noise(n, seed, n as f64 * 10.0).unwrap().into_samples();
        let cfg = AmbiguityConfig::default().with_doppler(DopplerSpan::Full);
        let auto = paaf(&wave(s1.clone()), &cfg).unwrap();
        let surf = auto.surface.unwrap();
        let e1 = energy(&s1);
        for (i, &m) in surf.doppler_bins.iter().enumerate() {
            for k in 0..n {
                prop_assert!((surf.row(i)[k] - direct_ambiguity(&s1, &s1, k, m) / e1).abs() < 1e-10);
            }
        }
        let cross = cross_paf(&wave(s1.clone()), &wave(s2.clone()), &cfg).unwrap().surface.unwrap();
        let norm = (e1 * energy(&s2)).sqrt();
        for (i, &m) in cross.doppler_bins.iter().enumerate() {
            for k in 0..n {
                prop_assert!((cross.row(i)[k] - direct_ambiguity(&s1, &s2, k, m) / norm).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pacf_symmetry_and_zero_doppler_row(s in complex_vec(2..=64)) {
        prop_assume!(energy(&s) > 1e-3);
        let w = wave(s);
        let n = w.len();
        let p = pacf(&w).unwrap();
        for k in 1..n {
            prop_assert!((p.magnitudes[k] - p.magnitudes[n - k]).abs() < 1e-12);
        }
        let cfg = AmbiguityConfig::default().with_doppler(DopplerSpan::Full);
        let surf = paaf(&w, &cfg).unwrap().surface.unwrap();
        for k in 0..n {
            prop_assert_eq!(surf.at(0, k).unwrap(), p.magnitudes[k]);
        }
        prop_assert!((surf.at(0, 0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ambiguity_volume_is_invariant(a in unit_vec(8..=8), b in unit_vec(8..=8), n in 2usize..40) {
        // any two CM waveforms of one length carry the same total volume
        let extend = |v: &[Complex64]| v.iter().cycle().take(n).copied().collect::<Vec<_>>();
        let sa = extend(&a);
        let sb: Vec<Complex64> = extend(&b).iter().enumerate().map(|(i, x)| x * Complex64::from_polar(1.0, 0.37 * (i * i) as f64)).collect();
        let cfg = AmbiguityConfig::default().with_doppler(DopplerSpan::Full);
        let vol = |s: Vec<Complex64>| {
            let surf = paaf(&wave(s), &cfg).unwrap().surface.unwrap();
            surf.values.iter().map(|v| v * v).sum::<f64>()
        };
        let (va, vb) = (vol(sa), vol(sb));
        prop_assert!((va - vb).abs() <= 1e-9 * va, "{} vs {}", va, vb);
    }

    #[test]
    fn cm_projection_is_nearest_and_idempotent(x in complex_vec(4..=64), ys in prop::collection::vec(unit_vec(64..=64), 100)) {
        let w = wave(x.clone());
        let p = project_cm(&w);
        prop_assert!(p.max_modulus_error() < 1e-15);
        let pp = project_cm(&p);
        prop_assert!(dist(p.samples(), pp.samples()) < 1e-12);
        let d = dist(&x, p.samples());
        for y in &ys {
            prop_assert!(d <= dist(&x, &y[..x.len()]) + 1e-12);
        }
        for (a, b) in x.iter().zip(p.samples()) {
            if a.norm() > 1e-12 {
                prop_assert!((a.arg() - b.arg()).abs() < 1e-12 || (a.arg() - b.arg()).abs() > 2.0 * PI - 1e-12);
            }
        }
    }

    #[test]
    fn mask_projection_laws(
        x in complex_vec(16..=64),
        obd_frac in 0.05f64..0.6,
        chimney in prop::option::of(0.0f64..0.3),
        trials in prop::collection::vec(prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 64), 100),
    ) {
        let n = x.len();
        let fs = n as f64;
        let obd = obd_frac * fs;
        let mask = build_rsec_mask(obd, chimney.map(|c| obd + c * fs)).unwrap();
        let spec = Spectrum::from_bins(x.clone(), fs).unwrap();
        let p = project_mask(&spec, &mask).unwrap();
        prop_assert_eq!(mask_violation(&p, &mask).max_violation_db, 0.0);
        prop_assert_eq!(mask_violation(&p, &mask).violation_bin_count, 0);
        let pp = project_mask(&p, &mask).unwrap();
        prop_assert!(dist(p.bins(), pp.bins()) < 1e-12);
        prop_assert!(p.energy() <= spec.energy() * (1.0 + 1e-15));
        let reference = spec.reference_magnitude();
        for k in 0..n {
            let (a, b) = (x[k], p.bins()[k]);
            prop_assert!(b.norm() <= a.norm() * (1.0 + 1e-15));
            if b.norm() > 0.0 {
                prop_assert!((a / a.norm() - b / b.norm()).norm() < 1e-12);
            }
        }
        // random members of the same mask set are never closer
        let d = dist(&x, p.bins());
        let bounds: Vec<f64> = spec.bin_frequencies().iter().map(|&f| reference * mask.value_linear(f)).collect();
        for t in &trials {
            let y: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(bounds[k] * t[k].0, 2.0 * PI * t[k].1)).collect();
            prop_assert!(d <= dist(&x, &y) + 1e-12);
        }
    }

    #[test]
    fn mask_is_even_and_non_increasing(obd in 1.0f64..1e5, extra in 0.0f64..1e5, f1 in 0.0f64..1e6, f2 in 0.0f64..1e6) {
        let plain = build_rsec_mask(obd, None).unwrap();
        let chim = build_rsec_mask(obd, Some(obd + extra)).unwrap();
        for m in [&plain, &chim] {
            prop_assert_eq!(m.value_db(f1), m.value_db(-f1));
            let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
            if lo >= obd / 2.0 {
                prop_assert!(m.value_db(hi) <= m.value_db(lo));
            }
        }
        prop_assert!(chim.value_db(f1) <= plain.value_db(f1));
    }

    #[test]
    fn smoothing_keeps_mean(f in prop::collection::vec(-5e3f64..5e3, 10..400), sigma_us in 0.0f64..2e3) {
        let fm = FmFunction::new(f, 1e5).unwrap();
        let s = smooth_fm_gaussian(&fm, sigma_us * 1e-6).unwrap();
        let scale = fm.max_abs().max(1.0);
        prop_assert!((s.mean() - fm.mean()).abs() <= 1e-9 * scale);
    }

    #[test]
    fn phase_steps_are_bounded(f in prop::collection::vec(-2e5f64..2e5, 2..300)) {
        let fm = FmFunction::new(f, 1e6).unwrap();
        let w = fm_to_waveform(&fm).unwrap();
        let bound = 2.0 * PI * fm.max_abs() / fm.sample_rate + 1e-9;
        for pair in w.samples().windows(2) {
            prop_assert!((pair[1] * pair[0].conj()).arg().abs() <= bound);
        }
        prop_assert!(w.max_modulus_error() < 1e-12);
    }

    #[test]
    fn downsampling_composes(a in 1usize..6, b in 1usize..6, reps in 1usize..8) {
        let w = gen_noise(a * b * reps * 2, 5, 1e3).unwrap();
        let once = downsample(&w, a * b).unwrap();
        let twice = downsample(&downsample(&w, a).unwrap(), b).unwrap();
        prop_assert_eq!(once.samples(), twice.samples());
        prop_assert!((once.sample_rate() - twice.sample_rate()).abs() <= 1e-12 * once.sample_rate());
        prop_assert_eq!(once.wrf(), w.wrf());
    }

    #[test]
    fn bandwidth_is_monotone_in_level(seed in 0u64..500, l1 in -80.0f64..-1.0, l2 in -80.0f64..-1.0) {
        let w = gen_noise(256, seed, 256.0).unwrap();
        let fm = FmFunction::new(w.samples().iter().map(|s| s.re * 20.0).collect(), 256.0).unwrap();
        let spec = spectrum(&fm_to_waveform(&fm).unwrap()).unwrap();
        let (hi, lo) = if l1 > l2 { (l1, l2) } else { (l2, l1) };
        match (measure_bandwidth(&spec, hi), measure_bandwidth(&spec, lo)) {
            (Ok(a), Ok(b)) => prop_assert!(b >= a),
            (Ok(_), Err(Error::ExceedsNyquist { .. })) | (Err(Error::ExceedsNyquist { .. }), Err(Error::ExceedsNyquist { .. })) => {}
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn waveform_files_round_trip(s in complex_vec(1..=200), fs in 1.0f64..1e7) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.wfm");
        let w = Waveform::periodic(s, fs, "round trip, label with = and , inside").unwrap().with_meta("seed", 3);
        write_waveform(&w, &path).unwrap();
        let r = read_waveform(&path).unwrap();
        prop_assert_eq!(r, w);
    }

    #[test]
    fn generators_are_unit_modulus(order in 2usize..=12, seed in 0u64..100, step in 10.0f64..1e3) {
        let perm = gen_costas_perm(order, seed).unwrap();
        prop_assert!(verify_costas(&perm));
        let w = costas_waveform(&perm, 1e-3, step, 1e5).unwrap();
        prop_assert!(w.max_modulus_error() <= 1e-12);
        let l = gen_lfm(step * 10.0, 50.0, 1e5).unwrap();
        prop_assert!(l.max_modulus_error() <= 1e-12);
    }
}

#[test]
fn msequence_pacf_is_two_valued_after_bpsk() {
    for degree in 2..=12u32 {
        let bits = gen_msequence(degree, default_taps(degree).unwrap(), 1).unwrap();
        let n = bits.len();
        let w = bpsk_from_bits(&bits, 1, 1e3).unwrap();
        let p = pacf(&w).unwrap();
        for k in 1..n {
            assert!((p.magnitudes[k] - 1.0 / n as f64).abs() < 1e-12, "degree {degree} lag {k}");
        }
    }
}

#[test]
fn bpsk_chip_lags_scale_chip_acf() {
    // lags that are whole chips see the chip-level ACF times chip_samples
    let bits = gen_msequence(3, &[3, 2], 0b111).unwrap();
    let w = bpsk_from_bits(&bits, 4, 28.0).unwrap();
    let s = w.samples();
    for chip_lag in 0..7 {
        let r: f64 = (0..28).map(|n| (s[n] * s[(n + 4 * chip_lag) % 28].conj()).re).sum();
        let chip: i32 = (0..7).map(|i| (bits.bits()[i] * bits.bits()[(i + chip_lag) % 7]) as i32).sum();
        assert_eq!(r, 4.0 * chip as f64);
    }
}

#[test]
fn distinct_noise_seeds_are_uncorrelated() {
    let a = gen_noise(20_000, 1, 1e6).unwrap();
    let b = gen_noise(20_000, 2, 1e6).unwrap();
    let cfg = AmbiguityConfig::default().with_doppler(DopplerSpan::Hz(50.0));
    let r = cross_paf(&a, &b, &cfg).unwrap();
    let zero_row = r.surface.unwrap();
    let i = zero_row.doppler_bins.iter().position(|&m| m == 0).unwrap();
    let peak = zero_row.row(i).iter().cloned().fold(0.0, f64::max);
    assert!(20.0 * peak.log10() < -30.0);
}

#[test]
fn white_noise_rms_sidelobe() {
    let w = gen_noise(20_000, 42, 1e6).unwrap();
    let r = paaf_metrics(&w, &AmbiguityConfig::default()).unwrap();
    assert!((r.full.rms_sidelobe_db - -10.0 * 20_000f64.log10()).abs() < 0.5, "{:?}", r.full);
    assert!(r.full.max_sidelobe_db > r.full.rms_sidelobe_db);
}

#[test]
fn samples_exclusion_widens_mainlobe() {
    let perm = gen_costas_perm(10, 0).unwrap();
    let w = costas_waveform(&perm, 1e-3, 1e3, 1e5).unwrap();
    let narrow = pacf(&w).unwrap();
    let wide = pacf_with(&w, DelayExclusion::Samples(20)).unwrap();
    assert!(wide.max_sidelobe_db() <= narrow.max_sidelobe_db());
    assert_eq!(wide.mainlobe_halfwidth, 21);
}
