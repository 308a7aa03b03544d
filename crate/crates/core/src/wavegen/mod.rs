//! Prototype waveform generators.
//!
//! Every frequency-keyed generator (BFSK, Costas, LFM) builds an
//! [`FmFunction`] and integrates it with [`fm_to_waveform`], so the result is
//! phase-continuous and exactly unit modulus.

mod costas;
mod gf;
mod mseq;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub use costas::{gen_costas_perm, verify_costas, verify_costas_slice, CostasPermutation, BACKTRACK_MAX_ORDER, MAX_ORDER};
pub use mseq::{default_taps, gen_msequence, BinarySequence, DEFAULT_TAPS};

use crate::error::{Error, Result};
use crate::waveform::{FmFunction, Waveform};

/// Phase-closure tolerance for [`fm_to_waveform`], in cycles.
pub const CLOSURE_TOLERANCE_CYCLES: f64 = 1e-6;

/// Name of the noise generator recorded in waveform metadata.
pub const NOISE_ALGORITHM: &str = "chacha20+box-muller";

fn whole_samples(what: &'static str, value: f64) -> Result<usize> {
    let rounded = value.round();
    if !value.is_finite() || rounded < 1.0 || (value - rounded).abs() > 1e-6 * rounded.max(1.0) {
        return Err(Error::NonIntegerSamples { what, value });
    }
    Ok(rounded as usize)
}

/// Each chip becomes `chip_samples` copies of ±1.
pub fn bpsk_from_bits(bits: &BinarySequence, chip_samples: usize, sample_rate: f64) -> Result<Waveform> {
    if chip_samples == 0 {
        return Err(Error::invalid("chip_samples must be at least 1"));
    }
    let samples: Vec<Complex64> = bits
        .bits()
        .iter()
        .flat_map(|&b| std::iter::repeat_n(Complex64::new(b as f64, 0.0), chip_samples))
        .collect();
    let n = samples.len();
    Waveform::periodic(
        samples,
        sample_rate,
        format!("bpsk chips={} chip_samples={chip_samples} fs={sample_rate}", bits.len()),
    )
    .map(|w| w.with_meta("generator", "bpsk").with_meta("samples", n))
}

/// FM program of a binary FSK period: `+delta_f` on +1 chips, `-delta_f` on
/// -1 chips, plus the smallest constant offset that closes the period's phase
/// to a whole number of cycles.
///
/// With `delta_f = 1/(2·chip_duration)` and an odd chip count the raw program
/// accumulates an odd multiple of π per period; the offset (±wrf/2 in that
/// case) shifts the spectrum by half a Doppler bin and keeps the periodic
/// extension phase-continuous.
pub fn bfsk_fm(bits: &BinarySequence, chip_duration: f64, delta_f: f64, sample_rate: f64) -> Result<FmFunction> {
    if !(delta_f.is_finite() && delta_f >= 0.0) {
        return Err(Error::invalid(format!("delta_f must be non-negative, got {delta_f}")));
    }
    let spc = whole_samples("chip_duration × sample_rate", chip_duration * sample_rate)?;
    let n = bits.len() * spc;
    let raw_cycles = bits.imbalance() as f64 * delta_f * spc as f64 / sample_rate;
    let offset = (raw_cycles.round() - raw_cycles) * sample_rate / n as f64;
    let freqs = bits
        .bits()
        .iter()
        .flat_map(|&b| std::iter::repeat_n(b as f64 * delta_f + offset, spc))
        .collect();
    FmFunction::new(freqs, sample_rate)
}

/// Phase-continuous binary FSK built from a ±1 sequence.
pub fn gen_bfsk(bits: &BinarySequence, chip_duration: f64, delta_f: f64, sample_rate: f64) -> Result<Waveform> {
    let fm = bfsk_fm(bits, chip_duration, delta_f, sample_rate)?;
    let w = fm_to_waveform(&fm)?;
    let label = format!(
        "bfsk chips={} chip_s={chip_duration} delta_f_hz={delta_f} fs={sample_rate}",
        bits.len()
    );
    Ok(w.relabel(label).with_meta("generator", "bfsk"))
}

/// FM program of a Costas FSK period; chip k sits at
/// `(perm[k] - (order+1)/2) · freq_step`.
pub fn costas_fm(perm: &CostasPermutation, chip_duration: f64, freq_step: f64, sample_rate: f64) -> Result<FmFunction> {
    let spc = whole_samples("chip_duration × sample_rate", chip_duration * sample_rate)?;
    let center = (perm.order() as f64 + 1.0) / 2.0;
    let freqs = perm
        .as_slice()
        .iter()
        .flat_map(|&v| std::iter::repeat_n((v as f64 - center) * freq_step, spc))
        .collect();
    FmFunction::new(freqs, sample_rate)
}

pub fn costas_waveform(perm: &CostasPermutation, chip_duration: f64, freq_step: f64, sample_rate: f64) -> Result<Waveform> {
    let fm = costas_fm(perm, chip_duration, freq_step, sample_rate)?;
    let w = fm_to_waveform(&fm)?;
    let perm_text = perm
        .as_slice()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let label = format!(
        "costas order={} chip_s={chip_duration} step_hz={freq_step} fs={sample_rate}",
        perm.order()
    );
    Ok(w.relabel(label).with_meta("generator", "costas").with_meta("perm", perm_text))
}

/// Linear sweep from `-B/2` to `+B/2` over one period, evaluated at sample
/// midpoints so the period closes in phase exactly.
pub fn lfm_fm(swept_bandwidth: f64, wrf: f64, sample_rate: f64) -> Result<FmFunction> {
    if !(wrf.is_finite() && wrf > 0.0) {
        return Err(Error::invalid(format!("wrf must be positive, got {wrf}")));
    }
    let n = whole_samples("sample_rate / wrf", sample_rate / wrf)?;
    let freqs = (0..n)
        .map(|i| swept_bandwidth * ((i as f64 + 0.5) / n as f64 - 0.5))
        .collect();
    FmFunction::new(freqs, sample_rate)
}

pub fn gen_lfm(swept_bandwidth: f64, wrf: f64, sample_rate: f64) -> Result<Waveform> {
    let w = fm_to_waveform(&lfm_fm(swept_bandwidth, wrf, sample_rate)?)?;
    let label = format!("lfm bw_hz={swept_bandwidth} wrf_hz={wrf} fs={sample_rate}");
    Ok(w.relabel(label).with_meta("generator", "lfm"))
}

/// i.i.d. circular complex Gaussian samples with unit mean power.
///
/// Uniforms come from ChaCha20 seeded via `seed_from_u64`; the Gaussian pair
/// is the Box–Muller transform `sqrt(-ln u1)·e^{j2πu2}`, which gives variance
/// 1/2 per quadrature.
pub fn gen_noise(n_samples: usize, seed: u64, sample_rate: f64) -> Result<Waveform> {
    if n_samples < 2 {
        return Err(Error::invalid(format!("noise needs at least 2 samples, got {n_samples}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let samples = (0..n_samples)
        .map(|_| {
            // 1 - [0,1) keeps ln away from zero
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            Complex64::from_polar((-u1.ln()).sqrt(), 2.0 * PI * u2)
        })
        .collect();
    let label = format!("noise n={n_samples} seed={seed} rng={NOISE_ALGORITHM} fs={sample_rate}");
    Ok(Waveform::periodic(samples, sample_rate, label)?
        .with_meta("generator", "noise")
        .with_meta("seed", seed)
        .with_meta("rng", NOISE_ALGORITHM))
}

/// Integrates an FM program: `s[0] = 1`, `φ[n] = φ[n-1] + 2π f[n-1] / fs`.
///
/// Logs a warning when the period does not close to a whole number of cycles
/// within [`CLOSURE_TOLERANCE_CYCLES`].
pub fn fm_to_waveform(fm: &FmFunction) -> Result<Waveform> {
    let closure = fm.closure_error_cycles();
    if closure > CLOSURE_TOLERANCE_CYCLES {
        log::warn!(
            "FM program accumulates {:.9} cycles per period ({closure:.3e} from a whole cycle); \
             the periodic extension is not phase-continuous",
            fm.total_cycles()
        );
    }
    let mut cycles = 0.0f64;
    let samples = fm
        .freq_samples
        .iter()
        .map(|&f| {
            let s = Complex64::from_polar(1.0, 2.0 * PI * cycles);
            cycles = (cycles + f / fm.sample_rate).rem_euclid(1.0);
            s
        })
        .collect();
    Ok(Waveform::periodic(samples, fm.sample_rate, "fm")?.with_meta("generator", "fm"))
}

/// Keeps every `factor`-th sample starting at index 0.
pub fn downsample(w: &Waveform, factor: usize) -> Result<Waveform> {
    downsample_from(w, factor, 0)
}

/// Keeps samples `offset, offset + factor, ...`; `offset < factor`.
///
/// For chip-keyed waveforms, `offset = chip_samples / 2` samples chip centers.
pub fn downsample_from(w: &Waveform, factor: usize, offset: usize) -> Result<Waveform> {
    if factor == 0 || !w.len().is_multiple_of(factor) {
        return Err(Error::NotADivisor { factor, len: w.len() });
    }
    if offset >= factor {
        return Err(Error::invalid(format!("offset {offset} must be below factor {factor}")));
    }
    let samples = w.samples().iter().skip(offset).step_by(factor).copied().collect();
    let label = format!("{} | downsample factor={factor} offset={offset}", w.label());
    let mut out = Waveform::new(samples, w.sample_rate() / factor as f64, w.wrf(), label)?;
    out.meta = w.meta.clone();
    Ok(out)
}
