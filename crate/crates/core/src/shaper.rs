//! Spectral shaping of constant-modulus waveforms.

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::{modulation_depth, Spectrum};
use crate::error::{Error, Result};
use crate::fft::FftPair;
use crate::mask::{violation_of_magnitudes, MaskReport, SpectralMask};
use crate::waveform::{FmFunction, Waveform};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShapeConfig {
    pub max_iterations: usize,
    pub tol_db: f64,
    /// Log progress every this many iterations; 0 disables.
    pub report_every: usize,
}

impl Default for ShapeConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            tol_db: 1e-3,
            report_every: 1_000,
        }
    }
}

impl ShapeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if !(self.tol_db > 0.0 && self.tol_db.is_finite()) {
            return Err(Error::invalid(format!("tol_db must be positive, got {}", self.tol_db)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub max_db: f64,
    pub sum_db: f64,
}

/// What one pass of mask projection followed by CM projection did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub iteration: usize,
    /// Violation of the new CM iterate.
    pub violation: MaskReport,
    /// `‖x_n − P_mask(x_n)‖`
    pub gap_to_mask: f64,
    /// `‖P_mask(x_n) − x_{n+1}‖`
    pub gap_to_cm: f64,
    /// 0 dB reference used for the mask projection.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeResult {
    /// Last iterate after the unit-modulus projection.
    pub cm_waveform: Waveform,
    /// Last iterate after the mask projection.
    pub masked_waveform: Waveform,
    pub iterations: usize,
    pub converged: bool,
    pub final_mask_violation_db: f64,
    pub final_modulation_depth: f64,
    pub violation_trace: Vec<TracePoint>,
}

/// Nearest mask-obeying spectrum with the same 0 dB reference: bins above
/// `reference · mask(f)` are scaled down onto the bound, phases kept.
pub fn project_mask(spectrum: &Spectrum, mask: &SpectralMask) -> Result<Spectrum> {
    let reference = spectrum.reference_magnitude();
    let bins = spectrum
        .bins()
        .iter()
        .zip(spectrum.bin_frequencies())
        .map(|(&b, &f)| clip(b, reference * mask.value_linear(f)))
        .collect();
    Spectrum::with_reference(bins, spectrum.sample_rate(), reference)
}

fn clip(b: Complex64, bound: f64) -> Complex64 {
    let mag = b.norm();
    if mag > bound {
        b * (bound / mag)
    } else {
        b
    }
}

fn unit(s: Complex64) -> Complex64 {
    let mag = s.norm();
    if mag > 0.0 {
        s / mag
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Nearest unit-modulus waveform; zero samples map to `1 + 0j`.
pub fn project_cm(w: &Waveform) -> Waveform {
    let samples = w.samples().iter().map(|&s| unit(s)).collect();
    w.with_samples(samples, w.label())
        .expect("unit-modulus samples are finite")
}

/// Relative errors of the FFT round trip on the current iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundTripCheck {
    /// `|Σ|x|² − Σ|X|²/N| / Σ|x|²`
    pub parseval: f64,
    /// `‖IDFT(DFT(x)) − x‖∞ / ‖x‖∞`
    pub inverse: f64,
}

/// Stateful alternating-projection loop holding one iterate.
pub struct AlternatingProjector {
    template: Waveform,
    fft: FftPair,
    scratch: Vec<Complex64>,
    limits: Vec<f64>,
    freqs: Vec<f64>,
    /// Current CM iterate `x_n` (the initial waveform before the first step).
    current: Vec<Complex64>,
    /// DFT of `current`, its bin magnitudes and their maximum.
    current_spectrum: Vec<Complex64>,
    magnitudes: Vec<f64>,
    peak: f64,
    buf: Vec<Complex64>,
    /// `P_mask(x_{n-1})` in time, once a step has run.
    masked: Option<Vec<Complex64>>,
    iteration: usize,
}

impl AlternatingProjector {
    pub fn new(w0: &Waveform, mask: &SpectralMask) -> Result<Self> {
        if w0.energy() <= 0.0 {
            return Err(Error::Degenerate("initial waveform is all zero"));
        }
        let n = w0.len();
        let fft = FftPair::new(n);
        let scratch = fft.scratch();
        let freqs = crate::analysis::spectrum_bin_frequencies(n, w0.sample_rate());
        let limits = freqs.iter().map(|&f| mask.value_linear(f)).collect();
        let current = w0.samples().to_vec();
        let mut proj = Self {
            template: w0.clone(),
            fft,
            scratch,
            limits,
            freqs,
            current_spectrum: current.clone(),
            buf: current.clone(),
            magnitudes: vec![0.0; n],
            peak: 0.0,
            current,
            masked: None,
            iteration: 0,
        };
        proj.fft.forward_with(&mut proj.current_spectrum, &mut proj.scratch);
        proj.refresh_magnitudes();
        Ok(proj)
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Mask violation of the current iterate.
    pub fn violation(&self) -> MaskReport {
        violation_of_magnitudes(self.magnitudes.iter().copied(), self.peak, &self.limits, &self.freqs)
    }

    fn refresh_magnitudes(&mut self) {
        let mut peak = 0.0;
        for (m, b) in self.magnitudes.iter_mut().zip(&self.current_spectrum) {
            *m = b.norm();
            peak = f64::max(peak, *m);
        }
        self.peak = peak;
    }

    /// Mask projection, inverse DFT, CM projection, DFT.
    pub fn step(&mut self) -> StepReport {
        let n = self.current.len();
        let reference = self.peak;

        let mut masked = self.masked.take().unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); n]);
        let mut gap_sq = 0.0;
        for (((out, &b), &mag), &lim) in masked
            .iter_mut()
            .zip(&self.current_spectrum)
            .zip(&self.magnitudes)
            .zip(&self.limits)
        {
            let bound = reference * lim;
            *out = if mag > bound {
                gap_sq += (mag - bound) * (mag - bound);
                b * (bound / mag)
            } else {
                b
            };
        }
        let gap_to_mask = (gap_sq / n as f64).sqrt();

        self.fft.inverse_with(&mut masked, &mut self.scratch);
        let mut gap_cm_sq = 0.0;
        for ((x, &m), s) in self.current.iter_mut().zip(&masked).zip(self.buf.iter_mut()) {
            let u = unit(m);
            gap_cm_sq += (m - u).norm_sqr();
            *x = u;
            *s = u;
        }
        let gap_to_cm = gap_cm_sq.sqrt();

        std::mem::swap(&mut self.buf, &mut self.current_spectrum);
        self.fft.forward_with(&mut self.current_spectrum, &mut self.scratch);
        self.refresh_magnitudes();
        self.masked = Some(masked);
        self.iteration += 1;

        StepReport {
            iteration: self.iteration,
            violation: self.violation(),
            gap_to_mask,
            gap_to_cm,
            reference,
        }
    }

    pub fn round_trip_check(&self) -> RoundTripCheck {
        let x = &self.current;
        let energy: f64 = x.iter().map(|s| s.norm_sqr()).sum();
        let spec_energy: f64 = self.current_spectrum.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64;
        let mut back = self.current_spectrum.clone();
        let mut scratch = self.fft.scratch();
        self.fft.inverse_with(&mut back, &mut scratch);
        let peak_x = x.iter().map(|s| s.norm()).fold(0.0, f64::max);
        let worst = x.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        RoundTripCheck {
            parseval: (energy - spec_energy).abs() / energy,
            inverse: worst / peak_x,
        }
    }

    pub fn cm_waveform(&self) -> Waveform {
        self.wrap(self.current.clone(), "cm")
    }

    pub fn masked_waveform(&self) -> Option<Waveform> {
        self.masked.as_ref().map(|m| self.wrap(m.clone(), "masked"))
    }

    fn wrap(&self, samples: Vec<Complex64>, side: &str) -> Waveform {
        let label = format!("{} | shaped {side} projection, iteration {}", self.template.label(), self.iteration);
        self.template
            .with_samples(samples, label)
            .expect("iterates keep the template length and stay finite")
    }
}

/// Alternates mask and unit-modulus projections until the CM iterate's
/// worst mask excess is at most `cfg.tol_db`, or `cfg.max_iterations`.
pub fn alternate_project(w0: &Waveform, mask: &SpectralMask, cfg: &ShapeConfig) -> Result<ShapeResult> {
    cfg.validate()?;
    let mut proj = AlternatingProjector::new(w0, mask)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut last = None;
    while proj.iteration() < cfg.max_iterations {
        let r = proj.step();
        trace.push(TracePoint {
            iteration: r.iteration,
            max_db: r.violation.max_violation_db,
            sum_db: r.violation.sum_violation_db,
        });
        if cfg.report_every > 0 && r.iteration % cfg.report_every == 0 {
            log::info!(
                "iteration {} max {:.6e} dB sum {:.6e} dB",
                r.iteration,
                r.violation.max_violation_db,
                r.violation.sum_violation_db
            );
        }
        last = Some(r);
        if r.violation.max_violation_db <= cfg.tol_db {
            converged = true;
            break;
        }
    }
    let last = last.expect("at least one iteration runs");
    let masked_waveform = proj.masked_waveform().expect("a step has run");
    log::info!(
        "{} after {} iterations, max violation {:.6e} dB",
        if converged { "converged" } else { "stopped" },
        last.iteration,
        last.violation.max_violation_db
    );
    Ok(ShapeResult {
        final_modulation_depth: modulation_depth(&masked_waveform),
        cm_waveform: proj.cm_waveform(),
        masked_waveform,
        iterations: last.iteration,
        converged,
        final_mask_violation_db: last.violation.max_violation_db,
        violation_trace: trace,
    })
}

/// Periodic convolution with a unit-area Gaussian of standard deviation
/// `sigma` seconds, truncated at ±6σ.
pub fn smooth_fm_gaussian(fm: &FmFunction, sigma: f64) -> Result<FmFunction> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be non-negative, got {sigma}")));
    }
    let sigma_samples = sigma * fm.sample_rate;
    let half = (6.0 * sigma_samples).ceil() as i64;
    if half == 0 || fm.is_empty() {
        return Ok(fm.clone());
    }
    let mut kernel: Vec<f64> = (-half..=half)
        .map(|k| (-0.5 * (k as f64 / sigma_samples).powi(2)).exp())
        .collect();
    let area: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|w| *w /= area);

    let n = fm.len() as i64;
    let x = &fm.freq_samples;
    let out = (0..n)
        .map(|i| {
            kernel
                .iter()
                .zip(-half..=half)
                .map(|(w, k)| w * x[(i - k).rem_euclid(n) as usize])
                .sum()
        })
        .collect();
    FmFunction::new(out, fm.sample_rate)
}
