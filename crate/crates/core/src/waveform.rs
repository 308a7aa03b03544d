use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One repetition period of complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<Complex64>,
    sample_rate: f64,
    wrf: f64,
    label: String,
    /// Optional provenance keys (`seed`, `generator`, `taps`, ...).
    pub meta: BTreeMap<String, String>,
}

impl Waveform {
    /// Builds a waveform, checking that the period `len / sample_rate`
    /// matches `1 / wrf` to within half a sample.
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, wrf: f64, label: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("waveform has no samples"));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::invalid(format!("sample rate must be positive, got {sample_rate}")));
        }
        if !(wrf.is_finite() && wrf > 0.0) {
            return Err(Error::invalid(format!("wrf must be positive, got {wrf}")));
        }
        let period = samples.len() as f64 / sample_rate;
        if (period - 1.0 / wrf).abs() > 0.5 / sample_rate {
            return Err(Error::invalid(format!(
                "{} samples at {sample_rate} Hz do not span one period of wrf {wrf} Hz",
                samples.len()
            )));
        }
        if let Some(n) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::invalid(format!("sample {n} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
            wrf,
            label: label.into().replace(['\n', '\r'], " "),
            meta: BTreeMap::new(),
        })
    }

    /// Waveform whose wrf is implied by its length: `sample_rate / len`.
    pub fn periodic(samples: Vec<Complex64>, sample_rate: f64, label: impl Into<String>) -> Result<Self> {
        let wrf = if samples.is_empty() { 1.0 } else { sample_rate / samples.len() as f64 };
        Self::new(samples, sample_rate, wrf, label)
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into().replace(['\n', '\r'], " ");
        self
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }

    /// Same metadata, new samples of identical length.
    pub fn with_samples(&self, samples: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if samples.len() != self.samples.len() {
            return Err(Error::LengthMismatch {
                left: self.samples.len(),
                right: samples.len(),
            });
        }
        let mut w = Self::new(samples, self.sample_rate, self.wrf, label)?;
        w.meta = self.meta.clone();
        Ok(w)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn wrf(&self) -> f64 {
        self.wrf
    }

    pub fn period(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn mean_power(&self) -> f64 {
        self.energy() / self.samples.len() as f64
    }

    /// Largest deviation of any sample modulus from 1.
    pub fn max_modulus_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Instantaneous frequency program, one value in Hz per output sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FmFunction {
    pub freq_samples: Vec<f64>,
    pub sample_rate: f64,
}

impl FmFunction {
    pub fn new(freq_samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if freq_samples.is_empty() {
            return Err(Error::invalid("FM function has no samples"));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::invalid(format!("sample rate must be positive, got {sample_rate}")));
        }
        if freq_samples.iter().any(|f| !f.is_finite()) {
            return Err(Error::invalid("FM function contains non-finite values"));
        }
        Ok(Self {
            freq_samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.freq_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.freq_samples.iter().sum::<f64>() / self.freq_samples.len() as f64
    }

    /// Total phase accumulated over one period, in cycles.
    pub fn total_cycles(&self) -> f64 {
        self.freq_samples.iter().sum::<f64>() / self.sample_rate
    }

    /// Distance of [`total_cycles`](Self::total_cycles) from the nearest integer.
    pub fn closure_error_cycles(&self) -> f64 {
        let c = self.total_cycles();
        (c - c.round()).abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.freq_samples.iter().fold(0.0, |m, f| m.max(f.abs()))
    }
}
