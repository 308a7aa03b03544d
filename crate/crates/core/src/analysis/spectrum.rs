use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::dft;
use crate::waveform::Waveform;

/// DFT of one waveform period with a dB-relative-to-peak view.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
    bin_frequencies: Vec<f64>,
    reference_magnitude: f64,
    sample_rate: f64,
}

/// `fs·k/N` wrapped to `[-fs/2, fs/2)`.
pub(crate) fn bin_frequencies(n: usize, sample_rate: f64) -> Vec<f64> {
    let df = sample_rate / n as f64;
    (0..n)
        .map(|k| {
            let signed = if 2 * k < n { k as f64 } else { k as f64 - n as f64 };
            signed * df
        })
        .collect()
}

impl Spectrum {
    /// Wraps DFT bins; the reference is the largest bin magnitude.
    pub fn from_bins(bins: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        let reference = bins.iter().map(|b| b.norm()).fold(0.0, f64::max);
        Self::with_reference(bins, sample_rate, reference)
    }

    pub(crate) fn with_reference(bins: Vec<Complex64>, sample_rate: f64, reference: f64) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::Degenerate("empty spectrum"));
        }
        if !(reference > 0.0 && reference.is_finite()) {
            return Err(Error::Degenerate("all-zero spectrum has no 0 dB reference"));
        }
        let bin_frequencies = bin_frequencies(bins.len(), sample_rate);
        Ok(Self {
            bins,
            bin_frequencies,
            reference_magnitude: reference,
            sample_rate,
        })
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }

    pub fn bin_frequencies(&self) -> &[f64] {
        &self.bin_frequencies
    }

    pub fn reference_magnitude(&self) -> f64 {
        self.reference_magnitude
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bin_spacing(&self) -> f64 {
        self.sample_rate / self.bins.len() as f64
    }

    /// `20·log10(|bin| / reference)`; zero bins map to `-inf`.
    pub fn db(&self, k: usize) -> f64 {
        20.0 * (self.bins[k].norm() / self.reference_magnitude).log10()
    }

    pub fn db_view(&self) -> Vec<f64> {
        (0..self.bins.len()).map(|k| self.db(k)).collect()
    }

    pub fn peak_bin(&self) -> usize {
        let mut best = 0;
        for (k, b) in self.bins.iter().enumerate() {
            if b.norm() > self.bins[best].norm() {
                best = k;
            }
        }
        best
    }

    /// Total energy `Σ|X|²`.
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum()
    }
}

pub fn spectrum(w: &Waveform) -> Result<Spectrum> {
    Spectrum::from_bins(dft(w.samples()), w.sample_rate())
}

/// Width of the interval containing the peak outside of which every bin is
/// below `level_db`.
///
/// Walking away from the peak in each direction (at most half the bins), the
/// outermost bin at or above the level is located and the crossing to its
/// outer neighbour is interpolated linearly in dB. The width is the distance
/// between the two crossings, never less than one bin spacing.
pub fn measure_bandwidth(spec: &Spectrum, level_db: f64) -> Result<f64> {
    if !(level_db < 0.0) {
        return Err(Error::invalid(format!("level must be negative, got {level_db} dB")));
    }
    let n = spec.len();
    let db = spec.db_view();
    if db.iter().all(|&d| d >= level_db) {
        return Err(Error::ExceedsNyquist { level_db });
    }
    let peak = spec.peak_bin();
    let half = n / 2;
    let mut width_bins = 0.0f64;
    for dir in [1isize, -1] {
        let at = |j: usize| db[((peak as isize + dir * j as isize).rem_euclid(n as isize)) as usize];
        let outer = (0..=half).rev().find(|&j| at(j) >= level_db).unwrap_or(0);
        let edge = if outer >= half {
            half as f64
        } else {
            let (inner, next) = (at(outer), at(outer + 1));
            let t = if next == f64::NEG_INFINITY {
                0.0
            } else {
                ((inner - level_db) / (inner - next)).clamp(0.0, 1.0)
            };
            outer as f64 + t
        };
        width_bins += edge;
    }
    Ok(width_bins.max(1.0) * spec.bin_spacing())
}
