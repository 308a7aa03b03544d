//! Spectra, periodic correlation and ambiguity analysis.

mod ambiguity;
mod spectrum;

pub use ambiguity::{
    cross_paf, paaf, paaf_metrics, pacf, pacf_with, AmbiguityConfig, AmbiguityResult, AmbiguitySurface,
    DelayExclusion, DopplerSpan, MainlobeExclusion, Pacf, SidelobeMetrics, SidelobeRegion,
    DEFAULT_DOPPLER_SPAN_HZ,
};
pub use spectrum::{measure_bandwidth, spectrum, Spectrum};
pub(crate) use spectrum::bin_frequencies as spectrum_bin_frequencies;

use crate::waveform::Waveform;

/// Largest relative deviation of the sample modulus from its mean.
pub fn modulation_depth(w: &Waveform) -> f64 {
    let mean = w.samples().iter().map(|s| s.norm()).sum::<f64>() / w.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    w.samples()
        .iter()
        .map(|s| (s.norm() - mean).abs())
        .fold(0.0, f64::max)
        / mean
}

pub(crate) fn to_db(ratio: f64) -> f64 {
    20.0 * ratio.log10()
}
