//! Constant-modulus continuous-wave radar waveforms under a spectral mask.
//!
//! The crate is organised around a generate → shape → analyze pipeline:
//!
//! * [`wavegen`] builds the prototype periods (BPSK/BFSK from m-sequences,
//!   Costas FSK, LFM, complex Gaussian noise) and the FM-to-phase integrator.
//! * [`mask`] holds the RSEC Criterion C emission mask and its "chimney"
//!   variant, and measures how far a spectrum exceeds them.
//! * [`shaper`] contains the two shaping techniques: Gaussian smoothing of a
//!   piecewise FM program, and alternating projections between the mask set
//!   and the unit-modulus set.
//! * [`analysis`] computes spectra, periodic autocorrelation, periodic
//!   auto/cross ambiguity surfaces and the sidelobe metrics reported on them.
//! * [`io`] persists waveforms, traces, surfaces and run manifests.

pub mod analysis;
pub mod error;
pub mod fft;
pub mod io;
pub mod mask;
pub mod shaper;
pub mod waveform;
pub mod wavegen;

pub use analysis::{
    cross_paf, measure_bandwidth, modulation_depth, paaf, paaf_metrics, pacf, spectrum,
    AmbiguityConfig, AmbiguityResult, AmbiguitySurface, DopplerSpan, MainlobeExclusion, Pacf,
    SidelobeMetrics, SidelobeRegion, Spectrum,
};
pub use error::{Error, Result};
pub use mask::{build_chimney_mask, build_rsec_mask, mask_value, mask_violation, MaskReport, SpectralMask};
pub use shaper::{
    alternate_project, project_cm, project_mask, smooth_fm_gaussian, AlternatingProjector,
    ShapeConfig, ShapeResult, StepReport, TracePoint,
};
pub use waveform::{FmFunction, Waveform};
pub use wavegen::{
    bfsk_fm, bpsk_from_bits, costas_fm, costas_waveform, downsample, downsample_from,
    fm_to_waveform, gen_bfsk, gen_costas_perm, gen_lfm, gen_msequence, gen_noise, lfm_fm,
    verify_costas, BinarySequence, CostasPermutation,
};

pub use num_complex::Complex64;
