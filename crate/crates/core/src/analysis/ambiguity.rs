//! Periodic autocorrelation and periodic ambiguity functions.
//!
//! For Doppler bin `m` (a multiple of the wrf) and circular delay `k`,
//!
//! ```text
//! B(k, m) = Σ_n s1(n) · conj(s2((n + k) mod N)) · e^{-j2π m n / N}
//!         = (1/N) Σ_l S1(l) · conj(S2(l - m)) · e^{-j2π (l - m) k / N}
//! ```
//!
//! so each Doppler row is one length-N FFT of a shifted spectral product.
//! Auto surfaces are normalized by `B(0, 0) = Σ|s|²`, cross surfaces by
//! `sqrt(E1·E2)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::to_db;
use crate::error::{Error, Result};
use crate::fft::{dft, FftPair};
use crate::waveform::Waveform;

pub const DEFAULT_DOPPLER_SPAN_HZ: f64 = 500.0;

/// Surfaces above this many cells are not materialized by [`paaf`].
const MAX_SURFACE_CELLS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DopplerSpan {
    /// Bins `m·wrf` with `|m·wrf| <= span`.
    Hz(f64),
    /// All N Doppler bins.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DelayExclusion {
    /// Exclude lags closer to zero than the first local minimum of the
    /// zero-Doppler cut.
    FirstNull,
    /// Exclude `|k| <= n` samples.
    Samples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainlobeExclusion {
    pub delay: DelayExclusion,
    /// Exclude `|m| <= doppler_bins` around zero Doppler.
    pub doppler_bins: usize,
}

impl Default for MainlobeExclusion {
    fn default() -> Self {
        Self {
            delay: DelayExclusion::FirstNull,
            doppler_bins: 1,
        }
    }
}

impl MainlobeExclusion {
    /// One delay resolution cell, `±ceil(fs / bandwidth)` samples, × ±1 bin.
    pub fn resolution_cell(bandwidth_hz: f64, sample_rate: f64) -> Self {
        Self {
            delay: DelayExclusion::Samples((sample_rate / bandwidth_hz).ceil() as usize),
            doppler_bins: 1,
        }
    }

    pub fn none() -> Self {
        Self {
            delay: DelayExclusion::Samples(0),
            doppler_bins: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbiguityConfig {
    pub doppler: DopplerSpan,
    pub mainlobe: MainlobeExclusion,
    /// The central region keeps delays within `central_fraction · T/2`.
    pub central_fraction: f64,
}

impl Default for AmbiguityConfig {
    fn default() -> Self {
        Self {
            doppler: DopplerSpan::Hz(DEFAULT_DOPPLER_SPAN_HZ),
            mainlobe: MainlobeExclusion::default(),
            central_fraction: 0.1,
        }
    }
}

impl AmbiguityConfig {
    pub fn with_doppler(mut self, doppler: DopplerSpan) -> Self {
        self.doppler = doppler;
        self
    }

    pub fn with_mainlobe(mut self, mainlobe: MainlobeExclusion) -> Self {
        self.mainlobe = mainlobe;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SidelobeRegion {
    Full,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidelobeMetrics {
    pub max_sidelobe_db: f64,
    /// `10·log10(mean |A|²)` over the sidelobe cells.
    pub rms_sidelobe_db: f64,
    pub region: SidelobeRegion,
    pub max_delay_s: f64,
    pub max_doppler_hz: f64,
    pub cells: usize,
}

/// Peak-normalized periodic autocorrelation magnitudes by circular lag.
#[derive(Debug, Clone, PartialEq)]
pub struct Pacf {
    pub magnitudes: Vec<f64>,
    pub sample_rate: f64,
    /// Lags with `min(k, N-k) < mainlobe_halfwidth` are not sidelobes.
    pub mainlobe_halfwidth: usize,
    pub metrics: SidelobeMetrics,
}

impl Pacf {
    pub fn max_sidelobe_db(&self) -> f64 {
        self.metrics.max_sidelobe_db
    }
}

/// `|A(τ, ν)|` over circular delays and a set of Doppler bins.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySurface {
    /// Row-major: one row of N delays per Doppler bin.
    pub values: Vec<f64>,
    pub n_delays: usize,
    pub doppler_bins: Vec<i64>,
    pub sample_rate: f64,
    pub wrf: f64,
    pub mainlobe_halfwidth: usize,
    pub mainlobe_doppler_bins: usize,
}

impl AmbiguitySurface {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_delays..(i + 1) * self.n_delays]
    }

    pub fn at(&self, doppler_bin: i64, delay: usize) -> Option<f64> {
        let i = self.doppler_bins.iter().position(|&m| m == doppler_bin)?;
        self.row(i).get(delay).copied()
    }

    /// Signed delay of circular lag `k`, in seconds.
    pub fn delay_s(&self, k: usize) -> f64 {
        signed_lag(k, self.n_delays) as f64 / self.sample_rate
    }

    pub fn doppler_hz(&self, i: usize) -> f64 {
        self.doppler_bins[i] as f64 * self.wrf
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityResult {
    pub surface: Option<AmbiguitySurface>,
    pub full: SidelobeMetrics,
    pub central: SidelobeMetrics,
}

fn signed_lag(k: usize, n: usize) -> i64 {
    if 2 * k <= n {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn circular_distance(k: usize, n: usize) -> usize {
    k.min(n - k)
}

fn first_null(cut: &[f64]) -> usize {
    let n = cut.len();
    let peak = cut.first().copied().unwrap_or(0.0);
    let tol = 1e-12 * peak;
    let mut k = 1;
    while k <= n / 2 && cut[k] < cut[k - 1] - tol {
        k += 1;
    }
    k - 1
}

fn first_null_halfwidth(cut: &[f64]) -> usize {
    // lags 0..first_min are the mainlobe; the minimum itself is a sidelobe
    first_null(cut).max(1)
}

fn doppler_bins(span: DopplerSpan, n: usize, wrf: f64) -> Result<Vec<i64>> {
    match span {
        DopplerSpan::Full => {
            let lo = -((n as i64 - 1) / 2);
            Ok((lo..lo + n as i64).collect())
        }
        DopplerSpan::Hz(span) => {
            if !(span >= wrf * (1.0 - 1e-9)) {
                return Err(Error::invalid(format!(
                    "Doppler span {span} Hz must be at least the wrf {wrf} Hz"
                )));
            }
            let m = ((span / wrf) * (1.0 + 1e-12)).floor() as i64;
            let m = m.min((n as i64 - 1) / 2);
            Ok((-m..=m).collect())
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Accum {
    max: f64,
    max_k: usize,
    max_m: i64,
    sumsq: f64,
    cells: usize,
}

impl Accum {
    fn new() -> Self {
        Self {
            max: 0.0,
            max_k: 0,
            max_m: 0,
            sumsq: 0.0,
            cells: 0,
        }
    }

    fn push(&mut self, v: f64, k: usize, m: i64) {
        if v > self.max || self.cells == 0 {
            self.max = v;
            self.max_k = k;
            self.max_m = m;
        }
        self.sumsq += v * v;
        self.cells += 1;
    }

    fn merge(&mut self, other: &Accum) {
        if other.cells > 0 && (other.max > self.max || self.cells == 0) {
            self.max = other.max;
            self.max_k = other.max_k;
            self.max_m = other.max_m;
        }
        self.sumsq += other.sumsq;
        self.cells += other.cells;
    }

    fn metrics(&self, region: SidelobeRegion, n: usize, fs: f64, wrf: f64) -> SidelobeMetrics {
        let rms = if self.cells == 0 { 0.0 } else { (self.sumsq / self.cells as f64).sqrt() };
        SidelobeMetrics {
            max_sidelobe_db: to_db(self.max),
            rms_sidelobe_db: to_db(rms),
            region,
            max_delay_s: signed_lag(self.max_k, n) as f64 / fs,
            max_doppler_hz: self.max_m as f64 * wrf,
            cells: self.cells,
        }
    }
}

struct Engine<'a> {
    s1: &'a [Complex64],
    s2: &'a [Complex64],
    fft: FftPair,
    norm: f64,
}

impl Engine<'_> {
    /// `|A(k, m)|` for all k, into `row`.
    fn row(&self, m: i64, buf: &mut [Complex64], scratch: &mut [Complex64], row: &mut [f64]) {
        let n = self.s1.len() as i64;
        for (l, b) in buf.iter_mut().enumerate() {
            let shifted = (l as i64 - m).rem_euclid(n) as usize;
            *b = self.s1[l] * self.s2[shifted].conj();
        }
        self.fft.forward_with(buf, scratch);
        for (r, b) in row.iter_mut().zip(buf.iter()) {
            *r = b.norm() / self.norm;
        }
    }
}

struct Plan {
    bins: Vec<i64>,
    halfwidth: usize,
    doppler_excl: usize,
    central_halfwidth: usize,
}

fn evaluate(
    engine: &Engine<'_>,
    plan: &Plan,
    keep_surface: bool,
) -> (Vec<f64>, Accum, Accum) {
    let n = engine.s1.len();
    let rows: Vec<(Vec<f64>, Accum, Accum)> = plan
        .bins
        .par_iter()
        .map_init(
            || (vec![Complex64::new(0.0, 0.0); n], engine.fft.scratch(), vec![0.0; n]),
            |(buf, scratch, row), &m| {
                engine.row(m, buf, scratch, row);
                let mut full = Accum::new();
                let mut central = Accum::new();
                let in_doppler_mainlobe = m.unsigned_abs() as usize <= plan.doppler_excl;
                for (k, &v) in row.iter().enumerate() {
                    let d = circular_distance(k, n);
                    if in_doppler_mainlobe && d < plan.halfwidth {
                        continue;
                    }
                    full.push(v, k, m);
                    if d <= plan.central_halfwidth {
                        central.push(v, k, m);
                    }
                }
                let kept = if keep_surface { row.clone() } else { Vec::new() };
                (kept, full, central)
            },
        )
        .collect();

    // fold in bin order so the result does not depend on scheduling
    let mut values = Vec::with_capacity(if keep_surface { n * plan.bins.len() } else { 0 });
    let mut full = Accum::new();
    let mut central = Accum::new();
    for (row, f, c) in rows {
        values.extend(row);
        full.merge(&f);
        central.merge(&c);
    }
    (values, full, central)
}

fn auto_spectrum(w: &Waveform) -> Result<(Vec<Complex64>, f64)> {
    let energy = w.energy();
    if !(energy > 0.0) {
        return Err(Error::Degenerate("all-zero waveform"));
    }
    Ok((dft(w.samples()), energy))
}

fn zero_doppler_cut(spec: &[Complex64], energy: f64) -> Vec<f64> {
    let n = spec.len();
    let engine = Engine {
        s1: spec,
        s2: spec,
        fft: FftPair::new(n),
        norm: n as f64 * energy,
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = engine.fft.scratch();
    let mut row = vec![0.0; n];
    engine.row(0, &mut buf, &mut scratch, &mut row);
    row
}

fn delay_halfwidth(rule: DelayExclusion, cut: &[f64]) -> usize {
    match rule {
        DelayExclusion::FirstNull => first_null_halfwidth(cut),
        DelayExclusion::Samples(s) => s + 1,
    }
}

/// Periodic autocorrelation; every lag except 0 counts as a sidelobe.
pub fn pacf(w: &Waveform) -> Result<Pacf> {
    pacf_with(w, DelayExclusion::Samples(0))
}

pub fn pacf_with(w: &Waveform, exclusion: DelayExclusion) -> Result<Pacf> {
    let (spec, energy) = auto_spectrum(w)?;
    let cut = zero_doppler_cut(&spec, energy);
    let n = cut.len();
    let halfwidth = delay_halfwidth(exclusion, &cut);
    let mut acc = Accum::new();
    for (k, &v) in cut.iter().enumerate() {
        if circular_distance(k, n) >= halfwidth {
            acc.push(v, k, 0);
        }
    }
    let metrics = acc.metrics(SidelobeRegion::Full, n, w.sample_rate(), w.wrf());
    Ok(Pacf {
        magnitudes: cut,
        sample_rate: w.sample_rate(),
        mainlobe_halfwidth: halfwidth,
        metrics,
    })
}

fn auto_plan(w: &Waveform, spec: &[Complex64], energy: f64, cfg: &AmbiguityConfig) -> Result<Plan> {
    let n = w.len();
    let bins = doppler_bins(cfg.doppler, n, w.wrf())?;
    let halfwidth = match cfg.mainlobe.delay {
        DelayExclusion::FirstNull => first_null_halfwidth(&zero_doppler_cut(spec, energy)),
        DelayExclusion::Samples(s) => s + 1,
    };
    Ok(Plan {
        bins,
        halfwidth,
        doppler_excl: cfg.mainlobe.doppler_bins,
        central_halfwidth: central_halfwidth(n, cfg.central_fraction),
    })
}

fn central_halfwidth(n: usize, fraction: f64) -> usize {
    (fraction * n as f64 / 2.0).floor() as usize
}

fn finish(
    values: Vec<f64>,
    keep: bool,
    full: Accum,
    central: Accum,
    plan: Plan,
    w: &Waveform,
) -> AmbiguityResult {
    let n = w.len();
    let (fs, wrf) = (w.sample_rate(), w.wrf());
    let surface = keep.then_some(AmbiguitySurface {
        values,
        n_delays: n,
        doppler_bins: plan.bins,
        sample_rate: fs,
        wrf,
        mainlobe_halfwidth: plan.halfwidth,
        mainlobe_doppler_bins: plan.doppler_excl,
    });
    AmbiguityResult {
        surface,
        full: full.metrics(SidelobeRegion::Full, n, fs, wrf),
        central: central.metrics(SidelobeRegion::Central, n, fs, wrf),
    }
}

/// Periodic auto-ambiguity surface plus full and central sidelobe metrics.
pub fn paaf(w: &Waveform, cfg: &AmbiguityConfig) -> Result<AmbiguityResult> {
    paaf_impl(w, cfg, true)
}

/// Sidelobe metrics only; suitable for [`DopplerSpan::Full`] on long
/// waveforms since no surface is stored.
pub fn paaf_metrics(w: &Waveform, cfg: &AmbiguityConfig) -> Result<AmbiguityResult> {
    paaf_impl(w, cfg, false)
}

fn paaf_impl(w: &Waveform, cfg: &AmbiguityConfig, keep: bool) -> Result<AmbiguityResult> {
    let (spec, energy) = auto_spectrum(w)?;
    let plan = auto_plan(w, &spec, energy, cfg)?;
    if keep && plan.bins.len() * w.len() > MAX_SURFACE_CELLS {
        return Err(Error::invalid(format!(
            "surface of {} × {} cells is too large to store; use paaf_metrics",
            plan.bins.len(),
            w.len()
        )));
    }
    let engine = Engine {
        s1: &spec,
        s2: &spec,
        fft: FftPair::new(w.len()),
        norm: w.len() as f64 * energy,
    };
    let (values, full, central) = evaluate(&engine, &plan, keep);
    Ok(finish(values, keep, full, central, plan, w))
}

/// Periodic cross-ambiguity of two equal-length waveforms, normalized by
/// `sqrt(E1·E2)`, with no mainlobe exclusion.
pub fn cross_paf(w1: &Waveform, w2: &Waveform, cfg: &AmbiguityConfig) -> Result<AmbiguityResult> {
    if w1.len() != w2.len() {
        return Err(Error::LengthMismatch {
            left: w1.len(),
            right: w2.len(),
        });
    }
    if (w1.sample_rate() - w2.sample_rate()).abs() > 1e-9 * w1.sample_rate() {
        return Err(Error::SampleRateMismatch {
            left: w1.sample_rate(),
            right: w2.sample_rate(),
        });
    }
    let (spec1, e1) = auto_spectrum(w1)?;
    let (spec2, e2) = auto_spectrum(w2)?;
    let n = w1.len();
    let plan = Plan {
        bins: doppler_bins(cfg.doppler, n, w1.wrf())?,
        halfwidth: 0,
        doppler_excl: 0,
        central_halfwidth: central_halfwidth(n, cfg.central_fraction),
    };
    let keep = plan.bins.len() * n <= MAX_SURFACE_CELLS;
    let engine = Engine {
        s1: &spec1,
        s2: &spec2,
        fft: FftPair::new(n),
        norm: n as f64 * (e1 * e2).sqrt(),
    };
    let (values, full, central) = evaluate(&engine, &plan, keep);
    Ok(finish(values, keep, full, central, plan, w1))
}
