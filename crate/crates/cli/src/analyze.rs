use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use cwshape_core::analysis::DelayExclusion;
use cwshape_core::io::{read_waveform, write_pacf_csv, write_spectrum_csv, write_surface_csv};
use cwshape_core::{
    cross_paf, measure_bandwidth, modulation_depth, paaf, paaf_metrics, spectrum, wavegen::downsample_from,
    AmbiguityConfig, AmbiguityResult, DopplerSpan, MainlobeExclusion, Waveform,
};
use serde_json::{json, Value};

use crate::output::{finish, new_manifest, with_suffix};
use crate::OutputArgs;

#[derive(Subcommand, Debug)]
pub enum Which {
    /// Magnitude spectrum and bandwidths.
    Spectrum(SpectrumArgs),
    /// Bandwidths only.
    Bandwidth(SpectrumArgs),
    /// Periodic autocorrelation.
    Pacf(PacfArgs),
    /// Periodic auto-ambiguity.
    Paaf(AmbiguityArgs),
    /// Periodic cross-ambiguity of two waveforms.
    Xpaf(CrossArgs),
}

#[derive(Args, Debug)]
pub struct InputArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Keep every n-th sample before analysis.
    #[arg(long, default_value_t = 1)]
    downsample: usize,
    /// First sample kept when downsampling.
    #[arg(long, default_value_t = 0)]
    offset: usize,
}

impl InputArgs {
    fn load(&self) -> Result<Waveform> {
        let w = read_waveform(&self.input)?;
        if self.downsample == 1 && self.offset == 0 {
            return Ok(w);
        }
        Ok(downsample_from(&w, self.downsample, self.offset)?)
    }

    fn describe(&self) -> Value {
        json!({"path": self.input, "downsample": self.downsample, "offset": self.offset})
    }
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Levels below the peak at which to measure bandwidth (repeatable).
    #[arg(long = "level-db", allow_hyphen_values = true, default_values_t = [-20.0, -40.0])]
    levels: Vec<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

/// Mainlobe handling for sidelobe statistics. pacf excludes lag 0 only by
/// default, paaf and xpaf exclude up to the first null.
#[derive(Args, Debug, Clone)]
pub struct MainlobeArgs {
    /// Exclude |lag| <= n samples.
    #[arg(long, conflicts_with_all = ["mainlobe_obd_khz", "first_null"])]
    mainlobe_samples: Option<usize>,
    /// Exclude one delay resolution cell, ceil(fs / obd) samples.
    #[arg(long, conflicts_with = "first_null")]
    mainlobe_obd_khz: Option<f64>,
    /// Exclude lags up to the first local minimum of the correlation.
    #[arg(long)]
    first_null: bool,
}

impl MainlobeArgs {
    fn delay(&self, fs: f64, default: DelayExclusion) -> DelayExclusion {
        match (self.mainlobe_samples, self.mainlobe_obd_khz, self.first_null) {
            (Some(n), _, _) => DelayExclusion::Samples(n),
            (None, Some(k), _) => DelayExclusion::Samples((fs / (k * 1e3)).ceil() as usize),
            (None, None, true) => DelayExclusion::FirstNull,
            (None, None, false) => default,
        }
    }
}

#[derive(Args, Debug)]
pub struct PacfArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    mainlobe: MainlobeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DopplerArgs {
    /// Doppler half-span in Hz.
    #[arg(long, default_value_t = cwshape_core::analysis::DEFAULT_DOPPLER_SPAN_HZ, conflicts_with = "full_doppler")]
    doppler_hz: f64,
    /// Use all N Doppler bins; only metrics are written.
    #[arg(long)]
    full_doppler: bool,
    /// Central region half-width as a fraction of half the period.
    #[arg(long, default_value_t = 0.1)]
    central_fraction: f64,
}

impl DopplerArgs {
    fn span(&self) -> DopplerSpan {
        if self.full_doppler {
            DopplerSpan::Full
        } else {
            DopplerSpan::Hz(self.doppler_hz)
        }
    }
}

#[derive(Args, Debug)]
pub struct AmbiguityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    doppler: DopplerArgs,
    #[command(flatten)]
    mainlobe: MainlobeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CrossArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Second waveform, downsampled the same way.
    #[arg(long)]
    other: PathBuf,
    #[command(flatten)]
    doppler: DopplerArgs,
    #[command(flatten)]
    out: OutputArgs,
}

fn ambiguity_summary(r: &AmbiguityResult) -> Value {
    json!({
        "full": r.full,
        "central": r.central,
        "doppler_bins": r.surface.as_ref().map(|s| s.doppler_bins.len()),
    })
}

fn bandwidths(w: &Waveform, levels: &[f64]) -> Result<Value> {
    let spec = spectrum(w)?;
    let mut out = Vec::new();
    for &level in levels {
        if level >= 0.0 {
            bail!("--level-db must be negative, got {level}");
        }
        let bw = match measure_bandwidth(&spec, level) {
            Ok(b) => json!(b),
            Err(e) => json!(e.to_string()),
        };
        out.push(json!({"level_db": level, "bandwidth_hz": bw}));
    }
    Ok(Value::Array(out))
}

pub fn run(which: Which, argv: Vec<String>) -> Result<()> {
    match which {
        Which::Spectrum(a) => run_spectrum(a, argv, true),
        Which::Bandwidth(a) => run_spectrum(a, argv, false),
        Which::Pacf(a) => {
            let w = a.input.load()?;
            let exclusion = a.mainlobe.delay(w.sample_rate(), DelayExclusion::Samples(0));
            let p = cwshape_core::analysis::pacf_with(&w, exclusion)?;
            let prefix = &a.out.out;
            let csv = with_suffix(prefix, ".pacf.csv");
            write_pacf_csv(&p.magnitudes, p.sample_rate, &csv)?;
            let mut m = new_manifest("analyze pacf", argv, json!({"input": a.input.describe(), "mainlobe": format!("{exclusion:?}")}));
            m.add_input(&a.input.input)?;
            let summary = json!({
                "samples": w.len(),
                "max_sidelobe_db": p.metrics.max_sidelobe_db,
                "rms_sidelobe_db": p.metrics.rms_sidelobe_db,
                "max_sidelobe_delay_s": p.metrics.max_delay_s,
                "mainlobe_halfwidth_samples": p.mainlobe_halfwidth,
                "modulation_depth": modulation_depth(&w),
                "csv": csv,
            });
            finish(prefix, m, summary, &[csv])
        }
        Which::Paaf(a) => {
            let w = a.input.load()?;
            let cfg = AmbiguityConfig {
                doppler: a.doppler.span(),
                mainlobe: MainlobeExclusion {
                    delay: a.mainlobe.delay(w.sample_rate(), DelayExclusion::FirstNull),
                    doppler_bins: 1,
                },
                central_fraction: a.doppler.central_fraction,
            };
            let prefix = &a.out.out;
            let (r, outputs) = if a.doppler.full_doppler {
                (paaf_metrics(&w, &cfg)?, vec![])
            } else {
                let r = paaf(&w, &cfg)?;
                let csv = with_suffix(prefix, ".paaf.csv");
                write_surface_csv(r.surface.as_ref().context("surface")?, &csv)?;
                (r, vec![csv])
            };
            let mut m = new_manifest("analyze paaf", argv, json!({"input": a.input.describe(), "config": cfg}));
            m.add_input(&a.input.input)?;
            finish(prefix, m, ambiguity_summary(&r), &outputs)
        }
        Which::Xpaf(a) => {
            let w1 = a.input.load()?;
            let w2 = InputArgs {
                input: a.other.clone(),
                downsample: a.input.downsample,
                offset: a.input.offset,
            }
            .load()?;
            let cfg = AmbiguityConfig {
                doppler: a.doppler.span(),
                mainlobe: MainlobeExclusion::none(),
                central_fraction: a.doppler.central_fraction,
            };
            let r = cross_paf(&w1, &w2, &cfg)?;
            let prefix = &a.out.out;
            let mut outputs = vec![];
            if let Some(s) = &r.surface {
                if !a.doppler.full_doppler {
                    let csv = with_suffix(prefix, ".xpaf.csv");
                    write_surface_csv(s, &csv)?;
                    outputs.push(csv);
                }
            }
            let mut m = new_manifest(
                "analyze xpaf",
                argv,
                json!({"input": a.input.describe(), "other": a.other, "config": cfg}),
            );
            m.add_input(&a.input.input)?;
            m.add_input(&a.other)?;
            finish(prefix, m, ambiguity_summary(&r), &outputs)
        }
    }
}

fn run_spectrum(a: SpectrumArgs, argv: Vec<String>, write_csv: bool) -> Result<()> {
    let w = a.input.load()?;
    let spec = spectrum(&w)?;
    let prefix = &a.out.out;
    let mut outputs = vec![];
    if write_csv {
        let csv = with_suffix(prefix, ".spectrum.csv");
        write_spectrum_csv(&spec, &csv)?;
        outputs.push(csv);
    }
    let command = if write_csv { "analyze spectrum" } else { "analyze bandwidth" };
    let mut m = new_manifest(command, argv, json!({"input": a.input.describe(), "levels_db": a.levels}));
    m.add_input(&a.input.input)?;
    let summary = json!({
        "samples": w.len(),
        "bin_spacing_hz": spec.bin_spacing(),
        "peak_frequency_hz": spec.bin_frequencies()[spec.peak_bin()],
        "bandwidths": bandwidths(&w, &a.levels)?,
    });
    finish(prefix, m, summary, &outputs)
}
