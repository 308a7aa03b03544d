use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use cwshape_core::{
    bfsk_fm, costas_fm, fm_to_waveform, gen_costas_perm, gen_lfm, gen_msequence, gen_noise, io::write_waveform,
    smooth_fm_gaussian, wavegen::default_taps, BinarySequence, CostasPermutation, FmFunction, Waveform,
};
use serde_json::{json, Value};

use crate::output::{finish, manifest_ref, new_manifest, with_suffix};
use crate::OutputArgs;

#[derive(Subcommand, Debug)]
pub enum Kind {
    /// Binary phase coding of an m-sequence.
    Bpsk(BpskArgs),
    /// Phase-continuous binary FSK keyed by an m-sequence.
    Bfsk(BfskArgs),
    /// Costas frequency hopping.
    Costas(CostasArgs),
    /// Linear FM sweep.
    Lfm(LfmArgs),
    /// Complex white Gaussian noise.
    Noise(NoiseArgs),
}

#[derive(Args, Debug)]
pub struct SequenceArgs {
    /// m-sequence register length.
    #[arg(long, default_value_t = 9)]
    degree: u32,
    /// Feedback taps, e.g. 9,5 (default: a built-in primitive set).
    #[arg(long, value_delimiter = ',')]
    taps: Vec<u32>,
    /// Nonzero initial register state.
    #[arg(long, default_value_t = 1)]
    state: u32,
}

impl SequenceArgs {
    fn build(&self) -> Result<(BinarySequence, Vec<u32>)> {
        let taps = if self.taps.is_empty() {
            default_taps(self.degree)
                .with_context(|| format!("no built-in taps for degree {}", self.degree))?
                .to_vec()
        } else {
            self.taps.clone()
        };
        Ok((gen_msequence(self.degree, &taps, self.state)?, taps))
    }
}

#[derive(Args, Debug)]
pub struct BpskArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    /// Chip duration in microseconds.
    #[arg(long, default_value_t = 40.0)]
    chip_us: f64,
    /// Sample rate in Hz.
    #[arg(long, default_value_t = 1e6)]
    fs: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BfskArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    #[arg(long, default_value_t = 40.0)]
    chip_us: f64,
    /// Frequency deviation in kHz (default 1/(2·chip)).
    #[arg(long)]
    delta_khz: Option<f64>,
    #[arg(long, default_value_t = 1e6)]
    fs: f64,
    /// Gaussian smoothing of the FM program, standard deviation in µs.
    #[arg(long)]
    smooth_us: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CostasArgs {
    #[arg(long, default_value_t = 20)]
    order: usize,
    /// Search seed when no permutation is given.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit permutation of 1..order, e.g. 2,4,3,1
    #[arg(long, value_delimiter = ',')]
    perm: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    chip_ms: f64,
    #[arg(long, default_value_t = 1.0)]
    step_khz: f64,
    #[arg(long, default_value_t = 1e6)]
    fs: f64,
    #[arg(long)]
    smooth_us: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LfmArgs {
    /// Swept bandwidth in kHz.
    #[arg(long, default_value_t = 20.0)]
    bandwidth_khz: f64,
    #[arg(long, default_value_t = 50.0)]
    wrf_hz: f64,
    #[arg(long, default_value_t = 1e6)]
    fs: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    #[arg(long, default_value_t = 20_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e6)]
    fs: f64,
    #[command(flatten)]
    out: OutputArgs,
}

fn smoothed(fm: FmFunction, smooth_us: Option<f64>) -> Result<(Waveform, Option<f64>)> {
    let (fm, sigma) = match smooth_us {
        Some(us) => (smooth_fm_gaussian(&fm, us * 1e-6)?, Some(us)),
        None => (fm, None),
    };
    Ok((fm_to_waveform(&fm)?, sigma))
}

fn taps_text(taps: &[u32]) -> String {
    taps.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

pub fn run(kind: Kind, argv: Vec<String>) -> Result<()> {
    let (w, out, params, seeds, deviation_hz): (Waveform, OutputArgs, Value, Vec<u64>, f64) = match kind {
        Kind::Bpsk(a) => {
            let (bits, taps) = a.seq.build()?;
            let spc = a.chip_us * 1e-6 * a.fs;
            if (spc - spc.round()).abs() > 1e-6 || spc < 0.5 {
                bail!("chip duration {} µs is not a whole number of samples at {} Hz", a.chip_us, a.fs);
            }
            let w = cwshape_core::bpsk_from_bits(&bits, spc.round() as usize, a.fs)?
                .with_meta("taps", taps_text(&taps))
                .with_meta("degree", a.seq.degree);
            let params = json!({"kind": "bpsk", "degree": a.seq.degree, "taps": taps, "state": a.seq.state,
                "chip_us": a.chip_us, "fs_hz": a.fs});
            (w, a.out, params, vec![], f64::NAN)
        }
        Kind::Bfsk(a) => {
            let (bits, taps) = a.seq.build()?;
            let chip = a.chip_us * 1e-6;
            let delta = a.delta_khz.map(|k| k * 1e3).unwrap_or(0.5 / chip);
            let (w, sigma) = smoothed(bfsk_fm(&bits, chip, delta, a.fs)?, a.smooth_us)?;
            let w = w
                .relabel(format!(
                    "bfsk degree={} taps={} chips={} chip_us={} delta_f_hz={delta} fs={}{}",
                    a.seq.degree,
                    taps_text(&taps),
                    bits.len(),
                    a.chip_us,
                    a.fs,
                    sigma.map(|s| format!(" smooth_us={s}")).unwrap_or_default()
                ))
                .with_meta("generator", "bfsk")
                .with_meta("taps", taps_text(&taps))
                .with_meta("degree", a.seq.degree);
            let params = json!({"kind": "bfsk", "degree": a.seq.degree, "taps": taps, "state": a.seq.state,
                "chip_us": a.chip_us, "delta_f_hz": delta, "fs_hz": a.fs, "smooth_us": sigma});
            (w, a.out, params, vec![], 2.0 * delta)
        }
        Kind::Costas(a) => {
            let (perm, seeds) = if a.perm.is_empty() {
                (gen_costas_perm(a.order, a.seed)?, vec![a.seed])
            } else {
                let p = CostasPermutation::new(a.perm.clone())?;
                if !cwshape_core::verify_costas(&p) {
                    log::warn!("the given permutation is not a Costas array");
                }
                (p, vec![])
            };
            let step = a.step_khz * 1e3;
            let (w, sigma) = smoothed(costas_fm(&perm, a.chip_ms * 1e-3, step, a.fs)?, a.smooth_us)?;
            let perm_text = perm.as_slice().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
            let w = w
                .relabel(format!(
                    "costas order={} perm={perm_text} chip_ms={} step_hz={step} fs={}{}",
                    perm.order(),
                    a.chip_ms,
                    a.fs,
                    sigma.map(|s| format!(" smooth_us={s}")).unwrap_or_default()
                ))
                .with_meta("generator", "costas")
                .with_meta("perm", &perm_text);
            let params = json!({"kind": "costas", "order": perm.order(), "seed": seeds.first(), "perm": perm.as_slice(),
                "chip_ms": a.chip_ms, "step_hz": step, "fs_hz": a.fs, "smooth_us": sigma});
            (w, a.out, params, seeds, perm.order() as f64 * step)
        }
        Kind::Lfm(a) => {
            let bw = a.bandwidth_khz * 1e3;
            let w = gen_lfm(bw, a.wrf_hz, a.fs)?;
            let params = json!({"kind": "lfm", "bandwidth_hz": bw, "wrf_hz": a.wrf_hz, "fs_hz": a.fs});
            (w, a.out, params, vec![], bw)
        }
        Kind::Noise(a) => {
            let w = gen_noise(a.n, a.seed, a.fs)?;
            let params = json!({"kind": "noise", "n": a.n, "seed": a.seed, "fs_hz": a.fs,
                "rng": cwshape_core::wavegen::NOISE_ALGORITHM});
            (w, a.out, params, vec![a.seed], f64::NAN)
        }
    };

    let prefix = &out.out;
    let wave_path = with_suffix(prefix, ".wfm");
    let w = w.with_meta("manifest", manifest_ref(prefix));
    write_waveform(&w, &wave_path)?;

    let mut manifest = new_manifest("generate", argv, params);
    manifest.seeds = seeds;
    let summary = json!({
        "waveform": wave_path,
        "samples": w.len(),
        "sample_rate_hz": w.sample_rate(),
        "wrf_hz": w.wrf(),
        "deviation_bandwidth_hz": deviation_hz.is_finite().then_some(deviation_hz),
        "label": w.label(),
    });
    finish(prefix, manifest, summary, &[wave_path])
}
