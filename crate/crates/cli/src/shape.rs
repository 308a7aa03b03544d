use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use cwshape_core::io::{read_waveform, write_trace_csv, write_waveform};
use cwshape_core::mask::{Chimney, RsecSkirt, DEFAULT_CHIMNEY_FLOOR_DB, DEFAULT_ROLLOFF_FLOOR_DB};
use cwshape_core::{alternate_project, ShapeConfig, SpectralMask};
use serde_json::json;

use crate::output::{finish, manifest_ref, new_manifest, with_suffix};
use crate::OutputArgs;

#[derive(Args, Debug)]
pub struct ShapeArgs {
    /// Input waveform file.
    #[arg(short, long)]
    input: PathBuf,
    /// Occupied bandwidth of the RSEC skirt, kHz.
    #[arg(long)]
    obd_khz: Option<f64>,
    /// Full bandwidth of the chimney, kHz.
    #[arg(long)]
    chimney_khz: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ROLLOFF_FLOOR_DB, allow_hyphen_values = true)]
    rolloff_floor_db: f64,
    #[arg(long, default_value_t = DEFAULT_CHIMNEY_FLOOR_DB, allow_hyphen_values = true)]
    chimney_floor_db: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Stop once the worst mask excess is at most this many dB.
    #[arg(long, default_value_t = 1e-3)]
    tol_db: f64,
    /// Progress line cadence on stderr; 0 disables.
    #[arg(long, default_value_t = 1_000)]
    report_every: usize,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn run(a: ShapeArgs, argv: Vec<String>) -> Result<()> {
    if a.obd_khz.is_none() && a.chimney_khz.is_none() {
        bail!("give --obd-khz, --chimney-khz or both");
    }
    let rsec = a.obd_khz.map(|k| RsecSkirt {
        obd: k * 1e3,
        floor_db: a.rolloff_floor_db,
    });
    let chimney = a.chimney_khz.map(|k| Chimney {
        fbd: k * 1e3,
        floor_db: a.chimney_floor_db,
    });
    let mask = SpectralMask::new(rsec, chimney)?;
    let cfg = ShapeConfig {
        max_iterations: a.max_iter,
        tol_db: a.tol_db,
        report_every: a.report_every,
    };
    cfg.validate()?;

    let w0 = read_waveform(&a.input)?;
    log::info!("shaping {} samples against {}", w0.len(), mask.describe());
    let r = alternate_project(&w0, &mask, &cfg)?;

    let prefix = &a.out.out;
    let cm_path = with_suffix(prefix, ".cm.wfm");
    let masked_path = with_suffix(prefix, ".masked.wfm");
    let trace_path = with_suffix(prefix, ".trace.csv");
    let mref = manifest_ref(prefix);
    write_waveform(&r.cm_waveform.clone().with_meta("manifest", &mref), &cm_path)?;
    write_waveform(&r.masked_waveform.clone().with_meta("manifest", &mref), &masked_path)?;
    write_trace_csv(&r.violation_trace, &trace_path)?;

    let mut manifest = new_manifest(
        "shape",
        argv,
        json!({
            "input": a.input,
            "mask": mask.describe(),
            "obd_hz": rsec.map(|r| r.obd),
            "rolloff_floor_db": rsec.map(|r| r.floor_db),
            "chimney_fbd_hz": chimney.map(|c| c.fbd),
            "chimney_floor_db": chimney.map(|c| c.floor_db),
            "max_iterations": cfg.max_iterations,
            "tol_db": cfg.tol_db,
            "report_every": cfg.report_every,
        }),
    );
    manifest.add_input(&a.input)?;
    let summary = json!({
        "converged": r.converged,
        "iterations": r.iterations,
        "final_mask_violation_db": r.final_mask_violation_db,
        "final_modulation_depth": r.final_modulation_depth,
        "cm_waveform": cm_path,
        "masked_waveform": masked_path,
        "trace": trace_path,
    });
    finish(prefix, manifest, summary, &[cm_path, masked_path, trace_path])
}
