//! RSEC Criterion C emission mask and the "chimney" full-bandwidth limit.
//!
//! Mask values are in dB relative to the spectrum peak and are centered at
//! baseband 0 Hz. The RSEC part is 0 dB inside `±obd/2`, -40 dB at the edge,
//! then falls 20 dB per decade down to `rolloff_floor_db`. The chimney part is
//! 0 dB inside `±fbd/2` and `chimney_floor_db` outside. When both are present
//! the pointwise minimum applies.

use serde::Serialize;

use crate::analysis::Spectrum;
use crate::error::{Error, Result};

pub const RSEC_EDGE_DB: f64 = -40.0;
pub const DEFAULT_ROLLOFF_FLOOR_DB: f64 = -60.0;
pub const DEFAULT_CHIMNEY_FLOOR_DB: f64 = -90.0;

/// Relative slack when comparing a bin magnitude against the mask, so that a
/// bin clipped exactly to the mask is not counted as a violation after
/// floating-point rounding (~1e-11 dB).
pub(crate) const MASK_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RsecSkirt {
    pub obd: f64,
    pub floor_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chimney {
    pub fbd: f64,
    pub floor_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralMask {
    rsec: Option<RsecSkirt>,
    chimney: Option<Chimney>,
}

impl SpectralMask {
    pub fn new(rsec: Option<RsecSkirt>, chimney: Option<Chimney>) -> Result<Self> {
        if rsec.is_none() && chimney.is_none() {
            return Err(Error::invalid("a mask needs an RSEC skirt, a chimney, or both"));
        }
        if let Some(r) = rsec {
            if !(r.obd.is_finite() && r.obd > 0.0) {
                return Err(Error::invalid(format!("OBD must be positive, got {}", r.obd)));
            }
            if !(r.floor_db < RSEC_EDGE_DB) {
                return Err(Error::invalid(format!(
                    "roll-off floor must be below {RSEC_EDGE_DB} dB, got {}",
                    r.floor_db
                )));
            }
        }
        if let Some(c) = chimney {
            if !(c.fbd.is_finite() && c.fbd > 0.0) {
                return Err(Error::invalid(format!("FBD must be positive, got {}", c.fbd)));
            }
            if !(c.floor_db.is_finite() && c.floor_db < 0.0) {
                return Err(Error::invalid(format!("chimney floor must be negative, got {}", c.floor_db)));
            }
            if let Some(r) = rsec {
                if c.fbd < r.obd {
                    return Err(Error::invalid(format!(
                        "chimney FBD {} Hz lies inside the OBD {} Hz",
                        c.fbd, r.obd
                    )));
                }
                if !(c.floor_db < r.floor_db) {
                    return Err(Error::invalid(format!(
                        "chimney floor {} dB must be below the roll-off floor {} dB",
                        c.floor_db, r.floor_db
                    )));
                }
            }
        }
        Ok(Self { rsec, chimney })
    }

    pub fn rsec(&self) -> Option<RsecSkirt> {
        self.rsec
    }

    pub fn chimney(&self) -> Option<Chimney> {
        self.chimney
    }

    /// Mask level in dB at frequency `f` (Hz), even in `f`.
    pub fn value_db(&self, f: f64) -> f64 {
        let af = f.abs();
        let mut db = 0.0f64;
        if let Some(r) = self.rsec {
            let edge = r.obd / 2.0;
            if af >= edge {
                db = db.min((RSEC_EDGE_DB - 20.0 * (af / edge).log10()).max(r.floor_db));
            }
        }
        if let Some(c) = self.chimney {
            if af > c.fbd / 2.0 {
                db = db.min(c.floor_db);
            }
        }
        db
    }

    /// Mask level as a magnitude ratio relative to the peak.
    pub fn value_linear(&self, f: f64) -> f64 {
        10f64.powf(self.value_db(f) / 20.0)
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(r) = self.rsec {
            parts.push(format!("rsec obd_hz={} floor_db={}", r.obd, r.floor_db));
        }
        if let Some(c) = self.chimney {
            parts.push(format!("chimney fbd_hz={} floor_db={}", c.fbd, c.floor_db));
        }
        parts.join(" + ")
    }
}

/// RSEC mask for `obd` with default floors, optionally tightened by a chimney.
pub fn build_rsec_mask(obd: f64, chimney_fbd: Option<f64>) -> Result<SpectralMask> {
    SpectralMask::new(
        Some(RsecSkirt {
            obd,
            floor_db: DEFAULT_ROLLOFF_FLOOR_DB,
        }),
        chimney_fbd.map(|fbd| Chimney {
            fbd,
            floor_db: DEFAULT_CHIMNEY_FLOOR_DB,
        }),
    )
}

/// Pure chimney: 0 dB inside `±fbd/2`, -90 dB outside.
pub fn build_chimney_mask(fbd: f64) -> Result<SpectralMask> {
    SpectralMask::new(
        None,
        Some(Chimney {
            fbd,
            floor_db: DEFAULT_CHIMNEY_FLOOR_DB,
        }),
    )
}

pub fn mask_value(mask: &SpectralMask, f: f64) -> f64 {
    mask.value_db(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaskReport {
    pub max_violation_db: f64,
    pub violation_bin_count: usize,
    /// Frequency of the worst bin, `None` when compliant.
    pub worst_frequency: Option<f64>,
    /// Sum over violating bins of the excess in dB.
    pub sum_violation_db: f64,
}

impl MaskReport {
    pub fn compliant(&self) -> bool {
        self.violation_bin_count == 0
    }
}

/// Per-bin excess of a spectrum over the mask, relative to the spectrum's
/// reference magnitude.
pub fn mask_violation(spectrum: &Spectrum, mask: &SpectralMask) -> MaskReport {
    let limits: Vec<f64> = spectrum
        .bin_frequencies()
        .iter()
        .map(|&f| mask.value_linear(f))
        .collect();
    violation_against(spectrum.bins(), spectrum.reference_magnitude(), &limits, spectrum.bin_frequencies())
}

pub(crate) fn violation_against(
    bins: &[num_complex::Complex64],
    reference: f64,
    limits: &[f64],
    freqs: &[f64],
) -> MaskReport {
    violation_of_magnitudes(bins.iter().map(|b| b.norm()), reference, limits, freqs)
}

pub(crate) fn violation_of_magnitudes(
    mags: impl Iterator<Item = f64>,
    reference: f64,
    limits: &[f64],
    freqs: &[f64],
) -> MaskReport {
    let mut report = MaskReport {
        max_violation_db: 0.0,
        violation_bin_count: 0,
        worst_frequency: None,
        sum_violation_db: 0.0,
    };
    for ((mag, &lim), &f) in mags.zip(limits).zip(freqs) {
        let bound = reference * lim;
        if mag > bound * (1.0 + MASK_SLACK) {
            let excess = 20.0 * (mag / bound).log10();
            report.violation_bin_count += 1;
            report.sum_violation_db += excess;
            if excess > report.max_violation_db {
                report.max_violation_db = excess;
                report.worst_frequency = Some(f);
            }
        }
    }
    report
}
