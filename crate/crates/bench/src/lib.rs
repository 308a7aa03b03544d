//! Fixed inputs shared by the benchmarks.

use cwshape_core::{
    build_rsec_mask, costas_waveform, gen_bfsk, gen_costas_perm, gen_msequence, gen_noise,
    wavegen::default_taps, SpectralMask, Waveform,
};

pub const FS: f64 = 1e6;

/// Order-20 Costas FSK, 1 ms chips, 1 kHz step: 20,000 samples.
pub fn costas20() -> Waveform {
    let perm = gen_costas_perm(20, 7).expect("order 20 is constructible");
    costas_waveform(&perm, 1e-3, 1e3, FS).expect("integer chip length")
}

/// 511-chip BFSK with 40 µs chips: 20,440 samples.
pub fn bfsk511() -> Waveform {
    let bits = gen_msequence(9, default_taps(9).expect("degree 9"), 1).expect("primitive taps");
    gen_bfsk(&bits, 40e-6, 12.5e3, FS).expect("integer chip length")
}

pub fn noise(n: usize) -> Waveform {
    gen_noise(n, 42, FS).expect("n >= 2")
}

pub fn rsec(obd_hz: f64) -> SpectralMask {
    build_rsec_mask(obd_hz, None).expect("positive obd")
}
