//! Waveform files, CSV exports and run manifests.
//!
//! Waveform files are UTF-8 text:
//!
//! ```text
//! #format_version=1
//! #sample_rate_hz=1000000
//! #wrf_hz=48.92367906066536
//! #label=bfsk degree=9 ...
//! 0,1.0000000000000000e0,0.0000000000000000e0
//! 1,...
//! ```
//!
//! Header keys other than the four required ones are carried in
//! [`Waveform::meta`]. Sample values are written with 17 significant digits,
//! which reproduces every `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{AmbiguitySurface, Spectrum};
use crate::error::{Error, Result};
use crate::shaper::TracePoint;
use crate::waveform::Waveform;

pub const FORMAT_VERSION: u32 = 1;
const REQUIRED_KEYS: [&str; 4] = ["format_version", "sample_rate_hz", "wrf_hz", "label"];

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_waveform(w: &Waveform, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "#format_version={FORMAT_VERSION}")?;
        writeln!(out, "#sample_rate_hz={}", w.sample_rate())?;
        writeln!(out, "#wrf_hz={}", w.wrf())?;
        writeln!(out, "#label={}", w.label())?;
        for (k, v) in &w.meta {
            if !REQUIRED_KEYS.contains(&k.as_str()) {
                writeln!(out, "#{k}={}", v.replace(['\n', '\r'], " "))?;
            }
        }
        for (i, s) in w.samples().iter().enumerate() {
            writeln!(out, "{i},{:.16e},{:.16e}", s.re, s.im)?;
        }
        Ok(())
    };
    body().map_err(|e| Error::io(path, e))?;
    finish(path, out)
}

pub fn read_waveform(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut header = std::collections::BTreeMap::new();
    let mut samples = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(kv) = line.strip_prefix('#') {
            if !samples.is_empty() {
                return Err(parse_err(lineno, "header line after sample rows".into()));
            }
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| parse_err(lineno, format!("header line without '=': {line:?}")))?;
            header.insert(k.trim().to_string(), v.to_string());
            continue;
        }
        let row = samples.len() + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("data row {row}: expected 3 columns (index,i,q), found {}", fields.len()),
            ));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno, format!("data row {row}: bad index {:?}", fields[0])))?;
        if index != row - 1 {
            return Err(parse_err(lineno, format!("data row {row}: index {index}, expected {}", row - 1)));
        }
        let num = |s: &str, what: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("data row {row}: bad {what} value {s:?}")))
        };
        samples.push(Complex64::new(num(fields[1], "i")?, num(fields[2], "q")?));
    }

    for key in REQUIRED_KEYS {
        if !header.contains_key(key) {
            return Err(parse_err(0, format!("missing header key {key}")));
        }
    }
    let version: u32 = header["format_version"]
        .trim()
        .parse()
        .map_err(|_| parse_err(0, format!("bad format_version {:?}", header["format_version"])))?;
    if version != FORMAT_VERSION {
        return Err(parse_err(0, format!("unsupported format_version {version}")));
    }
    let number = |key: &str| {
        header[key]
            .trim()
            .parse::<f64>()
            .map_err(|_| parse_err(0, format!("bad {key} {:?}", header[key])))
    };
    let fs = number("sample_rate_hz")?;
    let wrf = number("wrf_hz")?;
    let mut w = Waveform::new(samples, fs, wrf, header["label"].clone())?;
    for (k, v) in header {
        if !REQUIRED_KEYS.contains(&k.as_str()) {
            w.meta.insert(k, v);
        }
    }
    Ok(w)
}

/// `iteration,max_violation_db,sum_violation_db`
pub fn write_trace_csv(trace: &[TracePoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "iteration,max_violation_db,sum_violation_db")?;
        for t in trace {
            writeln!(out, "{},{:e},{:e}", t.iteration, t.max_db, t.sum_db)?;
        }
        Ok(())
    };
    body().map_err(|e| Error::io(path, e))?;
    finish(path, out)
}

fn db(v: f64) -> f64 {
    20.0 * v.log10()
}

/// Long form `delay_s,doppler_hz,magnitude_db`, Doppler-major.
pub fn write_surface_csv(surface: &AmbiguitySurface, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "delay_s,doppler_hz,magnitude_db")?;
        for i in 0..surface.doppler_bins.len() {
            let nu = surface.doppler_hz(i);
            for (k, &v) in surface.row(i).iter().enumerate() {
                writeln!(out, "{:e},{:e},{:e}", surface.delay_s(k), nu, db(v))?;
            }
        }
        Ok(())
    };
    body().map_err(|e| Error::io(path, e))?;
    finish(path, out)
}

/// `delay_s,magnitude_db` for each circular lag.
pub fn write_pacf_csv(magnitudes: &[f64], sample_rate: f64, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let n = magnitudes.len();
    let mut out = create(path)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "delay_s,magnitude_db")?;
        for (k, &v) in magnitudes.iter().enumerate() {
            let lag = if 2 * k <= n { k as f64 } else { k as f64 - n as f64 };
            writeln!(out, "{:e},{:e}", lag / sample_rate, db(v))?;
        }
        Ok(())
    };
    body().map_err(|e| Error::io(path, e))?;
    finish(path, out)
}

/// `frequency_hz,magnitude_db` in DFT bin order.
pub fn write_spectrum_csv(spec: &Spectrum, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = create(path)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "frequency_hz,magnitude_db")?;
        for (k, &f) in spec.bin_frequencies().iter().enumerate() {
            writeln!(out, "{:e},{:e}", f, spec.db(k))?;
        }
        Ok(())
    };
    body().map_err(|e| Error::io(path, e))?;
    finish(path, out)
}

/// Lower-case hex SHA-256 of a file's bytes.
pub fn file_sha256(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(Self {
            path: path.to_path_buf(),
            sha256: file_sha256(path)?,
        })
    }
}

/// Record of one command invocation and the files it read and wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub command_line: Vec<String>,
    pub parameters: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started_utc: String,
    pub finished_utc: Option<String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(tool: &str, version: &str, command: &str, command_line: Vec<String>) -> Self {
        Self {
            tool: tool.to_string(),
            version: version.to_string(),
            command: command.to_string(),
            command_line,
            parameters: serde_json::Value::Object(Default::default()),
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_utc: now(),
            finished_utc: None,
        }
    }

    pub fn set_parameters(&mut self, parameters: impl Serialize) -> Result<()> {
        self.parameters = serde_json::to_value(parameters)?;
        Ok(())
    }

    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn add_output(&mut self, path: impl AsRef<Path>) -> Result<()> {
        self.outputs.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn write(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.finished_utc = Some(now());
        let mut out = create(path)?;
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out).map_err(|e| Error::io(path, e))?;
        finish(path, out)
    }
}
