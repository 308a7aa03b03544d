use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cwshape_core::io::RunManifest;
use serde_json::Value;

pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn manifest_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".manifest.json")
}

/// File name of the manifest, as referenced from the outputs.
pub fn manifest_ref(prefix: &Path) -> String {
    manifest_path(prefix)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn new_manifest(command: &str, argv: Vec<String>, parameters: Value) -> RunManifest {
    let mut m = RunManifest::new(env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"), command, argv);
    m.parameters = parameters;
    m
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Prints the summary, writes it next to the other outputs and closes the manifest.
pub fn finish(prefix: &Path, mut manifest: RunManifest, summary: Value, outputs: &[PathBuf]) -> Result<()> {
    let summary_path = with_suffix(prefix, ".summary.json");
    write_json(&summary_path, &summary)?;
    for p in outputs.iter().chain(std::iter::once(&summary_path)) {
        manifest.add_output(p)?;
    }
    let path = manifest_path(prefix);
    manifest.write(&path)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    log::info!("manifest {}", path.display());
    Ok(())
}
