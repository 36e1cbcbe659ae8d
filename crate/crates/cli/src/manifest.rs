//! Run manifests: a JSON record sufficient to reproduce a run bitwise.
//!
//! The manifest captures the exact argv, the resolved configuration
//! (defaults filled in), where the seed came from, a content hash of the
//! count tables the run depended on, and a content hash of every file the
//! run wrote.  Wall time is recorded as a metric; it is the one field not
//! expected to reproduce.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{CliError, MetaArgs};

#[derive(Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub argv: Vec<String>,
    /// Resolved parameters, defaults included.
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Where the seed came from: `flag`, `env` or `default`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_source: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// SHA-256 over the count table backing the run, in the same CSV form
    /// `count --out` would emit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_table_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_file: Option<ConfigEcho>,
    pub outputs: Vec<OutputFile>,
    pub wall_ms: u128,
    pub version: &'static str,
}

/// The `--config` TOML file, echoed into the manifest as JSON.
#[derive(Serialize)]
pub struct ConfigEcho {
    pub path: PathBuf,
    pub contents: serde_json::Value,
}

#[derive(Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub bytes: u64,
    pub sha256: String,
}

pub fn sha256_hex(data: &[u8]) -> String {
    let digest = Sha256::digest(data);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

impl RunManifest {
    pub fn new(command: &'static str, config: serde_json::Value) -> Self {
        RunManifest {
            command,
            argv: std::env::args().collect(),
            config,
            seed: None,
            seed_source: None,
            threads: None,
            count_table_sha256: None,
            config_file: None,
            outputs: Vec::new(),
            wall_ms: 0,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    /// Reads the `--config` TOML file, if any, and echoes it.
    pub fn echo_config(&mut self, path: Option<&Path>) -> Result<(), CliError> {
        if let Some(path) = path {
            let raw = fs::read_to_string(path)?;
            let parsed: toml::Value = raw
                .parse()
                .map_err(|err| CliError::Usage(format!("{}: {err}", path.display())))?;
            let contents = serde_json::to_value(parsed).map_err(CliError::usage)?;
            self.config_file = Some(ConfigEcho {
                path: path.to_path_buf(),
                contents,
            });
        }
        Ok(())
    }

    /// Hashes a file the run just wrote and records it.
    pub fn add_output(&mut self, path: &Path) -> Result<(), CliError> {
        let data = fs::read(path)?;
        self.outputs.push(OutputFile {
            path: path.to_path_buf(),
            bytes: data.len() as u64,
            sha256: sha256_hex(&data),
        });
        Ok(())
    }

    /// Stamps the wall time and writes the manifest; `path` resolution is
    /// the caller's business.
    pub fn finish(mut self, started: Instant, path: &Path) -> Result<(), CliError> {
        self.wall_ms = started.elapsed().as_millis();
        let json = serde_json::to_string_pretty(&self).map_err(CliError::usage)?;
        let mut file = fs::File::create(path)?;
        file.write_all(json.as_bytes())?;
        file.write_all(b"\n")?;
        Ok(())
    }
}

/// Resolves the sampling seed: the flag wins, then the `BICELL_SEED`
/// environment variable, then zero.
pub fn resolve_seed(flag: Option<u64>) -> Result<(u64, &'static str), CliError> {
    if let Some(seed) = flag {
        return Ok((seed, "flag"));
    }
    match std::env::var("BICELL_SEED") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map(|seed| (seed, "env"))
            .map_err(|_| CliError::Usage(format!("BICELL_SEED is not a valid seed: `{raw}`"))),
        Err(_) => Ok((0, "default")),
    }
}

/// Manifest destination for a file-producing command: the explicit flag if
/// given, otherwise a `.manifest.json` sibling of the primary output.
pub fn manifest_path_for(meta: &MetaArgs, primary_output: &Path) -> PathBuf {
    meta.manifest.clone().unwrap_or_else(|| {
        let mut name = primary_output.file_name().unwrap_or_default().to_owned();
        name.push(".manifest.json");
        primary_output.with_file_name(name)
    })
}
