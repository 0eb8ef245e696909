//! Run manifests.
//!
//! Every run writes `manifest.json` next to its data files. The manifest
//! holds the fully resolved configuration — after defaults, presets, and
//! series-derived horizons have been applied — so `stefanwalk replay
//! manifest.json` rebuilds the run and its data files byte-for-byte.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use stefanwalk::{Error, PhysicalParams, Result};

use crate::output::OutputFormat;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub run: ResolvedRun,
    pub format: OutputFormat,
    /// Output directory as requested; relative paths are relative to the
    /// working directory of the original invocation.
    pub out_dir: String,
    /// Files the run read (driver series), as written on the command line.
    pub inputs: Vec<String>,
    /// Role -> file name, inside `out_dir`.
    pub outputs: BTreeMap<String, String>,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text =
            serde_json::to_string_pretty(self).expect("manifest serialization cannot fail");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            reason: e.to_string(),
        })
    }
}

/// A subcommand with every parameter pinned to a concrete value.
///
/// Command-line parsing resolves flags into one of these; `replay` loads one
/// from a manifest. Both paths feed the same executor, which is what makes
/// replays reproduce the original bytes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum ResolvedRun {
    Free {
        walkers: u64,
        x0: f64,
        steps: usize,
        dx: f64,
        seed: u64,
        workers: usize,
    },
    Heat {
        params: PhysicalParams,
        initial: f64,
        left: String,
        right: String,
        time_unit: String,
        dx: f64,
        domain_len: f64,
        t_max: f64,
        n: u32,
        seed: u64,
        workers: usize,
        terms: Option<usize>,
    },
    Stefan {
        params: PhysicalParams,
        driver: String,
        time_unit: String,
        dx: f64,
        domain_len: f64,
        t_max: f64,
        n: u32,
        seed: u64,
        workers: usize,
        allow_coarse_front: bool,
    },
    StefanFlux {
        params: PhysicalParams,
        driver: String,
        time_unit: String,
        dx: f64,
        domain_len: f64,
        t_max: f64,
        n: u32,
        seed: u64,
        workers: usize,
        allow_coarse_front: bool,
    },
    Fdm {
        params: PhysicalParams,
        driver: String,
        time_unit: String,
        dx: f64,
        dt: f64,
        domain_len: f64,
        t_max: f64,
        /// Recorded for uniformity; the deterministic solver ignores them.
        seed: u64,
        workers: usize,
    },
    Converge {
        params: PhysicalParams,
        driver: String,
        domain_len: f64,
        t_max: f64,
        t_star: f64,
        x_max: f64,
        sweep: SweepParams,
        seeds: Vec<u64>,
        workers: usize,
    },
    Lambda {
        beta: f64,
        t0: f64,
        tol: f64,
    },
}

/// Serialized form of a sweep: walker levels at fixed cell width, or cell
/// widths at a fixed scale factor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepParams {
    ScaleFactor { levels: Vec<u32>, dx: f64 },
    CellWidth { levels: Vec<f64>, n: u32 },
}
