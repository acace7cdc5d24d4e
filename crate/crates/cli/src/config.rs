//! Run configuration: command-line flags over a flat `key = value` file
//! over built-in defaults.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use stdmap_core::periodic::{CensusConfig, DEDUP_TOL, NEWTON_TOL};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Values that may come from flags or from the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub k: Option<f64>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub rho: Option<f64>,
    pub grid: Option<usize>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub tol_newton: Option<f64>,
    pub tol_dedup: Option<f64>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Layer {
    /// Fields of `self` win; gaps are filled from `lower`.
    pub fn over(self, lower: Layer) -> Layer {
        Layer {
            k: self.k.or(lower.k),
            n: self.n.or(lower.n),
            n_max: self.n_max.or(lower.n_max),
            rho: self.rho.or(lower.rho),
            grid: self.grid.or(lower.grid),
            threads: self.threads.or(lower.threads),
            seed: self.seed.or(lower.seed),
            tol_newton: self.tol_newton.or(lower.tol_newton),
            tol_dedup: self.tol_dedup.or(lower.tol_dedup),
            cache_dir: self.cache_dir.or(lower.cache_dir),
            format: self.format.or(lower.format),
        }
    }

    pub fn parse_file(path: &Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Layer::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Layer, CliError> {
        let mut layer = Layer::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            let bad = |what: &str| CliError::Usage(format!("config line {}: {key} expects {what}, got {value:?}", lineno + 1));
            match key.as_str() {
                "k" => layer.k = Some(value.parse().map_err(|_| bad("a number"))?),
                "n" => layer.n = Some(value.parse().map_err(|_| bad("an integer"))?),
                "n-max" => layer.n_max = Some(value.parse().map_err(|_| bad("an integer"))?),
                "rho" => layer.rho = Some(value.parse().map_err(|_| bad("a number"))?),
                "grid" => layer.grid = Some(value.parse().map_err(|_| bad("an integer"))?),
                "threads" => layer.threads = Some(value.parse().map_err(|_| bad("an integer"))?),
                "seed" => layer.seed = Some(value.parse().map_err(|_| bad("an integer"))?),
                "tol-newton" => layer.tol_newton = Some(value.parse().map_err(|_| bad("a number"))?),
                "tol-dedup" => layer.tol_dedup = Some(value.parse().map_err(|_| bad("a number"))?),
                "cache-dir" => layer.cache_dir = Some(PathBuf::from(value)),
                "format" => {
                    layer.format = Some(Format::from_str(value, true).map_err(|_| bad("json or csv"))?)
                }
                _ => return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", lineno + 1))),
            }
        }
        Ok(layer)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: f64,
    pub n: usize,
    pub n_max: usize,
    /// `None` unless set by a flag or the config file; commands that filter
    /// by default use [`RunConfig::rho`].
    pub rho_set: Option<f64>,
    pub grid_res: Option<usize>,
    pub threads: usize,
    pub seed: u64,
    pub newton_tol: f64,
    pub dedup_tol: f64,
    pub cache_dir: Option<PathBuf>,
    pub out_format: Format,
}

pub const DEFAULT_K: f64 = 5.0;
pub const DEFAULT_RHO: f64 = 1.0;
pub const DEFAULT_N_MAX: usize = 4;

impl RunConfig {
    pub fn resolve(layer: Layer) -> Result<RunConfig, CliError> {
        let threads = layer
            .threads
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
        if threads == 0 {
            return Err(CliError::Usage("threads must be >= 1".into()));
        }
        let cfg = RunConfig {
            k: layer.k.unwrap_or(DEFAULT_K),
            n: layer.n.unwrap_or(1),
            n_max: layer.n_max.unwrap_or(DEFAULT_N_MAX),
            rho_set: layer.rho,
            grid_res: layer.grid,
            threads,
            seed: layer.seed.unwrap_or(0),
            newton_tol: layer.tol_newton.unwrap_or(NEWTON_TOL),
            dedup_tol: layer.tol_dedup.unwrap_or(DEDUP_TOL),
            cache_dir: layer.cache_dir,
            out_format: layer.format.unwrap_or(Format::Json),
        };
        if !cfg.k.is_finite() {
            return Err(CliError::Usage(format!("k must be finite, got {}", cfg.k)));
        }
        if !(cfg.newton_tol > 0.0 && cfg.dedup_tol > 0.0) {
            return Err(CliError::Usage("tolerances must be > 0".into()));
        }
        Ok(cfg)
    }

    pub fn rho(&self) -> f64 {
        self.rho_set.unwrap_or(DEFAULT_RHO)
    }

    pub fn census(&self) -> CensusConfig {
        CensusConfig {
            newton_tol: self.newton_tol,
            dedup_tol: self.dedup_tol,
            ..CensusConfig::default()
        }
    }
}
