//! Run configuration: defaults, an optional TOML file, then command-line flags.

use crate::grid::{parse_grid, parse_integer_grid};
use clap::ValueEnum;
use scslab_core::qarith::dim_cusp_forms;
use scslab_core::sums::{make_window, Window, WindowKind};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CACHE_ENV: &str = "SCSLAB_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eigen,
    Sum,
    Variance,
    Meansquare,
    Smoothscan,
    PeterssonCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Sum => "sum",
            Command::Variance => "variance",
            Command::Meansquare => "meansquare",
            Command::Smoothscan => "smoothscan",
            Command::PeterssonCheck => "petersson-check",
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("invalid value for `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub k: u32,
    /// Eigenvalue table length; derived from the grid when absent.
    pub n: Option<usize>,
    pub h: Vec<u64>,
    pub h1: u64,
    pub h2: u64,
    pub xgrid: Option<String>,
    /// `kind:a:A` or `kind:a:A:height`.
    pub window: String,
    pub window2: Option<String>,
    pub tol: f64,
    pub tail_tol: f64,
    pub k_eigen_max: u32,
    pub n_max: u64,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub name: Option<String>,
    pub plot: bool,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            k: 12,
            n: None,
            h: vec![1],
            h1: 1,
            h2: 1,
            xgrid: None,
            window: "bump:1:2".into(),
            window2: None,
            tol: 1e-8,
            tail_tol: 1e-12,
            k_eigen_max: 60,
            n_max: 20,
            cache_dir: None,
            out_dir: PathBuf::from("."),
            name: None,
            plot: false,
            threads: 1,
        }
    }
}

pub fn parse_window(spec: &str, field: &str) -> Result<Window, ConfigError> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(ConfigError::field(field, format!("expected kind:a:A[:height], got '{spec}'")));
    }
    let kind: WindowKind = parts[0].parse().map_err(|e: scslab_core::Error| ConfigError::field(field, e.to_string()))?;
    let num = |s: &str| {
        s.parse::<f64>().map_err(|_| ConfigError::field(field, format!("'{s}' is not a number")))
    };
    let w = make_window(kind, num(parts[1])?, num(parts[2])?).map_err(|e| ConfigError::field(field, e.to_string()))?;
    Ok(match parts.get(3) {
        Some(h) => w.with_height(num(h)?),
        None => w,
    })
}

impl RunConfig {
    /// Reads a TOML config, or the `config` object embedded in a JSON report.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::field("config", format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            let mut report: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| ConfigError::field("config", e.to_string()))?;
            let embedded = report
                .get_mut("config")
                .map(serde_json::Value::take)
                .ok_or_else(|| ConfigError::field("config", "report has no embedded config"))?;
            return serde_json::from_value(embedded).map_err(|e| ConfigError::field("config", e.to_string()));
        }
        toml::from_str(&text).map_err(|e| ConfigError::field("config", e.to_string()))
    }

    pub fn command(&self) -> Result<Command, ConfigError> {
        self.command.ok_or_else(|| ConfigError::field("command", "no command given"))
    }

    pub fn window1(&self) -> Result<Window, ConfigError> {
        parse_window(&self.window, "window")
    }

    pub fn window2(&self) -> Result<Window, ConfigError> {
        match &self.window2 {
            Some(s) => parse_window(s, "window2"),
            None => self.window1(),
        }
    }

    pub fn grid(&self) -> Result<Vec<f64>, ConfigError> {
        let spec = self.xgrid.as_deref().ok_or_else(|| ConfigError::field("xgrid", "required for this command"))?;
        parse_grid(spec)
    }

    pub fn integer_grid(&self) -> Result<Vec<u64>, ConfigError> {
        let spec = self.xgrid.as_deref().ok_or_else(|| ConfigError::field("xgrid", "required for this command"))?;
        parse_integer_grid(spec)
    }

    /// Flag, then environment, then the default `.scslab-cache`.
    pub fn resolved_cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".scslab-cache"))
    }

    pub fn output_stem(&self) -> Result<String, ConfigError> {
        Ok(self.name.clone().unwrap_or_else(|| self.command.map(|c| c.name()).unwrap_or("run").to_string()))
    }

    fn check_weight(&self, need_forms: bool) -> Result<(), ConfigError> {
        if self.k < 4 || self.k % 2 == 1 {
            return Err(ConfigError::field("k", format!("weight must be even and at least 4, got {}", self.k)));
        }
        if need_forms && dim_cusp_forms(self.k) == 0 {
            return Err(ConfigError::field("k", format!("there are no cusp forms of weight {}", self.k)));
        }
        Ok(())
    }

    fn check_hs(&self) -> Result<(), ConfigError> {
        if self.h.is_empty() || self.h.contains(&0) {
            return Err(ConfigError::field("h", "shift list must be non-empty and positive"));
        }
        Ok(())
    }

    /// Checks every field the chosen command reads.
    pub fn validate(&self) -> Result<Command, ConfigError> {
        let cmd = self.command()?;
        if self.threads == 0 {
            return Err(ConfigError::field("threads", "must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(ConfigError::field("tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        if !(self.tail_tol > 0.0) {
            return Err(ConfigError::field("tail_tol", format!("must be positive, got {}", self.tail_tol)));
        }
        if let Some(name) = &self.name {
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(ConfigError::field("name", "must be a plain file stem"));
            }
        }
        match cmd {
            Command::Eigen => {
                self.check_weight(true)?;
                match self.n {
                    Some(n) if n >= 2 => {}
                    _ => return Err(ConfigError::field("n", "eigen needs a table length n >= 2")),
                }
            }
            Command::Sum | Command::Smoothscan => {
                self.check_weight(true)?;
                self.check_hs()?;
                self.grid()?;
                self.window1()?;
            }
            Command::Meansquare => {
                self.check_weight(true)?;
                self.check_hs()?;
                self.integer_grid()?;
            }
            Command::Variance => {
                self.check_weight(false)?;
                if self.h1 == 0 || self.h2 == 0 {
                    return Err(ConfigError::field("h1/h2", "shifts must be positive"));
                }
                self.grid()?;
                for (w, f) in [(self.window1()?, "window"), (self.window2()?, "window2")] {
                    if w.support().1 < 1.0 {
                        return Err(ConfigError::field(f, "variance runs need A_W >= 1"));
                    }
                }
            }
            Command::PeterssonCheck => {
                self.check_weight(false)?;
                if self.n_max == 0 {
                    return Err(ConfigError::field("n_max", "must be positive"));
                }
            }
        }
        Ok(cmd)
    }
}
