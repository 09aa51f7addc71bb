use crate::config::{Command, ConfigError, RunConfig};
use clap::Parser;
use std::path::PathBuf;

/// Experiments on shifted convolution sums of Hecke eigenvalues.
#[derive(Debug, Parser)]
#[command(name = "scslab", version)]
pub struct Cli {
    /// Subcommand; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML config file, or a JSON report to rerun; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Weight.
    #[arg(long)]
    pub k: Option<u32>,
    /// Eigenvalue table length (eigen).
    #[arg(long)]
    pub n: Option<usize>,
    /// Shift list, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<u64>>,
    #[arg(long)]
    pub h1: Option<u64>,
    #[arg(long)]
    pub h2: Option<u64>,
    /// X-grid: `a`, `a:b:step` or `a:b:xratio`.
    #[arg(long)]
    pub xgrid: Option<String>,
    /// Window `kind:a:A[:height]`, kind one of bump, cosine, sharp.
    #[arg(long)]
    pub window: Option<String>,
    /// Second window for variance runs (defaults to --window).
    #[arg(long)]
    pub window2: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Certified tail target for Kloosterman–Bessel sums.
    #[arg(long)]
    pub tail_tol: Option<f64>,
    #[arg(long)]
    pub k_eigen_max: Option<u32>,
    /// Largest n1, n2 for petersson-check.
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Eigenvalue cache directory (else $SCSLAB_CACHE_DIR, else .scslab-cache).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Output file stem (defaults to the command name).
    #[arg(long)]
    pub name: Option<String>,
    /// Also write a matplotlib script for the CSV.
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        set!(k, h, h1, h2, window, tol, tail_tol, k_eigen_max, n_max, out_dir, threads);
        if self.command.is_some() {
            cfg.command = self.command;
        }
        if self.n.is_some() {
            cfg.n = self.n;
        }
        if self.xgrid.is_some() {
            cfg.xgrid = self.xgrid;
        }
        if self.window2.is_some() {
            cfg.window2 = self.window2;
        }
        if self.cache_dir.is_some() {
            cfg.cache_dir = self.cache_dir;
        }
        if self.name.is_some() {
            cfg.name = self.name;
        }
        cfg.plot |= self.plot;
        Ok(cfg)
    }
}
