//! Dispatch of a validated [`RunConfig`] to the experiments, and report emission.

use crate::cache::{cache_load, cache_path, cache_store, find_cached, CacheError};
use crate::config::{Command, ConfigError, RunConfig};
use crate::output::{plot_script, write_atomic, Cell, CsvTable};
use scslab_core::experiments::{
    eigenforms_with_l_values, meansquare_experiment, smooth_bound_scan, variance_experiment, MeanSquareReport,
    SmoothScanReport, VarianceConfig, VarianceReport,
};
use scslab_core::petersson::{petersson_norm_ln, trace_formula_lhs, trace_formula_rhs, Truncation};
use scslab_core::qarith::HeckeEigenform;
use scslab_core::sums::{rankin_statistic, sharp_sum, smooth_sum, weighted_sum};
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;

pub const REPORT_SCHEMA: &str = "scslab-report-1";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] scslab_core::Error),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Debug, Serialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenSummary {
    pub index: usize,
    pub lambda2: f64,
    pub sym2_l1: Option<f64>,
    pub ln_petersson_norm: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenPayload {
    pub k: u32,
    pub n: usize,
    pub cache_file: PathBuf,
    pub cache_hit: bool,
    pub forms: Vec<EigenSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SumRow {
    pub form: usize,
    pub h: u64,
    pub x: f64,
    pub sharp: f64,
    pub weighted: f64,
    pub smooth: f64,
    pub rankin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeterssonRow {
    pub n1: u64,
    pub n2: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub tail_bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", content = "data", rename_all = "kebab-case")]
pub enum Payload {
    Eigen(EigenPayload),
    Sum(Vec<SumRow>),
    Variance(VarianceReport),
    Meansquare(Vec<MeanSquareReport>),
    Smoothscan(Vec<SmoothScanReport>),
    PeterssonCheck(Vec<PeterssonRow>),
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportEnvelope {
    pub schema: String,
    pub artifact_version: String,
    pub config: RunConfig,
    pub wall_seconds: f64,
    pub timings: Vec<Phase>,
    pub outputs: Vec<PathBuf>,
    pub payload: Payload,
}

struct Timer {
    phases: Vec<Phase>,
}

impl Timer {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.phases.push(Phase { name: name.to_string(), seconds: t.elapsed().as_secs_f64() });
        out
    }
}

/// Eigenforms of weight k with λ(1..=n) and L(1, sym² f), from the cache when
/// a long enough table exists, otherwise computed and stored.
fn eigen_tables(
    cfg: &RunConfig,
    k: u32,
    n: usize,
    timer: &mut Timer,
) -> Result<(Vec<HeckeEigenform>, PathBuf, bool), RunError> {
    let dir = cfg.resolved_cache_dir();
    if let Some(path) = find_cached(&dir, k, n) {
        let forms = timer.time("load", || cache_load(&path))?;
        return Ok((forms.into_iter().map(|f| f.truncated(n)).collect(), path, true));
    }
    let forms = timer.time("compute", || -> Result<Vec<HeckeEigenform>, RunError> {
        let forms = eigenforms_with_l_values(k, n)?;
        Ok(forms
            .into_iter()
            .map(|f| {
                let ln = petersson_norm_ln(&f, 1e-10).ok();
                let f = f.truncated(n);
                match ln {
                    Some(v) if v < 709.0 => f.with_petersson_norm(v.exp()),
                    _ => f,
                }
            })
            .collect())
    })?;
    let path = cache_path(&dir, k, n);
    timer.time("store", || cache_store(&path, &forms))?;
    Ok((forms, path, false))
}

struct Rendered {
    csv: CsvTable,
    plot: String,
    payload: Payload,
}

fn sum_table_length(cfg: &RunConfig, xs: &[f64]) -> Result<usize, RunError> {
    let x_max = xs.iter().cloned().fold(0.0, f64::max);
    let a = cfg.window1()?.support().1.max(1.0);
    Ok((a * x_max).ceil() as usize + *cfg.h.iter().max().unwrap() as usize + 1)
}

fn render(cfg: &RunConfig, cmd: Command, csv_name: &str, timer: &mut Timer) -> Result<Rendered, RunError> {
    let k = cfg.k;
    Ok(match cmd {
        Command::Eigen => {
            let n = cfg.n.unwrap();
            let (forms, path, hit) = eigen_tables(cfg, k, n, timer)?;
            let mut cols = vec!["n".to_string()];
            cols.extend((1..=forms.len()).map(|i| format!("lambda_{i}")));
            let mut csv = CsvTable { kind: "eigen".into(), columns: cols, rows: Vec::new() };
            for m in 1..=n {
                let mut row: Vec<Cell> = vec![m.into()];
                row.extend(forms.iter().map(|f| Cell::from(f.lambda(m))));
                csv.push(row);
            }
            let forms_summary = forms
                .iter()
                .enumerate()
                .map(|(i, f)| EigenSummary {
                    index: i + 1,
                    lambda2: f.lambda(2),
                    sym2_l1: f.sym2_l1,
                    ln_petersson_norm: petersson_norm_ln(f, 1e-10).ok(),
                })
                .collect();
            let ys: Vec<String> = csv.columns[1..].to_vec();
            let ys_ref: Vec<&str> = ys.iter().map(|s| s.as_str()).collect();
            Rendered {
                plot: plot_script(csv_name, "n", &ys_ref, true, false, None),
                csv,
                payload: Payload::Eigen(EigenPayload { k, n, cache_file: path, cache_hit: hit, forms: forms_summary }),
            }
        }
        Command::Sum => {
            let xs = cfg.grid()?;
            let w = cfg.window1()?;
            let (forms, _, _) = eigen_tables(cfg, k, sum_table_length(cfg, &xs)?, timer)?;
            let rows = timer.time("sums", || -> Result<Vec<SumRow>, RunError> {
                let mut rows = Vec::new();
                for (i, f) in forms.iter().enumerate() {
                    for &h in &cfg.h {
                        for &x in &xs {
                            rows.push(SumRow {
                                form: i + 1,
                                h,
                                x,
                                sharp: sharp_sum(f, x, h as usize)?,
                                weighted: weighted_sum(f, x, h as usize)?,
                                smooth: smooth_sum(f, x, h as usize, &w)?,
                                rankin: rankin_statistic(f, x)?,
                            });
                        }
                    }
                }
                Ok(rows)
            })?;
            let mut csv = CsvTable::new("sum", &["form", "h", "X", "sharp", "weighted", "smooth", "rankin"]);
            for r in &rows {
                csv.push(vec![r.form.into(), r.h.into(), r.x.into(), r.sharp.into(), r.weighted.into(), r.smooth.into(), r.rankin.into()]);
            }
            Rendered {
                plot: plot_script(csv_name, "X", &["sharp", "weighted", "smooth"], true, false, Some("h")),
                csv,
                payload: Payload::Sum(rows),
            }
        }
        Command::Variance => {
            let mut vc = VarianceConfig::new(k, cfg.h1, cfg.h2, cfg.window1()?, cfg.grid()?);
            vc.w2 = cfg.window2()?;
            vc.tail_tol = cfg.tail_tol;
            vc.k_eigen_max = cfg.k_eigen_max;
            vc.threads = cfg.threads;
            let report = timer.time("variance", || variance_experiment(&vc))?;
            let mut csv = CsvTable::new("variance", &["X", "lhs_petersson", "main_term", "residual", "tail_bound"]);
            for p in &report.points {
                csv.push(vec![p.x.into(), p.lhs_petersson.into(), p.main_term.into(), p.residual.into(), p.tail_bound.into()]);
            }
            Rendered {
                plot: plot_script(csv_name, "X", &["lhs_petersson", "main_term", "residual"], false, false, None),
                csv,
                payload: Payload::Variance(report),
            }
        }
        Command::Meansquare => {
            let xs = cfg.integer_grid()?;
            let n = 2 * *xs.iter().max().unwrap() as usize + *cfg.h.iter().max().unwrap() as usize;
            let (forms, _, _) = eigen_tables(cfg, k, n, timer)?;
            let reports = timer.time("meansquare", || {
                forms.iter().map(|f| meansquare_experiment(f, &cfg.h, &xs)).collect::<Result<Vec<_>, _>>()
            })?;
            let mut csv = CsvTable::new("meansquare", &["form", "h", "X", "V", "normalized", "in_range"]);
            for (i, r) in reports.iter().enumerate() {
                for p in &r.points {
                    csv.push(vec![(i + 1).into(), p.h.into(), p.x.into(), p.v.into(), p.normalized.into(), p.in_range.into()]);
                }
            }
            Rendered {
                plot: plot_script(csv_name, "X", &["V"], true, true, Some("h")),
                csv,
                payload: Payload::Meansquare(reports),
            }
        }
        Command::Smoothscan => {
            let xs = cfg.grid()?;
            let w = cfg.window1()?;
            let (forms, _, _) = eigen_tables(cfg, k, sum_table_length(cfg, &xs)?, timer)?;
            let reports = timer.time("smoothscan", || {
                forms.iter().map(|f| smooth_bound_scan(f, &w, &cfg.h, &xs)).collect::<Result<Vec<_>, _>>()
            })?;
            let mut csv = CsvTable::new("smoothscan", &["form", "h", "X", "value", "ratio", "in_range"]);
            for (i, r) in reports.iter().enumerate() {
                for p in &r.points {
                    csv.push(vec![(i + 1).into(), p.h.into(), p.x.into(), p.value.into(), p.ratio.into(), p.in_range.into()]);
                }
            }
            Rendered {
                plot: plot_script(csv_name, "X", &["ratio"], true, false, Some("h")),
                csv,
                payload: Payload::Smoothscan(reports),
            }
        }
        Command::PeterssonCheck => {
            let n_max = cfg.n_max;
            let forms = timer.time("eigenforms", || eigenforms_with_l_values(k, n_max as usize))?;
            let rows = timer.time("trace-formula", || -> Result<Vec<PeterssonRow>, RunError> {
                let mut rows = Vec::new();
                for n1 in 1..=n_max {
                    for n2 in 1..=n_max {
                        let lhs = trace_formula_lhs(k, n1 as usize, n2 as usize, &forms)?;
                        let rhs = trace_formula_rhs(k, n1, n2, Truncation::Tolerance(cfg.tail_tol))?;
                        let ok = (lhs - rhs.total()).abs() <= rhs.tail_bound + cfg.tol.max(1e-3) * (1.0 + rhs.total().abs());
                        rows.push(PeterssonRow { n1, n2, lhs, rhs: rhs.total(), tail_bound: rhs.tail_bound, ok });
                    }
                }
                Ok(rows)
            })?;
            let mut csv = CsvTable::new("petersson-check", &["n1", "n2", "lhs", "rhs", "tail_bound", "ok"]);
            for r in &rows {
                csv.push(vec![r.n1.into(), r.n2.into(), r.lhs.into(), r.rhs.into(), r.tail_bound.into(), r.ok.into()]);
            }
            Rendered {
                plot: plot_script(csv_name, "n2", &["lhs", "rhs"], false, false, Some("n1")),
                csv,
                payload: Payload::PeterssonCheck(rows),
            }
        }
    })
}

/// Validates, runs, and writes `<stem>.csv`, `<stem>.json` and optionally
/// `<stem>.plot.py` into the output directory.
pub fn run(cfg: &RunConfig) -> Result<ReportEnvelope, RunError> {
    let cmd = cfg.validate()?;
    let start = Instant::now();
    let mut timer = Timer { phases: Vec::new() };
    let stem = cfg.output_stem()?;
    let csv_name = format!("{stem}.csv");
    let rendered = render(cfg, cmd, &csv_name, &mut timer)?;

    let io = |path: &PathBuf| {
        let path = path.clone();
        move |source| RunError::Io { path, source }
    };
    std::fs::create_dir_all(&cfg.out_dir).map_err(io(&cfg.out_dir))?;
    let csv_path = cfg.out_dir.join(&csv_name);
    let json_path = cfg.out_dir.join(format!("{stem}.json"));
    let plot_path = cfg.out_dir.join(format!("{stem}.plot.py"));
    let mut outputs = vec![csv_path.clone(), json_path.clone()];
    if cfg.plot {
        outputs.push(plot_path.clone());
    }
    let envelope = ReportEnvelope {
        schema: REPORT_SCHEMA.into(),
        artifact_version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        wall_seconds: start.elapsed().as_secs_f64(),
        timings: timer.phases,
        outputs,
        payload: rendered.payload,
    };
    let json = serde_json::to_string_pretty(&envelope).expect("report serializes");

    let mut written: Vec<PathBuf> = Vec::new();
    let mut files = vec![(csv_path, rendered.csv.render()), (json_path, json + "\n")];
    if cfg.plot {
        files.push((plot_path, rendered.plot));
    }
    for (path, text) in files {
        if let Err(source) = write_atomic(&path, text.as_bytes()) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(RunError::Io { path, source });
        }
        written.push(path);
    }
    Ok(envelope)
}
