//! File emission for sweep results: CSVs with a fixed documented column
//! order, the resolved config, a fit/audit summary, and the three SVG plots.
//! All float formatting goes through Rust's shortest-round-trip formatter so
//! reruns are byte-identical.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::plot::{render_line_plot, Axes, PlotSeries, SeriesStyle};
use crate::experiments::{ConvergedStats, SweepResult};

pub const SWEEP_CSV_HEADER: &str = "sigma,d,dim,trials,failed_trials,median_energy,\
median_abs_error,median_signed_error,pos_err_median,neg_err_median,median_kept_dim,\
chi_median,lower_bound_median,upper_opt_median,upper_eligible,upper_violations,\
lower_eligible,lower_violations";

pub const CONVERGED_CSV_HEADER: &str = "sigma,pos_median,neg_median,pos_count,neg_count,\
chi_median,upper_opt_median,lower_magnitude_median";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)
}

/// Render `sweep.csv` (one row per `(sigma, d)` cell).
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.sigma,
            r.d,
            r.dim,
            r.trials,
            r.failed_trials,
            r.median_energy,
            r.median_abs_error,
            r.median_signed_error,
            fmt_opt(r.pos_err_median),
            fmt_opt(r.neg_err_median),
            r.median_kept_dim,
            r.chi_median,
            r.lower_bound_median,
            fmt_opt(r.upper_opt_median),
            r.upper_eligible,
            r.upper_violations,
            r.lower_eligible,
            r.lower_violations,
        )
        .expect("string write");
    }
    out
}

/// Render `converged.csv` (one row per noise width).
pub fn converged_csv(stats: &[ConvergedStats]) -> String {
    let mut out = String::new();
    out.push_str(CONVERGED_CSV_HEADER);
    out.push('\n');
    for s in stats {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.sigma,
            fmt_opt(s.pos_median),
            fmt_opt(s.neg_median),
            s.pos_count,
            s.neg_count,
            s.chi_median,
            fmt_opt(s.upper_opt_median),
            s.lower_magnitude_median,
        )
        .expect("string write");
    }
    out
}

#[derive(Serialize)]
struct ResolvedConfigFile<'a> {
    config: &'a crate::experiments::SweepConfig,
    model: &'a crate::experiments::ResolvedModel,
}

#[derive(Serialize)]
struct SummaryFile {
    fit_exponent: Option<f64>,
    fit_coefficient: Option<f64>,
    upper_violations_total: usize,
    lower_violations_total: usize,
    upper_eligible_total: usize,
    lower_eligible_total: usize,
    total_trials: usize,
}

/// Write every output file into the configured directory, returning the
/// paths written. Empty results produce header-only CSVs and no plots.
pub fn emit_outputs(
    result: &SweepResult,
    stats: &[ConvergedStats],
    fit: Option<(f64, f64)>,
) -> Result<Vec<PathBuf>> {
    let dir = &result.config.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let mut written = Vec::new();

    let sweep_path = dir.join("sweep.csv");
    write_file(&sweep_path, sweep_csv(result).as_bytes())?;
    written.push(sweep_path);

    let converged_path = dir.join("converged.csv");
    write_file(&converged_path, converged_csv(stats).as_bytes())?;
    written.push(converged_path);

    let config_path = dir.join("config.json");
    let config_text = serde_json::to_string_pretty(&ResolvedConfigFile {
        config: &result.config,
        model: &result.model,
    })
    .expect("config serializes");
    write_file(&config_path, config_text.as_bytes())?;
    written.push(config_path);

    let summary_path = dir.join("summary.json");
    let summary_text = serde_json::to_string_pretty(&SummaryFile {
        fit_exponent: fit.map(|f| f.0),
        fit_coefficient: fit.map(|f| f.1),
        upper_violations_total: result.upper_violations_total,
        lower_violations_total: result.lower_violations_total,
        upper_eligible_total: result.upper_eligible_total,
        lower_eligible_total: result.lower_eligible_total,
        total_trials: result.samples.len(),
    })
    .expect("summary serializes");
    write_file(&summary_path, summary_text.as_bytes())?;
    written.push(summary_path);

    if result.rows.is_empty() {
        return Ok(written);
    }

    for (name, svg) in [
        ("energy_vs_dim.svg", energy_plot(result)),
        ("abs_error_vs_dim.svg", abs_error_plot(result)),
        ("converged_vs_sigma.svg", converged_plot(result, stats, fit)),
    ] {
        let path = dir.join(name);
        write_file(&path, svg.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

fn sigma_label(sigma: f64) -> String {
    format!("sigma={sigma:.0e}")
}

fn energy_plot(result: &SweepResult) -> String {
    let mut series = Vec::new();
    for &sigma in &result.config.sigmas {
        let pts: Vec<(f64, f64)> = result
            .rows
            .iter()
            .filter(|r| r.sigma == sigma)
            .map(|r| (r.d as f64, r.median_energy))
            .collect();
        series.push(PlotSeries {
            label: sigma_label(sigma),
            points: pts,
            style: SeriesStyle::Line,
        });
    }
    let e0_line: Vec<(f64, f64)> = vec![
        (1.0, result.model.e0),
        (result.config.d_max as f64, result.model.e0),
    ];
    series.push(PlotSeries {
        label: "E0".to_string(),
        points: e0_line,
        style: SeriesStyle::Dashed,
    });
    render_line_plot(
        &Axes {
            title: "median regularized energy vs Krylov index".into(),
            xlabel: "d".into(),
            ylabel: "median energy".into(),
            xlog: false,
            ylog: false,
        },
        &series,
    )
}

fn abs_error_plot(result: &SweepResult) -> String {
    let mut series = Vec::new();
    for &sigma in &result.config.sigmas {
        let pts: Vec<(f64, f64)> = result
            .rows
            .iter()
            .filter(|r| r.sigma == sigma)
            .map(|r| (r.d as f64, r.median_abs_error))
            .collect();
        series.push(PlotSeries {
            label: sigma_label(sigma),
            points: pts,
            style: SeriesStyle::Line,
        });
    }
    render_line_plot(
        &Axes {
            title: "median absolute energy error vs Krylov index".into(),
            xlabel: "d".into(),
            ylabel: "median |error|".into(),
            xlog: false,
            ylog: true,
        },
        &series,
    )
}

fn converged_plot(
    result: &SweepResult,
    stats: &[ConvergedStats],
    fit: Option<(f64, f64)>,
) -> String {
    let _ = result;
    let mut series = Vec::new();
    let pos: Vec<(f64, f64)> = stats
        .iter()
        .filter_map(|s| s.pos_median.map(|m| (s.sigma, m)))
        .collect();
    series.push(PlotSeries {
        label: "positive error median".into(),
        points: pos,
        style: SeriesStyle::Points,
    });
    let neg: Vec<(f64, f64)> = stats
        .iter()
        .filter_map(|s| s.neg_median.map(|m| (s.sigma, m.abs())))
        .collect();
    series.push(PlotSeries {
        label: "|negative error median|".into(),
        points: neg,
        style: SeriesStyle::Points,
    });
    series.push(PlotSeries {
        label: "optimized upper bound".into(),
        points: stats
            .iter()
            .filter_map(|s| s.upper_opt_median.map(|m| (s.sigma, m)))
            .collect(),
        style: SeriesStyle::Line,
    });
    series.push(PlotSeries {
        label: "chi".into(),
        points: stats.iter().map(|s| (s.sigma, s.chi_median)).collect(),
        style: SeriesStyle::Dotted,
    });
    series.push(PlotSeries {
        label: "lower bound magnitude".into(),
        points: stats
            .iter()
            .map(|s| (s.sigma, s.lower_magnitude_median))
            .collect(),
        style: SeriesStyle::Line,
    });
    if let Some((exp, coeff)) = fit {
        let fit_pts: Vec<(f64, f64)> = stats
            .iter()
            .filter(|s| s.sigma > 0.0)
            .map(|s| (s.sigma, coeff * s.sigma.powf(exp)))
            .collect();
        series.push(PlotSeries {
            label: format!("fit ~ sigma^{exp:.3}"),
            points: fit_pts,
            style: SeriesStyle::Dashed,
        });
    }
    render_line_plot(
        &Axes {
            title: "converged errors and bounds vs noise width".into(),
            xlabel: "sigma".into(),
            ylabel: "energy error".into(),
            xlog: true,
            ylog: true,
        },
        &series,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{
        converged_errors, run_sweep, Boundary, LatticeConfig, SweepConfig,
    };

    fn out_config(dir: &str) -> SweepConfig {
        SweepConfig {
            lattice: LatticeConfig {
                rows: 1,
                cols: 2,
                boundary: Boundary::Open,
            },
            sigmas: vec![1e-4, 1e-3],
            d_max: 3,
            trials: 8,
            converged_window: (2, 3),
            master_seed: 5,
            out_dir: std::env::temp_dir().join(dir),
            ..SweepConfig::default()
        }
    }

    #[test]
    fn outputs_are_written_and_byte_stable() {
        let config = out_config("qkrylov_out_test");
        let result = run_sweep(&config).unwrap();
        let stats = converged_errors(&result, config.converged_window);
        let files = emit_outputs(&result, &stats, Some((1.0, 2.0))).unwrap();
        assert_eq!(files.len(), 7);
        for f in &files {
            assert!(f.exists(), "missing {f:?}");
        }
        let first = std::fs::read(config.out_dir.join("sweep.csv")).unwrap();
        // Re-run the whole pipeline; bytes must match.
        let result2 = run_sweep(&config).unwrap();
        let stats2 = converged_errors(&result2, config.converged_window);
        emit_outputs(&result2, &stats2, Some((1.0, 2.0))).unwrap();
        let second = std::fs::read(config.out_dir.join("sweep.csv")).unwrap();
        assert_eq!(first, second);
        let conv = std::fs::read_to_string(config.out_dir.join("converged.csv")).unwrap();
        assert!(conv.starts_with(CONVERGED_CSV_HEADER));
        assert_eq!(conv.lines().count(), 1 + config.sigmas.len());
        std::fs::remove_dir_all(&config.out_dir).ok();
    }

    #[test]
    fn empty_rows_give_headers_only_and_no_plots() {
        let config = out_config("qkrylov_out_empty");
        let result = run_sweep(&config).unwrap();
        let mut empty = result.clone();
        empty.rows.clear();
        empty.samples.clear();
        let files = emit_outputs(&empty, &[], None).unwrap();
        assert_eq!(files.len(), 4);
        let sweep = std::fs::read_to_string(config.out_dir.join("sweep.csv")).unwrap();
        assert_eq!(sweep.lines().count(), 1);
        assert!(!config.out_dir.join("energy_vs_dim.svg").exists());
        std::fs::remove_dir_all(&config.out_dir).ok();
    }
}
