//! Noise/dimension sweep driver: runs seeded perturbation trials over a grid
//! of widths and Krylov dimensions, aggregates medians, audits the bounds on
//! every trial, and emits CSV/JSON/SVG outputs.

mod output;
mod plot;

pub use output::emit_outputs;
pub use plot::{render_line_plot, PlotSeries, SeriesStyle};

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundInputs};
use crate::error::{Error, Result};
use crate::krylov::{build_exact_pencil, default_dt};
use crate::noise::{derive_trial_seed, perturb_gaussian, NoiseSpec};
use crate::operators::{
    antiferromagnetic_state, build_heisenberg, default_degeneracy_tol, sector_restrict,
    spectral_decompose, spectral_quantities, Boundary, SpinLattice,
};
use crate::solver::{epsilon_rule, solve_thresholded, EPSILON_FLOOR};

/// Timestep selection: the proof-friendly default `pi / R` or a fixed value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtRule {
    Auto,
    Fixed(f64),
}

impl Serialize for DtRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DtRule::Auto => s.serialize_str("auto"),
            DtRule::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for DtRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Value(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) if t == "auto" => Ok(DtRule::Auto),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "dt must be \"auto\" or a number, got \"{t}\""
            ))),
            Raw::Value(v) => Ok(DtRule::Fixed(v)),
        }
    }
}

/// Threshold selection: the width-scaled rule `0.1 D sigma` or a fixed value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonRule {
    Paper,
    Fixed(f64),
}

impl EpsilonRule {
    pub fn epsilon(&self, dim: usize, sigma: f64) -> f64 {
        let eps = match self {
            EpsilonRule::Paper => epsilon_rule(dim, sigma),
            EpsilonRule::Fixed(v) => *v,
        };
        if eps > 0.0 {
            eps
        } else {
            EPSILON_FLOOR
        }
    }
}

impl Serialize for EpsilonRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EpsilonRule::Paper => s.serialize_str("paper"),
            EpsilonRule::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for EpsilonRule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Value(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) if t == "paper" => Ok(EpsilonRule::Paper),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "epsilon_rule must be \"paper\" or a number, got \"{t}\""
            ))),
            Raw::Value(v) => Ok(EpsilonRule::Fixed(v)),
        }
    }
}

/// Lattice geometry as it appears in config files.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
}

fn default_boundary() -> Boundary {
    Boundary::Open
}

/// Full sweep configuration. `Default` reproduces the reference experiment
/// at desk scale (1000 trials; raise `trials` for tighter medians).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub lattice: LatticeConfig,
    pub j: f64,
    pub h: f64,
    pub sigmas: Vec<f64>,
    pub d_max: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub dt: DtRule,
    pub epsilon_rule: EpsilonRule,
    pub converged_window: (usize, usize),
    pub sector: bool,
    pub up_is_even_sublattice: bool,
    pub out_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lattice: LatticeConfig {
                rows: 3,
                cols: 3,
                boundary: Boundary::Open,
            },
            j: 1.0,
            h: 0.2,
            sigmas: vec![1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3],
            d_max: 35,
            trials: 1000,
            master_seed: 20_240_731,
            dt: DtRule::Auto,
            epsilon_rule: EpsilonRule::Paper,
            converged_window: (26, 35),
            sector: true,
            up_is_even_sublattice: false,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigmas.is_empty() {
            return Err(Error::Config("sigmas must be nonempty".into()));
        }
        if self.sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Config("sigmas must be finite and >= 0".into()));
        }
        if self.d_max == 0 {
            return Err(Error::Config("d_max must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let (lo, hi) = self.converged_window;
        if lo == 0 || lo > hi || hi > self.d_max {
            return Err(Error::Config(format!(
                "converged_window [{lo}, {hi}] must lie within [1, {}]",
                self.d_max
            )));
        }
        if let DtRule::Fixed(v) = self.dt {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config("dt must be positive".into()));
            }
        }
        if let EpsilonRule::Fixed(v) = self.epsilon_rule {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config("fixed epsilon must be positive".into()));
            }
        }
        if !self.j.is_finite() || !self.h.is_finite() {
            return Err(Error::Config("couplings must be finite".into()));
        }
        if self.lattice.rows == 0 || self.lattice.cols == 0 {
            return Err(Error::Config("lattice must be nonempty".into()));
        }
        Ok(())
    }
}

/// Model-level facts resolved once per sweep and recorded in the outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolvedModel {
    pub operator_label: String,
    pub analyzed_dim: usize,
    pub sector_restricted: bool,
    pub dt: f64,
    pub e0: f64,
    pub delta: f64,
    pub spectral_range: f64,
    pub h_norm: f64,
    pub gamma0_sq: f64,
    /// Per-entry Gaussian convention the absolute bound figures depend on.
    pub noise_convention: String,
}

/// One perturbation trial.
#[derive(Clone, Copy, Debug)]
pub struct TrialSample {
    pub sigma_index: usize,
    pub d: usize,
    pub failed: bool,
    pub signed_error: f64,
    pub kept_dim: usize,
    pub chi: f64,
    pub lower: f64,
    pub lower_eligible: bool,
    pub lower_violated: bool,
    pub upper_opt: Option<f64>,
    pub upper_eligible: bool,
    pub upper_violated: bool,
}

/// Aggregates for one (sigma, d) cell.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub d: usize,
    pub dim: usize,
    pub trials: usize,
    pub failed_trials: usize,
    pub median_energy: f64,
    pub median_abs_error: f64,
    pub median_signed_error: f64,
    pub pos_err_median: Option<f64>,
    pub neg_err_median: Option<f64>,
    pub median_kept_dim: f64,
    pub chi_median: f64,
    pub lower_bound_median: f64,
    pub upper_opt_median: Option<f64>,
    pub upper_eligible: usize,
    pub upper_violations: usize,
    pub lower_eligible: usize,
    pub lower_violations: usize,
}

/// Everything a sweep produces before file emission.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub model: ResolvedModel,
    pub rows: Vec<SweepRow>,
    pub samples: Vec<TrialSample>,
    pub upper_violations_total: usize,
    pub lower_violations_total: usize,
    pub upper_eligible_total: usize,
    pub lower_eligible_total: usize,
}

/// Median of a (not necessarily sorted) slice; even lengths average the two
/// central values. Returns `None` on empty input.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN sample"));
    let n = sorted.len();
    Some(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Run the full sweep described by the config. Deterministic for a given
/// config, independent of trial scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let lattice = SpinLattice::new(
        config.lattice.rows,
        config.lattice.cols,
        config.lattice.boundary,
    )?;
    let hamiltonian = build_heisenberg::<f64>(&lattice, config.j, config.h)?;
    let reference = antiferromagnetic_state::<f64>(&lattice, config.up_is_even_sublattice)?;
    let (analyzed, state) = if config.sector {
        sector_restrict(&hamiltonian, &reference)?
    } else {
        (hamiltonian, reference)
    };
    let spectrum = spectral_decompose(&analyzed)?;
    let quantities = spectral_quantities(&spectrum, &state, default_degeneracy_tol(&spectrum))?;
    let dt = match config.dt {
        DtRule::Auto => default_dt(&quantities)?,
        DtRule::Fixed(v) => v,
    };
    let model = ResolvedModel {
        operator_label: analyzed.label().to_string(),
        analyzed_dim: analyzed.dim(),
        sector_restricted: config.sector,
        dt,
        e0: quantities.e0,
        delta: quantities.delta,
        spectral_range: quantities.spectral_range,
        h_norm: quantities.op_norm,
        gamma0_sq: quantities.gamma0_sq,
        noise_convention: "complex off-diagonal N(0, sigma/sqrt(2)) per quadrature, \
                           real diagonal N(0, sigma); H scaled by ||H||"
            .to_string(),
    };

    let violation_slack = 1e-10 * quantities.op_norm.max(1.0);
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for d in 1..=config.d_max {
        let pencil = build_exact_pencil(&spectrum, &state, d, dt)?;
        let dim = pencil.dim();
        for (sigma_index, &sigma) in config.sigmas.iter().enumerate() {
            let epsilon = config.epsilon_rule.epsilon(dim, sigma);
            let cell: Result<Vec<TrialSample>> = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = derive_trial_seed(
                        config.master_seed,
                        sigma_index as u64,
                        d as u64,
                        trial as u64,
                    );
                    let spec = NoiseSpec::gaussian(sigma, quantities.op_norm, seed)?;
                    let noisy = perturb_gaussian(&pencil, &spec)?;
                    let inputs = BoundInputs {
                        dh: noisy.dh(),
                        ds: noisy.ds(),
                        h_norm: quantities.op_norm,
                        epsilon,
                        d,
                        gamma0_sq: quantities.gamma0_sq,
                        delta: quantities.delta,
                        spectral_range: quantities.spectral_range,
                    };
                    let report = bounds::evaluate(&inputs)?;
                    match solve_thresholded(&noisy, epsilon) {
                        Ok(solved) => {
                            let signed = solved.e0_tilde - quantities.e0;
                            let upper_eligible =
                                report.flags.map(|f| f.all()).unwrap_or(false)
                                    && report.upper_optimal.is_some();
                            let upper_violated = upper_eligible
                                && signed
                                    > report.upper_optimal.expect("eligible") + violation_slack;
                            let lower_violated =
                                report.lower_ok && signed < report.lower - violation_slack;
                            Ok(TrialSample {
                                sigma_index,
                                d,
                                failed: false,
                                signed_error: signed,
                                kept_dim: solved.kept_dim,
                                chi: report.chi,
                                lower: report.lower,
                                lower_eligible: report.lower_ok,
                                lower_violated,
                                upper_opt: report.upper_optimal,
                                upper_eligible,
                                upper_violated,
                            })
                        }
                        Err(Error::AllRemoved { .. }) => Ok(TrialSample {
                            sigma_index,
                            d,
                            failed: true,
                            signed_error: f64::NAN,
                            kept_dim: 0,
                            chi: report.chi,
                            lower: report.lower,
                            lower_eligible: false,
                            lower_violated: false,
                            upper_opt: None,
                            upper_eligible: false,
                            upper_violated: false,
                        }),
                        Err(e) => Err(e),
                    }
                })
                .collect();
            let cell = cell?;

            let ok: Vec<&TrialSample> = cell.iter().filter(|t| !t.failed).collect();
            let energies: Vec<f64> = ok
                .iter()
                .map(|t| t.signed_error + quantities.e0)
                .collect();
            let signed: Vec<f64> = ok.iter().map(|t| t.signed_error).collect();
            let abs: Vec<f64> = signed.iter().map(|e| e.abs()).collect();
            let pos: Vec<f64> = signed.iter().copied().filter(|e| *e > 0.0).collect();
            let neg: Vec<f64> = signed.iter().copied().filter(|e| *e < 0.0).collect();
            let kept: Vec<f64> = ok.iter().map(|t| t.kept_dim as f64).collect();
            let chis: Vec<f64> = ok.iter().map(|t| t.chi).collect();
            let lowers: Vec<f64> = ok.iter().map(|t| t.lower).collect();
            let uppers: Vec<f64> = ok.iter().filter_map(|t| t.upper_opt).collect();
            rows.push(SweepRow {
                sigma,
                d,
                dim,
                trials: config.trials,
                failed_trials: cell.len() - ok.len(),
                median_energy: median(&energies).unwrap_or(f64::NAN),
                median_abs_error: median(&abs).unwrap_or(f64::NAN),
                median_signed_error: median(&signed).unwrap_or(f64::NAN),
                pos_err_median: median(&pos),
                neg_err_median: median(&neg),
                median_kept_dim: median(&kept).unwrap_or(f64::NAN),
                chi_median: median(&chis).unwrap_or(f64::NAN),
                lower_bound_median: median(&lowers).unwrap_or(f64::NAN),
                upper_opt_median: median(&uppers),
                upper_eligible: cell.iter().filter(|t| t.upper_eligible).count(),
                upper_violations: cell.iter().filter(|t| t.upper_violated).count(),
                lower_eligible: cell.iter().filter(|t| t.lower_eligible).count(),
                lower_violations: cell.iter().filter(|t| t.lower_violated).count(),
            });
            samples.extend(cell);
        }
    }

    let upper_violations_total = samples.iter().filter(|t| t.upper_violated).count();
    let lower_violations_total = samples.iter().filter(|t| t.lower_violated).count();
    let upper_eligible_total = samples.iter().filter(|t| t.upper_eligible).count();
    let lower_eligible_total = samples.iter().filter(|t| t.lower_eligible).count();
    Ok(SweepResult {
        config: config.clone(),
        model,
        rows,
        samples,
        upper_violations_total,
        lower_violations_total,
        upper_eligible_total,
        lower_eligible_total,
    })
}

/// Converged-error statistics for one noise width: medians of the pooled
/// signed errors (split by sign) across all trials and window dimensions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergedStats {
    pub sigma: f64,
    pub pos_median: Option<f64>,
    pub neg_median: Option<f64>,
    pub pos_count: usize,
    pub neg_count: usize,
    pub chi_median: f64,
    pub upper_opt_median: Option<f64>,
    pub lower_magnitude_median: f64,
}

/// Pool the window dimensions and aggregate per noise width.
pub fn converged_errors(result: &SweepResult, window: (usize, usize)) -> Vec<ConvergedStats> {
    let (lo, hi) = window;
    let mut stats = Vec::new();
    for (sigma_index, &sigma) in result.config.sigmas.iter().enumerate() {
        let pool: Vec<&TrialSample> = result
            .samples
            .iter()
            .filter(|t| t.sigma_index == sigma_index && t.d >= lo && t.d <= hi && !t.failed)
            .collect();
        let pos: Vec<f64> = pool
            .iter()
            .map(|t| t.signed_error)
            .filter(|e| *e > 0.0)
            .collect();
        let neg: Vec<f64> = pool
            .iter()
            .map(|t| t.signed_error)
            .filter(|e| *e < 0.0)
            .collect();
        let chis: Vec<f64> = pool.iter().map(|t| t.chi).collect();
        let uppers: Vec<f64> = pool.iter().filter_map(|t| t.upper_opt).collect();
        let lower_mags: Vec<f64> = pool.iter().map(|t| t.lower.abs()).collect();
        stats.push(ConvergedStats {
            sigma,
            pos_median: median(&pos),
            neg_median: median(&neg),
            pos_count: pos.len(),
            neg_count: neg.len(),
            chi_median: median(&chis).unwrap_or(f64::NAN),
            upper_opt_median: median(&uppers),
            lower_magnitude_median: median(&lower_mags).unwrap_or(f64::NAN),
        });
    }
    stats
}

/// Least-squares monomial fit `value ~ coefficient * sigma^exponent` on
/// log-log coordinates. Returns `(exponent, coefficient)`.
pub fn fit_monomial(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::Precondition(
            "monomial fit needs at least two points".into(),
        ));
    }
    if points.iter().any(|(x, y)| *x <= 0.0 || *y <= 0.0) {
        return Err(Error::Precondition(
            "monomial fit needs positive coordinates".into(),
        ));
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (x, y) in points {
        let lx = x.ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return Err(Error::Precondition(
            "monomial fit needs at least two distinct abscissae".into(),
        ));
    }
    let exponent = (n * sxy - sx * sy) / denom;
    let intercept = (sy - exponent * sx) / n;
    Ok((exponent, intercept.exp()))
}
