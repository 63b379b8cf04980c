use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::profiles::build_datum;
use crate::analysis::{least_squares, power_fit};
use crate::error::Result;
use crate::evolution::{continuum_reference_with, evolve, EvolutionParams};
use crate::lattice::{lp_norm, DispersionSymbol, LatticeGrid};
use crate::transfer::{cross_l2_distance, discretize, interpolate, ContinuumField};

/// Coarsest level is left out of rate fits when its error exceeds this
/// fraction of `‖u_0‖_{L²}`.
pub const PREASYMPTOTIC_FRACTION: f64 = 0.1;
/// Rate fits need at least this many levels.
pub const MIN_FIT_LEVELS: usize = 4;
/// Splitting error allowed relative to the finest spatial error.
pub const DT_CHECK_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub points_per_axis: usize,
    pub h: f64,
    /// `‖p_h u_h(t) - u(t)‖_{L²}` at each snapshot time.
    pub errors: Vec<f64>,
    /// Largest relative mass drift along the run.
    pub mass_drift: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub t: f64,
    pub rate: Option<f64>,
    pub prefactor: Option<f64>,
    pub residual: Option<f64>,
    pub levels_used: usize,
    pub excluded_coarsest: bool,
    pub note: Option<String>,
}

/// `error ≈ A h^rate e^{B t}` fitted jointly over levels and positive times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub a: f64,
    pub b: f64,
    pub rate: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtCheck {
    pub dt: f64,
    /// Richardson estimate `(4/3)‖u^{dt} - u^{dt/2}‖` at the horizon on the finest level.
    pub splitting_error: f64,
    pub spatial_error: f64,
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config_hash: String,
    pub version: String,
    pub alpha: f64,
    /// `α / (1 + α)`.
    pub theory_rate: f64,
    pub reference_points: usize,
    pub dt: f64,
    pub times: Vec<f64>,
    pub levels: Vec<LevelResult>,
    pub fits: Vec<RateFit>,
    pub envelope: Option<Envelope>,
    pub degenerate: bool,
    pub dt_check: Option<DtCheck>,
    /// Boundary-to-peak ratio of the reference solution at each snapshot.
    pub boundary_ratios: Vec<f64>,
    /// Snapshot times at which the error failed to decrease under refinement.
    pub inversions: Vec<f64>,
    pub initial_l2: f64,
}

impl ConvergenceReport {
    pub fn fit_at(&self, t: f64) -> Option<&RateFit> {
        self.fits.iter().find(|f| (f.t - t).abs() < 1e-12)
    }
}

fn run_level(
    grid: LatticeGrid,
    u0: &ContinuumField,
    params: &EvolutionParams,
    times: &[f64],
    reference: &[ContinuumField],
) -> Result<(Vec<f64>, f64)> {
    let symbol = DispersionSymbol::discrete(params.alpha)?;
    let uh0 = discretize(u0, &grid)?;
    let traj = evolve(&uh0, params, &symbol, times)?;
    let mass0 = lp_norm(&uh0, 2.0)?.powi(2);
    let mut drift = 0.0f64;
    let mut errors = Vec::with_capacity(times.len());
    for (u, exact) in traj.snapshots().iter().zip(reference) {
        let mass = lp_norm(u, 2.0)?.powi(2);
        if mass0 > 0.0 {
            drift = drift.max((mass - mass0).abs() / mass0);
        }
        errors.push(cross_l2_distance(&interpolate(u), exact)?);
    }
    Ok((errors, drift))
}

/// Discretize, evolve, interpolate and compare against the continuum reference
/// at every level and snapshot; then fit rates.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let params = config.params();
    let times = config.times();
    let reference_grid = config.reference_grid()?;
    let u0 = build_datum(&config.initial_datum, reference_grid, config.seed);
    let initial_l2 = u0.l2_norm();
    let degenerate = initial_l2 == 0.0;

    let reference = continuum_reference_with(&u0, &params, &times, config.boundary_policy)?;
    let boundary_ratios = reference.snapshots().iter().map(ContinuumField::boundary_ratio).collect();
    let grids = config.grids()?;

    let levels: Vec<LevelResult> = super::in_pool(config.workers, || {
        grids
            .par_iter()
            .map(|g| match run_level(*g, &u0, &params, &times, reference.snapshots()) {
                Ok((errors, mass_drift)) => LevelResult {
                    points_per_axis: g.points_per_axis(),
                    h: g.spacing(),
                    errors,
                    mass_drift,
                    failure: None,
                },
                Err(e) => {
                    log::error!("level M={} failed: {e}", g.points_per_axis());
                    LevelResult {
                        points_per_axis: g.points_per_axis(),
                        h: g.spacing(),
                        errors: Vec::new(),
                        mass_drift: f64::NAN,
                        failure: Some(e.to_string()),
                    }
                }
            })
            .collect()
    })?;

    let ok: Vec<&LevelResult> = levels.iter().filter(|l| l.failure.is_none()).collect();
    let fits: Vec<RateFit> = times
        .iter()
        .enumerate()
        .map(|(k, &t)| fit_rate(&ok, k, t, initial_l2, degenerate))
        .collect();
    let envelope = if degenerate { None } else { fit_envelope(&ok, &times, initial_l2) };
    let inversions = times
        .iter()
        .enumerate()
        .filter(|(k, _)| ok.windows(2).any(|w| w[1].errors[*k] >= w[0].errors[*k]) && !degenerate)
        .map(|(_, t)| *t)
        .collect::<Vec<_>>();
    for t in &inversions {
        log::warn!("error does not decrease monotonically under refinement at t = {t}");
    }

    let finest_ok = levels.last().is_some_and(|l| l.failure.is_none());
    let dt_check = if config.dt_check && !degenerate && finest_ok {
        Some(check_dt(config, &u0, &params, &times, &levels)?)
    } else {
        None
    };

    Ok(ConvergenceReport {
        config_hash: config.hash(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        alpha: config.alpha,
        theory_rate: config.alpha / (1.0 + config.alpha),
        reference_points: reference_grid.points_per_axis(),
        dt: params.dt,
        times,
        levels,
        fits,
        envelope,
        degenerate,
        dt_check,
        boundary_ratios,
        inversions,
        initial_l2,
    })
}

fn usable<'a>(levels: &[&'a LevelResult], k: usize, initial_l2: f64) -> (Vec<&'a LevelResult>, bool) {
    let mut used: Vec<&LevelResult> = levels.to_vec();
    let mut excluded = false;
    if used.len() > MIN_FIT_LEVELS && used[0].errors[k] > PREASYMPTOTIC_FRACTION * initial_l2 {
        used.remove(0);
        excluded = true;
    }
    (used, excluded)
}

fn fit_rate(levels: &[&LevelResult], k: usize, t: f64, initial_l2: f64, degenerate: bool) -> RateFit {
    let empty = |note: &str, n: usize| RateFit {
        t,
        rate: None,
        prefactor: None,
        residual: None,
        levels_used: n,
        excluded_coarsest: false,
        note: Some(note.to_string()),
    };
    if degenerate {
        return empty("degenerate input: zero initial datum", levels.len());
    }
    let (used, excluded) = usable(levels, k, initial_l2);
    if used.len() < MIN_FIT_LEVELS {
        return empty("fewer than four usable levels", used.len());
    }
    let h: Vec<f64> = used.iter().map(|l| l.h).collect();
    let e: Vec<f64> = used.iter().map(|l| l.errors[k]).collect();
    match power_fit(&h, &e) {
        Ok(fit) => RateFit {
            t,
            rate: Some(fit.exponent),
            prefactor: Some(fit.prefactor),
            residual: Some(fit.residual),
            levels_used: used.len(),
            excluded_coarsest: excluded,
            note: None,
        },
        Err(err) => empty(&err.to_string(), used.len()),
    }
}

fn fit_envelope(levels: &[&LevelResult], times: &[f64], initial_l2: f64) -> Option<Envelope> {
    let positive: Vec<usize> = (0..times.len()).filter(|&k| times[k] > 0.0).collect();
    if positive.len() < 2 {
        return None;
    }
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for &k in &positive {
        let (used, _) = usable(levels, k, initial_l2);
        for l in used {
            if l.errors[k] > 0.0 {
                rows.push(vec![1.0, l.h.ln(), times[k]]);
                y.push(l.errors[k].ln());
            }
        }
    }
    let (beta, residual) = least_squares(&rows, &y).ok()?;
    Some(Envelope { a: beta[0].exp(), rate: beta[1], b: beta[2], residual })
}

fn check_dt(
    config: &ExperimentConfig,
    u0: &ContinuumField,
    params: &EvolutionParams,
    times: &[f64],
    levels: &[LevelResult],
) -> Result<DtCheck> {
    let finest = levels.last().expect("at least one level");
    let grid = LatticeGrid::new(config.dimension, finest.points_per_axis, config.box_length)?;
    let symbol = DispersionSymbol::discrete(params.alpha)?;
    let uh0 = discretize(u0, &grid)?;
    let end = [*times.last().expect("times non-empty")];
    let coarse = evolve(&uh0, params, &symbol, &end)?;
    let halved = EvolutionParams { dt: 0.5 * params.dt, ..*params };
    let fine = evolve(&uh0, &halved, &symbol, &end)?;
    let splitting_error = 4.0 / 3.0 * lp_norm(&coarse.last().sub(fine.last())?, 2.0)?;
    let spatial_error = finest.errors.last().copied().unwrap_or(f64::NAN);
    let ratio = splitting_error / spatial_error;
    Ok(DtCheck { dt: params.dt, splitting_error, spatial_error, ratio, passed: ratio <= DT_CHECK_LIMIT })
}
