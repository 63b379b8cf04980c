use num_complex::Complex64;

use super::pairs::AdmissiblePair;
use crate::error::{Error, Result};
use crate::evolution::{linear_propagate, Trajectory};
use crate::lattice::{dft, idft_with, lp_norm, sobolev_norm, DispersionSymbol, FftPlan, LatticeField, LatticeGrid};
use crate::transfer::{cross_l2_distance, discretize, interpolate, ContinuumField};

/// Minimum snapshot density for time quadratures.
pub const MIN_SNAPSHOTS_PER_UNIT_TIME: f64 = 32.0;

/// Composite-trapezoid `L^q` norm in time of per-snapshot values; `q = ∞` gives the max.
pub fn time_lq_norm(times: &[f64], values: &[f64], q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("time exponent must be >= 1, got {q}")));
    }
    if times.len() != values.len() || times.is_empty() {
        return Err(Error::Sampling("one value per snapshot time required".into()));
    }
    if q.is_infinite() {
        return Ok(values.iter().copied().fold(0.0, f64::max));
    }
    let max_gap = times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if times.len() < 2 || max_gap > (1.0 + 1e-9) / MIN_SNAPSHOTS_PER_UNIT_TIME {
        return Err(Error::Sampling(format!(
            "need at least {MIN_SNAPSHOTS_PER_UNIT_TIME} snapshots per unit time (largest gap {max_gap})"
        )));
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].powf(q) + v[1].powf(q)))
        .sum();
    Ok(integral.powf(1.0 / q))
}

/// `‖u‖_{L_t^q L_h^r}` over the recorded window.
pub fn spacetime_norm(traj: &Trajectory<LatticeField>, q: f64, r: f64) -> Result<f64> {
    let values = traj.snapshots().iter().map(|u| lp_norm(u, r)).collect::<Result<Vec<_>>>()?;
    time_lq_norm(traj.times(), &values, q)
}

/// `‖e^{-it(-Δ_h)^α} f‖_{L_t^q([0,T]; L_h^r)} / ‖|∇_h|^s f‖_{L_h²}` with `s` the
/// pair's smoothing loss, sampled at `per_unit` snapshots per unit time.
pub fn strichartz_quotient(
    f: &LatticeField,
    alpha: f64,
    pair: &AdmissiblePair,
    window: f64,
    per_unit: usize,
) -> Result<f64> {
    let grid = *f.grid();
    let symbol = DispersionSymbol::discrete(alpha)?;
    let sigma = symbol.on_grid(&grid);
    let spec = dft(f);
    let plan = FftPlan::new(&grid);
    let steps = (window * per_unit as f64).ceil() as usize;
    let times: Vec<f64> = (0..=steps).map(|i| window * i as f64 / steps as f64).collect();
    let values = times
        .iter()
        .map(|&t| {
            let mut s = spec.clone();
            for (c, w) in s.coeffs_mut().iter_mut().zip(&sigma) {
                *c *= Complex64::from_polar(1.0, -t * w);
            }
            lp_norm(&idft_with(&plan, &s), pair.r())
        })
        .collect::<Result<Vec<_>>>()?;
    let numerator = time_lq_norm(&times, &values, pair.q())?;
    let denominator = sobolev_norm(f, pair.smoothing_loss(alpha), true)?;
    if denominator == 0.0 {
        return Err(Error::Domain("datum has vanishing Sobolev norm".into()));
    }
    Ok(numerator / denominator)
}

/// `|e^{-itσ_h(ξ)} - e^{-it|ξ|^{2α}}|`.
pub fn symbol_phase_gap(grid: &LatticeGrid, alpha: f64, t: f64, xi: &[f64]) -> Result<f64> {
    let h = grid.spacing();
    let discrete = DispersionSymbol::discrete(alpha)?.value(h, xi);
    let continuum = DispersionSymbol::continuum(alpha)?.value(h, xi);
    Ok((Complex64::from_polar(1.0, -t * discrete) - Complex64::from_polar(1.0, -t * continuum)).norm())
}

/// `max_{ξ ≠ 0} gap(ξ) / (|t| h² |ξ|^{2α+2})` over the grid frequencies.
pub fn phase_gap_ratio_max(grid: &LatticeGrid, alpha: f64, t: f64) -> Result<f64> {
    let h = grid.spacing();
    let d = grid.dim();
    let mut worst = 0.0f64;
    for xi in grid.frequencies() {
        let r2: f64 = xi[..d].iter().map(|x| x * x).sum();
        if r2 == 0.0 {
            continue;
        }
        let gap = symbol_phase_gap(grid, alpha, t, &xi[..d])?;
        worst = worst.max(gap / (t.abs() * h * h * r2.powf(alpha + 1.0)));
    }
    Ok(worst)
}

/// `‖p_h e^{-it(-Δ_h)^α} (u_0)_h - e^{-it(-Δ)^α} u_0‖_{L²}` for each grid, as `(h, gap)`.
pub fn linear_flow_gap(u0: &ContinuumField, grids: &[LatticeGrid], alpha: f64, t: f64) -> Result<Vec<(f64, f64)>> {
    u0.check_boundary_decay(0.0)?;
    let exact = linear_propagate(u0, t, &DispersionSymbol::continuum(alpha)?);
    let discrete = DispersionSymbol::discrete(alpha)?;
    grids
        .iter()
        .map(|g| {
            let uh = linear_propagate(&discretize(u0, g)?, t, &discrete);
            Ok((g.spacing(), cross_l2_distance(&interpolate(&uh), &exact)?))
        })
        .collect()
}
