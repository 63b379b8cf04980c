use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::profiles::build_datum;
use crate::error::Result;
use crate::evolution::{conserved, dispersive_norm, evolve, uniform_times, Trajectory};
use crate::lattice::{dft, DispersionSymbol, LatticeField};
use crate::transfer::discretize;

/// One row of a conservation log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub linf_norm: f64,
    pub h_alpha_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveRun {
    pub points_per_axis: usize,
    pub h: f64,
    pub max_mass_drift: f64,
    pub max_energy_drift: f64,
    pub rows: Vec<ConservationRow>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory<LatticeField>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub config_hash: String,
    pub version: String,
    pub dt: f64,
    pub runs: Vec<EvolveRun>,
}

pub fn conservation_log(traj: &Trajectory<LatticeField>) -> Result<Vec<ConservationRow>> {
    let params = traj.params();
    let symbol = DispersionSymbol::discrete(params.alpha)?;
    traj.iter()
        .map(|(t, u)| {
            let q = conserved(u, params)?;
            Ok(ConservationRow {
                t,
                mass: q.mass,
                energy: q.energy,
                linf_norm: u.max_abs(),
                h_alpha_norm: dispersive_norm(&dft(u), &symbol),
            })
        })
        .collect()
}

fn relative_drift(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let first = values.clone().next().unwrap_or(0.0);
    let worst = values.map(|v| (v - first).abs()).fold(0.0, f64::max);
    if first == 0.0 {
        worst
    } else {
        worst / first.abs()
    }
}

/// Evolves the discretized datum on every grid and logs conserved quantities
/// at `conservation_samples` uniform times.
pub fn run_evolve(config: &ExperimentConfig) -> Result<EvolveReport> {
    config.validate()?;
    let params = config.params();
    let reference = config.reference_grid()?;
    let u0 = build_datum(&config.initial_datum, reference, config.seed);
    let symbol = DispersionSymbol::discrete(config.alpha)?;
    let times = uniform_times(config.horizon, config.conservation_samples.max(1));
    let mut runs = Vec::new();
    for grid in config.grids()? {
        let traj = evolve(&discretize(&u0, &grid)?, &params, &symbol, &times[1..])?;
        let rows = conservation_log(&traj)?;
        runs.push(EvolveRun {
            points_per_axis: grid.points_per_axis(),
            h: grid.spacing(),
            max_mass_drift: relative_drift(rows.iter().map(|r| r.mass)),
            max_energy_drift: relative_drift(rows.iter().map(|r| r.energy)),
            rows,
            trajectory: config.write_snapshots.then_some(traj),
        });
    }
    Ok(EvolveReport { config_hash: config.hash(), version: env!("CARGO_PKG_VERSION").to_string(), dt: params.dt, runs })
}
