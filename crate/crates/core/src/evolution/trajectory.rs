use serde::{Deserialize, Serialize};


use super::params::EvolutionParams;
use super::stepper::SplitStepper;
use crate::error::{Error, Result};
use crate::lattice::{dft, lp_norm, DispersionSymbol, LatticeField, SpectralField, SymbolKind};
use crate::transfer::ContinuumField;

/// Mass and energy of a field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    pub mass: f64,
    pub energy: f64,
}

/// Snapshots of a run at increasing times starting from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<F> {
    params: EvolutionParams,
    times: Vec<f64>,
    snapshots: Vec<F>,
}

impl<F> Trajectory<F> {
    pub fn new(params: EvolutionParams, times: Vec<f64>, snapshots: Vec<F>) -> Result<Self> {
        check_times(&times)?;
        if times.len() != snapshots.len() {
            return Err(Error::Sampling(format!(
                "{} times for {} snapshots",
                times.len(),
                snapshots.len()
            )));
        }
        Ok(Self { params, times, snapshots })
    }

    pub fn params(&self) -> &EvolutionParams {
        &self.params
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[F] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &F {
        self.snapshots.last().expect("trajectory holds the initial snapshot")
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &F)> {
        self.times.iter().copied().zip(&self.snapshots)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::Sampling("snapshot times must start at 0".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::Sampling("snapshot times must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Prepends `t = 0` when missing.
fn normalized_times(snapshot_times: &[f64]) -> Result<Vec<f64>> {
    let mut times = Vec::with_capacity(snapshot_times.len() + 1);
    if snapshot_times.first() != Some(&0.0) {
        times.push(0.0);
    }
    times.extend_from_slice(snapshot_times);
    check_times(&times)?;
    Ok(times)
}

fn run(
    u0: &LatticeField,
    params: &EvolutionParams,
    symbol: &DispersionSymbol,
    times: &[f64],
) -> Result<Vec<LatticeField>> {
    let grid = *u0.grid();
    let mut stepper = SplitStepper::new(grid, symbol, params);
    let mut values = u0.values().to_vec();
    let mut out = vec![u0.clone()];
    for w in times.windows(2) {
        stepper.advance(&mut values, w[1] - w[0])?;
        out.push(LatticeField::new(grid, values.clone())?);
    }
    Ok(out)
}

/// Strang split-step solution of the lattice equation with symbol `symbol`,
/// recorded at `snapshot_times` (zero prepended if absent).
pub fn evolve(
    u0: &LatticeField,
    params: &EvolutionParams,
    symbol: &DispersionSymbol,
    snapshot_times: &[f64],
) -> Result<Trajectory<LatticeField>> {
    params.validate(u0.grid().dim())?;
    let times = normalized_times(snapshot_times)?;
    let snapshots = run(u0, params, symbol, &times)?;
    Trajectory::new(*params, times, snapshots)
}

/// How boundary decay is enforced on snapshots after `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPolicy {
    /// Every snapshot must decay at the box edge.
    #[default]
    Strict,
    /// Only the initial datum is checked; later violations are logged.
    Warn,
}

/// The continuum flow realized by the same splitting on the reference grid with
/// the symbol `|ξ|^{2α}`. Requires a resolved, boundary-decaying datum.
pub fn continuum_reference(
    u0: &ContinuumField,
    params: &EvolutionParams,
    snapshot_times: &[f64],
) -> Result<Trajectory<ContinuumField>> {
    continuum_reference_with(u0, params, snapshot_times, BoundaryPolicy::Strict)
}

pub fn continuum_reference_with(
    u0: &ContinuumField,
    params: &EvolutionParams,
    snapshot_times: &[f64],
    policy: BoundaryPolicy,
) -> Result<Trajectory<ContinuumField>> {
    let grid = *u0.reference_grid();
    params.validate(grid.dim())?;
    u0.check_resolution()?;
    u0.check_boundary_decay(0.0)?;
    let times = normalized_times(snapshot_times)?;
    let symbol = DispersionSymbol::continuum(params.alpha)?;
    let snapshots: Vec<ContinuumField> = run(&u0.samples(), params, &symbol, &times)?
        .iter()
        .map(ContinuumField::from_samples)
        .collect();
    for (t, s) in times.iter().zip(&snapshots).skip(1) {
        match (policy, s.check_boundary_decay(*t)) {
            (_, Ok(())) => {}
            (BoundaryPolicy::Strict, Err(e)) => return Err(e),
            (BoundaryPolicy::Warn, Err(e)) => log::warn!("{e}"),
        }
    }
    Trajectory::new(*params, times, snapshots)
}

/// `‖σ(D)^{1/2} f‖_{L_h²}`, the norm in the kinetic part of the energy.
pub fn dispersive_norm(spec: &SpectralField, symbol: &DispersionSymbol) -> f64 {
    let grid = spec.grid();
    let sigma = symbol.on_grid(grid);
    let sum: f64 = spec.coeffs().iter().zip(sigma).map(|(c, s)| s * c.norm_sqr()).sum();
    (sum / grid.volume()).sqrt()
}

/// Mass `‖u‖²` and energy `½‖σ^{1/2} u‖² + λ/(p+1) ‖u‖^{p+1}_{p+1}` with the
/// discrete symbol of order `params.alpha`.
pub fn conserved(f: &LatticeField, params: &EvolutionParams) -> Result<ConservedQuantities> {
    conserved_with(f, params, &DispersionSymbol::new(SymbolKind::Discrete, params.alpha)?)
}

pub fn conserved_with(
    f: &LatticeField,
    params: &EvolutionParams,
    symbol: &DispersionSymbol,
) -> Result<ConservedQuantities> {
    let spec = dft(f);
    let mass = lp_norm(f, 2.0)?.powi(2);
    let kinetic = 0.5 * dispersive_norm(&spec, symbol).powi(2);
    let potential = if params.lambda == 0.0 {
        0.0
    } else {
        params.lambda / (params.p + 1.0) * lp_norm(f, params.p + 1.0)?.powf(params.p + 1.0)
    };
    Ok(ConservedQuantities { mass, energy: kinetic + potential })
}

/// Samples a uniform time grid `0, T/n, …, T`.
pub fn uniform_times(horizon: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| horizon * i as f64 / n as f64).collect()
}
