use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::symbol::validate_alpha;

/// Parameters of `i ∂_t u = (-Δ)^α u + λ |u|^{p-1} u` and its time stepping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub alpha: f64,
    pub p: f64,
    /// Positive is defocusing, negative focusing, zero linear.
    pub lambda: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Skips the global well-posedness windows and enables the blow-up guard.
    #[serde(default)]
    pub unsafe_params: bool,
}

impl EvolutionParams {
    pub fn new(alpha: f64, p: f64, lambda: f64, dt: f64, horizon: f64) -> Self {
        Self { alpha, p, lambda, dt, horizon, unsafe_params: false }
    }

    pub fn linear(alpha: f64, dt: f64, horizon: f64) -> Self {
        Self::new(alpha, 3.0, 0.0, dt, horizon)
    }

    pub fn with_unsafe(mut self, on: bool) -> Self {
        self.unsafe_params = on;
        self
    }

    /// Basic domain checks, then the well-posedness windows for dimension `dim`
    /// unless `unsafe_params` is set.
    pub fn validate(&self, dim: usize) -> Result<()> {
        validate_alpha(self.alpha)?;
        if !(self.p.is_finite() && self.p > 1.0) {
            return Err(Error::Domain(format!("nonlinearity power must exceed 1, got {}", self.p)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::Domain("coupling must be finite".into()));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Domain(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Domain(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.unsafe_params {
            return Ok(());
        }
        admissible(dim, self.alpha, self.p, self.lambda)
    }
}

/// The `(d, α, p, λ)` windows under which the continuum limit holds globally.
/// `λ = 0` is the linear flow and always passes for admissible `(d, α)`.
pub fn admissible(dim: usize, alpha: f64, p: f64, lambda: f64) -> Result<()> {
    let inv = 1.0 / p;
    let lower = if alpha == 1.0 {
        if !(1..=3).contains(&dim) {
            return Err(Error::Inadmissible(format!("α = 1 requires d ∈ {{1,2,3}}, got d = {dim}")));
        }
        let d = dim as f64;
        if lambda >= 0.0 {
            ((d - 2.0) / (d + 2.0)).max(0.0)
        } else {
            d / (d + 4.0)
        }
    } else {
        if dim != 1 {
            return Err(Error::Inadmissible(format!("fractional α < 1 requires d = 1, got d = {dim}")));
        }
        if !(alpha > 1.0 / 3.0 && alpha < 1.0) {
            return Err(Error::Inadmissible(format!("fractional case requires 1/3 < α < 1, got {alpha}")));
        }
        if lambda >= 0.0 {
            ((1.0 - 2.0 * alpha) / (1.0 + 2.0 * alpha)).max(0.0)
        } else {
            1.0 / (1.0 + 4.0 * alpha)
        }
    };
    if lambda == 0.0 {
        return Ok(());
    }
    if inv > lower && inv < 1.0 {
        Ok(())
    } else {
        let regime = if lambda > 0.0 { "defocusing" } else { "focusing" };
        Err(Error::Inadmissible(format!(
            "{regime} window requires {lower:.6} < 1/p < 1, got 1/p = {inv:.6} (d = {dim}, α = {alpha})"
        )))
    }
}
