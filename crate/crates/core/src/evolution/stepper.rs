use num_complex::Complex64;

use super::params::EvolutionParams;
use crate::error::{Error, Result};
use crate::lattice::{DispersionSymbol, FftPlan, LatticeField, LatticeGrid};
use crate::transfer::ContinuumField;

/// `‖u‖_∞` past which an unsafe-parameter run is declared to blow up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// Exact linear flow `e^{-itσ(D)}`.
pub trait Propagate: Sized {
    fn linear_propagate(&self, t: f64, symbol: &DispersionSymbol) -> Self;
}

impl Propagate for LatticeField {
    fn linear_propagate(&self, t: f64, symbol: &DispersionSymbol) -> Self {
        let grid = *self.grid();
        let mut spec = crate::lattice::dft(self);
        let sigma = symbol.on_grid(&grid);
        for (c, s) in spec.coeffs_mut().iter_mut().zip(sigma) {
            *c *= Complex64::from_polar(1.0, -t * s);
        }
        crate::lattice::idft(&spec)
    }
}

impl Propagate for ContinuumField {
    fn linear_propagate(&self, t: f64, symbol: &DispersionSymbol) -> Self {
        let mut out = self.clone();
        let h = self.reference_grid().spacing();
        out.apply(|xi| Complex64::from_polar(1.0, -t * symbol.value(h, xi)));
        out
    }
}

pub fn linear_propagate<F: Propagate>(f: &F, t: f64, symbol: &DispersionSymbol) -> F {
    f.linear_propagate(t, symbol)
}

fn rotate_phase(values: &mut [Complex64], dt: f64, p: f64, lambda: f64) {
    if lambda == 0.0 || dt == 0.0 {
        return;
    }
    let k = -lambda * dt;
    if p == 3.0 {
        for v in values.iter_mut() {
            *v *= Complex64::from_polar(1.0, k * v.norm_sqr());
        }
    } else {
        let e = 0.5 * (p - 1.0);
        for v in values.iter_mut() {
            *v *= Complex64::from_polar(1.0, k * v.norm_sqr().powf(e));
        }
    }
}

/// Exact flow of `i ∂_t u = λ |u|^{p-1} u` over `dt`: `u ↦ e^{-iλ|u|^{p-1} dt} u`.
pub fn nonlinear_phase_step(f: &LatticeField, dt: f64, p: f64, lambda: f64) -> LatticeField {
    let mut out = f.clone();
    rotate_phase(out.values_mut(), dt, p, lambda);
    out
}

/// Strang splitting `N(dt/2) L(dt) N(dt/2)` with cached plan and symbol.
/// A step with negative `dt` is the exact inverse of the step with `|dt|`.
#[derive(Debug)]
pub struct SplitStepper {
    grid: LatticeGrid,
    plan: FftPlan,
    sigma: Vec<f64>,
    p: f64,
    lambda: f64,
    dt: f64,
    guard: bool,
    steps_taken: usize,
    time: f64,
}

impl SplitStepper {
    pub fn new(grid: LatticeGrid, symbol: &DispersionSymbol, params: &EvolutionParams) -> Self {
        Self {
            grid,
            plan: FftPlan::new(&grid),
            sigma: symbol.on_grid(&grid),
            p: params.p,
            lambda: params.lambda,
            dt: params.dt,
            guard: params.unsafe_params,
            steps_taken: 0,
            time: 0.0,
        }
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Time elapsed across all calls (signed).
    pub fn time(&self) -> f64 {
        self.time
    }

    /// One Strang step of size `dt` (any sign) applied in place.
    pub fn step(&mut self, values: &mut [Complex64], dt: f64) -> Result<()> {
        debug_assert_eq!(values.len(), self.grid.len());
        rotate_phase(values, 0.5 * dt, self.p, self.lambda);
        self.plan.forward(values);
        let n = self.grid.len() as f64;
        for (c, s) in values.iter_mut().zip(&self.sigma) {
            *c *= Complex64::from_polar(1.0 / n, -dt * s);
        }
        self.plan.inverse(values);
        rotate_phase(values, 0.5 * dt, self.p, self.lambda);
        self.steps_taken += 1;
        self.time += dt;
        self.inspect(values)
    }

    fn inspect(&self, values: &[Complex64]) -> Result<()> {
        let mut sup = 0.0f64;
        for v in values {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Divergence {
                    step: self.steps_taken,
                    t: self.time,
                    reason: "non-finite value".into(),
                });
            }
            sup = sup.max(v.norm_sqr());
        }
        if self.guard && sup.sqrt() > BLOWUP_THRESHOLD {
            return Err(Error::Divergence {
                step: self.steps_taken,
                t: self.time,
                reason: format!("sup norm {:e} exceeds {BLOWUP_THRESHOLD:e}", sup.sqrt()),
            });
        }
        Ok(())
    }

    /// Advances by `duration`: whole steps of the configured size, then one
    /// shortened step for any remainder. A negative duration runs the mirror
    /// sequence (remainder first), so `advance(-T)` undoes `advance(T)`.
    pub fn advance(&mut self, values: &mut [Complex64], duration: f64) -> Result<()> {
        let span = duration.abs();
        let whole = (span / self.dt * (1.0 + 1e-12)).floor() as usize;
        let rest = span - whole as f64 * self.dt;
        let rest = if rest > 1e-12 * self.dt { Some(rest) } else { None };
        if duration < 0.0 {
            if let Some(r) = rest {
                self.step(values, -r)?;
            }
            for _ in 0..whole {
                self.step(values, -self.dt)?;
            }
        } else {
            for _ in 0..whole {
                self.step(values, self.dt)?;
            }
            if let Some(r) = rest {
                self.step(values, r)?;
            }
        }
        Ok(())
    }
}
