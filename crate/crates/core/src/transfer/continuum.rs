use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::ops::sobolev_weight;
use crate::lattice::{dft, idft, LatticeField, LatticeGrid, SpectralField};

/// Largest allowed ratio of boundary-layer amplitude to peak amplitude.
pub const BOUNDARY_DECAY_LIMIT: f64 = 1e-10;
/// Largest allowed fraction of `L²` mass above `|ξ| = π / (4 h_ref)`.
pub const SPECTRAL_TAIL_LIMIT: f64 = 1e-12;

/// A trigonometric polynomial on the box `[0, L)^d`, stored by its Fourier
/// coefficients on a reference grid:
/// `f(x) = L^{-d} Σ_k c_k e^{i ξ_k · x}` with `c_k = h_ref^d Σ_m f(x_m) e^{-i x_m · ξ_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumField {
    grid: LatticeGrid,
    coeffs: Vec<Complex64>,
}

impl ContinuumField {
    /// Collocates `f` at the reference sites.
    pub fn from_fn(grid: LatticeGrid, f: impl FnMut(&[f64]) -> Complex64) -> Self {
        Self::from_samples(&LatticeField::from_fn(grid, f))
    }

    pub fn from_samples(samples: &LatticeField) -> Self {
        Self::from_spectral(dft(samples))
    }

    pub fn from_spectral(spec: SpectralField) -> Self {
        let grid = *spec.grid();
        Self { grid, coeffs: spec.into_coeffs() }
    }

    pub fn zeros(grid: LatticeGrid) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn reference_grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn spectral(&self) -> SpectralField {
        SpectralField::from_raw(self.grid, self.coeffs.clone())
    }

    /// Values at the reference sites.
    pub fn samples(&self) -> LatticeField {
        idft(&self.spectral())
    }

    /// Pointwise evaluation by direct trigonometric summation.
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let d = self.grid.dim();
        let sum: Complex64 = self
            .coeffs
            .iter()
            .zip(self.grid.frequencies())
            .map(|(c, xi)| {
                let phase: f64 = (0..d).map(|j| xi[j] * x[j]).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum();
        sum / self.grid.volume()
    }

    /// Applies a Fourier multiplier in place.
    pub fn apply(&mut self, m: impl Fn(&[f64]) -> Complex64) {
        let d = self.grid.dim();
        for (c, xi) in self.coeffs.iter_mut().zip(self.grid.frequencies()) {
            *c *= m(&xi[..d]);
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0, false)
    }

    /// `‖f‖_{Ḣ^s}` or `‖f‖_{H^s}` on the box, exact for the trigonometric polynomial.
    pub fn sobolev_norm(&self, s: f64, homogeneous: bool) -> f64 {
        let d = self.grid.dim();
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(self.grid.frequencies())
            .map(|(c, xi)| c.norm_sqr() * sobolev_weight(&xi[..d], s, homogeneous).powi(2))
            .sum();
        (sum / self.grid.volume()).sqrt()
    }

    /// Max amplitude on the outermost layer of reference cells over the peak amplitude.
    pub fn boundary_ratio(&self) -> f64 {
        let samples = self.samples();
        let m = self.grid.points_per_axis();
        let d = self.grid.dim();
        let peak = samples.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let edge = samples
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let multi = self.grid.unflatten(*i);
                multi[..d].iter().any(|&k| k == 0 || k == m - 1)
            })
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        edge / peak
    }

    pub fn check_boundary_decay(&self, t: f64) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio > BOUNDARY_DECAY_LIMIT {
            return Err(Error::DomainTruncation { ratio, limit: BOUNDARY_DECAY_LIMIT, t });
        }
        Ok(())
    }

    /// Fraction of `L²` mass carried by frequencies with `|ξ| > cutoff`.
    pub fn spectral_tail(&self, cutoff: f64) -> f64 {
        let d = self.grid.dim();
        let (mut tail, mut total) = (0.0, 0.0);
        for (c, xi) in self.coeffs.iter().zip(self.grid.frequencies()) {
            let w = c.norm_sqr();
            total += w;
            if xi[..d].iter().map(|x| x * x).sum::<f64>().sqrt() > cutoff {
                tail += w;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Requires the spectral tail above `π / (4 h_ref)` to be negligible.
    pub fn check_resolution(&self) -> Result<()> {
        let tail = self.spectral_tail(PI / (4.0 * self.grid.spacing()));
        if tail > SPECTRAL_TAIL_LIMIT {
            return Err(Error::UnderResolved { tail, limit: SPECTRAL_TAIL_LIMIT });
        }
        Ok(())
    }
}
