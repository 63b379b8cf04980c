//! Smooth dyadic frequency localization.
//!
//! The bump `φ` equals 1 on `[0, 1]`, vanishes on `[2, ∞)` and uses the
//! `exp(-1/x)` mollifier transition in between. Band cutoffs are
//! `ψ(y) = φ(y) - φ(2y)`, supported in `[1/2, 2]`.
//!
//! On a grid the band argument is the normalized frequency `y = h|ξ| / (2π N)`,
//! so `y ≤ √d / 2 < 1` on the whole dual torus and `Σ_{N ≤ 1} ψ(y/N) = φ(y) = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::field::{dft, idft, LatticeField};
use super::grid::LatticeGrid;
use super::ops::lp_norm;
use crate::error::Result;

fn mollifier(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Radial bump: 1 for `r ≤ 1`, 0 for `r ≥ 2`, smooth and monotone between.
pub fn bump(r: f64) -> f64 {
    let r = r.abs();
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = mollifier(2.0 - r);
        a / (a + mollifier(r - 1.0))
    }
}

/// Annular cutoff `ψ(y) = φ(y) - φ(2y)`, supported in `1/2 ≤ |y| ≤ 2`.
pub fn band_cutoff(y: f64) -> f64 {
    bump(y) - bump(2.0 * y)
}

/// One dyadic Littlewood–Paley band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LittlewoodPaleyBand {
    /// Dyadic scale `N ≤ 1`.
    pub scale: f64,
    /// The lowest retained band absorbs every lower band and the zero mode,
    /// so its multiplier is `φ(y/N)` instead of `ψ(y/N)`.
    pub absorbs_low: bool,
}

impl LittlewoodPaleyBand {
    pub fn new(scale: f64) -> Self {
        Self { scale, absorbs_low: false }
    }

    /// Bands `N = 1, 1/2, …, N_min` where `N_min = 1/M` is the smallest band
    /// whose support reaches the lowest nonzero grid frequency.
    pub fn bands_for(grid: &LatticeGrid) -> Vec<Self> {
        let m = grid.points_per_axis() as f64;
        let mut bands = Vec::new();
        let mut n = 1.0;
        while n > 1.0 / m * (1.0 + 1e-12) {
            bands.push(Self::new(n));
            n *= 0.5;
        }
        bands.push(Self { scale: n, absorbs_low: true });
        bands
    }

    /// Multiplier value at frequency `ξ` on a lattice of spacing `h`.
    pub fn multiplier(&self, h: f64, xi: &[f64]) -> f64 {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let y = h * r / (2.0 * PI * self.scale);
        if self.absorbs_low {
            bump(y)
        } else {
            band_cutoff(y)
        }
    }
}

/// `P_N f`: the band multiplier applied in frequency.
pub fn lp_project(f: &LatticeField, band: &LittlewoodPaleyBand) -> LatticeField {
    let h = f.grid().spacing();
    let mut spec = dft(f);
    spec.apply(|xi| Complex64::new(band.multiplier(h, xi), 0.0));
    idft(&spec)
}

/// `‖(Σ_N |P_N f|²)^{1/2}‖_{L_h^p}` over all retained bands.
pub fn square_function_norm(f: &LatticeField, p: f64) -> Result<f64> {
    let grid = *f.grid();
    let mut acc = vec![0.0f64; grid.len()];
    for band in LittlewoodPaleyBand::bands_for(&grid) {
        let piece = lp_project(f, &band);
        for (a, v) in acc.iter_mut().zip(piece.values()) {
            *a += v.norm_sqr();
        }
    }
    let sq = LatticeField::from_raw(grid, acc.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect());
    lp_norm(&sq, p)
}
