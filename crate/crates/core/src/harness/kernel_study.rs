use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::analysis::{band_contains_resonance, decay_fit, kernel_sup, log_space, KernelSample};
use crate::error::Result;
use crate::lattice::LatticeGrid;

/// Decay fit for one `(α, N)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFitRow {
    pub alpha: f64,
    pub n: f64,
    pub exponent: f64,
    pub prefactor: f64,
    pub residual: f64,
    /// `-1/3` when the band contains the degenerate frequency, else `-1/2`.
    pub expected_exponent: f64,
    pub resonant_band: bool,
    pub max_doubling_change: f64,
    pub max_edge_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub config_hash: String,
    pub version: String,
    pub h: f64,
    pub fits: Vec<KernelFitRow>,
    /// The peak sample `(t, argmax x, K)` behind every fitted point.
    pub samples: Vec<KernelSample>,
}

/// Fits `sup_x |K_{N,t}|` against `t` for every configured `α` and band.
pub fn run_kernel_study(config: &ExperimentConfig) -> Result<KernelReport> {
    config.validate()?;
    let grid = LatticeGrid::new(1, config.kernel_points, config.box_length)?;
    let h = grid.spacing();
    let ts = log_space(config.kernel_t_min, config.kernel_t_max, config.kernel_samples);
    let mut fits = Vec::new();
    let mut samples = Vec::new();
    for &alpha in &config.kernel_alphas {
        for &n in &config.kernel_bands {
            let sups = super::in_pool(config.workers, || {
                ts.par_iter().map(|&t| kernel_sup(n, t, &grid, alpha)).collect::<Result<Vec<_>>>()
            })??;
            let points: Vec<(f64, f64)> = sups.iter().map(|s| (s.t, s.sup)).collect();
            let fit = decay_fit(&points)?;
            let resonant = band_contains_resonance(alpha, n);
            fits.push(KernelFitRow {
                alpha,
                n,
                exponent: fit.exponent,
                prefactor: fit.prefactor,
                residual: fit.residual,
                expected_exponent: if resonant { -1.0 / 3.0 } else { -0.5 },
                resonant_band: resonant,
                max_doubling_change: sups.iter().map(|s| s.doubling_change).fold(0.0, f64::max),
                max_edge_ratio: sups.iter().map(|s| s.edge_ratio).fold(0.0, f64::max),
            });
            samples.extend(sups.iter().map(|s| KernelSample { n, h, alpha, t: s.t, x: s.argmax_x, value: s.peak }));
        }
    }
    Ok(KernelReport { config_hash: config.hash(), version: env!("CARGO_PKG_VERSION").to_string(), h, fits, samples })
}
