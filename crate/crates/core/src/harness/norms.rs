use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::profiles::build_datum;
use crate::analysis::{strichartz_quotient, AdmissiblePair, PairKind};
use crate::error::Result;
use crate::lattice::{
    discrete_gradient, fractional_difference_norm, lp_norm, sobolev_norm, square_function_norm,
};
use crate::transfer::discretize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub points_per_axis: usize,
    pub h: f64,
    pub l2: f64,
    pub linf: f64,
    /// `‖f_h‖_{Ḣ_h^α}`.
    pub h_alpha: f64,
    /// `Σ_j ‖D_j^+ f_h‖ / ‖f_h‖_{Ẇ_h^{1,2}}`.
    pub gradient_ratio: f64,
    /// Difference-quotient norm over `‖f_h‖_{Ḣ_h^α}`; absent when `α = 1`.
    pub difference_ratio: Option<f64>,
    /// `‖(Σ_N |P_N f_h|²)^{1/2}‖ / ‖f_h‖`.
    pub square_function_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzRow {
    pub q: f64,
    pub r: f64,
    pub kind: PairKind,
    pub h: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormsReport {
    pub config_hash: String,
    pub version: String,
    pub rows: Vec<NormRow>,
    pub strichartz: Vec<StrichartzRow>,
}

/// Lattice norms of the discretized datum on every grid, and Strichartz
/// quotients for the configured pairs.
pub fn run_norms(config: &ExperimentConfig) -> Result<NormsReport> {
    config.validate()?;
    let reference = config.reference_grid()?;
    let u0 = build_datum(&config.initial_datum, reference, config.seed);
    let mut rows = Vec::new();
    let mut strichartz = Vec::new();
    for grid in config.grids()? {
        let f = discretize(&u0, &grid)?;
        let l2 = lp_norm(&f, 2.0)?;
        let h_alpha = sobolev_norm(&f, config.alpha, true)?;
        let w12 = sobolev_norm(&f, 1.0, true)?;
        let grad: f64 = (0..grid.dim())
            .map(|j| discrete_gradient(&f, j).and_then(|g| lp_norm(&g, 2.0)))
            .sum::<Result<f64>>()?;
        let difference_ratio = if config.alpha < 1.0 && h_alpha > 0.0 {
            Some(fractional_difference_norm(&f, config.alpha, 0.5 * grid.box_length())? / h_alpha)
        } else {
            None
        };
        rows.push(NormRow {
            points_per_axis: grid.points_per_axis(),
            h: grid.spacing(),
            l2,
            linf: f.max_abs(),
            h_alpha,
            gradient_ratio: if w12 > 0.0 { grad / w12 } else { f64::NAN },
            difference_ratio,
            square_function_ratio: if l2 > 0.0 { square_function_norm(&f, 2.0)? / l2 } else { f64::NAN },
        });
        for spec in &config.strichartz_pairs {
            let pair = AdmissiblePair::new(spec.q, spec.r, config.dimension, spec.kind)?;
            let quotient =
                strichartz_quotient(&f, config.alpha, &pair, config.strichartz_window, config.strichartz_per_unit)?;
            strichartz.push(StrichartzRow { q: spec.q, r: spec.r, kind: spec.kind, h: grid.spacing(), quotient });
        }
    }
    Ok(NormsReport { config_hash: config.hash(), version: env!("CARGO_PKG_VERSION").to_string(), rows, strichartz })
}
