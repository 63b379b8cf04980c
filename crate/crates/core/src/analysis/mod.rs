//! Dispersive kernels and their decay, exponent bookkeeping, and space-time norms.

pub mod fit;
pub mod kernel;
pub mod pairs;
pub mod spacetime;

pub use fit::{decay_fit, least_squares, log_space, ols, power_fit, PowerFit};
pub use kernel::{
    band_contains_resonance, band_cutoff_integral, hessian_ratio_min, kernel_eval, kernel_sup,
    kernel_trivial_bound, KernelSample, KernelSup, DOUBLING_TOLERANCE,
};
pub use pairs::{phase_second_derivative, qstar, stationary_point, AdmissiblePair, PairKind};
pub use spacetime::{
    linear_flow_gap, phase_gap_ratio_max, spacetime_norm, strichartz_quotient, symbol_phase_gap,
    time_lq_norm, MIN_SNAPSHOTS_PER_UNIT_TIME,
};
