//! Moving between continuum functions and lattice fields: cell-average
//! discretization, the affine interpolant and its Fourier symbol, and
//! `L²` distances across grids.

pub mod continuum;
pub mod interpolation;

pub use continuum::{ContinuumField, BOUNDARY_DECAY_LIMIT, SPECTRAL_TAIL_LIMIT};
pub use interpolation::{
    cell_average_factor, cross_l2_distance, discretize, interpolant_transform_check, interpolate,
    interpolation_symbol, InterpolantField,
};
