//! Grids, fields, lattice Fourier analysis, norms and Littlewood–Paley projections.

pub mod fft;
pub mod field;
pub mod grid;
pub mod io;
pub mod littlewood_paley;
pub mod ops;
pub mod symbol;

pub use fft::FftPlan;
pub use field::{dft, dft_with, idft, idft_with, LatticeField, SpectralField};
pub use grid::LatticeGrid;
pub use littlewood_paley::{band_cutoff, bump, lp_project, square_function_norm, LittlewoodPaleyBand};
pub use ops::{
    apply_derivative, apply_symbol, discrete_gradient, fractional_difference_norm, lp_norm,
    sobolev_lp_norm, sobolev_norm, sobolev_norm_spectral,
};
pub use symbol::{discrete_laplacian_symbol, DispersionSymbol, SymbolKind};
