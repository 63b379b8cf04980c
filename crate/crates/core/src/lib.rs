//! Lattice machinery for discrete (fractional) nonlinear Schrödinger equations
//! on `hZ^d` and their continuum limit.
//!
//! * [`lattice`]: periodic grids, lattice Fourier transform, Sobolev and
//!   Littlewood–Paley tools.
//! * [`transfer`]: cell-average discretization, the affine interpolation
//!   operator and its Fourier symbol.
//! * [`evolution`]: exact linear propagators and a Strang split-step integrator.
//! * [`analysis`]: dispersive kernels, decay fits, space-time norms.
//! * [`harness`]: experiment configs, convergence sweeps and check suites.

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod lattice;
pub mod quadrature;
pub mod transfer;

pub use error::{Error, Result};
pub use lattice::{DispersionSymbol, LatticeField, LatticeGrid, SpectralField, SymbolKind};
