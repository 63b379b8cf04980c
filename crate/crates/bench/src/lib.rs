//! Shared fixtures for the criterion benches.

use dnls_core::harness::checks::{corpus_field, gaussian_datum};
use dnls_core::transfer::{discretize, ContinuumField};
use dnls_core::{LatticeField, LatticeGrid};

/// A seeded random field on a `dim`-dimensional grid of side `m`.
pub fn random_field(dim: usize, m: usize, seed: u64) -> LatticeField {
    corpus_field(LatticeGrid::new(dim, m, 32.0).expect("valid grid"), seed)
}

/// Unit-width Gaussian on a 1-d box of length 32, collocated at `m_ref` points
/// and cell-averaged onto `m` points.
pub fn gaussian_pair(m: usize, m_ref: usize) -> (LatticeField, ContinuumField) {
    let reference = LatticeGrid::new(1, m_ref, 32.0).expect("valid grid");
    let f = gaussian_datum(reference, 1.0);
    let grid = LatticeGrid::new(1, m, 32.0).expect("valid grid");
    (discretize(&f, &grid).expect("refinement"), f)
}
