use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A periodic box `[0, L)^d` sampled at `M` points per axis with spacing `h = L / M`.
///
/// The periodic box stands in for the infinite lattice `hZ^d`; fields are
/// expected to decay well inside the box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeGrid {
    dim: usize,
    points_per_axis: usize,
    box_length: f64,
    spacing: f64,
}

impl LatticeGrid {
    pub fn new(dim: usize, points_per_axis: usize, box_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Domain(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::Domain(format!(
                "points per axis must be a power of two >= 8, got {points_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::Domain(format!("box length must be positive, got {box_length}")));
        }
        Ok(Self {
            dim,
            points_per_axis,
            box_length,
            spacing: box_length / points_per_axis as f64,
        })
    }

    /// Builds the grid with spacing `h` and `M` points, so that `L = M h`.
    pub fn with_spacing(dim: usize, points_per_axis: usize, spacing: f64) -> Result<Self> {
        Self::new(dim, points_per_axis, spacing * points_per_axis as f64)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of lattice sites, `M^d`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lattice cell volume `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    /// Box volume `L^d`.
    pub fn volume(&self) -> f64 {
        self.box_length.powi(self.dim as i32)
    }

    /// Spacing of the dual lattice, `2π / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Signed wave number stored at FFT position `j`; the Nyquist index maps to `-M/2`.
    pub fn wave_number(&self, j: usize) -> i64 {
        let m = self.points_per_axis;
        if j < m / 2 {
            j as i64
        } else {
            j as i64 - m as i64
        }
    }

    /// Row-major multi-index of a flat site index (axis 0 varies slowest).
    pub fn unflatten(&self, mut index: usize) -> [usize; 3] {
        let m = self.points_per_axis;
        let mut out = [0usize; 3];
        for axis in (0..self.dim).rev() {
            out[axis] = index % m;
            index /= m;
        }
        out
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        let m = self.points_per_axis;
        multi[..self.dim].iter().fold(0, |acc, &i| acc * m + i)
    }

    /// Flat-index offset of a unit step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.points_per_axis.pow((self.dim - 1 - axis) as u32)
    }

    /// Physical coordinates `x_m = h m` of a site.
    pub fn position(&self, index: usize) -> [f64; 3] {
        let multi = self.unflatten(index);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.spacing * multi[axis] as f64;
        }
        x
    }

    /// Frequency vector `ξ_k = 2π k / L` stored at flat spectral index.
    pub fn frequency(&self, index: usize) -> [f64; 3] {
        let multi = self.unflatten(index);
        let step = self.frequency_step();
        let mut xi = [0.0; 3];
        for axis in 0..self.dim {
            xi[axis] = step * self.wave_number(multi[axis]) as f64;
        }
        xi
    }

    /// Iterator over all frequency vectors in storage order.
    pub fn frequencies(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        (0..self.len()).map(move |i| self.frequency(i))
    }

    /// Whether `other` is a refinement or coarsening of `self`: same dimension,
    /// same box, and one point count divides the other.
    pub fn is_refinement_of(&self, other: &LatticeGrid) -> bool {
        let same_box =
            (self.box_length - other.box_length).abs() <= 4.0 * f64::EPSILON * self.box_length;
        let (a, b) = (self.points_per_axis, other.points_per_axis);
        self.dim == other.dim && same_box && (a % b == 0 || b % a == 0)
    }

    /// The same box with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.dim, self.points_per_axis * factor, self.box_length)
    }

    pub(crate) fn ensure_same(&self, other: &LatticeGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!(
                "expected identical grids, got M={} L={} d={} vs M={} L={} d={}",
                self.points_per_axis,
                self.box_length,
                self.dim,
                other.points_per_axis,
                other.box_length,
                other.dim
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_matches_spacing() {
        let g = LatticeGrid::new(2, 64, 32.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert!((g.points_per_axis() as f64 * g.spacing() - g.box_length()).abs() < 1e-15);
        assert_eq!(g.len(), 4096);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(LatticeGrid::new(1, 12, 1.0).is_err());
        assert!(LatticeGrid::new(1, 4, 1.0).is_err());
        assert!(LatticeGrid::new(4, 8, 1.0).is_err());
        assert!(LatticeGrid::new(1, 8, -1.0).is_err());
    }

    #[test]
    fn nyquist_keeps_negative_sign() {
        let g = LatticeGrid::new(1, 8, 8.0).unwrap();
        let ks: Vec<i64> = (0..8).map(|j| g.wave_number(j)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
    }

    #[test]
    fn flatten_round_trip() {
        let g = LatticeGrid::new(3, 8, 1.0).unwrap();
        for i in [0, 1, 7, 8, 63, 64, 511] {
            assert_eq!(g.flatten(&g.unflatten(i)), i);
        }
        assert_eq!(g.stride(0), 64);
        assert_eq!(g.stride(2), 1);
    }

    #[test]
    fn refinement_relation() {
        let a = LatticeGrid::new(1, 64, 32.0).unwrap();
        let b = LatticeGrid::new(1, 256, 32.0).unwrap();
        let c = LatticeGrid::new(1, 256, 16.0).unwrap();
        let d = LatticeGrid::new(2, 64, 32.0).unwrap();
        assert!(a.is_refinement_of(&b) && b.is_refinement_of(&a));
        assert!(!a.is_refinement_of(&c));
        assert!(!a.is_refinement_of(&d));
    }
}
