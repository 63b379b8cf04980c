use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::FftPlan;
use super::grid::LatticeGrid;
use crate::error::{Error, Result};

/// A complex-valued function on the lattice sites of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeField {
    grid: LatticeGrid,
    values: Vec<Complex64>,
}

/// Lattice Fourier coefficients `(F_h f)(ξ_k) = h^d Σ_m f(x_m) e^{-i x_m·ξ_k}`,
/// stored in FFT order (see [`LatticeGrid::frequency`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    grid: LatticeGrid,
    coeffs: Vec<Complex64>,
}

impl LatticeField {
    pub fn new(grid: LatticeGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} values, grid has {} sites",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain(format!("non-finite value at site {i}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: LatticeGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: LatticeGrid) -> Self {
        Self::from_raw(grid, vec![Complex64::default(); grid.len()])
    }

    pub fn constant(grid: LatticeGrid, c: Complex64) -> Self {
        Self::from_raw(grid, vec![c; grid.len()])
    }

    /// Samples `f` at the lattice sites `x_m`.
    pub fn from_fn(grid: LatticeGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.position(i)[..d])).collect();
        Self::from_raw(grid, values)
    }

    /// The delta of unit `L_h^1` mass at site zero (value `h^{-d}`).
    pub fn delta(grid: LatticeGrid) -> Self {
        let mut f = Self::zeros(grid);
        f.values[0] = Complex64::new(1.0 / grid.cell_volume(), 0.0);
        f
    }

    /// The plane wave `e^{i x·ξ_k}` for the stored frequency index `k`.
    pub fn plane_wave(grid: LatticeGrid, spectral_index: usize) -> Self {
        let xi = grid.frequency(spectral_index);
        Self::from_fn(grid, |x| {
            let phase: f64 = x.iter().zip(&xi).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, phase)
        })
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Pointwise map, keeping the grid.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn sub(&self, other: &LatticeField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self::from_raw(self.grid, values))
    }

    pub fn add(&self, other: &LatticeField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self::from_raw(self.grid, values))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl SpectralField {
    pub fn new(grid: LatticeGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "spectrum has {} coefficients, grid has {} modes",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: LatticeGrid, coeffs: Vec<Complex64>) -> Self {
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &LatticeGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// `‖f‖²_{L_h²}` via Plancherel: `(2π)^{-d} Σ_k |F_k|² (2π/L)^d = L^{-d} Σ_k |F_k|²`.
    pub fn plancherel_mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.volume()
    }

    /// Multiplies every mode by `m(ξ)`.
    pub fn apply(&mut self, m: impl Fn(&[f64]) -> Complex64) {
        let d = self.grid.dim();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c *= m(&self.grid.frequency(i)[..d]);
        }
    }
}

/// Lattice Fourier transform.
pub fn dft(f: &LatticeField) -> SpectralField {
    dft_with(&FftPlan::new(&f.grid), f)
}

/// Inverse lattice Fourier transform; `idft(dft(f)) = f` up to roundoff.
pub fn idft(spec: &SpectralField) -> LatticeField {
    idft_with(&FftPlan::new(&spec.grid), spec)
}

pub fn dft_with(plan: &FftPlan, f: &LatticeField) -> SpectralField {
    let mut data = f.values.clone();
    plan.forward(&mut data);
    let scale = f.grid.cell_volume();
    data.iter_mut().for_each(|c| *c *= scale);
    SpectralField::from_raw(f.grid, data)
}

pub fn idft_with(plan: &FftPlan, spec: &SpectralField) -> LatticeField {
    let mut data = spec.coeffs.clone();
    plan.inverse(&mut data);
    let scale = 1.0 / spec.grid.volume();
    data.iter_mut().for_each(|c| *c *= scale);
    LatticeField::from_raw(spec.grid, data)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_field(grid: LatticeGrid, seed: u64) -> LatticeField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        LatticeField::from_fn(grid, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn delta_has_flat_spectrum() {
        for dim in 1..=3 {
            let grid = LatticeGrid::new(dim, 8, 3.0).unwrap();
            let spec = dft(&LatticeField::delta(grid));
            for c in spec.coeffs() {
                assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn plane_wave_is_single_mode() {
        let grid = LatticeGrid::new(2, 16, 5.0).unwrap();
        let k = grid.flatten(&[3, 14]);
        let spec = dft(&LatticeField::plane_wave(grid, k));
        for (i, c) in spec.coeffs().iter().enumerate() {
            let expected = if i == k { grid.volume() } else { 0.0 };
            assert!((c.norm() - expected).abs() < 1e-10, "mode {i}: {c}");
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for dim in 1..=3 {
            let grid = LatticeGrid::new(dim, 16, 7.5).unwrap();
            let f = random_field(grid, 11 + dim as u64);
            let spec = dft(&f);
            let back = idft(&spec);
            let norm: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let err: f64 = back.sub(&f).unwrap().values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!(err <= 1e-12 * norm);
            let mass = grid.cell_volume() * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
            assert!((spec.plancherel_mass() - mass).abs() <= 1e-10 * mass);
        }
    }

    #[test]
    fn rejects_wrong_length_and_nan() {
        let grid = LatticeGrid::new(1, 8, 1.0).unwrap();
        assert!(LatticeField::new(grid, vec![Complex64::default(); 7]).is_err());
        let mut v = vec![Complex64::default(); 8];
        v[3].re = f64::NAN;
        assert!(LatticeField::new(grid, v).is_err());
    }
}
