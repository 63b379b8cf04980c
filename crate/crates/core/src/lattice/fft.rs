//! Multi-dimensional FFT over row-major lattice arrays.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::LatticeGrid;

/// Cached forward and inverse plans for one grid shape.
///
/// Transforms are unnormalized: `forward` computes `Σ_m f_m e^{-2πi m·k/M}` and
/// `inverse` the conjugate sum. Lattice scaling is applied by the callers.
#[derive(Clone)]
pub struct FftPlan {
    dim: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("dim", &self.dim).field("n", &self.n).finish()
    }
}

impl FftPlan {
    pub fn new(grid: &LatticeGrid) -> Self {
        Self::with_shape(grid.dim(), grid.points_per_axis())
    }

    pub fn with_shape(dim: usize, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(&self.forward, data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(&self.inverse, data);
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(data.len(), n.pow(self.dim as u32));
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // Last axis is contiguous: rustfft handles back-to-back transforms in one call.
        fft.process_with_scratch(data, &mut scratch);
        if self.dim == 1 {
            return;
        }
        let mut line = vec![Complex64::default(); n];
        for axis in 0..self.dim - 1 {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(grid: &LatticeGrid, data: &[Complex64]) -> Vec<Complex64> {
        let n = grid.points_per_axis() as f64;
        (0..grid.len())
            .map(|k| {
                let km = grid.unflatten(k);
                data.iter()
                    .enumerate()
                    .map(|(m, v)| {
                        let mm = grid.unflatten(m);
                        let phase: f64 = (0..grid.dim())
                            .map(|a| (km[a] * mm[a]) as f64)
                            .sum::<f64>()
                            * 2.0
                            * PI
                            / n;
                        v * Complex64::from_polar(1.0, -phase)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_transform_in_each_dimension() {
        for dim in 1..=3 {
            let grid = LatticeGrid::new(dim, 8, 1.0).unwrap();
            let data: Vec<Complex64> = (0..grid.len())
                .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
                .collect();
            let expected = naive_dft(&grid, &data);
            let mut got = data.clone();
            FftPlan::new(&grid).forward(&mut got);
            for (a, b) in got.iter().zip(&expected) {
                assert!((a - b).norm() < 1e-9, "dim {dim}: {a} vs {b}");
            }
        }
    }
}
