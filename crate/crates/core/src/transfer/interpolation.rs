use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::continuum::ContinuumField;
use crate::error::{Error, Result};
use crate::lattice::{dft, LatticeField, LatticeGrid, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Below this `|θ|` the moment integrals switch to their Taylor series.
const SERIES_SWITCH: f64 = 0.5;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Cell average of `e^{iθu}` over `u ∈ [0, 1)`: `(e^{iθ} - 1) / (iθ)`.
pub fn cell_average_factor(theta: f64) -> Complex64 {
    Complex64::from_polar(sinc(0.5 * theta), 0.5 * theta)
}

/// `f_h(x_m) = h^{-d} ∫_{x_m + [0,h)^d} f`, computed mode by mode. Modes of the
/// reference representation fold onto the coarse torus by aliasing.
pub fn discretize(f: &ContinuumField, target: &LatticeGrid) -> Result<LatticeField> {
    let reference = f.reference_grid();
    if !target.is_refinement_of(reference) || reference.points_per_axis() % target.points_per_axis() != 0 {
        return Err(Error::GridMismatch(format!(
            "target M={} must divide reference M={} on the same box",
            target.points_per_axis(),
            reference.points_per_axis()
        )));
    }
    let d = reference.dim();
    let h = target.spacing();
    let mt = target.points_per_axis();
    let mut coarse = vec![Complex64::default(); target.len()];
    for (i, c) in f.coeffs().iter().enumerate() {
        if *c == Complex64::default() {
            continue;
        }
        let xi = reference.frequency(i);
        let multi = reference.unflatten(i);
        let mut factor = Complex64::new(1.0, 0.0);
        let mut folded = [0usize; 3];
        for j in 0..d {
            factor *= cell_average_factor(h * xi[j]);
            folded[j] = multi[j] % mt;
        }
        coarse[target.flatten(&folded)] += c * factor;
    }
    Ok(crate::lattice::idft(&SpectralField::from_raw(*target, coarse)))
}

/// The cellwise affine extension `p_h f` of a lattice field:
/// `f(x_m) + Σ_j h^{-1} (f(x_m + h e_j) - f(x_m)) (x - x_m)_j` on `x_m + [0, h)^d`,
/// with periodic neighbors across the box edge. In `d ≥ 2` this is not the
/// multilinear interpolant and jumps across some cell faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolantField {
    source: LatticeField,
}

pub fn interpolate(f: &LatticeField) -> InterpolantField {
    InterpolantField { source: f.clone() }
}

impl InterpolantField {
    pub fn source(&self) -> &LatticeField {
        &self.source
    }

    fn neighbor(&self, grid: &LatticeGrid, index: usize, axis: usize) -> usize {
        let m = grid.points_per_axis();
        let stride = grid.stride(axis);
        let k = (index / stride) % m;
        if k + 1 == m {
            index + stride - m * stride
        } else {
            index + stride
        }
    }

    /// Value on cell `m` at displacement `y ∈ [0, h]^d` (the far faces included).
    fn on_cell(&self, index: usize, y: &[f64]) -> Complex64 {
        let grid = self.source.grid();
        let v = self.source.values();
        let base = v[index];
        let h = grid.spacing();
        let mut out = base;
        for (axis, &yj) in y.iter().enumerate() {
            out += (v[self.neighbor(grid, index, axis)] - base) * (yj / h);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let grid = self.source.grid();
        let (h, l, m) = (grid.spacing(), grid.box_length(), grid.points_per_axis());
        let mut cell = [0usize; 3];
        let mut y = [0.0; 3];
        for j in 0..grid.dim() {
            let xj = x[j].rem_euclid(l);
            let k = ((xj / h).floor() as usize).min(m - 1);
            cell[j] = k;
            y[j] = xj - k as f64 * h;
        }
        self.on_cell(grid.flatten(&cell), &y[..grid.dim()])
    }

    /// Samples on a grid that refines the source grid.
    pub fn sample_on(&self, grid: &LatticeGrid) -> Result<LatticeField> {
        let src = self.source.grid();
        if !grid.is_refinement_of(src) || grid.points_per_axis() % src.points_per_axis() != 0 {
            return Err(Error::GridMismatch("sampling grid must refine the source grid".into()));
        }
        let d = grid.dim();
        let k = grid.points_per_axis() / src.points_per_axis();
        let hr = grid.spacing();
        let values = (0..grid.len())
            .map(|i| {
                let multi = grid.unflatten(i);
                let mut cell = [0usize; 3];
                let mut y = [0.0; 3];
                for j in 0..d {
                    cell[j] = multi[j] / k;
                    y[j] = (multi[j] % k) as f64 * hr;
                }
                self.on_cell(src.flatten(&cell), &y[..d])
            })
            .collect();
        LatticeField::new(*grid, values)
    }
}

fn mean_phase(theta: f64) -> Complex64 {
    // ∫_0^1 e^{-iθu} du
    if theta.abs() < SERIES_SWITCH {
        moment_series(0, theta)
    } else {
        (1.0 - Complex64::from_polar(1.0, -theta)) / (I * theta)
    }
}

fn first_moment(theta: f64) -> Complex64 {
    // ∫_0^1 u e^{-iθu} du
    if theta.abs() < SERIES_SWITCH {
        moment_series(1, theta)
    } else {
        (Complex64::from_polar(1.0, -theta) * (1.0 + I * theta) - 1.0) / (theta * theta)
    }
}

fn moment_series(n: i32, theta: f64) -> Complex64 {
    let z = -I * theta;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::default();
    for k in 0..30 {
        sum += term / (n + k + 1) as f64;
        term *= z / (k + 1) as f64;
    }
    sum
}

/// Closed-form symbol `P_h(ξ)` with `(F p_h f)(ξ) = P_h(ξ) (F_h f)(ξ)`:
/// `Π_k E(hξ_k) + Σ_j (S(hξ_j) - E(hξ_j)) Π_{k≠j} E(hξ_k)` where
/// `E(θ) = (e^{-iθ} - 1)/(-iθ)` and `S(θ) = sinc²(θ/2)`.
pub fn interpolation_symbol(grid: &LatticeGrid, xi: &[f64]) -> Complex64 {
    let h = grid.spacing();
    let d = grid.dim();
    let e: Vec<Complex64> = (0..d).map(|j| cell_average_factor(-h * xi[j])).collect();
    let full: Complex64 = e.iter().product();
    let mut out = full;
    for j in 0..d {
        let s = sinc(0.5 * h * xi[j]).powi(2);
        let others: Complex64 = (0..d).filter(|&k| k != j).map(|k| e[k]).product();
        out += (s - e[j]) * others;
    }
    out
}

/// Compares the continuum Fourier transform of `p_h f`, integrated cell by cell
/// in physical space, against `P_h(ξ) · (F_h f)(ξ)` at integer wave vectors
/// `ξ = 2π k / L` (aliases outside the first zone allowed). Returns the largest
/// deviation relative to `h^d Σ |f(x_m)|`.
pub fn interpolant_transform_check(f: &LatticeField, probes: &[[i64; 3]]) -> f64 {
    let grid = *f.grid();
    let d = grid.dim();
    let h = grid.spacing();
    let m = grid.points_per_axis() as i64;
    let step = grid.frequency_step();
    let spec = dft(f);
    let interp = interpolate(f);
    let scale = grid.cell_volume() * f.values().iter().map(|v| v.norm()).sum::<f64>();
    if scale == 0.0 {
        return 0.0;
    }
    probes
        .iter()
        .map(|k| {
            let mut xi = [0.0; 3];
            let mut folded = [0usize; 3];
            for j in 0..d {
                xi[j] = step * k[j] as f64;
                folded[j] = k[j].rem_euclid(m) as usize;
            }
            let predicted = interpolation_symbol(&grid, &xi[..d]) * spec.coeffs()[grid.flatten(&folded)];

            let mean: Vec<Complex64> = (0..d).map(|j| mean_phase(h * xi[j])).collect();
            let first: Vec<Complex64> = (0..d).map(|j| first_moment(h * xi[j])).collect();
            let base_integral: Complex64 = mean.iter().product::<Complex64>() * grid.cell_volume();
            let slope_integral: Vec<Complex64> = (0..d)
                .map(|j| {
                    let others: Complex64 = (0..d).filter(|&k| k != j).map(|k| mean[k]).product();
                    first[j] * others * grid.cell_volume()
                })
                .collect();
            let values = f.values();
            let direct: Complex64 = (0..grid.len())
                .map(|i| {
                    let x = grid.position(i);
                    let phase: f64 = (0..d).map(|j| x[j] * xi[j]).sum();
                    let mut cell = values[i] * base_integral;
                    for j in 0..d {
                        let diff = values[interp.neighbor(&grid, i, j)] - values[i];
                        cell += diff * slope_integral[j];
                    }
                    cell * Complex64::from_polar(1.0, -phase)
                })
                .sum();
            (direct - predicted).norm() / scale
        })
        .fold(0.0, f64::max)
}

/// `‖p_h g - f‖_{L²(box)}` by a tensor trapezoid rule on the reference sites
/// inside each source cell (far faces evaluated with the cell's own affine
/// formula). Quadrature error is `O(h_ref²)` relative.
pub fn cross_l2_distance(g: &InterpolantField, f: &ContinuumField) -> Result<f64> {
    let src = *g.source.grid();
    let reference = *f.reference_grid();
    if !reference.is_refinement_of(&src) || reference.points_per_axis() % src.points_per_axis() != 0 {
        return Err(Error::GridMismatch(format!(
            "reference M={} must be a multiple of source M={} on the same box",
            reference.points_per_axis(),
            src.points_per_axis()
        )));
    }
    let d = src.dim();
    let k = reference.points_per_axis() / src.points_per_axis();
    let mr = reference.points_per_axis();
    let hr = reference.spacing();
    let fr = f.samples();
    let fv = fr.values();
    let sub = (k + 1).pow(d as u32);
    let weight_1d = |a: usize| if a == 0 || a == k { 0.5 } else { 1.0 };

    // Per-cell sums are gathered in order and added sequentially so the result
    // does not depend on how the work was split across threads.
    let per_cell: Vec<f64> = (0..src.len())
        .into_par_iter()
        .map(|cell| {
            let cm = src.unflatten(cell);
            let mut acc = 0.0;
            for s in 0..sub {
                let mut rest = s;
                let mut a = [0usize; 3];
                for j in (0..d).rev() {
                    a[j] = rest % (k + 1);
                    rest /= k + 1;
                }
                let mut y = [0.0; 3];
                let mut r = [0usize; 3];
                let mut w = 1.0;
                for j in 0..d {
                    y[j] = a[j] as f64 * hr;
                    r[j] = (cm[j] * k + a[j]) % mr;
                    w *= weight_1d(a[j]);
                }
                let diff = g.on_cell(cell, &y[..d]) - fv[reference.flatten(&r)];
                acc += w * diff.norm_sqr();
            }
            acc
        })
        .collect();
    let total: f64 = per_cell.iter().sum();
    Ok((total * reference.cell_volume()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::field::tests::random_field;
    use crate::lattice::lp_norm;
    use crate::quadrature::GaussLegendre;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constants_are_preserved() {
        let grid = LatticeGrid::new(2, 32, 4.0).unwrap();
        let coarse = LatticeGrid::new(2, 8, 4.0).unwrap();
        let f = ContinuumField::from_fn(grid, |_| c(2.5));
        let fh = discretize(&f, &coarse).unwrap();
        assert!(fh.values().iter().all(|v| (v - c(2.5)).norm() < 1e-13));
        let p = interpolate(&fh);
        for x in [[0.1, 3.9], [2.0, 2.0], [3.99, 0.0]] {
            assert!((p.eval(&x) - c(2.5)).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_cell_average() {
        let grid = LatticeGrid::new(1, 64, 8.0).unwrap();
        let coarse = LatticeGrid::new(1, 16, 8.0).unwrap();
        let k = 3;
        let xi = 2.0 * PI * k as f64 / 8.0;
        let f = ContinuumField::from_fn(grid, |x| Complex64::from_polar(1.0, xi * x[0]));
        let fh = discretize(&f, &coarse).unwrap();
        let h = coarse.spacing();
        let factor = (Complex64::from_polar(1.0, h * xi) - 1.0) / (I * h * xi);
        for (i, v) in fh.values().iter().enumerate() {
            let x = coarse.position(i)[0];
            assert!((v - Complex64::from_polar(1.0, xi * x) * factor).norm() < 1e-13);
        }
    }

    #[test]
    fn aliased_mode_folds() {
        // A mode above the coarse Nyquist band lands on its alias with the
        // fine-scale cell average.
        let grid = LatticeGrid::new(1, 64, 8.0).unwrap();
        let coarse = LatticeGrid::new(1, 16, 8.0).unwrap();
        let xi = 2.0 * PI * 21.0 / 8.0;
        let f = ContinuumField::from_fn(grid, |x| Complex64::from_polar(1.0, xi * x[0]));
        let fh = discretize(&f, &coarse).unwrap();
        let h = coarse.spacing();
        for (i, v) in fh.values().iter().enumerate() {
            let x = coarse.position(i)[0];
            let cell = GaussLegendre::new(40).integrate_complex(x, x + h, |s| Complex64::from_polar(1.0, xi * s)) / h;
            assert!((v - cell).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolant_hits_sites_and_is_affine() {
        let grid = LatticeGrid::new(2, 8, 2.0).unwrap();
        let f = random_field(grid, 3);
        let p = interpolate(&f);
        for i in 0..grid.len() {
            let x = grid.position(i);
            assert_eq!(p.eval(&x[..2]), f.values()[i]);
        }
        // No cross term: the mixed second difference on a cell vanishes.
        let h = grid.spacing();
        let (x0, y0) = (0.25 * h + 3.0 * h, 0.25 * h + 5.0 * h);
        let dx = 0.5 * h;
        let mixed = p.eval(&[x0 + dx, y0 + dx]) - p.eval(&[x0 + dx, y0]) - p.eval(&[x0, y0 + dx]) + p.eval(&[x0, y0]);
        assert!(mixed.norm() < 1e-14);
        // Periodic wrap on the last cell.
        let last = 7.5 * h;
        let expect = f.values()[grid.flatten(&[7, 0])] * 0.5 + f.values()[grid.flatten(&[0, 0])] * 0.5;
        assert!((p.eval(&[last, 0.0]) - expect).norm() < 1e-14);
    }

    #[test]
    fn symbol_special_values() {
        let grid = LatticeGrid::new(1, 16, 16.0).unwrap();
        assert!((interpolation_symbol(&grid, &[0.0]) - 1.0).norm() < 1e-15);
        assert!((interpolation_symbol(&grid, &[PI]) - 4.0 / (PI * PI)).norm() < 1e-15);
        let grid3 = LatticeGrid::new(3, 8, 8.0).unwrap();
        assert!((interpolation_symbol(&grid3, &[0.0, 0.0, 0.0]) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn symbol_matches_integral_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rule = GaussLegendre::new(40);
        for dim in 1..=3 {
            let grid = LatticeGrid::new(dim, 8, 4.0).unwrap();
            let h = grid.spacing();
            for _ in 0..10 {
                let xi: Vec<f64> = (0..dim).map(|_| rng.gen_range(-PI / h..PI / h)).collect();
                // (1/h^d) ∫ e^{-ix·ξ} + Σ_j ((e^{ihξ_j} - 1)/h)(1/h^d) ∫ x_j e^{-ix·ξ}
                let one: Vec<Complex64> = xi
                    .iter()
                    .map(|&x| rule.integrate_complex(0.0, h, |s| Complex64::from_polar(1.0, -s * x)) / h)
                    .collect();
                let lin: Vec<Complex64> = xi
                    .iter()
                    .map(|&x| rule.integrate_complex(0.0, h, |s| Complex64::from_polar(s, -s * x)) / h)
                    .collect();
                let mut oracle: Complex64 = one.iter().product();
                for j in 0..dim {
                    let others: Complex64 = (0..dim).filter(|&k| k != j).map(|k| one[k]).product();
                    oracle += (Complex64::from_polar(1.0, h * xi[j]) - 1.0) / h * lin[j] * others;
                }
                assert!((interpolation_symbol(&grid, &xi) - oracle).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn transform_identity_on_delta_random_and_aliases() {
        for dim in 1..=2 {
            let grid = LatticeGrid::new(dim, 16, 4.0).unwrap();
            let probes: Vec<[i64; 3]> = vec![[0, 0, 0], [1, -3, 0], [7, 8, 0], [-8, 2, 0], [16 + 3, -40, 0], [33, 0, 0]];
            assert!(interpolant_transform_check(&LatticeField::delta(grid), &probes) < 1e-12);
            assert!(interpolant_transform_check(&random_field(grid, 5), &probes) < 1e-12);
        }
    }

    #[test]
    fn distance_to_zero_is_interpolant_norm() {
        let grid = LatticeGrid::new(1, 16, 4.0).unwrap();
        let reference = grid.refined(4).unwrap();
        let g = random_field(grid, 1);
        let p = interpolate(&g);
        let d = cross_l2_distance(&p, &ContinuumField::zeros(reference)).unwrap();
        // Exact ∫|affine|² per cell: h (|a|² + Re(a b̄) + |b|²) / 3.
        let h = grid.spacing();
        let v = g.values();
        let exact: f64 = (0..16)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % 16]);
                h * (a.norm_sqr() + (a * b.conj()).re + b.norm_sqr()) / 3.0
            })
            .sum();
        let trapezoid_bound = 1.0 / 16.0 * lp_norm(&g, 2.0).unwrap().powi(2);
        assert!((d * d - exact).abs() < trapezoid_bound);
        let finer = cross_l2_distance(&p, &ContinuumField::zeros(grid.refined(64).unwrap())).unwrap();
        assert!((finer * finer - exact).abs() < 1e-3 * exact);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let grid = LatticeGrid::new(1, 16, 4.0).unwrap();
        let other = LatticeGrid::new(1, 64, 5.0).unwrap();
        let f = ContinuumField::zeros(other);
        assert!(discretize(&f, &grid).is_err());
        assert!(cross_l2_distance(&interpolate(&LatticeField::zeros(grid)), &f).is_err());
    }
}
