//! Lattice norms and Fourier-multiplier operators.

use num_complex::Complex64;

use super::field::{dft, idft, LatticeField, SpectralField};
use super::symbol::DispersionSymbol;
use crate::error::{Error, Result};

/// Relative size below which a zero-frequency coefficient counts as vanishing.
const MEAN_MODE_TOLERANCE: f64 = 1e-12;

/// `‖f‖_{L_h^p} = (h^d Σ |f(x_m)|^p)^{1/p}`, or `sup |f|` for `p = ∞`.
pub fn lp_norm(f: &LatticeField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let vol = f.grid().cell_volume();
    let sum: f64 = if p == 2.0 {
        f.values().iter().map(|v| v.norm_sqr()).sum()
    } else {
        f.values().iter().map(|v| v.norm().powf(p)).sum()
    };
    Ok((vol * sum).powf(1.0 / p))
}

fn ensure_mean_free(spec: &SpectralField) -> Result<()> {
    let total: f64 = spec.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mean = spec.coeffs()[0].norm();
    if mean > MEAN_MODE_TOLERANCE * total {
        return Err(Error::SingularMultiplier(mean));
    }
    Ok(())
}

/// `idft(σ(ξ)^{power_scale} · dft(f))`. With a discrete symbol and
/// `power_scale = 1` this is `(-Δ_h)^α f`.
pub fn apply_symbol(
    f: &LatticeField,
    symbol: &DispersionSymbol,
    power_scale: f64,
) -> Result<LatticeField> {
    let mut spec = dft(f);
    apply_symbol_spectral(&mut spec, symbol, power_scale)?;
    Ok(idft(&spec))
}

pub fn apply_symbol_spectral(
    spec: &mut SpectralField,
    symbol: &DispersionSymbol,
    power_scale: f64,
) -> Result<()> {
    if power_scale < 0.0 {
        ensure_mean_free(spec)?;
    }
    let grid = *spec.grid();
    let sigma = symbol.on_grid(&grid);
    for (c, s) in spec.coeffs_mut().iter_mut().zip(sigma) {
        *c *= power_of(s, power_scale);
    }
    Ok(())
}

/// `x^e` with `0^0 = 1` and `0^e = 0` otherwise (negative powers of zero
/// only reach here for vanishing modes).
fn power_of(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// Forward difference `D_{j;h}^+ f(x) = (f(x + h e_j) - f(x)) / h` with periodic wraparound.
pub fn discrete_gradient(f: &LatticeField, axis: usize) -> Result<LatticeField> {
    let grid = *f.grid();
    if axis >= grid.dim() {
        return Err(Error::Domain(format!("axis {axis} out of range for dimension {}", grid.dim())));
    }
    let m = grid.points_per_axis();
    let stride = grid.stride(axis);
    let inv_h = 1.0 / grid.spacing();
    let vals = f.values();
    let out = (0..grid.len())
        .map(|i| {
            let coord = (i / stride) % m;
            let next = if coord + 1 == m { i + stride - m * stride } else { i + stride };
            (vals[next] - vals[i]) * inv_h
        })
        .collect();
    Ok(LatticeField::from_raw(grid, out))
}

/// Multiplier of `|∇_h|^s` (homogeneous) or `⟨∇_h⟩^s` at frequency `ξ`.
pub fn sobolev_weight(xi: &[f64], s: f64, homogeneous: bool) -> f64 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    if homogeneous {
        power_of(r2, 0.5 * s)
    } else {
        (1.0 + r2).powf(0.5 * s)
    }
}

/// Applies `|∇_h|^s` or `⟨∇_h⟩^s` in frequency.
pub fn apply_derivative(f: &LatticeField, s: f64, homogeneous: bool) -> Result<LatticeField> {
    let mut spec = dft(f);
    if homogeneous && s < 0.0 {
        ensure_mean_free(&spec)?;
    }
    spec.apply(|xi| Complex64::new(sobolev_weight(xi, s, homogeneous), 0.0));
    Ok(idft(&spec))
}

/// `‖f‖_{Ḣ_h^s}` or `‖f‖_{H_h^s}`, evaluated spectrally through Plancherel.
pub fn sobolev_norm(f: &LatticeField, s: f64, homogeneous: bool) -> Result<f64> {
    sobolev_norm_spectral(&dft(f), s, homogeneous)
}

pub fn sobolev_norm_spectral(spec: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    if homogeneous && s < 0.0 {
        ensure_mean_free(spec)?;
    }
    let grid = spec.grid();
    let d = grid.dim();
    let sum: f64 = spec
        .coeffs()
        .iter()
        .zip(grid.frequencies())
        .map(|(c, xi)| c.norm_sqr() * sobolev_weight(&xi[..d], s, homogeneous).powi(2))
        .sum();
    Ok((sum / grid.volume()).sqrt())
}

/// `‖f‖_{Ẇ_h^{s,p}}` (or `W_h^{s,p}`) for general `p`.
pub fn sobolev_lp_norm(f: &LatticeField, s: f64, p: f64, homogeneous: bool) -> Result<f64> {
    lp_norm(&apply_derivative(f, s, homogeneous)?, p)
}

/// Square root of `h^d Σ_{0 < |y_m| ≤ R} ‖f(· + y_m) - f‖²_{L_h²} / |y_m|^{d+2s}`,
/// with offsets taken as periodic representatives in `[-L/2, L/2)^d`.
///
/// The translation norms come from the autocorrelation of `|F_h f|²`, so the
/// cost is one extra FFT rather than a sum over all pairs of sites. The
/// omitted tail beyond `R` is `O(R^{-2s})`.
pub fn fractional_difference_norm(f: &LatticeField, s: f64, truncation_radius: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("smoothness must lie in (0, 1), got {s}")));
    }
    let grid = *f.grid();
    let half = 0.5 * grid.box_length();
    if !(truncation_radius > 0.0 && truncation_radius <= half * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!(
            "truncation radius must lie in (0, L/2 = {half}], got {truncation_radius}"
        )));
    }
    let spec = dft(f);
    let vol = grid.volume();
    let power: Vec<Complex64> = spec.coeffs().iter().map(|c| Complex64::new(c.norm_sqr(), 0.0)).collect();
    let total: f64 = power.iter().map(|c| c.re).sum::<f64>() / vol;
    // idft of |F|² gives L^{-d} Σ_k |F_k|² e^{i y·ξ_k} at every lattice offset y.
    let autocorr = idft(&SpectralField::from_raw(grid, power));

    let d = grid.dim();
    let exponent = d as f64 + 2.0 * s;
    let h = grid.spacing();
    let mut sum = 0.0;
    for (i, ac) in autocorr.values().iter().enumerate() {
        if i == 0 {
            continue;
        }
        let multi = grid.unflatten(i);
        let r2: f64 = (0..d)
            .map(|a| {
                let y = h * grid.wave_number(multi[a]) as f64;
                y * y
            })
            .sum();
        let r = r2.sqrt();
        if r > truncation_radius {
            continue;
        }
        // ‖f(·+y) - f‖² = 2‖f‖² - 2 Re⟨f(·+y), f⟩
        let diff = (2.0 * total - 2.0 * ac.re).max(0.0);
        sum += diff / r.powf(exponent);
    }
    Ok((grid.cell_volume() * sum).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::field::tests::random_field;
    use crate::lattice::LatticeGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_norms() {
        let grid = LatticeGrid::new(1, 16, 8.0).unwrap();
        let f = LatticeField::constant(grid, Complex64::new(1.0, 0.0));
        assert!((lp_norm(&f, 2.0).unwrap() - 8f64.sqrt()).abs() < 1e-14);
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 1.0);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn sup_norm_is_max_modulus() {
        let grid = LatticeGrid::new(2, 8, 1.0).unwrap();
        let f = random_field(grid, 3);
        let max = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), max);
    }

    #[test]
    fn laplacian_stencil_on_delta() {
        let grid = LatticeGrid::new(1, 16, 16.0).unwrap();
        let f = LatticeField::delta(grid);
        let s = DispersionSymbol::discrete(1.0).unwrap();
        let out = apply_symbol(&f, &s, 1.0).unwrap();
        // (-Δ_h)δ = 2 at 0 and -1 at ±1; Eq. (1.3) stencil is its negation.
        let v = out.values();
        assert!((v[0].re - 2.0).abs() < 1e-12);
        assert!((v[1].re + 1.0).abs() < 1e-12);
        assert!((v[15].re + 1.0).abs() < 1e-12);
        for x in &v[2..15] {
            assert!(x.norm() < 1e-12);
        }
        // Direct stencil (f(x+h) + f(x-h) - 2f(x)) / h² for comparison.
        let fv = f.values();
        for i in 0..16 {
            let lap = (fv[(i + 1) % 16] + fv[(i + 15) % 16] - 2.0 * fv[i]) / (grid.spacing() * grid.spacing());
            assert!((lap + v[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_eigenvector() {
        let grid = LatticeGrid::new(2, 16, 6.0).unwrap();
        let k = grid.flatten(&[2, 13]);
        let f = LatticeField::plane_wave(grid, k);
        let s = DispersionSymbol::discrete(0.75).unwrap();
        let lambda = s.value(grid.spacing(), &grid.frequency(k)[..2]);
        let out = apply_symbol(&f, &s, 1.0).unwrap();
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b * lambda).norm() < 1e-10 * lambda);
        }
    }

    #[test]
    fn semigroup_quarter_twice_is_half() {
        let grid = LatticeGrid::new(1, 64, 10.0).unwrap();
        let f = random_field(grid, 5);
        let s = DispersionSymbol::discrete(0.25).unwrap();
        let twice = apply_symbol(&apply_symbol(&f, &s, 1.0).unwrap(), &s, 1.0).unwrap();
        let once = apply_symbol(&f, &s, 2.0).unwrap();
        let norm = lp_norm(&once, 2.0).unwrap();
        assert!(lp_norm(&twice.sub(&once).unwrap(), 2.0).unwrap() <= 1e-11 * norm);
    }

    #[test]
    fn negative_power_needs_mean_free_field() {
        let grid = LatticeGrid::new(1, 16, 4.0).unwrap();
        let f = random_field(grid, 9);
        let s = DispersionSymbol::discrete(1.0).unwrap();
        assert!(matches!(apply_symbol(&f, &s, -1.0), Err(Error::SingularMultiplier(_))));
        let mean = f.values().iter().sum::<Complex64>() / 16.0;
        let g = f.map(|v| v - mean);
        let inv = apply_symbol(&g, &s, -1.0).unwrap();
        let back = apply_symbol(&inv, &s, 1.0).unwrap();
        assert!(lp_norm(&back.sub(&g).unwrap(), 2.0).unwrap() < 1e-12 * lp_norm(&g, 2.0).unwrap());
    }

    #[test]
    fn gradient_of_constant_and_ramp() {
        let grid = LatticeGrid::new(1, 16, 8.0).unwrap();
        let c = LatticeField::constant(grid, Complex64::new(2.5, -1.0));
        assert!(discrete_gradient(&c, 0).unwrap().max_abs() == 0.0);
        let ramp = LatticeField::from_fn(grid, |x| Complex64::new(x[0], 0.0));
        let g = discrete_gradient(&ramp, 0).unwrap();
        for (i, v) in g.values().iter().enumerate() {
            if i == 15 {
                // wrap site: (0 - (L - h)) / h
                assert!((v.re - (-(8.0 - 0.5) / 0.5)).abs() < 1e-12);
            } else {
                assert!((v.re - 1.0).abs() < 1e-12);
            }
        }
        assert!(discrete_gradient(&c, 1).is_err());
    }

    #[test]
    fn sobolev_zero_is_l2_and_plane_wave_scaling() {
        let grid = LatticeGrid::new(2, 16, 6.0).unwrap();
        let f = random_field(grid, 1);
        let l2 = lp_norm(&f, 2.0).unwrap();
        assert!((sobolev_norm(&f, 0.0, true).unwrap() - l2).abs() < 1e-12 * l2);
        assert!((sobolev_norm(&f, 0.0, false).unwrap() - l2).abs() < 1e-12 * l2);
        let k = grid.flatten(&[3, 1]);
        let w = LatticeField::plane_wave(grid, k);
        let xi = grid.frequency(k);
        let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        // ‖e^{ix·ξ}‖_{L_h²} = L^{d/2}
        let expected = r.powf(0.7) * grid.box_length();
        assert!((sobolev_norm(&w, 0.7, true).unwrap() - expected).abs() < 1e-10 * expected);
        assert!(sobolev_norm(&f, -0.5, true).is_err());
    }

    #[test]
    fn lemma_two_two_bound_holds() {
        for dim in 1..=3 {
            let grid = LatticeGrid::new(dim, 16, 3.0).unwrap();
            let f = random_field(grid, 40 + dim as u64);
            for &s in &[0.0, 0.25, 0.5, 0.9] {
                let lhs = sobolev_norm(&f, 1.0, true).unwrap();
                let c = (PI * (dim as f64).sqrt() / grid.spacing()).powf(1.0 - s);
                assert!(lhs <= c * sobolev_norm(&f, s, true).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn fractional_difference_rejects_bad_input() {
        let grid = LatticeGrid::new(1, 16, 4.0).unwrap();
        let f = random_field(grid, 2);
        assert!(fractional_difference_norm(&f, 0.0, 1.0).is_err());
        assert!(fractional_difference_norm(&f, 1.0, 1.0).is_err());
        assert!(fractional_difference_norm(&f, 0.5, 3.0).is_err());
        let c = LatticeField::constant(grid, Complex64::new(1.0, 1.0));
        assert!(fractional_difference_norm(&c, 0.5, 2.0).unwrap() < 1e-7);
    }

    #[test]
    fn fractional_difference_plane_wave_matches_direct_sum() {
        // Oracle: m_h(ξ) = h^d Σ_{0<|y|≤R} |e^{-iy·ξ} - 1|² / |y|^{d+2s}, summed directly.
        let grid = LatticeGrid::new(1, 64, 16.0).unwrap();
        let h = grid.spacing();
        let s = 0.4;
        let r = 8.0;
        for &k in &[1usize, 5, 32] {
            let f = LatticeField::plane_wave(grid, k);
            let xi = grid.frequency(k)[0];
            let mut m = 0.0;
            for n in -32i64..32 {
                let y = h * n as f64;
                if n == 0 || y.abs() > r {
                    continue;
                }
                m += h * (Complex64::from_polar(1.0, -y * xi) - 1.0).norm_sqr() / y.abs().powf(1.0 + 2.0 * s);
            }
            let expected = m.sqrt() * lp_norm(&f, 2.0).unwrap();
            let got = fractional_difference_norm(&f, s, r).unwrap();
            assert!((got - expected).abs() < 1e-10 * expected, "k={k}: {got} vs {expected}");
        }
    }
}
