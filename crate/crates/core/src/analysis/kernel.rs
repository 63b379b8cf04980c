use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::symbol::validate_alpha;
use crate::lattice::{band_cutoff, LatticeGrid};
use crate::quadrature::{adaptive_complex, GaussLegendre};

/// Agreement required between a kernel value and its node-doubled recomputation,
/// relative to the kernel's trivial bound.
pub const DOUBLING_TOLERANCE: f64 = 1e-8;
const MAX_NODES: usize = 1 << 25;
const NODE_MARGIN: usize = 4096;

/// One evaluation of the frequency-localized propagator kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub n: f64,
    pub h: f64,
    pub alpha: f64,
    pub t: f64,
    pub x: f64,
    pub value: Complex64,
}

/// `(4 sin²(u/2))^α`: the lattice symbol in the variable `u = hξ`, without `h^{-2α}`.
fn reduced_symbol(alpha: f64, u: f64) -> f64 {
    let s = 4.0 * (0.5 * u).sin().powi(2);
    if alpha == 1.0 {
        s
    } else {
        s.powf(alpha)
    }
}

fn reduced_symbol_slope(alpha: f64, u: f64) -> f64 {
    let s = 4.0 * (0.5 * u).sin().powi(2);
    alpha * s.powf(alpha - 1.0) * 2.0 * u.sin()
}

fn band_support(n: f64) -> (f64, f64) {
    (0.5 * n, (2.0 * n).min(PI))
}

/// Largest `|d/du (4 sin²(u/2))^α|` over the band support.
fn max_slope(alpha: f64, n: f64) -> f64 {
    let (a, b) = band_support(n);
    (0..=2000)
        .map(|i| reduced_symbol_slope(alpha, a + (b - a) * i as f64 / 2000.0).abs())
        .fold(0.0, f64::max)
}

/// `∫_R ψ(u) du` for the band cutoff.
pub fn band_cutoff_integral() -> f64 {
    let rule = GaussLegendre::new(40);
    2.0 * [(0.5, 1.0), (1.0, 1.5), (1.5, 2.0)]
        .iter()
        .map(|&(a, b)| rule.integrate(a, b, band_cutoff))
        .sum::<f64>()
}

/// The bound `sup_x |K_{N,t}(x)| ≤ (∫ψ / 2π) · N/h`, valid for every `t`.
pub fn kernel_trivial_bound(n: f64, h: f64) -> f64 {
    band_cutoff_integral() / (2.0 * PI) * n / h
}

fn check_inputs(n: f64, grid: &LatticeGrid, alpha: f64) -> Result<()> {
    validate_alpha(alpha)?;
    if grid.dim() != 1 {
        return Err(Error::Domain("the kernel is analyzed in one dimension only".into()));
    }
    if !(n > 0.0 && n <= 1.0) {
        return Err(Error::Domain(format!("band scale must lie in (0, 1], got {n}")));
    }
    Ok(())
}

/// `K_{N,t}(x) = (1/2π) ∫_{-π/h}^{π/h} e^{i(xξ - (4^α t/h^{2α}) sin^{2α}(hξ/2))} ψ(hξ/N) dξ`
/// by adaptive Gauss–Legendre panels sized to the phase derivative.
pub fn kernel_eval(n: f64, t: f64, grid: &LatticeGrid, alpha: f64, x: f64) -> Result<Complex64> {
    check_inputs(n, grid, alpha)?;
    let h = grid.spacing();
    let tau = t / h.powf(2.0 * alpha);
    let m = x / h;
    let scale = kernel_trivial_bound(n, h);
    let integrand = |u: f64| {
        let w = band_cutoff(u.abs() / n);
        if w == 0.0 {
            return Complex64::default();
        }
        Complex64::from_polar(w / (2.0 * PI * h), m * u - tau * reduced_symbol(alpha, u))
    };
    let (a, b) = band_support(n);
    let rate = m.abs() + tau.abs() * max_slope(alpha, n);
    let panels = ((rate * (b - a) / (2.0 * PI) / 4.0).ceil() as usize).max(1);
    let tol = 1e-11 * scale;
    // Large phases cost digits in `from_polar`; never ask a panel for more than that.
    let phase = m.abs() * b + tau.abs() * reduced_symbol(alpha, b);
    let mut total = Complex64::default();
    let mut err = 0.0;
    for (lo, hi) in [(a, b), (-b, -a)] {
        let width = (hi - lo) / panels as f64;
        for k in 0..panels {
            let p0 = lo + width * k as f64;
            let floor = 64.0 * f64::EPSILON * (1.0 + phase) * width / (2.0 * PI * h);
            let panel_tol = (tol / (2 * panels) as f64).max(floor);
            let (v, e) = adaptive_complex(&integrand, p0, p0 + width, panel_tol, 14);
            total += v;
            err += e;
        }
    }
    if err > DOUBLING_TOLERANCE * scale {
        return Err(Error::Accuracy { achieved: err / scale });
    }
    Ok(total)
}

/// `sup_x |K_{N,t}(x)|` over lattice sites, with its location and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSup {
    pub t: f64,
    pub sup: f64,
    pub argmax_x: f64,
    /// Kernel value at `argmax_x`.
    pub peak: Complex64,
    /// Quadrature nodes on the full period `[-π, π)` of `u = hξ`.
    pub nodes: usize,
    /// Largest change at the checked sites when the node count is doubled,
    /// relative to the trivial bound.
    pub doubling_change: f64,
    /// Peak of `|K|` on the outer half of the site window over the overall peak.
    pub edge_ratio: f64,
}

struct Band {
    n: f64,
    h: f64,
    alpha: f64,
    tau: f64,
}

impl Band {
    fn integrand(&self, u: f64) -> Complex64 {
        let w = band_cutoff(u.abs() / self.n);
        if w == 0.0 {
            return Complex64::default();
        }
        Complex64::from_polar(w, -self.tau * reduced_symbol(self.alpha, u))
    }

    /// Node indices `q` (of `nodes` on `[0, 2π)`) that fall in the band support, as `(q, u)`.
    fn support_nodes(&self, nodes: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = band_support(self.n);
        let du = 2.0 * PI / nodes as f64;
        let lo = (a / du).floor() as usize;
        let hi = ((b / du).ceil() as usize).min(nodes / 2);
        let pos = (lo..=hi).map(move |q| (q, q as f64 * du));
        let neg = (lo.max(1)..=hi).map(move |q| (nodes - q, -(q as f64) * du));
        pos.chain(neg)
    }

    /// Rectangle rule on `nodes` equispaced points at a single site `m`.
    fn direct(&self, nodes: usize, m: i64) -> Complex64 {
        let sum: Complex64 = self
            .support_nodes(nodes)
            .map(|(_, u)| self.integrand(u) * Complex64::from_polar(1.0, m as f64 * u))
            .sum();
        sum / (nodes as f64 * self.h)
    }

    /// All sites `m ∈ [-Q/2, Q/2)` from one inverse FFT of the node values.
    fn all_sites(&self, nodes: usize) -> Vec<Complex64> {
        let mut data = vec![Complex64::default(); nodes];
        for (q, u) in self.support_nodes(nodes) {
            data[q] = self.integrand(u);
        }
        FftPlanner::new().plan_fft_inverse(nodes).process(&mut data);
        let scale = 1.0 / (nodes as f64 * self.h);
        data.iter_mut().for_each(|v| *v *= scale);
        data
    }
}

fn site_of(index: usize, nodes: usize) -> i64 {
    if index < nodes / 2 {
        index as i64
    } else {
        index as i64 - nodes as i64
    }
}

/// Evaluates the kernel at every lattice site at once. The phase is sampled
/// on `Q ≥ 4 S + 4096` equispaced nodes, `S = |t| h^{-2α} max|σ'|` being the
/// largest group displacement in sites, so the rectangle rule is spectrally
/// accurate and the site window `[-Q/2, Q/2)` covers `[-2S, 2S]`. The result is
/// revalidated with `2Q` nodes at the peak and two other sites.
pub fn kernel_sup(n: f64, t: f64, grid: &LatticeGrid, alpha: f64) -> Result<KernelSup> {
    check_inputs(n, grid, alpha)?;
    let h = grid.spacing();
    let band = Band { n, h, alpha, tau: t / h.powf(2.0 * alpha) };
    let spread = band.tau.abs() * max_slope(alpha, n);
    let mut nodes = (4.0 * spread).ceil() as usize + NODE_MARGIN;
    nodes = nodes.next_power_of_two();
    let bound = kernel_trivial_bound(n, h);
    loop {
        let values = band.all_sites(nodes);
        let (mut best, mut arg) = (0.0, 0usize);
        for (i, v) in values.iter().enumerate() {
            let a = v.norm();
            if a > best {
                best = a;
                arg = i;
            }
        }
        let edge = values
            .iter()
            .enumerate()
            .filter(|(i, _)| site_of(*i, nodes).unsigned_abs() as usize >= nodes / 4)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        let site = site_of(arg, nodes);
        let checks = [(arg, site), (0, 0), ((site / 2).rem_euclid(nodes as i64) as usize, site / 2)];
        let change = checks
            .iter()
            .map(|&(i, m)| (band.direct(2 * nodes, m) - values[i]).norm() / bound)
            .fold(0.0, f64::max);
        if change <= DOUBLING_TOLERANCE {
            return Ok(KernelSup {
                t,
                sup: best,
                argmax_x: site as f64 * h,
                peak: values[arg],
                nodes,
                doubling_change: change,
                edge_ratio: if best > 0.0 { edge / best } else { 0.0 },
            });
        }
        if nodes * 2 > MAX_NODES {
            return Err(Error::Accuracy { achieved: change });
        }
        nodes *= 2;
    }
}

/// `min |φ''(ξ)| / (|t| h^{2-2α} / N^{2-2α})` over the band support `h|ξ| ∈ [N/2, 2N]`.
pub fn hessian_ratio_min(alpha: f64, n: f64, grid: &LatticeGrid) -> f64 {
    let h = grid.spacing();
    let (a, b) = band_support(n);
    let norm = h.powf(2.0 - 2.0 * alpha) / n.powf(2.0 - 2.0 * alpha);
    (0..=4000)
        .map(|i| {
            let u = a + (b - a) * i as f64 / 4000.0;
            super::pairs::phase_second_derivative(alpha, 1.0, h, u / h).abs() / norm
        })
        .fold(f64::INFINITY, f64::min)
}

/// Whether the degenerate frequency `ξ_0` lies inside the band support.
pub fn band_contains_resonance(alpha: f64, n: f64) -> bool {
    let c = (1.0 - alpha) / alpha;
    if !(alpha > 0.5 && c <= 1.0) {
        return false;
    }
    let u0 = c.acos();
    let (a, b) = band_support(n);
    u0 >= a && u0 <= b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> LatticeGrid {
        LatticeGrid::new(1, 64, 2.0).unwrap()
    }

    #[test]
    fn cutoff_integral() {
        assert!((band_cutoff_integral() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn time_zero_at_origin() {
        let g = grid();
        for n in [1.0, 0.25] {
            let k = kernel_eval(n, 0.0, &g, 0.75, 0.0).unwrap();
            let expect = n / (2.0 * PI * g.spacing()) * 1.5;
            assert!((k.re - expect).abs() < 1e-10 * expect && k.im.abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let g = grid();
        for x in [0.0, 0.3125, -1.5] {
            let a = kernel_eval(1.0, 2.0, &g, 0.3, x).unwrap();
            let b = kernel_eval(1.0, -2.0, &g, 0.3, x).unwrap();
            assert!((a - b.conj()).norm() < 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn fft_route_matches_adaptive_quadrature() {
        let g = grid();
        let h = g.spacing();
        for alpha in [0.3, 0.75, 1.0] {
            let t = 0.05;
            let s = kernel_sup(1.0, t, &g, alpha).unwrap();
            assert!(s.doubling_change < DOUBLING_TOLERANCE);
            assert!(s.edge_ratio < 1e-6, "edge {}", s.edge_ratio);
            let direct = kernel_eval(1.0, t, &g, alpha, s.argmax_x).unwrap();
            assert!((direct.norm() - s.sup).abs() < 1e-9 * kernel_trivial_bound(1.0, h));
            for m in [-7i64, 0, 3, 40] {
                let k = kernel_eval(1.0, t, &g, alpha, m as f64 * h).unwrap();
                assert!(k.norm() <= s.sup * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn trivial_bound_holds() {
        let g = grid();
        let bound = kernel_trivial_bound(0.5, g.spacing());
        for t in [0.0, 0.1, 1.0] {
            assert!(kernel_sup(0.5, t, &g, 0.75).unwrap().sup <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn non_resonant_hessian() {
        let g = LatticeGrid::new(1, 1024, 32.0).unwrap();
        let floor = 2.0 * 0.3 * 4f64.powf(-0.7) * 0.4;
        for n in [1.0, 0.5, 0.125, 1.0 / 64.0] {
            assert!(hessian_ratio_min(0.3, n, &g) >= floor * (1.0 - 1e-9));
        }
        assert!(hessian_ratio_min(0.75, 1.0, &g) < 1e-3);
        assert!(band_contains_resonance(0.75, 1.0));
        assert!(!band_contains_resonance(0.75, 0.5));
        assert!(!band_contains_resonance(0.3, 1.0));
    }
}
