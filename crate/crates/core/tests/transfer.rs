use std::f64::consts::TAU;

use dnls_core::analysis::power_fit;
use dnls_core::harness::checks::corpus_field;
use dnls_core::lattice::{lp_norm, sobolev_norm};
use dnls_core::quadrature::GaussLegendre;
use dnls_core::transfer::{cross_l2_distance, discretize, interpolate, ContinuumField, InterpolantField};
use dnls_core::{LatticeField, LatticeGrid};
use num_complex::Complex64;

fn slope(points: &[(f64, f64)]) -> f64 {
    let (h, e): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    power_fit(&h, &e).unwrap().exponent
}

fn mode(grid: LatticeGrid, k: f64) -> ContinuumField {
    let l = grid.box_length();
    ContinuumField::from_fn(grid, |x| Complex64::from_polar(1.0, TAU * k * x[0] / l))
}

#[test]
fn constants_survive_both_transfers() {
    for dim in 1..=3 {
        let reference = LatticeGrid::new(dim, 16, 2.0).unwrap();
        let c = Complex64::new(0.3, -1.1);
        let f = ContinuumField::from_fn(reference, |_| c);
        let coarse = LatticeGrid::new(dim, 8, 2.0).unwrap();
        let fh = discretize(&f, &coarse).unwrap();
        assert!(fh.values().iter().all(|v| (v - c).norm() < 1e-13));
        let g = interpolate(&fh);
        assert!((g.eval(&[0.37, 1.91, 0.05][..dim]) - c).norm() < 1e-13);
    }
}

#[test]
fn single_mode_transfer_rate() {
    // Cell averages sit half a cell away from the sites the interpolant
    // attaches them to, so the smooth-case order is one.
    let reference = LatticeGrid::new(1, 8192, 16.0).unwrap();
    let f = mode(reference, 3.0);
    let points: Vec<(f64, f64)> = [32usize, 64, 128, 256, 512]
        .iter()
        .map(|&m| {
            let g = LatticeGrid::new(1, m, 16.0).unwrap();
            (g.spacing(), cross_l2_distance(&interpolate(&discretize(&f, &g).unwrap()), &f).unwrap())
        })
        .collect();
    let rate = slope(&points);
    assert!(rate >= 0.95, "slope {rate}");
}

#[test]
fn point_sampled_mode_converges_at_second_order() {
    let reference = LatticeGrid::new(1, 8192, 16.0).unwrap();
    let f = mode(reference, 3.0);
    let points: Vec<(f64, f64)> = [32usize, 64, 128, 256, 512]
        .iter()
        .map(|&m| {
            let g = LatticeGrid::new(1, m, 16.0).unwrap();
            let samples = mode(g, 3.0).samples();
            (g.spacing(), cross_l2_distance(&interpolate(&samples), &f).unwrap())
        })
        .collect();
    let rate = slope(&points);
    assert!(rate >= 1.95, "slope {rate}");
}

/// `‖p_h(|u|^{p-1}u) - |p_h u|^{p-1} p_h u‖_{L²}` by Gauss–Legendre on every cell.
fn distributive_defect(u: &LatticeField, p: f64) -> f64 {
    let grid = *u.grid();
    let h = grid.spacing();
    let power = |z: Complex64| z * z.norm().powf(p - 1.0);
    let linear = interpolate(u);
    let nonlinear: InterpolantField = interpolate(&u.map(power));
    let rule = GaussLegendre::new(12);
    let mut sum = 0.0;
    for m in 0..grid.points_per_axis() {
        let a = m as f64 * h;
        sum += rule.integrate(a, a + h, |x| (nonlinear.eval(&[x]) - power(linear.eval(&[x]))).norm_sqr());
    }
    sum.sqrt()
}

#[test]
fn almost_distributive_constant_is_stable() {
    // Independent samples on every grid: rough fields keep h^α ‖u‖_{H^α} of
    // order ‖u‖, so the constant is meaningful at every scale.
    for alpha in [0.75, 1.0] {
        for p in [2.0, 3.0] {
            let constants: Vec<f64> = [128usize, 256, 512, 1024]
                .iter()
                .map(|&m| {
                    let grid = LatticeGrid::new(1, m, 8.0).unwrap();
                    (0..12)
                        .map(|s| {
                            let u = corpus_field(grid, 50 * m as u64 + s);
                            let bound = grid.spacing().powf(alpha)
                                * u.max_abs().powf(p - 1.0)
                                * sobolev_norm(&u, alpha, false).unwrap();
                            distributive_defect(&u, p) / bound
                        })
                        .fold(0.0, f64::max)
                })
                .collect();
            for w in constants.windows(2) {
                let r = w[1] / w[0];
                assert!((0.9..=1.1).contains(&r), "α={alpha} p={p}: {constants:?}");
            }
        }
    }
}

#[test]
fn distributive_defect_vanishes_for_linear_power() {
    let grid = LatticeGrid::new(1, 64, 4.0).unwrap();
    let u = corpus_field(grid, 3);
    assert!(distributive_defect(&u, 1.0) < 1e-12 * lp_norm(&u, 2.0).unwrap());
}
