//! Gauss–Legendre rules and adaptive panel integration for smooth integrands.

use num_complex::Complex64;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes_weights(&self) -> (&[f64], &[f64]) {
        (&self.nodes, &self.weights)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        r * self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(c + r * x)).sum::<f64>()
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, a: f64, b: f64, f: F) -> Complex64 {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(c + r * x) * *w)
            .sum::<Complex64>()
            * r
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection with a 20-point rule compared against its two halves.
/// Returns the integral and an error estimate.
pub fn adaptive_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> (Complex64, f64) {
    let rule = GaussLegendre::new(20);
    fn rec<F: Fn(f64) -> Complex64>(
        rule: &GaussLegendre,
        f: &F,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: usize,
    ) -> (Complex64, f64) {
        let m = 0.5 * (a + b);
        let left = rule.integrate_complex(a, m, f);
        let right = rule.integrate_complex(m, b, f);
        let err = (left + right - whole).norm();
        if err <= tol || depth == 0 {
            return (left + right, err);
        }
        let (l, el) = rec(rule, f, a, m, left, 0.5 * tol, depth - 1);
        let (r, er) = rec(rule, f, m, b, right, 0.5 * tol, depth - 1);
        (l + r, el + er)
    }
    let whole = rule.integrate_complex(a, b, f);
    rec(&rule, f, a, b, whole, tol, max_depth)
}
