use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::symbol::validate_alpha;
use crate::lattice::LatticeGrid;

/// Which scaling line a Strichartz pair lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// `2/q + d/r = d/2`.
    Standard,
    /// `3/q + d/r = d/2`, the scaling forced by the lattice resonance.
    Resonance,
}

/// A validated exponent pair `(q, r)`; `f64::INFINITY` stands for `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    q: f64,
    r: f64,
    kind: PairKind,
}

fn recip(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64, dim: usize, kind: PairKind) -> Result<Self> {
        if !(q >= 2.0 && r >= 2.0) {
            return Err(Error::Domain(format!("exponents must be at least 2, got ({q}, {r})")));
        }
        let d = dim as f64;
        let a = match kind {
            PairKind::Standard => 2.0,
            PairKind::Resonance => 3.0,
        };
        let gap = a * recip(q) + d * recip(r) - 0.5 * d;
        if gap.abs() > 1e-12 {
            return Err(Error::Domain(format!("({q}, {r}) is off the {kind:?} line in d = {dim}")));
        }
        let endpoint = match kind {
            PairKind::Standard => 2,
            PairKind::Resonance => 3,
        };
        if q == 2.0 && r.is_infinite() && dim == endpoint {
            return Err(Error::Domain(format!("the endpoint (2, ∞) is excluded in d = {dim}")));
        }
        Ok(Self { q, r, kind })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    /// Derivative order on the datum in the uniform Strichartz bound:
    /// `(3 - 2α)/q` for resonance pairs, `2(1 - α)/q` for standard pairs.
    pub fn smoothing_loss(&self, alpha: f64) -> f64 {
        match self.kind {
            PairKind::Resonance => (3.0 - 2.0 * alpha) * recip(self.q),
            PairKind::Standard => 2.0 * (1.0 - alpha) * recip(self.q),
        }
    }
}

/// Time integrability exponent of the uniform `L^∞` bound:
/// `∞` for `d = 1, 1/2 < α ≤ 1`; `4α/(1 - 2α + δ)` for `d = 1, 1/3 < α < 1/2`;
/// `4/(d - 2 + δ)` for `d ∈ {2, 3}, α = 1`.
pub fn qstar(dim: usize, alpha: f64, delta: f64) -> Result<f64> {
    validate_alpha(alpha)?;
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("δ must be positive, got {delta}")));
    }
    match dim {
        1 if alpha > 0.5 => Ok(f64::INFINITY),
        1 if alpha > 1.0 / 3.0 => Ok(4.0 * alpha / (1.0 - 2.0 * alpha + delta)),
        2 | 3 if alpha == 1.0 => Ok(4.0 / (dim as f64 - 2.0 + delta)),
        _ => Err(Error::Domain(format!("no q_* for d = {dim}, α = {alpha}"))),
    }
}

/// Frequency `ξ_0 ≥ 0` where the lattice phase degenerates:
/// `cos(h ξ_0) = (1 - α)/α`, present only for `1/2 < α ≤ 1`.
pub fn stationary_point(alpha: f64, grid: &LatticeGrid) -> Option<f64> {
    let c = (1.0 - alpha) / alpha;
    if alpha > 0.5 && c <= 1.0 {
        Some(c.acos() / grid.spacing())
    } else {
        None
    }
}

/// `φ''(ξ)` of the kernel phase `x ξ - (4^α t / h^{2α}) sin^{2α}(h ξ / 2)`:
/// `2α 4^{α-1} t h^{2-2α} sin^{2α-2}(hξ/2) (1 - α - α cos hξ)`.
pub fn phase_second_derivative(alpha: f64, t: f64, h: f64, xi: f64) -> f64 {
    let s = (0.5 * h * xi).sin().abs();
    2.0 * alpha * 4f64.powf(alpha - 1.0) * t * h.powf(2.0 - 2.0 * alpha) * s.powf(2.0 * alpha - 2.0)
        * (1.0 - alpha - alpha * (h * xi).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pair_validation() {
        let inf = f64::INFINITY;
        assert!(AdmissiblePair::new(4.0, inf, 1, PairKind::Standard).is_ok());
        assert!(AdmissiblePair::new(6.0, inf, 1, PairKind::Resonance).is_ok());
        assert!(AdmissiblePair::new(2.0, inf, 2, PairKind::Standard).is_err());
        assert!(AdmissiblePair::new(2.0, inf, 3, PairKind::Resonance).is_err());
        assert!(AdmissiblePair::new(2.0, 6.0, 3, PairKind::Standard).is_ok());
        assert!(AdmissiblePair::new(4.0, 4.0, 1, PairKind::Standard).is_err());
        assert!(AdmissiblePair::new(1.5, 2.0, 1, PairKind::Standard).is_err());
        assert!(AdmissiblePair::new(inf, 2.0, 1, PairKind::Resonance).is_ok());
    }

    #[test]
    fn qstar_branches() {
        assert_eq!(qstar(1, 0.75, 0.1).unwrap(), f64::INFINITY);
        assert!((qstar(3, 1.0, 0.1).unwrap() - 4.0 / 1.1).abs() < 1e-12);
        assert!((qstar(1, 0.4, 0.1).unwrap() - 1.6 / 0.3).abs() < 1e-12);
        assert!(qstar(2, 0.75, 0.1).is_err());
        assert!(qstar(1, 0.3, 0.1).is_err());
    }

    #[test]
    fn stationary_points() {
        let grid = LatticeGrid::new(1, 64, 16.0).unwrap();
        let h = grid.spacing();
        assert!((stationary_point(0.75, &grid).unwrap() - (1.0f64 / 3.0).acos() / h).abs() < 1e-12);
        assert!(stationary_point(0.3, &grid).is_none());
        assert!((stationary_point(1.0, &grid).unwrap() - PI / (2.0 * h)).abs() < 1e-12);
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let (t, h) = (3.0f64, 0.25f64);
        for alpha in [0.3, 0.75, 1.0] {
            let phase = |xi: f64| -(4f64.powf(alpha) * t / h.powf(2.0 * alpha)) * (0.5 * h * xi).sin().abs().powf(2.0 * alpha);
            for xi in [0.7, 2.0, 5.5, -3.1] {
                let e = 1e-4;
                let fd = (phase(xi + e) - 2.0 * phase(xi) + phase(xi - e)) / (e * e);
                let exact = phase_second_derivative(alpha, t, h, xi);
                assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1.0), "α={alpha} ξ={xi}: {fd} vs {exact}");
            }
        }
        let grid = LatticeGrid::new(1, 64, 16.0).unwrap();
        let xi0 = stationary_point(0.75, &grid).unwrap();
        assert!(phase_second_derivative(0.75, 1.0, grid.spacing(), xi0).abs() < 1e-12);
    }
}
