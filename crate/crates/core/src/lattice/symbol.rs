use serde::{Deserialize, Serialize};

use super::grid::LatticeGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// `((4/h²) Σ_j sin²(hξ_j/2))^α`, the symbol of `(-Δ_h)^α`.
    Discrete,
    /// `|ξ|^{2α}`, the symbol of `(-Δ)^α`.
    Continuum,
}

/// Dispersion relation of the linear part of the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSymbol {
    alpha: f64,
    kind: SymbolKind,
}

impl DispersionSymbol {
    /// Validated constructor: `0 < α ≤ 1` and `α ≠ 1/2`.
    pub fn new(kind: SymbolKind, alpha: f64) -> Result<Self> {
        validate_alpha(alpha)?;
        Ok(Self { alpha, kind })
    }

    pub fn discrete(alpha: f64) -> Result<Self> {
        Self::new(SymbolKind::Discrete, alpha)
    }

    pub fn continuum(alpha: f64) -> Result<Self> {
        Self::new(SymbolKind::Continuum, alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    /// The same symbol family with the other kind.
    pub fn with_kind(&self, kind: SymbolKind) -> Self {
        Self { alpha: self.alpha, kind }
    }

    /// Evaluates the symbol at `ξ` on a lattice of spacing `h`.
    pub fn value(&self, h: f64, xi: &[f64]) -> f64 {
        match self.kind {
            SymbolKind::Discrete => discrete_laplacian_symbol(h, xi).powf(self.alpha),
            SymbolKind::Continuum => xi.iter().map(|x| x * x).sum::<f64>().powf(self.alpha),
        }
    }

    /// Symbol values at every stored frequency of `grid`.
    pub fn on_grid(&self, grid: &LatticeGrid) -> Vec<f64> {
        let d = grid.dim();
        let h = grid.spacing();
        grid.frequencies().map(|xi| self.value(h, &xi[..d])).collect()
    }
}

/// `(4/h²) Σ_j sin²(hξ_j/2)`, the symbol of `-Δ_h`.
pub fn discrete_laplacian_symbol(h: f64, xi: &[f64]) -> f64 {
    xi.iter().map(|x| (0.5 * h * x).sin().powi(2)).sum::<f64>() * 4.0 / (h * h)
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if (alpha - 0.5).abs() < 1e-12 {
        return Err(Error::Domain("alpha = 1/2 is excluded".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_half_and_out_of_range() {
        assert!(DispersionSymbol::discrete(0.5).is_err());
        assert!(DispersionSymbol::discrete(0.0).is_err());
        assert!(DispersionSymbol::discrete(1.2).is_err());
        assert!(DispersionSymbol::continuum(0.75).is_ok());
    }

    #[test]
    fn vanishes_only_at_origin() {
        let grid = LatticeGrid::new(2, 16, 4.0).unwrap();
        let s = DispersionSymbol::discrete(0.75).unwrap();
        let vals = s.on_grid(&grid);
        assert_eq!(vals[0], 0.0);
        assert!(vals[1..].iter().all(|&v| v > 0.0));
    }

    #[test]
    fn discrete_tends_to_continuum() {
        let xi = [1.3];
        for &alpha in &[0.3, 0.75, 1.0] {
            let d = DispersionSymbol::discrete(alpha).unwrap();
            let c = DispersionSymbol::continuum(alpha).unwrap();
            let target = c.value(1.0, &xi);
            let mut prev = f64::INFINITY;
            for k in 1..8 {
                let h = 0.5f64.powi(k);
                let err = (d.value(h, &xi) - target).abs();
                assert!(err < prev);
                prev = err;
            }
            assert!(prev < 1e-4 * target);
        }
    }
}
