use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Result of a straight-line fit in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, rms residual)`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Domain("least squares needs at least two paired samples".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("least squares needs distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    Ok((a, b, (rss / n).sqrt()))
}

/// Fits `value ≈ prefactor · scale^exponent` on positive data.
pub fn power_fit(scale: &[f64], value: &[f64]) -> Result<PowerFit> {
    if scale.iter().chain(value).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = scale.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = value.iter().map(|v| v.ln()).collect();
    let (a, b, residual) = ols(&lx, &ly)?;
    Ok(PowerFit { exponent: b, prefactor: a.exp(), residual })
}

/// Power-law decay fit of `(t, sup_x |K|)` samples. Requires at least 8
/// samples spanning two decades of `t`.
pub fn decay_fit(samples: &[(f64, f64)]) -> Result<PowerFit> {
    if samples.len() < 8 {
        return Err(Error::Sampling(format!("decay fit needs ≥ 8 samples, got {}", samples.len())));
    }
    let (t, v): (Vec<f64>, Vec<f64>) = samples.iter().copied().unzip();
    let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = t.iter().copied().fold(0.0, f64::max);
    if !(lo > 0.0 && hi / lo >= 100.0 * (1.0 - 1e-12)) {
        return Err(Error::Sampling(format!("decay fit needs two decades of t, got [{lo}, {hi}]")));
    }
    power_fit(&t, &v)
}

/// Least squares `y ≈ X β` for a handful of columns, via the normal equations.
/// Returns `β` and the RMS residual.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let k = rows.first().map_or(0, Vec::len);
    if rows.len() != y.len() || rows.len() < k || k == 0 || rows.iter().any(|r| r.len() != k) {
        return Err(Error::Domain("least squares needs at least as many rows as columns".into()));
    }
    let mut a = vec![vec![0.0; k + 1]; k];
    for (r, &v) in rows.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += r[i] * r[j];
            }
            a[i][k] += r[i] * v;
        }
    }
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        a.swap(col, pivot);
        let scale = a[col][col];
        if scale.abs() < 1e-300 {
            return Err(Error::Domain("least squares design is rank deficient".into()));
        }
        for row in 0..k {
            if row != col {
                let f = a[row][col] / scale;
                for c in col..=k {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, v)| (v - r.iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>()).powi(2))
        .sum();
    Ok((beta, (rss / rows.len() as f64).sqrt()))
}

/// `n` log-uniform points on `[a, b]`, endpoints included.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let samples: Vec<(f64, f64)> = log_space(10.0, 1000.0, 16).into_iter().map(|t| (t, 2.5 * t.powf(-1.0 / 3.0))).collect();
        let fit = decay_fit(&samples).unwrap();
        assert!((fit.exponent + 1.0 / 3.0).abs() < 1e-12);
        assert!((fit.prefactor - 2.5).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn joint_regression_recovers_plane() {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..5 {
            for t in [1.0, 2.0, 4.0] {
                let lh = -(i as f64) * 0.7;
                rows.push(vec![1.0, lh, t]);
                y.push(0.3 + 0.5 * lh + 0.25 * t);
            }
        }
        let (beta, res) = least_squares(&rows, &y).unwrap();
        for (b, e) in beta.iter().zip([0.3, 0.5, 0.25]) {
            assert!((b - e).abs() < 1e-12);
        }
        assert!(res < 1e-12);
        let flat: Vec<Vec<f64>> = (0..4).map(|_| vec![1.0, 1.0]).collect();
        assert!(least_squares(&flat, &[1.0; 4]).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let few: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 1.0)).collect();
        assert!(decay_fit(&few).is_err());
        let narrow: Vec<(f64, f64)> = log_space(10.0, 500.0, 16).into_iter().map(|t| (t, t)).collect();
        assert!(decay_fit(&narrow).is_err());
        let mut neg: Vec<(f64, f64)> = log_space(10.0, 1000.0, 16).into_iter().map(|t| (t, t)).collect();
        neg[3].1 = 0.0;
        assert!(matches!(decay_fit(&neg), Err(Error::Domain(_))));
    }
}
