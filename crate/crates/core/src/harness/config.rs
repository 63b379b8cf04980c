use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{AdmissiblePair, PairKind};
use crate::error::{Error, Result};
use crate::evolution::{BoundaryPolicy, EvolutionParams};
use crate::lattice::LatticeGrid;

/// Time step: an explicit value or `"auto"` for `min(1e-3, h_min²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DtPolicy {
    Fixed(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Auto(AutoTag::Auto)
    }
}

impl DtPolicy {
    pub fn resolve(&self, h_min: f64) -> f64 {
        match *self {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Auto(_) => (h_min * h_min).min(1e-3),
        }
    }
}

/// One Gaussian bump `amplitude · e^{iθ} · exp(-|x - c|² / (2 w²))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Named initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialDatum {
    /// Centered in the box unless `center` is given.
    Gaussian {
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default = "one")]
        amplitude: f64,
    },
    MultiBump { bumps: Vec<Bump> },
    /// A Gaussian envelope times a random trigonometric sum with frequencies
    /// `|ξ| ≤ bandwidth`. The seed defaults to the experiment seed.
    RandomBandLimited {
        width: f64,
        bandwidth: f64,
        #[serde(default = "default_modes")]
        modes: usize,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Zero,
}

/// A Strichartz pair for the `norms` study; `r = inf` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub q: f64,
    pub r: f64,
    pub kind: PairKind,
}

fn one() -> f64 {
    1.0
}
fn default_modes() -> usize {
    8
}
fn default_p() -> f64 {
    3.0
}
fn default_reference_multiplier() -> usize {
    4
}
fn default_qstar_delta() -> f64 {
    0.1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_workers() -> usize {
    1
}
fn default_true() -> bool {
    true
}
fn default_boundary_policy() -> BoundaryPolicy {
    BoundaryPolicy::Warn
}
fn default_kernel_alphas() -> Vec<f64> {
    vec![0.3, 0.75, 1.0]
}
fn default_kernel_bands() -> Vec<f64> {
    vec![1.0]
}
fn default_kernel_points() -> usize {
    1024
}
fn default_kernel_t_min() -> f64 {
    10.0
}
fn default_kernel_t_max() -> f64 {
    1000.0
}
fn default_kernel_samples() -> usize {
    16
}
fn default_window() -> f64 {
    1.0
}
fn default_per_unit() -> usize {
    64
}
fn default_conservation_samples() -> usize {
    100
}

/// Everything an experiment needs. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub alpha: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    pub lambda: f64,
    pub box_length: f64,
    /// Points per axis of each lattice, strictly increasing powers of two.
    pub grid_sizes: Vec<usize>,
    /// `h_ref = h_min / k` with `k ∈ {2, 4, 8}`.
    #[serde(default = "default_reference_multiplier")]
    pub reference_multiplier: usize,
    #[serde(default)]
    pub dt: DtPolicy,
    pub horizon: f64,
    /// Defaults to `[horizon]`; `t = 0` is always recorded.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    pub initial_datum: InitialDatum,
    #[serde(default = "default_qstar_delta")]
    pub qstar_delta: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub unsafe_params: bool,
    /// Boundary decay is always enforced at `t = 0`; this governs later snapshots.
    #[serde(default = "default_boundary_policy")]
    pub boundary_policy: BoundaryPolicy,
    /// Rerun the finest level at `dt/2` to bound the splitting error.
    #[serde(default = "default_true")]
    pub dt_check: bool,
    #[serde(default)]
    pub write_snapshots: bool,
    #[serde(default = "default_conservation_samples")]
    pub conservation_samples: usize,
    #[serde(default = "default_kernel_alphas")]
    pub kernel_alphas: Vec<f64>,
    #[serde(default = "default_kernel_bands")]
    pub kernel_bands: Vec<f64>,
    #[serde(default = "default_kernel_points")]
    pub kernel_points: usize,
    #[serde(default = "default_kernel_t_min")]
    pub kernel_t_min: f64,
    #[serde(default = "default_kernel_t_max")]
    pub kernel_t_max: f64,
    #[serde(default = "default_kernel_samples")]
    pub kernel_samples: usize,
    #[serde(default)]
    pub strichartz_pairs: Vec<PairSpec>,
    #[serde(default = "default_window")]
    pub strichartz_window: f64,
    #[serde(default = "default_per_unit")]
    pub strichartz_per_unit: usize,
}

impl ExperimentConfig {
    /// The reference scenario: `d = 1`, `p = 3`, Gaussian of width 1 on a box of
    /// length 32, `M ∈ {64, …, 1024}`, `h_ref = h_min/4`, `dt = 1e-3`, `T = 1`.
    pub fn standard(alpha: f64, lambda: f64) -> Self {
        let text = format!(
            "dimension = 1\nalpha = {alpha:?}\nlambda = {lambda:?}\nbox_length = 32.0\n\
             grid_sizes = [64, 128, 256, 512, 1024]\ndt = 1e-3\nhorizon = 1.0\n\
             [initial_datum]\nkind = \"gaussian\"\nwidth = 1.0\n"
        );
        Self::from_toml_str(&text).expect("standard scenario is well formed")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Structural checks plus parameter admissibility (unless `unsafe_params`).
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if !(1..=3).contains(&self.dimension) {
            return cfg(format!("dimension must be 1, 2 or 3, got {}", self.dimension));
        }
        if self.grid_sizes.is_empty() {
            return cfg("grid_sizes must not be empty".into());
        }
        if self.grid_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return cfg("grid_sizes must be strictly increasing".into());
        }
        for &m in &self.grid_sizes {
            LatticeGrid::new(self.dimension, m, self.box_length).map_err(|e| Error::Config(e.to_string()))?;
        }
        if ![2, 4, 8].contains(&self.reference_multiplier) {
            return cfg(format!("reference_multiplier must be 2, 4 or 8, got {}", self.reference_multiplier));
        }
        if let DtPolicy::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return cfg(format!("dt must be positive, got {dt}"));
            }
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return cfg(format!("horizon must be positive, got {}", self.horizon));
        }
        let times = self.times();
        if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| *t < 0.0 || *t > self.horizon * (1.0 + 1e-12)) {
            return cfg("snapshot_times must be strictly increasing within [0, horizon]".into());
        }
        if self.workers == 0 {
            return cfg("workers must be at least 1".into());
        }
        if !(self.qstar_delta > 0.0) {
            return cfg("qstar_delta must be positive".into());
        }
        self.validate_datum()?;
        for &a in &self.kernel_alphas {
            crate::lattice::symbol::validate_alpha(a).map_err(|e| Error::Config(format!("kernel_alphas: {e}")))?;
        }
        if self.kernel_bands.iter().any(|n| !(*n > 0.0 && *n <= 1.0)) {
            return cfg("kernel_bands must lie in (0, 1]".into());
        }
        if !(self.kernel_t_min > 0.0 && self.kernel_t_max > self.kernel_t_min) || self.kernel_samples < 2 {
            return cfg("kernel time window must satisfy 0 < t_min < t_max with at least 2 samples".into());
        }
        for pair in &self.strichartz_pairs {
            AdmissiblePair::new(pair.q, pair.r, self.dimension, pair.kind)
                .map_err(|e| Error::Config(format!("strichartz_pairs: {e}")))?;
        }
        self.params().validate(self.dimension).map_err(|e| Error::Config(e.to_string()))
    }

    fn validate_datum(&self) -> Result<()> {
        let d = self.dimension;
        let bad = |m: &str| Err(Error::Config(format!("initial_datum: {m}")));
        match &self.initial_datum {
            InitialDatum::Gaussian { width, center, .. } => {
                if !(*width > 0.0) {
                    return bad("width must be positive");
                }
                if center.as_ref().is_some_and(|c| c.len() != d) {
                    return bad("center must have one coordinate per dimension");
                }
            }
            InitialDatum::MultiBump { bumps } => {
                if bumps.iter().any(|b| b.center.len() != d || !(b.width > 0.0)) {
                    return bad("each bump needs a positive width and a center per dimension");
                }
            }
            InitialDatum::RandomBandLimited { width, bandwidth, modes, .. } => {
                if !(*width > 0.0 && *bandwidth >= 0.0) || *modes == 0 {
                    return bad("width and mode count must be positive, bandwidth nonnegative");
                }
            }
            InitialDatum::Zero => {}
        }
        Ok(())
    }

    pub fn finest(&self) -> usize {
        *self.grid_sizes.last().expect("validated non-empty")
    }

    pub fn grids(&self) -> Result<Vec<LatticeGrid>> {
        self.grid_sizes.iter().map(|&m| LatticeGrid::new(self.dimension, m, self.box_length)).collect()
    }

    pub fn reference_grid(&self) -> Result<LatticeGrid> {
        LatticeGrid::new(self.dimension, self.finest() * self.reference_multiplier, self.box_length)
    }

    pub fn h_min(&self) -> f64 {
        self.box_length / self.finest() as f64
    }

    pub fn params(&self) -> EvolutionParams {
        EvolutionParams {
            alpha: self.alpha,
            p: self.p,
            lambda: self.lambda,
            dt: self.dt.resolve(self.h_min()),
            horizon: self.horizon,
            unsafe_params: self.unsafe_params,
        }
    }

    /// Snapshot times with `0` first.
    pub fn times(&self) -> Vec<f64> {
        let mut t = if self.snapshot_times.is_empty() { vec![self.horizon] } else { self.snapshot_times.clone() };
        if t.first() != Some(&0.0) {
            t.insert(0, 0.0);
        }
        t
    }

    /// SHA-256 of the canonical JSON form, hex encoded. Output location and
    /// worker count do not affect results and are left out.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        canonical.workers = 1;
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }

    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
        dimension = 1
        alpha = 1.0
        lambda = 1.0
        box_length = 32.0
        grid_sizes = [64, 128]
        horizon = 1.0
        initial_datum = { kind = "gaussian", width = 1.0 }
    "#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_toml_str(BASE).unwrap();
        c.validate().unwrap();
        assert_eq!(c.p, 3.0);
        assert_eq!(c.dt, DtPolicy::default());
        assert_eq!(c.params().dt, 1e-3f64.min((0.25f64).powi(2)));
        assert_eq!(c.times(), vec![0.0, 1.0]);
        assert_eq!(c.reference_grid().unwrap().points_per_axis(), 512);
        assert_eq!(c.kernel_alphas, vec![0.3, 0.75, 1.0]);
    }

    #[test]
    fn explicit_dt_and_pairs() {
        let text = format!("{BASE}\ndt = 0.002\nstrichartz_pairs = [{{ q = 6.0, r = inf, kind = \"resonance\" }}]\n");
        let c = ExperimentConfig::from_toml_str(&text).unwrap();
        c.validate().unwrap();
        assert_eq!(c.params().dt, 0.002);
        assert!(c.strichartz_pairs[0].r.is_infinite());
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(ExperimentConfig::from_toml_str(&format!("{BASE}\nbogus = 1\n")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{BASE}\ndt = \"sometimes\"\n")).is_err());
        let c = ExperimentConfig::from_toml_str(&BASE.replace("[64, 128]", "[128, 64]")).unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_toml_str(&BASE.replace("alpha = 1.0", "alpha = 0.5")).unwrap();
        assert!(c.validate().is_err());
        let c = ExperimentConfig::from_toml_str(&BASE.replace("lambda = 1.0", "lambda = -1.0\np = 7.0")).unwrap();
        assert!(c.validate().is_err());
        let mut c = c;
        c.unsafe_params = true;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::from_toml_str(BASE).unwrap();
        let b = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.seed = 1;
        assert_ne!(a.hash(), c.hash());
        let mut d = a.clone();
        d.output_dir = "elsewhere".into();
        d.workers = 4;
        assert_eq!(a.hash(), d.hash());
    }
}
