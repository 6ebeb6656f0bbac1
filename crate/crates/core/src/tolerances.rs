//! Numerical thresholds used by the solvers and their validation.
//!
//! The defaults reproduce the library's documented behavior. A TOML file with
//! any subset of the fields can override them; the CLI reads its path from
//! `REE_TOL_OVERRIDE`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const OVERRIDE_ENV: &str = "REE_TOL_OVERRIDE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Populations below this count as zero, and `|A2 − A3|` below this routes to Theorem 2.
    pub branch_zero: f64,
    /// `|A2 − A3|` below this (but above `branch_zero`) is cross-checked against Theorem 2.
    pub near_degenerate: f64,
    /// Largest acceptable stationarity residual.
    pub residual_max: f64,
    /// Largest acceptable `|λ_min(π^Γ)|`.
    pub edge: f64,
    /// Largest acceptable gap between the closed-form and spectral REE.
    pub dual_path: f64,
    /// Residual of `y² − D y + r2 (r1 − A1)` used to pick the Theorem 2 sign.
    pub theorem2_quadratic: f64,
    /// Residual of `(r2−r3)(A2−r2) + 2y(D−y) − 2 r2 (r1−A1)` used to pick the Theorem 3 sign.
    pub theorem3_sign: f64,
    /// Grid size of the Theorem 3 root scan.
    pub grid_points: usize,
    /// Bracket width at which bisection stops.
    pub bisection: f64,
    /// Below this `z`, `ℓ/z` is evaluated by its series.
    pub series_z: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            branch_zero: 1e-12,
            near_degenerate: 1e-8,
            residual_max: 1e-8,
            edge: 1e-9,
            dual_path: 1e-9,
            theorem2_quadratic: 1e-10,
            theorem3_sign: 1e-8,
            grid_points: 2000,
            bisection: 1e-13,
            series_z: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn from_toml(text: &str) -> Result<Self> {
        let t: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if t.grid_points < 2 {
            return Err(Error::Parse("grid_points must be at least 2".into()));
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Defaults, or the file named by `REE_TOL_OVERRIDE` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(OVERRIDE_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }
}
