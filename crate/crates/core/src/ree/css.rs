//! The closest-separable-state ansatz, its stationarity conditions and the
//! closed-form relative entropy against it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmath::{xlnx, CMat4, DensityMatrix, SUPPORT_LEAK_TOL};
use crate::states::{x_matrix, XStateParams};

/// Candidate closest separable state
///
/// ```text
/// ⎡r1  0         0        0 ⎤
/// ⎢0   r2        y e^{iφ} 0 ⎥
/// ⎢0   y e^{-iφ} r3       0 ⎥
/// ⎣0   0         0        r4⎦
/// ```
///
/// together with the Lagrange multiplier `x` of the stationarity conditions and
/// the derived quantities `z = √((r2−r3)² + 4 r1 r4)`, `ell = ln((r2+r3+z)/(r2+r3−z))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CssSolution {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub y: f64,
    pub phi: f64,
    pub x: f64,
    pub z: f64,
    pub ell: f64,
}

impl CssSolution {
    pub fn new(r1: f64, r2: f64, r3: f64, r4: f64, y: f64, phi: f64, x: f64) -> Self {
        let z = z_of(r1, r2, r3, r4);
        let ell = ell_of(r1, r2, r3, r4, z);
        Self { r1, r2, r3, r4, y, phi, x, z, ell }
    }

    pub fn with_phase(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    pub fn matrix(&self) -> CMat4 {
        x_matrix(self.r1, self.r2, self.r3, self.r4, self.y, self.phi)
    }

    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix())
    }

    /// `r2 r3 − r1 r4`, the determinant gap that must stay positive.
    pub fn gap(&self) -> f64 {
        self.r2 * self.r3 - self.r1 * self.r4
    }

    /// Weights of the CSS written as
    /// `p' |β3⟩⟨β3| + q1' |01⟩⟨01| + q2' |10⟩⟨10| + q3' |00⟩⟨00| + q4' |11⟩⟨11|`.
    pub fn mixture_weights(&self) -> [f64; 5] {
        [2.0 * self.y, self.r2 - self.y, self.r3 - self.y, self.r1, self.r4]
    }

    /// Largest violation among the ansatz invariants
    /// (normalization, `y = √(r1 r4)`, `y ≤ √(r2 r3)`).
    pub fn invariant_violation(&self) -> f64 {
        let norm = (self.r1 + self.r2 + self.r3 + self.r4 - 1.0).abs();
        let edge = (self.y - (self.r1 * self.r4).sqrt()).abs();
        let psd = (self.y - (self.r2 * self.r3).sqrt()).max(0.0);
        norm.max(edge).max(psd)
    }
}

pub(crate) fn z_of(r1: f64, r2: f64, r3: f64, r4: f64) -> f64 {
    ((r2 - r3).powi(2) + 4.0 * r1 * r4).sqrt()
}

/// `ln((s+z)/(s−z))` written as `ln((s+z)² / 4(r2 r3 − r1 r4))` to avoid the
/// cancellation in `s − z`.
pub(crate) fn ell_of(r1: f64, r2: f64, r3: f64, r4: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let gap = r2 * r3 - r1 * r4;
    if gap <= 0.0 {
        return f64::INFINITY;
    }
    ((r2 + r3 + z).powi(2) / (4.0 * gap)).ln()
}

/// `ℓ/z`, which tends to `2/(r2+r3)` as `z → 0`.
pub(crate) fn ell_over_z(s: f64, z: f64, ell: f64, series_z: f64) -> f64 {
    if z < series_z {
        let u2 = (z / s).powi(2);
        2.0 / s * (1.0 + u2 / 3.0 + u2 * u2 / 5.0 + u2 * u2 * u2 / 7.0)
    } else {
        ell / z
    }
}

/// Relative size below which `r2 r3 − r1 r4` is treated as zero, i.e. `π`
/// singular on its middle block with `ℓ = ∞`.
const GAP_ZERO: f64 = 1e-13;

fn gap_is_zero(c: &CssSolution, s: f64) -> bool {
    c.gap() <= GAP_ZERO * s * s
}

fn require_log_domain(c: &CssSolution) -> Result<f64> {
    let s = c.r2 + c.r3;
    if !(c.gap() >= -GAP_ZERO * s * s) || !(s > 0.0) {
        return Err(Error::LogDomain(format!(
            "r2 + r3 − z < 0 (r2 r3 − r1 r4 = {:e}); π is not positive semidefinite on its middle block",
            c.gap()
        )));
    }
    Ok(s)
}

/// Left-minus-right residuals of the five stationarity conditions
///
/// ```text
/// r1 − x r1r4/(r1+r4)                                       = A1
/// r4 − x r1r4/(r1+r4)                                       = A4
/// r2 + x 2r1r4/((r1+r4) z² ℓ) [2r1r4 ℓ + (r2−r3)(r2 ℓ − z)] = A2
/// r3 + x 2r1r4/((r1+r4) z² ℓ) [2r1r4 ℓ − (r2−r3)(r3 ℓ − z)] = A3
/// y  + x y/((r1+r4) z² ℓ) [2r1r4(r2+r3) ℓ + (r2−r3)² z]     = D
/// ```
///
/// When `r1 = r4 = 0` the ratios are taken in the limit `r1 = r4 = ε → 0`:
/// `r1 r4/(r1+r4) → 0`, `y/(r1+r4) → ½`.
pub fn css_residuals(c: &CssSolution, p: &XStateParams) -> Result<[f64; 5]> {
    css_residuals_with(c, p, crate::Tolerances::default().series_z)
}

pub(crate) fn css_residuals_with(c: &CssSolution, p: &XStateParams, series_z: f64) -> Result<[f64; 5]> {
    let s = require_log_domain(c)?;
    let (r1, r2, r3, r4, y, x) = (c.r1, c.r2, c.r3, c.r4, c.y, c.x);
    let z = z_of(r1, r2, r3, r4);
    let ell = ell_of(r1, r2, r3, r4, z);
    let q = ell_over_z(s, z, ell, series_z);
    let prod = r1 * r4;
    let m = r1 + r4;

    let (h, y_over_m) = if m == 0.0 { (0.0, 0.5) } else { (prod / m, y / m) };
    let prod_over_z2 = if z > 0.0 { prod / (z * z) } else { 0.25 };
    let d = r2 - r3;
    // (r2 − r3)/z² and (r2 − r3)²/z², both finite since z ≥ |r2 − r3|
    let d_over_z2 = if d == 0.0 { 0.0 } else { d / (z * z) };
    let d2_over_z2 = if d == 0.0 { 0.0 } else { (d / z).powi(2) };

    let bracket_2 = 2.0 * prod_over_z2 + d_over_z2 * (r2 - 1.0 / q);
    let bracket_3 = 2.0 * prod_over_z2 - d_over_z2 * (r3 - 1.0 / q);
    let bracket_d = 2.0 * s * prod_over_z2 + d2_over_z2 / q;

    Ok([
        r1 - x * h - p.a1,
        r4 - x * h - p.a4,
        r2 + x * 2.0 * h * bracket_2 - p.a2,
        r3 + x * 2.0 * h * bracket_3 - p.a3,
        y + x * y_over_m * bracket_d - p.d,
    ])
}

pub fn max_residual(res: &[f64; 5]) -> f64 {
    res.iter().fold(0.0f64, |a, r| a.max(r.abs()))
}

/// Eigenvalues `A±` of the middle block of `ρ`.
pub fn a_plus_minus(p: &XStateParams) -> (f64, f64) {
    let root = ((p.a2 - p.a3).powi(2) + 4.0 * p.d * p.d).sqrt();
    (0.5 * (p.a2 + p.a3 + root), 0.5 * (p.a2 + p.a3 - root))
}

fn weighted_ln(weight: f64, arg: f64, what: &str) -> Result<f64> {
    if weight == 0.0 {
        return Ok(0.0);
    }
    if !(arg > 0.0) {
        return Err(Error::LogDomain(format!("{what}: ln of {arg:e} with weight {weight:e}")));
    }
    Ok(weight * arg.ln())
}

/// Closed-form `tr ρ ln ρ − tr ρ ln π` for a state of the family and an ansatz CSS.
pub fn ree_from_css(p: &XStateParams, c: &CssSolution) -> Result<f64> {
    ree_from_css_with(p, c, crate::Tolerances::default().series_z)
}

pub(crate) fn ree_from_css_with(p: &XStateParams, c: &CssSolution, series_z: f64) -> Result<f64> {
    let (ap, am) = a_plus_minus(p);
    let rho_ln_rho = xlnx(p.a1) + xlnx(p.a4) + xlnx(ap) + xlnx(am);

    let s = require_log_domain(c)?;
    let z = z_of(c.r1, c.r2, c.r3, c.r4);
    let k = (p.a2 - p.a3) * (c.r2 - c.r3) + 4.0 * p.d * c.y;
    let middle = if gap_is_zero(c, s) {
        // π has a null vector in the middle block; ρ must not see it
        let mu_plus = 0.5 * (s + z);
        let mu_minus = c.gap().max(0.0) / mu_plus;
        let w_plus = 0.5 * (p.a2 + p.a3) + 0.5 * k / z;
        let w_minus = 0.5 * (p.a2 + p.a3) - 0.5 * k / z;
        let minus = if w_minus.abs() <= SUPPORT_LEAK_TOL {
            0.0
        } else {
            weighted_ln(w_minus, mu_minus, "ρ weight on the null vector of π")?
        };
        weighted_ln(w_plus, mu_plus, "ρ weight on the range of π")? + minus
    } else {
        let q = ell_over_z(s, z, ell_of(c.r1, c.r2, c.r3, c.r4, z), series_z);
        weighted_ln(0.5 * (p.a2 + p.a3), c.gap(), "(A2+A3)/2 ln(r2 r3 − r1 r4)")? + 0.5 * k * q
    };
    let rho_ln_pi = weighted_ln(p.a1, c.r1, "A1 ln r1")? + weighted_ln(p.a4, c.r4, "A4 ln r4")? + middle;
    Ok(rho_ln_rho - rho_ln_pi)
}
