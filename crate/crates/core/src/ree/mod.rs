//! Relative entropy of entanglement for the X-state family.
//!
//! [`compute_ree`] classifies the state, dispatches to the matching solver and
//! validates whatever it returns against the stationarity conditions, the edge
//! condition on `π^Γ` and an independent spectral evaluation of `S(ρ‖π)`.

mod css;
mod theorems;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use css::{a_plus_minus, css_residuals, max_residual, ree_from_css, CssSolution};
pub use theorems::{
    solve_theorem1, solve_theorem1_with, solve_theorem2, solve_theorem2_with, solve_theorem3,
    solve_theorem3_with,
};

pub(crate) use css::{css_residuals_with, ree_from_css_with};

use crate::error::{Error, Result};
use crate::qmath::{binary_entropy, min_eig_pt, relative_entropy, xlnx};
use crate::states::{is_entangled, to_density_matrix, NamedState, XStateParams};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Separable,
    Theorem1,
    Theorem2,
    Theorem3,
    AnsatzFailure,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Separable => "separable",
            Self::Theorem1 => "theorem1",
            Self::Theorem2 => "theorem2",
            Self::Theorem3 => "theorem3",
            Self::AnsatzFailure => "ansatz_failure",
        }
    }

    pub fn is_theorem(&self) -> bool {
        matches!(self, Self::Theorem1 | Self::Theorem2 | Self::Theorem3)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of an REE computation. `ree` is in nats and absent on
/// [`Branch::AnsatzFailure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReeResult {
    pub ree: Option<f64>,
    pub css: Option<CssSolution>,
    pub branch: Branch,
    pub residual_max: f64,
    pub edge_min_eig: Option<f64>,
    pub diagnostics: String,
}

impl ReeResult {
    pub(crate) fn solved(branch: Branch, ree: f64, css: CssSolution, residual_max: f64, diagnostics: String) -> Self {
        Self { ree: Some(ree), css: Some(css), branch, residual_max, edge_min_eig: None, diagnostics }
    }

    pub(crate) fn failure(diagnostics: String) -> Self {
        Self {
            ree: None,
            css: None,
            branch: Branch::AnsatzFailure,
            residual_max: f64::NAN,
            edge_min_eig: None,
            diagnostics,
        }
    }
}

pub fn compute_ree(p: &XStateParams) -> Result<ReeResult> {
    compute_ree_with(p, &Tolerances::default())
}

pub fn compute_ree_with(p: &XStateParams, tol: &Tolerances) -> Result<ReeResult> {
    let p = XStateParams::new(p.a1, p.a2, p.a3, p.a4, p.d, p.phi)?;
    if !is_entangled(&p) {
        let css = CssSolution::new(p.a1, p.a2, p.a3, p.a4, p.d, p.phi, 0.0);
        return Ok(ReeResult {
            ree: Some(0.0),
            css: Some(css),
            branch: Branch::Separable,
            residual_max: 0.0,
            edge_min_eig: None,
            diagnostics: String::new(),
        });
    }

    let q = p.canonical();
    let gap = (q.a2 - q.a3).abs();
    let mut result = if q.a1 < tol.branch_zero && q.a4 < tol.branch_zero {
        solve_theorem1_with(&q, tol)?
    } else if gap < tol.branch_zero {
        solve_theorem2_with(&q, tol)?
    } else {
        let mut r = solve_theorem3_with(&q, tol)?;
        if gap < tol.near_degenerate {
            r.diagnostics.push_str(&near_degenerate_cross_check(&q, &r, tol));
        }
        r
    };

    if result.branch.is_theorem() {
        if let Err(reason) = validate(&q, &mut result, tol) {
            let mut failed = ReeResult::failure(format!(
                "{} result failed validation: {reason}. {}",
                result.branch, result.diagnostics
            ));
            failed.residual_max = result.residual_max;
            failed.edge_min_eig = result.edge_min_eig;
            result = failed;
        }
    }
    if let Some(css) = result.css.as_mut() {
        css.phi = p.phi;
    }
    Ok(result)
}

fn near_degenerate_cross_check(q: &XStateParams, r: &ReeResult, tol: &Tolerances) -> String {
    let mid = 0.5 * (q.a2 + q.a3);
    let projected = XStateParams { a2: mid, a3: mid, ..*q };
    match (solve_theorem2_with(&projected, tol), r.ree) {
        (Ok(t2), Some(ree)) => format!(
            "; theorem 2 at the projected A2 = A3 midpoint gives {:.12} (|Δ| = {:e})",
            t2.ree.unwrap_or(f64::NAN),
            (t2.ree.unwrap_or(f64::NAN) - ree).abs()
        ),
        (Ok(t2), None) => format!(
            "; theorem 2 at the projected A2 = A3 midpoint gives {:.12}",
            t2.ree.unwrap_or(f64::NAN)
        ),
        (Err(e), _) => format!("; theorem 2 cross-check unavailable: {e}"),
    }
}

fn validate(q: &XStateParams, result: &mut ReeResult, tol: &Tolerances) -> std::result::Result<(), String> {
    let css = result.css.ok_or("no CSS")?;
    let ree = result.ree.ok_or("no REE value")?;

    let residuals = css_residuals_with(&css, q, tol.series_z).map_err(|e| e.to_string())?;
    let res = max_residual(&residuals);
    result.residual_max = res;
    if !(res < tol.residual_max) {
        return Err(format!("stationarity residual {res:e} ≥ {:e}", tol.residual_max));
    }
    let inv = css.invariant_violation();
    if !(inv < 1e-10) {
        return Err(format!("CSS invariants violated by {inv:e}"));
    }
    if css.r1 < q.a1 - tol.branch_zero {
        return Err(format!("multiplier not positive (r1 = {} < A1 = {})", css.r1, q.a1));
    }

    let pi = css.density_matrix().map_err(|e| format!("CSS is not a state: {e}"))?;
    let edge = min_eig_pt(&pi).map_err(|e| e.to_string())?;
    result.edge_min_eig = Some(edge);
    if !(edge.abs() < tol.edge) {
        return Err(format!("CSS is not an edge state (λ_min(π^Γ) = {edge:e})"));
    }

    let rho = to_density_matrix(q).map_err(|e| e.to_string())?;
    let spectral = relative_entropy(&rho, &pi).map_err(|e| e.to_string())?;
    let closed = ree_from_css_with(q, &css, tol.series_z).map_err(|e| e.to_string())?;
    for (name, v) in [("reported", ree), ("closed-form", closed)] {
        if !((v - spectral).abs() < tol.dual_path) {
            return Err(format!("{name} REE {v} disagrees with spectral S(ρ‖π) = {spectral}"));
        }
    }
    Ok(())
}

/// Closed-form REE of the Bell-diagonal (largest weight on `|β3⟩`), VP and
/// Horodecki reference states.
pub fn closed_form_family_ree(family: &NamedState) -> Result<f64> {
    // validates the simplex
    family.density_matrix()?;
    match *family {
        NamedState::BellDiagonal(l) => {
            if l.iter().any(|&v| v > l[2]) {
                return Err(Error::Domain(format!("bell_diagonal needs λ3 maximal, got {l:?}")));
            }
            Ok(std::f64::consts::LN_2 - binary_entropy(l[2])?)
        }
        NamedState::Vp([l1, l2, l3]) => {
            let big = 0.5 * (1.0 + (l1 * l1 + (l2 - l3).powi(2)).sqrt());
            Ok(binary_entropy(0.5 * l1 + l2)? - binary_entropy(big.min(1.0))?)
        }
        NamedState::Horodecki([l1, l2, l3]) => Ok(xlnx(l1) + xlnx(l2) + xlnx(l3)
            + 2.0 * binary_entropy(0.5 * l1 + l2)?
            - l1 * std::f64::consts::LN_2),
        other => Err(Error::Domain(format!("no closed form for family {}", other.name()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::NamedState;

    #[test]
    fn diagonal_state_is_separable() {
        let p = XStateParams::new(0.1, 0.4, 0.3, 0.2, 0.0, 0.0).unwrap();
        let r = compute_ree(&p).unwrap();
        assert_eq!(r.branch, Branch::Separable);
        assert_eq!(r.ree, Some(0.0));
        let css = r.css.unwrap();
        assert_eq!((css.r1, css.r2, css.r3, css.r4, css.y), (0.1, 0.4, 0.3, 0.2, 0.0));
    }

    #[test]
    fn rains_dispatches_to_theorem3() {
        let r = compute_ree(&NamedState::Rains.x_params().unwrap()).unwrap();
        assert_eq!(r.branch, Branch::Theorem3, "{}", r.diagnostics);
        assert!(r.edge_min_eig.unwrap().abs() < 1e-9);
    }

    #[test]
    fn vp_dispatches_to_theorem1() {
        let r = compute_ree(&NamedState::Vp([0.5, 0.3, 0.2]).x_params().unwrap()).unwrap();
        assert_eq!(r.branch, Branch::Theorem1);
        let lambda = 0.5 * (1.0 + 0.26f64.sqrt());
        let expected = binary_entropy(0.55).unwrap() - binary_entropy(lambda).unwrap();
        assert!((r.ree.unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn phase_is_reattached_and_value_unchanged() {
        let p = NamedState::Rains.x_params().unwrap();
        let rotated = XStateParams { phi: 0.7, ..p };
        let a = compute_ree(&p).unwrap();
        let b = compute_ree(&rotated).unwrap();
        assert_eq!(b.css.unwrap().phi, 0.7);
        assert!((a.ree.unwrap() - b.ree.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn bell_diagonal_closed_form_needs_lambda3_maximal() {
        assert!((closed_form_family_ree(&NamedState::BellDiagonal([0.0, 0.0, 1.0, 0.0])).unwrap()
            - std::f64::consts::LN_2)
            .abs()
            < 1e-15);
        assert!(matches!(
            closed_form_family_ree(&NamedState::BellDiagonal([0.5, 0.0, 0.3, 0.2])),
            Err(Error::Domain(_))
        ));
        assert!(matches!(closed_form_family_ree(&NamedState::Rains), Err(Error::Domain(_))));
    }

    #[test]
    fn near_degenerate_inputs_carry_a_cross_check() {
        let p = XStateParams::new(0.1, 0.35 + 2e-9, 0.35 - 2e-9, 0.2, 0.3, 0.0).unwrap();
        let r = compute_ree(&p).unwrap();
        assert!(r.diagnostics.contains("theorem 2"), "{}", r.diagnostics);
    }
}
