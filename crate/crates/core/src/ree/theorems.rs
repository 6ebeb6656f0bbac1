//! Solvers for the three parameter regimes of the X-state family.
//!
//! All solvers work on the phase-free state; the caller re-attaches `φ`.

use crate::error::{Error, Result};
use crate::qmath::{binary_entropy, xlnx, SUPPORT_LEAK_TOL};
use crate::ree::css::{
    css_residuals_with, ell_of, ell_over_z, max_residual, ree_from_css_with, z_of, CssSolution,
};
use crate::ree::{a_plus_minus, Branch, ReeResult};
use crate::states::{is_entangled, XStateParams};
use crate::tolerances::Tolerances;

/// Lower end of the `r1` scan sits this far above `A1`, keeping `x > 0`.
const R1_FLOOR_OFFSET: f64 = 1e-12;

fn require_entangled(p: &XStateParams) -> Result<()> {
    if is_entangled(p) {
        Ok(())
    } else {
        Err(Error::WrongBranch(format!(
            "state is separable (D² = {:e} ≤ A1 A4 = {:e})",
            p.d * p.d,
            p.a1 * p.a4
        )))
    }
}

/// Multiplier `x` from `r1 − x r1r4/(r1+r4) = A1`.
fn multiplier(r1: f64, r4: f64, a1: f64) -> f64 {
    (r1 - a1) * (r1 + r4) / (r1 * r4)
}

/// `A1 = A4 = 0`: the CSS is `A2 |01⟩⟨01| + A3 |10⟩⟨10|` and
/// `E_r = H(A2) − H(A+)`.
pub fn solve_theorem1(p: &XStateParams) -> Result<ReeResult> {
    solve_theorem1_with(p, &Tolerances::default())
}

pub fn solve_theorem1_with(p: &XStateParams, tol: &Tolerances) -> Result<ReeResult> {
    if p.a1 >= tol.branch_zero || p.a4 >= tol.branch_zero {
        return Err(Error::WrongBranch(format!(
            "theorem 1 needs A1 = A4 = 0, got A1 = {:e}, A4 = {:e}",
            p.a1, p.a4
        )));
    }
    require_entangled(p)?;

    let (hi, lo) = (p.a2.max(p.a3), p.a2.min(p.a3));
    let gap = hi - lo;
    let x = if gap > tol.branch_zero {
        2.0 * p.d / gap * (gap / lo).ln_1p()
    } else {
        2.0 * p.d / p.a2
    };
    let css = CssSolution::new(0.0, p.a2, p.a3, 0.0, 0.0, p.phi, x);
    let (a_plus, _) = a_plus_minus(p);
    let ree = binary_entropy(p.a2)? - binary_entropy(a_plus.min(1.0))?;
    let residual_max = max_residual(&css_residuals_with(&css, p, tol.series_z)?);
    Ok(ReeResult::solved(Branch::Theorem1, ree, css, residual_max, String::new()))
}

/// `A2 = A3` with at least one of `A1`, `A4` nonzero: closed-form CSS.
///
/// Both signs of `Δ` are tried; a candidate is kept when it satisfies
/// `y² − D y + r2 (r1 − A1) = 0`.
pub fn solve_theorem2(p: &XStateParams) -> Result<ReeResult> {
    solve_theorem2_with(p, &Tolerances::default())
}

pub fn solve_theorem2_with(p: &XStateParams, tol: &Tolerances) -> Result<ReeResult> {
    if p.a1 < tol.branch_zero && p.a4 < tol.branch_zero {
        return Err(Error::WrongBranch("theorem 2 needs A1 or A4 nonzero".into()));
    }
    if (p.a2 - p.a3).abs() >= tol.branch_zero {
        return Err(Error::WrongBranch(format!(
            "theorem 2 needs A2 = A3, got |A2 − A3| = {:e}",
            (p.a2 - p.a3).abs()
        )));
    }
    require_entangled(p)?;

    let (a1, a4, d) = (p.a1, p.a4, p.d);
    let a2 = 0.5 * (p.a2 + p.a3);
    let sum = a1 + a2 + a4;
    let f = 2.0 * (sum + d) * (sum - d);
    let delta = d * (d * d * (a1 - a4).powi(2) + 4.0 * a1 * a4 * (a1 + a2) * (a2 + a4)).sqrt();

    let omega1 = xlnx(a1) + xlnx(a4) + xlnx(a2 + d) + xlnx(a2 - d);
    let mut best: Option<(f64, CssSolution, f64)> = None;
    let mut notes = Vec::new();
    for sign in [1.0, -1.0] {
        let r1 = (2.0 * a1 * (a1 + a2) * sum - d * d * (a1 - a4) + sign * delta) / f;
        let r4 = (2.0 * a4 * (a2 + a4) * sum + d * d * (a1 - a4) + sign * delta) / f;
        let r2 = (2.0 * (a1 + a2) * (a2 + a4) * sum - d * d * (a1 + 2.0 * a2 + a4) - sign * delta) / f;
        if !(r1 > 0.0 && r4 > 0.0 && r2 > 0.0) {
            notes.push(format!("sign {sign:+}: non-positive population"));
            continue;
        }
        let y = (r1 * r4).sqrt();
        if y > r2 + tol.branch_zero || (y >= r2 && a2 - d > SUPPORT_LEAK_TOL) {
            notes.push(format!("sign {sign:+}: y ≥ r2"));
            continue;
        }
        let quad = y * y - d * y + r2 * (r1 - a1);
        if quad.abs() >= tol.theorem2_quadratic {
            notes.push(format!("sign {sign:+}: quadratic residual {quad:e}"));
            continue;
        }
        // A2 ln(r2² − y²) + D ln((r2+y)/(r2−y)), split so that A2 = D, r2 = y stays finite
        let minus = if a2 - d <= SUPPORT_LEAK_TOL { 0.0 } else { (a2 - d) * (r2 - y).ln() };
        let omega2 = a1 * r1.ln() + a4 * r4.ln() + (a2 + d) * (r2 + y).ln() + minus;
        let ree = omega1 - omega2;
        let css = CssSolution::new(r1, r2, r2, r4, y, p.phi, multiplier(r1, r4, a1));
        let keep = match &best {
            Some((b, _, _)) => ree < *b,
            None => true,
        };
        if keep {
            best = Some((ree, css, quad.abs()));
        }
    }
    let (ree, css, _) = best.ok_or_else(|| {
        Error::Internal(format!("theorem 2: no sign choice is consistent ({})", notes.join("; ")))
    })?;
    let residual_max = max_residual(&css_residuals_with(&css, p, tol.series_z)?);
    Ok(ReeResult::solved(Branch::Theorem2, ree, css, residual_max, notes.join("; ")))
}

/// One point of the reduced one-variable problem in `r1`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ReducedPoint {
    pub f: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub y: f64,
}

/// `r4`, `y`, `r2`, `r3` as functions of `r1`, plus the transcendental residual
///
/// ```text
/// f(r1) = ℓ − z (r1−A1)(r2−r3)² / [y(D−y) z² − 2 r1 r4 (r1−A1)(r2+r3)]
/// ```
///
/// `sign` selects `r2 = ¼[(4A1+3A2+A3) − 4r1 ± √Γ]` (and the opposite sign for
/// `r3`). Returns `None` outside the feasible region.
pub(crate) fn reduced_point(p: &XStateParams, r1: f64, sign: f64, series_z: f64) -> Option<ReducedPoint> {
    let (a1, a2, a3, a4, d) = (p.a1, p.a2, p.a3, p.a4, p.d);
    let r4 = r1 - (a1 - a4);
    if !(r4 > 0.0 && r1 > 0.0) {
        return None;
    }
    let y = (r1 * r4).sqrt();
    let gamma = 16.0 * d * y - 8.0 * (2.0 * a1 + a2 + a3 + 2.0 * a4) * r1
        + ((a2 - a3).powi(2) + 8.0 * a1 * (2.0 * a1 + a2 + a3));
    if !(gamma >= 0.0) {
        return None;
    }
    let root = gamma.sqrt();
    let r2 = 0.25 * ((4.0 * a1 + 3.0 * a2 + a3) - 4.0 * r1 + sign * root);
    let r3 = 0.25 * ((4.0 * a1 + a2 + 3.0 * a3) - 4.0 * r1 - sign * root);
    if !(r2 > 0.0 && r3 > 0.0) {
        return None;
    }
    let z = z_of(r1, r2, r3, r4);
    let s = r2 + r3;
    if !(r2 * r3 - r1 * r4 > 0.0) {
        return None;
    }
    let ell = z * ell_over_z(s, z, ell_of(r1, r2, r3, r4, z), series_z);
    let den = y * (d - y) * z * z - 2.0 * r1 * r4 * (r1 - a1) * s;
    let f = ell - z * (r1 - a1) * (r2 - r3).powi(2) / den;
    if !f.is_finite() {
        return None;
    }
    Some(ReducedPoint { f, r2, r3, r4, y })
}

/// `(r2 − r3)(A2 − r2) + 2y(D − y) − 2 r2 (r1 − A1)`.
pub(crate) fn sign_condition(p: &XStateParams, r1: f64, pt: &ReducedPoint) -> f64 {
    (pt.r2 - pt.r3) * (p.a2 - pt.r2) + 2.0 * pt.y * (p.d - pt.y) - 2.0 * pt.r2 * (r1 - p.a1)
}

/// General case: scan `r1` over `(A1, (1 + A1 − A4)/2)` on both sign branches,
/// bisect every sign change, keep roots that satisfy all five stationarity
/// conditions and return the one with the smallest relative entropy.
///
/// No surviving root is a defined outcome ([`Branch::AnsatzFailure`]): the
/// CSS of such a state is not of the ansatz form, or lies outside what the
/// scan resolves.
pub fn solve_theorem3(p: &XStateParams) -> Result<ReeResult> {
    solve_theorem3_with(p, &Tolerances::default())
}

pub fn solve_theorem3_with(p: &XStateParams, tol: &Tolerances) -> Result<ReeResult> {
    if p.a1 < tol.branch_zero && p.a4 < tol.branch_zero {
        return Err(Error::WrongBranch("theorem 3 needs A1 or A4 nonzero".into()));
    }
    if (p.a2 - p.a3).abs() < tol.branch_zero {
        return Err(Error::WrongBranch("theorem 3 needs A2 ≠ A3".into()));
    }
    require_entangled(p)?;

    let lo = p.a1 + R1_FLOOR_OFFSET;
    let hi = 0.5 * (1.0 + p.a1 - p.a4);
    if !(hi > lo) {
        return Ok(ReeResult::failure(format!("empty r1 interval ({lo}, {hi})")));
    }
    let n = tol.grid_points.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect();

    let mut accepted: Vec<(f64, CssSolution, f64)> = Vec::new();
    let mut brackets = 0usize;
    let mut rejected = Vec::new();
    for sign in [1.0, -1.0] {
        let values: Vec<Option<ReducedPoint>> =
            grid.iter().map(|&r1| reduced_point(p, r1, sign, tol.series_z)).collect();
        for i in 0..n - 1 {
            let (Some(a), Some(b)) = (values[i], values[i + 1]) else { continue };
            if a.f.signum() == b.f.signum() && a.f != 0.0 && b.f != 0.0 {
                continue;
            }
            brackets += 1;
            let Some(r1) = bisect(p, sign, grid[i], grid[i + 1], a.f, tol) else {
                rejected.push(format!("sign {sign:+} near r1={:.6}: bracket left feasible set", grid[i]));
                continue;
            };
            let Some(pt) = reduced_point(p, r1, sign, tol.series_z) else { continue };
            let cond = sign_condition(p, r1, &pt);
            if cond.abs() >= tol.theorem3_sign {
                rejected.push(format!("sign {sign:+} r1={r1:.9}: sign condition {cond:e}"));
                continue;
            }
            let css = CssSolution::new(r1, pt.r2, pt.r3, pt.r4, pt.y, p.phi, multiplier(r1, pt.r4, p.a1));
            let res = match css_residuals_with(&css, p, tol.series_z) {
                Ok(r) => max_residual(&r),
                Err(e) => {
                    rejected.push(format!("sign {sign:+} r1={r1:.9}: {e}"));
                    continue;
                }
            };
            if !(res < tol.residual_max) {
                rejected.push(format!("sign {sign:+} r1={r1:.9}: residual {res:e}"));
                continue;
            }
            match ree_from_css_with(p, &css, tol.series_z) {
                Ok(ree) => accepted.push((ree, css, res)),
                Err(e) => rejected.push(format!("sign {sign:+} r1={r1:.9}: {e}")),
            }
        }
    }

    let summary = format!(
        "{brackets} bracket(s), {} accepted root(s){}",
        accepted.len(),
        if rejected.is_empty() { String::new() } else { format!("; rejected: {}", rejected.join("; ")) }
    );
    match accepted.into_iter().min_by(|a, b| a.0.total_cmp(&b.0)) {
        Some((ree, css, res)) => Ok(ReeResult::solved(Branch::Theorem3, ree, css, res, summary)),
        None => Ok(ReeResult::failure(format!("no valid root of the reduced equation: {summary}"))),
    }
}

fn bisect(p: &XStateParams, sign: f64, mut a: f64, mut b: f64, mut fa: f64, tol: &Tolerances) -> Option<f64> {
    if fa == 0.0 {
        return Some(a);
    }
    while b - a > tol.bisection {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = reduced_point(p, m, sign, tol.series_z)?.f;
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::NamedState;

    fn t3(p: f64, q1: f64, q2: f64, q3: f64, q4: f64) -> XStateParams {
        NamedState::Theorem3Example { p, q1, q2, q3, q4 }.x_params().unwrap()
    }

    #[test]
    fn theorem1_vp_example() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = NamedState::Theorem1Example { p: 0.5, alpha: h, beta: h, q1: 0.3, q2: 0.2 }
            .x_params()
            .unwrap();
        let r = solve_theorem1(&p).unwrap();
        let css = r.css.unwrap();
        assert!((css.r2 - 0.55).abs() < 1e-15 && (css.r3 - 0.45).abs() < 1e-15);
        assert_eq!((css.r1, css.r4, css.y), (0.0, 0.0, 0.0));
        let lambda = 0.5 * (1.0 + (0.25f64 + 0.01).sqrt());
        let expected = binary_entropy(0.55).unwrap() - binary_entropy(lambda).unwrap();
        assert!((r.ree.unwrap() - expected).abs() < 1e-14);
        assert!(r.residual_max < 1e-12, "{}", r.residual_max);
    }

    #[test]
    fn theorem1_bell_state_is_ln2() {
        let p = XStateParams::new(0.0, 0.5, 0.5, 0.0, 0.5, 0.0).unwrap();
        let r = solve_theorem1(&p).unwrap();
        assert!((r.ree.unwrap() - std::f64::consts::LN_2).abs() < 1e-14);
        assert!((r.css.unwrap().x - 2.0).abs() < 1e-15);
        assert!(r.residual_max < 1e-12);
    }

    #[test]
    fn theorem1_pure_limit() {
        let a2: f64 = 0.5;
        for eps in [1e-4, 1e-6, 1e-8] {
            let p = XStateParams::new(0.0, a2, 1.0 - a2, 0.0, 0.5 - eps, 0.0).unwrap();
            let r = solve_theorem1(&p).unwrap();
            assert!((r.ree.unwrap() - binary_entropy(a2).unwrap()).abs() < 50.0 * eps.sqrt());
        }
    }

    #[test]
    fn theorem1_rejects_other_regimes() {
        let p = NamedState::Rains.x_params().unwrap();
        assert!(matches!(solve_theorem1(&p), Err(Error::WrongBranch(_))));
        let sep = XStateParams::new(0.0, 0.5, 0.5, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(solve_theorem1(&sep), Err(Error::WrongBranch(_))));
    }

    #[test]
    fn theorem2_horodecki_matches_closed_form() {
        let p = NamedState::Theorem2Example { p1: 0.6, p2: 0.0, q1: 0.25, q2: 0.15 }.x_params().unwrap();
        let r = solve_theorem2(&p).unwrap();
        let expected =
            crate::ree::closed_form_family_ree(&NamedState::Horodecki([0.6, 0.25, 0.15])).unwrap();
        assert!((r.ree.unwrap() - expected).abs() < 1e-12, "{:?} vs {expected}", r.ree);
        assert!(r.residual_max < 1e-10);
    }

    #[test]
    fn theorem2_symmetric_weights_give_symmetric_css() {
        let p = NamedState::Theorem2Example { p1: 0.6, p2: 0.1, q1: 0.15, q2: 0.15 }.x_params().unwrap();
        let c = solve_theorem2(&p).unwrap().css.unwrap();
        assert!((c.r1 - c.r4).abs() < 1e-14);
    }

    #[test]
    fn theorem2_swap_exchanges_r1_r4() {
        let p = NamedState::Theorem2Example { p1: 0.55, p2: 0.05, q1: 0.3, q2: 0.1 }.x_params().unwrap();
        let a = solve_theorem2(&p).unwrap();
        let b = solve_theorem2(&p.swap_a1_a4()).unwrap();
        let (ca, cb) = (a.css.unwrap(), b.css.unwrap());
        assert!((ca.r1 - cb.r4).abs() < 1e-14 && (ca.r4 - cb.r1).abs() < 1e-14);
        assert!((ca.r2 - cb.r2).abs() < 1e-14);
        assert!((a.ree.unwrap() - b.ree.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn theorem3_rains() {
        let p = NamedState::Rains.x_params().unwrap();
        let r = solve_theorem3(&p).unwrap();
        assert_eq!(r.branch, Branch::Theorem3);
        let c = r.css.unwrap();
        assert!((c.r1 - 1.0 / 6.0).abs() < 1e-9);
        assert!((c.r2 - 55.0 / 144.0).abs() < 1e-9);
        assert!((c.r3 - 41.0 / 144.0).abs() < 1e-9);
        assert!((c.y - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn theorem3_six_digit_example() {
        let r = solve_theorem3(&t3(0.66, 0.16, 0.03, 0.06, 0.09)).unwrap();
        let w = r.css.unwrap().mixture_weights();
        let expected = [0.306933, 0.252429, 0.132241, 0.139198, 0.169198];
        for (g, e) in w.iter().zip(expected) {
            assert!((g - e).abs() < 1e-5, "{w:?}");
        }
    }

    #[test]
    fn theorem3_reports_ansatz_failure() {
        let r = solve_theorem3(&t3(0.66, 0.05, 0.07, 0.04, 0.18)).unwrap();
        assert_eq!(r.branch, Branch::AnsatzFailure);
        assert!(r.ree.is_none());
    }

    #[test]
    fn reduced_point_sign_condition_holds_on_both_branches() {
        let p = NamedState::Rains.x_params().unwrap();
        for sign in [1.0, -1.0] {
            let pt = reduced_point(&p, 1.0 / 6.0, sign, 1e-6).unwrap();
            assert!(sign_condition(&p, 1.0 / 6.0, &pt).abs() < 1e-14);
        }
    }
}
