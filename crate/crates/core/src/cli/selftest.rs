use std::fmt::Write as _;

use serde::Serialize;

use crate::qmath::binary_entropy;
use crate::ree::{closed_form_family_ree, compute_ree_with, Branch};
use crate::states::NamedState;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub diff: Option<f64>,
    pub tol: Option<f64>,
    pub pass: bool,
}

fn numeric(name: &str, expected: f64, computed: Option<f64>, tol: f64) -> Row {
    let diff = computed.map(|c| (c - expected).abs());
    Row {
        name: name.into(),
        expected: format!("{expected:.12}"),
        computed: computed.map_or_else(|| "-".into(), |c| format!("{c:.12}")),
        diff,
        tol: Some(tol),
        pass: diff.is_some_and(|d| d < tol),
    }
}

fn label(name: &str, expected: &str, computed: &str) -> Row {
    Row {
        name: name.into(),
        expected: expected.into(),
        computed: computed.into(),
        diff: None,
        tol: None,
        pass: expected == computed,
    }
}

fn failed(name: &str, why: impl std::fmt::Display) -> Row {
    Row { name: name.into(), expected: "-".into(), computed: format!("error: {why}"), diff: None, tol: None, pass: false }
}

pub fn rows(tol: &Tolerances) -> Vec<Row> {
    let mut rows = Vec::new();
    let ree_of = |s: &NamedState| s.x_params().and_then(|p| compute_ree_with(&p, tol));

    // Bell-diagonal with |β3⟩ maximal, through the A2 = A3 solver
    let bell = NamedState::BellDiagonal([0.1, 0.1, 0.7, 0.1]);
    match ree_of(&bell) {
        Ok(r) => {
            rows.push(label("bell_diagonal branch", "theorem2", r.branch.as_str()));
            let expected = std::f64::consts::LN_2 - binary_entropy(0.7).unwrap_or(f64::NAN);
            rows.push(numeric("bell_diagonal ree = ln2 - H(l3)", expected, r.ree, 1e-9));
        }
        Err(e) => rows.push(failed("bell_diagonal", e)),
    }

    for (name, fam) in [
        ("vp ree vs closed form", NamedState::Vp([0.5, 0.3, 0.2])),
        ("horodecki ree vs closed form", NamedState::Horodecki([0.6, 0.25, 0.15])),
    ] {
        match (ree_of(&fam), closed_form_family_ree(&fam)) {
            (Ok(r), Ok(c)) => rows.push(numeric(name, c, r.ree, 1e-10)),
            (Err(e), _) | (_, Err(e)) => rows.push(failed(name, e)),
        }
    }

    // Horodecki as the p2 = 0 member of the four-weight family
    let h = NamedState::Theorem2Example { p1: 0.6, p2: 0.0, q1: 0.25, q2: 0.15 };
    match (ree_of(&h), closed_form_family_ree(&NamedState::Horodecki([0.6, 0.25, 0.15]))) {
        (Ok(r), Ok(c)) => rows.push(numeric("theorem2_example p2=0 vs horodecki", c, r.ree, 1e-10)),
        (Err(e), _) | (_, Err(e)) => rows.push(failed("theorem2_example p2=0", e)),
    }

    // example with a non-maximally entangled pure part
    let (p, a2, q1, q2): (f64, f64, f64, f64) = (0.6, 0.7, 0.25, 0.15);
    let t1 = NamedState::Theorem1Example { p, alpha: a2.sqrt(), beta: (1.0 - a2).sqrt(), q1, q2 };
    match ree_of(&t1) {
        Ok(r) => {
            rows.push(label("theorem1_example branch", "theorem1", r.branch.as_str()));
            let css_r2 = p * a2 + q1;
            rows.push(numeric("theorem1_example css r2", css_r2, r.css.map(|c| c.r2), 1e-12));
            let big = 0.5 * (1.0 + (p * p + (q1 - q2) * (2.0 * p * (2.0 * a2 - 1.0) + (q1 - q2))).sqrt());
            let expected = binary_entropy(css_r2).unwrap_or(f64::NAN) - binary_entropy(big).unwrap_or(f64::NAN);
            rows.push(numeric("theorem1_example ree", expected, r.ree, 1e-10));
        }
        Err(e) => rows.push(failed("theorem1_example", e)),
    }

    // explicit populations of the four-weight family
    let (p1, p2, q1, q2) = (0.55, 0.05, 0.3, 0.1);
    let t2 = NamedState::Theorem2Example { p1, p2, q1, q2 };
    match ree_of(&t2) {
        Ok(r) => {
            rows.push(label("theorem2_example branch", "theorem2", r.branch.as_str()));
            let (sp, dp) = (p1 + p2, p1 - p2);
            let denom = 8.0 * (p1 + q1 + q2) * (p2 + q1 + q2);
            let delta = |a: f64, b: f64| {
                0.25 * dp * (4.0 * a * b * (sp + 2.0 * a) * (sp + 2.0 * b) + dp * dp * (a - b).powi(2)).sqrt()
            };
            let r1_of = |a: f64, b: f64| {
                (2.0 * a * (sp + 2.0 * a) * (sp + 2.0 * a + 2.0 * b) - dp * dp * (a - b) + 4.0 * delta(a, b)) / denom
            };
            let r2 = ((sp + 2.0 * q1) * (sp + 2.0 * q2) * (sp + 2.0 * q1 + 2.0 * q2) - dp * dp - 4.0 * delta(q1, q2))
                / denom;
            let css = r.css;
            rows.push(numeric("theorem2_example css r1", r1_of(q1, q2), css.map(|c| c.r1), 1e-10));
            rows.push(numeric("theorem2_example css r2", r2, css.map(|c| c.r2), 1e-10));
            rows.push(numeric("theorem2_example css r4", r1_of(q2, q1), css.map(|c| c.r4), 1e-10));
        }
        Err(e) => rows.push(failed("theorem2_example", e)),
    }

    match ree_of(&NamedState::Rains) {
        Ok(r) => {
            rows.push(label("rains branch", "theorem3", r.branch.as_str()));
            let css = r.css;
            rows.push(numeric("rains css r1 = 1/6", 1.0 / 6.0, css.map(|c| c.r1), 1e-9));
            rows.push(numeric("rains css r2 = 55/144", 55.0 / 144.0, css.map(|c| c.r2), 1e-9));
            rows.push(numeric("rains css r3 = 41/144", 41.0 / 144.0, css.map(|c| c.r3), 1e-9));
            rows.push(numeric("rains css r4 = 1/6", 1.0 / 6.0, css.map(|c| c.r4), 1e-9));
            rows.push(numeric("rains css y = 1/6", 1.0 / 6.0, css.map(|c| c.y), 1e-9));
        }
        Err(e) => rows.push(failed("rains", e)),
    }

    let six = NamedState::Theorem3Example { p: 0.66, q1: 0.16, q2: 0.03, q3: 0.06, q4: 0.09 };
    match ree_of(&six) {
        Ok(r) => {
            rows.push(label("theorem3_example branch", "theorem3", r.branch.as_str()));
            let w = r.css.map(|c| c.mixture_weights());
            let expected = [0.306933, 0.252429, 0.132241, 0.139198, 0.169198];
            for (k, name) in ["p'", "q1'", "q2'", "q3'", "q4'"].iter().enumerate() {
                rows.push(numeric(&format!("theorem3_example css {name}"), expected[k], w.map(|w| w[k]), 1e-5));
            }
        }
        Err(e) => rows.push(failed("theorem3_example", e)),
    }

    let fail = NamedState::Theorem3Example { p: 0.66, q1: 0.05, q2: 0.07, q3: 0.04, q4: 0.18 };
    match ree_of(&fail) {
        Ok(r) => rows.push(label("failure case branch", Branch::AnsatzFailure.as_str(), r.branch.as_str())),
        Err(e) => rows.push(failed("failure case", e)),
    }
    rows
}

pub fn render(rows: &[Row]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<40} {:>16} {:>16} {:>10} {:>8}  status",
        "check", "expected", "computed", "|diff|", "tol"
    );
    for r in rows {
        let diff = r.diff.map_or_else(|| "-".into(), |d| format!("{d:.2e}"));
        let tol = r.tol.map_or_else(|| "-".into(), |t| format!("{t:.0e}"));
        let _ = writeln!(
            s,
            "{:<40} {:>16} {:>16} {:>10} {:>8}  {}",
            r.name,
            r.expected,
            r.computed,
            diff,
            tol,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    let failures = rows.iter().filter(|r| !r.pass).count();
    let _ = writeln!(s, "{} checks, {} failed", rows.len(), failures);
    s
}
