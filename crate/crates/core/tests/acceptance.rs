//! One line per acceptance criterion; exits nonzero when any of them fails.

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xstate_ree::cli;
use xstate_ree::oracle::{oracle_validate, OracleConfig};
use xstate_ree::qmath::{binary_entropy, min_eig_pt, relative_entropy};
use xstate_ree::ree::{closed_form_family_ree, css_residuals, max_residual, ree_from_css};
use xstate_ree::states::{is_entangled, to_density_matrix};
use xstate_ree::{compute_ree, Branch, NamedState, ReeResult, XStateParams};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_params(rng: &mut ChaCha8Rng) -> XStateParams {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.01..1.0));
    let s: f64 = w.iter().sum();
    let (a1, a2, a3) = (w[0] / s, w[1] / s, w[2] / s);
    let a4 = 1.0 - a1 - a2 - a3;
    let d = rng.random_range(0.0..1.0) * (a2 * a3).sqrt();
    let phi = rng.random_range(-3.0..3.0);
    XStateParams::new(a1, a2, a3, a4, d, phi).expect("valid draw")
}

fn random_entangled(rng: &mut ChaCha8Rng) -> XStateParams {
    loop {
        let p = random_params(rng);
        if p.d * p.d > p.a1 * p.a4 + 1e-6 {
            return p;
        }
    }
}

/// Entangled draws whose analytic branch validates.
fn validated(rng: &mut ChaCha8Rng, n: usize) -> Vec<(XStateParams, ReeResult)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = random_entangled(rng);
        let r = compute_ree(&p).expect("compute");
        if r.branch.is_theorem() {
            out.push((p, r));
        }
    }
    out
}

fn simplex3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.01..1.0));
    let s: f64 = w.iter().sum();
    [w[0] / s, w[1] / s, 1.0 - w[0] / s - w[1] / s]
}

fn rains() -> Outcome {
    let p = NamedState::Rains.x_params().expect("rains");
    let start = Instant::now();
    let r = compute_ree(&p).expect("compute");
    let elapsed = start.elapsed();
    let Some(c) = r.css else { return outcome(false, format!("branch {}", r.branch)) };
    let expected = [1.0 / 6.0, 55.0 / 144.0, 41.0 / 144.0, 1.0 / 6.0, 1.0 / 6.0];
    let got = [c.r1, c.r2, c.r3, c.r4, c.y];
    let diff = expected.iter().zip(got).map(|(e, g)| (e - g).abs()).fold(0.0, f64::max);
    let pass = r.branch == Branch::Theorem3 && diff < 1e-9 && elapsed < Duration::from_millis(50);
    outcome(pass, format!("branch {}, max |diff| {diff:.1e} (tol 1e-9), {elapsed:.2?} (limit 50 ms)", r.branch))
}

fn six_digit_weights() -> Outcome {
    let s = NamedState::Theorem3Example { p: 0.66, q1: 0.16, q2: 0.03, q3: 0.06, q4: 0.09 };
    let r = compute_ree(&s.x_params().expect("params")).expect("compute");
    let Some(c) = r.css else { return outcome(false, format!("branch {}", r.branch)) };
    let expected = [0.306933, 0.252429, 0.132241, 0.139198, 0.169198];
    let w = c.mixture_weights();
    let diff = expected.iter().zip(w).map(|(e, g)| (e - g).abs()).fold(0.0, f64::max);
    outcome(diff < 1e-5, format!("weights {w:.6?}, max |diff| {diff:.1e} (tol 1e-5)"))
}

fn failure_detection() -> Outcome {
    let s = NamedState::Theorem3Example { p: 0.66, q1: 0.05, q2: 0.07, q3: 0.04, q4: 0.18 };
    let p = s.x_params().expect("params");
    let r = compute_ree(&p).expect("compute");
    let detected = r.branch == Branch::AnsatzFailure;
    let cfg = OracleConfig { restarts: 8, num_product_terms: 16, ..OracleConfig::default() };
    let report = oracle_validate(&p, &r, &cfg).expect("oracle");
    let v = report.fingerprint.violation();
    let pass = detected && v > 1e-3;
    outcome(
        pass,
        format!(
            "branch {}, oracle REE {:.8}, structure violation {v:.1e} (needs > 1e-3)",
            r.branch, report.oracle_ree
        ),
    )
}

fn closed_form_families() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = [0.0f64; 3];
    let mut bad_branch = 0;
    for _ in 0..100 {
        let l = simplex3(&mut rng);
        let vp = NamedState::Vp(l);
        let r = compute_ree(&vp.x_params().unwrap()).unwrap();
        bad_branch += usize::from(r.branch != Branch::Theorem1);
        let c = closed_form_family_ree(&vp).unwrap();
        worst[0] = worst[0].max(r.ree.map_or(f64::INFINITY, |v| (v - c).abs()));
    }
    let mut n = 0;
    while n < 100 {
        let [l1, l2, l3] = simplex3(&mut rng);
        if l1 * l1 / 4.0 <= l2 * l3 + 1e-6 {
            continue;
        }
        n += 1;
        let t2 = NamedState::Theorem2Example { p1: l1, p2: 0.0, q1: l2, q2: l3 };
        let r = compute_ree(&t2.x_params().unwrap()).unwrap();
        bad_branch += usize::from(r.branch != Branch::Theorem2);
        let c = closed_form_family_ree(&NamedState::Horodecki([l1, l2, l3])).unwrap();
        worst[1] = worst[1].max(r.ree.map_or(f64::INFINITY, |v| (v - c).abs()));
    }
    for _ in 0..100 {
        let l3 = rng.random_range(0.51..0.999);
        let l = rng.random_range(0.0..(1.0 - l3) / 2.0);
        let bd = NamedState::BellDiagonal([l, l, l3, 1.0 - 2.0 * l - l3]);
        let r = compute_ree(&bd.x_params().unwrap()).unwrap();
        bad_branch += usize::from(r.branch != Branch::Theorem2);
        let c = LN_2 - binary_entropy(l3).unwrap();
        worst[2] = worst[2].max(r.ree.map_or(f64::INFINITY, |v| (v - c).abs()));
    }
    let pass = bad_branch == 0 && worst[0] < 1e-10 && worst[1] < 1e-10 && worst[2] < 1e-9;
    outcome(
        pass,
        format!(
            "vp {:.1e} (tol 1e-10), horodecki {:.1e} (tol 1e-10), bell-diagonal {:.1e} (tol 1e-9), {bad_branch} wrong branches",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn oracle_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = OracleConfig { restarts: 8, num_product_terms: 16, ..OracleConfig::default() };
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (k, (p, r)) in validated(&mut rng, 50).into_iter().enumerate() {
        let cfg = OracleConfig { rng_seed: k as u64, ..cfg };
        let report = oracle_validate(&p, &r, &cfg).expect("oracle");
        worst = worst.max(report.difference.unwrap_or(f64::INFINITY));
    }
    let elapsed = start.elapsed();
    let pass = worst <= 5e-4 && elapsed <= Duration::from_secs(300);
    outcome(pass, format!("50 states, max |diff| {worst:.1e} (tol 5e-4), {elapsed:.1?} (limit 300 s)"))
}

fn residual_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut res, mut edge, mut ydef) = (0.0f64, 0.0f64, 0.0f64);
    for (p, r) in validated(&mut rng, 1000) {
        let c = r.css.unwrap();
        res = res.max(max_residual(&css_residuals(&c, &p).unwrap()));
        edge = edge.max(min_eig_pt(&c.density_matrix().unwrap()).unwrap().abs());
        ydef = ydef.max((c.y - (c.r1 * c.r4).sqrt()).abs());
    }
    let pass = res < 1e-8 && edge < 1e-9 && ydef < 1e-10;
    outcome(
        pass,
        format!("residual {res:.1e} (tol 1e-8), |edge| {edge:.1e} (tol 1e-9), |y - sqrt(r1 r4)| {ydef:.1e} (tol 1e-10)"),
    )
}

fn dual_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for (p, r) in validated(&mut rng, 1000) {
        let c = r.css.unwrap();
        let closed = ree_from_css(&p, &c).unwrap();
        let rho = to_density_matrix(&p).unwrap();
        let spectral = relative_entropy(&rho, &c.density_matrix().unwrap()).unwrap_or(f64::INFINITY);
        worst = worst.max((closed - spectral).abs());
    }
    outcome(worst < 1e-9, format!("max |diff| {worst:.1e} (tol 1e-9)"))
}

fn symmetry_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut swap = 0.0f64;
    let mut mismatched = 0;
    for (p, r) in validated(&mut rng, 300) {
        let q = compute_ree(&p.swap_a1_a4()).unwrap();
        match (r.ree, q.ree) {
            (Some(a), Some(b)) => swap = swap.max((a - b).abs()),
            _ => mismatched += 1,
        }
    }
    let mut family = 0.0f64;
    for _ in 0..300 {
        let [a, b, c] = simplex3(&mut rng);
        for (x, y) in [(NamedState::Vp([a, b, c]), NamedState::Vp([a, c, b])), (
            NamedState::Horodecki([a, b, c]),
            NamedState::Horodecki([a, c, b]),
        )] {
            let (u, v) = (closed_form_family_ree(&x).unwrap(), closed_form_family_ree(&y).unwrap());
            family = family.max((u - v).abs());
        }
    }
    let mut nonzero = 0;
    for k in 0..1000 {
        let mut p = random_params(&mut rng);
        if k % 4 == 0 {
            // boundary D² = A1 A4
            p.d = (p.a1 * p.a4).sqrt().min((p.a2 * p.a3).sqrt());
        }
        if is_entangled(&p) {
            continue;
        }
        let r = compute_ree(&p).unwrap();
        nonzero += usize::from(r.ree != Some(0.0) || r.branch != Branch::Separable);
    }
    let pass = swap < 1e-10 && mismatched == 0 && family < 1e-12 && nonzero == 0;
    outcome(
        pass,
        format!(
            "A1<->A4 {swap:.1e} (tol 1e-10, {mismatched} branch mismatches), l2<->l3 {family:.1e} (tol 1e-12), {nonzero} nonzero separable"
        ),
    )
}

fn capture(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("xree").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["selftest"],
        &["oracle", "--family", "rains", "--seed", "7"],
        &["scan", "--line", "0.66,0.16,0.03,0.06,0.09:0.66,0.05,0.07,0.04,0.18", "--points", "11"],
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for args in runs {
        let a = capture(args);
        let b = capture(args);
        let same = a == b && !a.1.is_empty();
        pass &= same;
        notes.push(format!("{} {}", args[0], if same { "identical" } else { "DIFFERS" }));
    }
    outcome(pass, notes.join(", "))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("rains regression", rains),
        ("six-digit css weights", six_digit_weights),
        ("failure detection", failure_detection),
        ("closed-form families", closed_form_families),
        ("oracle cross-validation", oracle_cross_validation),
        ("residual suite", residual_suite),
        ("dual-path ree", dual_path),
        ("symmetry suite", symmetry_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failed += usize::from(!o.pass);
        println!("{} {}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, k + 1, o.detail);
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
