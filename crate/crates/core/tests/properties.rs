use num_complex::Complex64;
use proptest::prelude::*;
use xstate_ree::qmath::{min_eig_pt, relative_entropy, CMat4};
use xstate_ree::ree::{ree_from_css, solve_theorem1};
use xstate_ree::states::{from_density_matrix, is_entangled, to_density_matrix};
use xstate_ree::{compute_ree, Branch, CssSolution, DensityMatrix, XStateParams};

fn family() -> impl Strategy<Value = XStateParams> {
    (0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0, 0.01f64..1.0, 0.0f64..1.0, -3.0f64..3.0).prop_map(
        |(w1, w2, w3, w4, t, phi)| {
            let s = w1 + w2 + w3 + w4;
            let (a1, a2, a3) = (w1 / s, w2 / s, w3 / s);
            let a4 = 1.0 - a1 - a2 - a3;
            XStateParams::new(a1, a2, a3, a4, t * (a2 * a3).sqrt(), phi).unwrap()
        },
    )
}

fn entangled_family() -> impl Strategy<Value = XStateParams> {
    family().prop_filter("entangled", |p| p.d * p.d > p.a1 * p.a4 + 1e-6)
}

fn full_rank() -> impl Strategy<Value = DensityMatrix> {
    proptest::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
        let g = CMat4::from_fn(|i, j| Complex64::new(v[2 * (4 * i + j)], v[2 * (4 * i + j) + 1]));
        let m = g * g.adjoint() + CMat4::identity() * Complex64::new(1e-3, 0.0);
        let t: f64 = (0..4).map(|i| m[(i, i)].re).sum();
        DensityMatrix::new(m / Complex64::new(t, 0.0)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn klein_inequality(rho in full_rank(), sigma in full_rank()) {
        prop_assert!(relative_entropy(&rho, &sigma).unwrap() >= -1e-12);
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_agrees_with_the_coherence_test(p in family()) {
        let margin = p.d * p.d - p.a1 * p.a4;
        prop_assume!(margin.abs() > 1e-10);
        let pt = min_eig_pt(&to_density_matrix(&p).unwrap()).unwrap();
        prop_assert_eq!(is_entangled(&p), pt < 0.0, "margin {} pt {}", margin, pt);
    }

    #[test]
    fn matrix_round_trip(p in family()) {
        let q = from_density_matrix(&to_density_matrix(&p).unwrap()).unwrap();
        for (a, b) in [(p.a1, q.a1), (p.a2, q.a2), (p.a3, q.a3), (p.a4, q.a4), (p.d, q.d)] {
            prop_assert!((a - b).abs() < 1e-15);
        }
        let dphi = (p.phi - q.phi).rem_euclid(std::f64::consts::TAU);
        prop_assert!(p.d == 0.0 || dphi.min(std::f64::consts::TAU - dphi) < 1e-12);
    }

    #[test]
    fn phase_does_not_change_the_value(p in entangled_family(), phi in -3.0f64..3.0) {
        let a = compute_ree(&p).unwrap();
        let b = compute_ree(&XStateParams { phi, ..p }).unwrap();
        prop_assert_eq!(a.branch, b.branch);
        if let (Some(x), Some(y)) = (a.ree, b.ree) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn exchanging_a1_and_a4(p in entangled_family()) {
        let a = compute_ree(&p).unwrap();
        let b = compute_ree(&p.swap_a1_a4()).unwrap();
        if let (Some(x), Some(y)) = (a.ree, b.ree) {
            prop_assert!((x - y).abs() < 1e-10, "{} vs {}", x, y);
        }
    }

    #[test]
    fn separable_inputs_give_exactly_zero(p in family()) {
        prop_assume!(!is_entangled(&p));
        let r = compute_ree(&p).unwrap();
        prop_assert_eq!(r.branch, Branch::Separable);
        prop_assert_eq!(r.ree, Some(0.0));
    }

    #[test]
    fn value_grows_with_the_coherence(p in entangled_family(), t in 0.0f64..1.0) {
        let weaker = XStateParams { d: p.d * t, ..p };
        if let (Some(hi), Some(lo)) = (compute_ree(&p).unwrap().ree, compute_ree(&weaker).unwrap().ree) {
            prop_assert!(hi >= lo - 1e-12, "{} < {}", hi, lo);
        }
    }

    #[test]
    fn css_beats_other_separable_x_states(p in entangled_family(), u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
        let r = compute_ree(&p).unwrap();
        prop_assume!(r.branch.is_theorem());
        let rho = to_density_matrix(&p).unwrap();
        // a separable state of the same shape: y ≤ √(r1 r4)
        let (r1, r4) = (0.02 + 0.2 * u, 0.02 + 0.2 * v);
        let r2 = (1.0 - r1 - r4) * (0.2 + 0.6 * w);
        let r3 = 1.0 - r1 - r4 - r2;
        let y = (r1 * r4).sqrt().min((r2 * r3).sqrt());
        let pi = CssSolution::new(r1, r2, r3, r4, y, p.phi, 0.0).density_matrix().unwrap();
        prop_assert!(relative_entropy(&rho, &pi).unwrap() >= r.ree.unwrap() - 1e-10);
    }

    #[test]
    fn vanishing_corners_approach_the_rank_two_formula(a2 in 0.05f64..0.95, t in 0.05f64..1.0) {
        let a3 = 1.0 - a2;
        let d = t * (a2 * a3).sqrt() * (1.0 - 1e-6);
        let limit = solve_theorem1(&XStateParams::new(0.0, a2, a3, 0.0, d, 0.0).unwrap()).unwrap().ree.unwrap();
        let eps = 1e-9;
        let p = XStateParams::new(eps, a2 - eps, a3 - eps, eps, d, 0.0).unwrap();
        if let Some(v) = compute_ree(&p).unwrap().ree {
            prop_assert!((v - limit).abs() < 1e-6, "{} vs {}", v, limit);
        }
    }

    #[test]
    fn closed_form_matches_spectral_value(p in entangled_family()) {
        let r = compute_ree(&p).unwrap();
        if let Some(css) = r.css {
            let closed = ree_from_css(&p, &css).unwrap();
            let spectral = relative_entropy(&to_density_matrix(&p).unwrap(), &css.density_matrix().unwrap()).unwrap();
            prop_assert!((closed - spectral).abs() < 1e-9);
        }
    }
}
