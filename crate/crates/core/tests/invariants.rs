mod common;

use asym_mms::flow::{prox_step, q_laplacian, DEFAULT_TAUS};
use asym_mms::hopflax::hopf_lax;
use asym_mms::slope::{
    ascending_slope, descending_slope, generate_curves, minimal_weak_upper_gradient, path_integral, CurvePolicy, DEFAULT_CURVE_CAP,
};
use asym_mms::transport::{optimal_transport, Measure};
use asym_mms::{Field, Space};
use common::*;
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (Space, Field, u64)> {
    (2usize..9, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = rng(seed);
        let s = random_space(&mut r, n, 0.4, true);
        let f = random_field(&mut r, n, -1.0, 1.0);
        (s, f, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn slopes_are_positively_homogeneous((s, f, _) in instance(), c in 0.1f64..5.0) {
        let (a, b) = (ascending_slope(&s, &f).unwrap(), ascending_slope(&s, &f.scale(c)).unwrap());
        for i in 0..s.len() {
            prop_assert!((b[i] - c * a[i]).abs() <= 1e-12 * (1.0 + b[i].abs()));
        }
        // negation swaps ascending and descending slopes
        let d = descending_slope(&s, &f.neg()).unwrap();
        for i in 0..s.len() {
            prop_assert!((d[i] - a[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn hopf_lax_is_below_f_and_monotone_in_t((s, f, _) in instance(), p in 1.2f64..3.0, t in 0.01f64..2.0) {
        let a = hopf_lax(&s, &f, t, p).unwrap();
        let b = hopf_lax(&s, &f, 2.0 * t, p).unwrap();
        for i in 0..s.len() {
            prop_assert!(a.q_values[i] <= f[i] + 1e-14);
            prop_assert!(b.q_values[i] <= a.q_values[i] + 1e-14);
        }
    }

    #[test]
    fn wasserstein_triangle_and_order((s, _, seed) in instance(), p in 1.0f64..3.0) {
        let mut r = rng(seed ^ 0x5eed);
        let n = s.len();
        let (a, b, c) = (random_measure(&mut r, n), random_measure(&mut r, n), random_measure(&mut r, n));
        let w = |x: &Measure<f64>, y: &Measure<f64>, p: f64| optimal_transport(&s, x, y, p).unwrap().value;
        prop_assert!(w(&a, &c, p) <= w(&a, &b, p) + w(&b, &c, p) + 1e-10);
        prop_assert!(w(&a, &b, 1.0) <= w(&a, &b, p) + 1e-10);
        // the p-th root amplifies roundoff, so test the cost itself
        prop_assert!(optimal_transport(&s, &a, &a, p).unwrap().cost.abs() <= 1e-12);
    }

    #[test]
    fn weak_gradient_ignores_constants_and_is_feasible((s, f, _) in instance(), c in -3.0f64..3.0) {
        let fam = generate_curves(&s, CurvePolicy::Edges, DEFAULT_CURVE_CAP).unwrap();
        let g = minimal_weak_upper_gradient(&s, &f, &fam, 2.0, 1e-11).unwrap();
        let h = minimal_weak_upper_gradient(&s, &f.add(&Field::constant(s.len(), c)), &fam, 2.0, 1e-11).unwrap();
        prop_assert!((g.energy - h.energy).abs() <= 1e-8 * (1.0 + g.energy));
        for path in &fam.paths {
            let rise = f[path.end()] - f[path.start()];
            prop_assert!(path_integral(&s, &g.field, path).unwrap() >= rise - 1e-8);
        }
    }

    #[test]
    fn larger_family_never_lowers_the_energy((s, f, _) in instance()) {
        let edges = generate_curves(&s, CurvePolicy::Edges, DEFAULT_CURVE_CAP).unwrap();
        let longer = generate_curves(&s, CurvePolicy::PathsUpToLength(2), DEFAULT_CURVE_CAP).unwrap();
        let a = minimal_weak_upper_gradient(&s, &f, &edges, 2.0, 1e-11).unwrap();
        let b = minimal_weak_upper_gradient(&s, &f, &longer, 2.0, 1e-11).unwrap();
        prop_assert!(b.energy >= a.energy * (1.0 - 1e-8) - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prox_step_preserves_mass_and_bounds((s, f, _) in instance(), tau in 0.01f64..1.0, q in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let g = prox_step(&s, &f, tau, q, 1e-11).unwrap().field;
        let m = s.measure();
        prop_assert!((g.integral(m) - f.integral(m)).abs() <= 1e-9);
        prop_assert!(g.max() <= f.max() + 1e-9 && g.min() >= f.min() - 1e-9);
    }

    #[test]
    fn laplacian_scales_like_q_minus_one((s, f, _) in instance(), c in 0.5f64..3.0) {
        let q = 2.5;
        let a = q_laplacian(&s, &f, q, &DEFAULT_TAUS, 1e-12).unwrap().field;
        let b = q_laplacian(&s, &f.scale(c), q, &DEFAULT_TAUS, 1e-12).unwrap().field;
        let k = c.powf(q - 1.0);
        let top = a.values().iter().fold(1e-12f64, |x, v| x.max(v.abs()));
        for i in 0..s.len() {
            prop_assert!((b[i] - k * a[i]).abs() <= 1e-6 * k * top);
        }
    }
}
