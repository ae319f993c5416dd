//! Property-based invariants over randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use sdqkd::eavesdrop::{success_prob_closed_form, success_prob_type1, success_prob_type2};
use sdqkd::keyrate::{joint_ab, joint_abe};
use sdqkd::qmath::{partial_trace, ComplexMatrix, HilbertLabel, Subsystem, TOL_PSD};
use sdqkd::scenario::{bob_kraus, eve_povm, ScenarioParams, Structure};

fn psd_matrix(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim).prop_map(move |entries| {
        let b = ComplexMatrix::from_fn(dim, dim, |i, j| {
            let (re, im) = entries[i * dim + j];
            Complex64::new(re, im)
        });
        b.adjoint().matmul(&b)
    })
}

/// (q0, s, eta_ab, alpha0, alpha1, u0, u1) drawn inside the feasible region.
fn feasible_params() -> impl Strategy<Value = ScenarioParams> {
    (
        0.05f64..0.95,
        0.0f64..0.9,
        0.0f64..1.0,
        0.0f64..1.0,
        0.0f64..1.0,
        0.0f64..1.0,
        0.0f64..1.0,
    )
        .prop_map(|(q0, s, eta, fa0, fa1, fu0, fu1)| {
            let s2 = s * s;
            let alpha0 = fa0 * (1.0 - s2);
            let alpha1 = fa1 * (1.0 - s2 / (1.0 - alpha0));
            let u0 = fu0 * (1.0 - s2);
            let u1 = fu1 * (1.0 - s2 / (1.0 - u0));
            ScenarioParams::new(q0, 1.0 - q0, s, eta, alpha0, alpha1, u0, u1)
                .expect("constructed inside the feasible region")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_trace_of_product_factorizes(a in psd_matrix(2), b in psd_matrix(3)) {
        let label = HilbertLabel::new(vec![
            Subsystem::new("A", &["0", "1"]),
            Subsystem::new("B", &["0", "1", "2"]),
        ]).unwrap();
        let joint = a.kron(&b);
        let reduced = partial_trace(&joint, &label, &["A"]).unwrap();
        let expected = a.scale(b.trace());
        prop_assert!(reduced.max_abs_diff(&expected) < 1e-10);
        // trace is preserved by tracing out the rest as well
        let other = partial_trace(&joint, &label, &["B"]).unwrap();
        prop_assert!((other.trace() - joint.trace()).norm() < 1e-10);
    }

    #[test]
    fn measurements_complete_and_positive(p in feasible_params()) {
        let kraus = bob_kraus(p.s(), p.alpha0(), p.alpha1()).unwrap();
        prop_assert!(kraus.completeness_residual() < 1e-10);
        let povm = eve_povm(p.s(), p.u0(), p.u1()).unwrap();
        prop_assert!(povm.completeness_residual() < 1e-10);
        for e in 0..3 {
            prop_assert!(povm.element(e).is_psd(TOL_PSD));
        }
    }

    #[test]
    fn success_probability_routes_agree(p in feasible_params()) {
        let closed = success_prob_closed_form(&p);
        let t1 = success_prob_type1(&p).unwrap();
        let t2 = success_prob_type2(&p).unwrap();
        prop_assert!((closed - t1).abs() < 1e-12);
        prop_assert!((closed - t2).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&closed));
    }

    #[test]
    fn joint_tables_are_consistent(p in feasible_params()) {
        let abe = joint_abe(&p, Structure::TypeI).unwrap();
        abe.validate().unwrap();
        prop_assert!((abe.total_mass() - 1.0).abs() < 1e-12);
        let ab = abe.marginal(&["a", "b"]).unwrap();
        prop_assert!(ab.max_abs_diff(&joint_ab(&p)) < 1e-12);
    }
}
