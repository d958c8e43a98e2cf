use cvwitness::corpus::full_corpus;
use cvwitness::exact::{parse_decimal, QuadraticNumber};
use cvwitness::homodyne::{analytic_tprime, augment_with_vacuum, build_network, estimate, sample};
use cvwitness::moments::{
    biseparable_threshold, full_separability_threshold, partition_series, symmetric_sum, Partition,
};
use cvwitness::oracle::wick::{normal_moment, partition_operator};
use cvwitness::oracle::{
    fock_verify_reorder, partition_moment_oracle, quadrature_moment_oracle, ContractionTable,
    ReorderSpec,
};
use cvwitness::ppt::pt_class1_check;
use cvwitness::states::{covariance_of, make_xi_state, CovarianceMatrix, GaussianPureState};
use cvwitness::witnesses::{classify, epr_moment_bound_check, t1_from_covariance, Verdict};
use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn spd_state() -> impl Strategy<Value = GaussianPureState> {
    (
        prop::array::uniform3(0.6f64..1.6),
        prop::array::uniform3(-0.5f64..0.5),
    )
        .prop_filter_map("state must validate", |(d, o)| {
            let l = Matrix3::new(d[0], 0.0, 0.0, o[0], d[1], 0.0, o[1], o[2], d[2]);
            let a = l * l.transpose();
            let rows = std::array::from_fn(|i| {
                std::array::from_fn(|j| if i <= j { a[(i, j)] } else { a[(j, i)] })
            });
            GaussianPureState::from_rows(rows).ok()
        })
}

fn partition() -> impl Strategy<Value = Partition> {
    (1usize..=3).prop_map(|k| Partition::new(k).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn oracles_agree_with_closed_form(state in spd_state(), p in partition()) {
        let series = partition_series(&state, p, 8).unwrap();
        for m in 1..=8 {
            let closed = series.value(m);
            let quad = quadrature_moment_oracle(&state, p, m).unwrap();
            prop_assert!((closed - quad).abs() <= 1e-8 * closed);
            if m <= 5 {
                let wick = partition_moment_oracle(&state, p, m).unwrap();
                prop_assert!((closed - wick).abs() <= 1e-8 * closed);
                prop_assert!((quad - wick).abs() <= 1e-8 * closed);
            }
        }
    }

    #[test]
    fn commutation_invariant(state in spd_state()) {
        prop_assert!(ContractionTable::pure_state(&state).commutation_defect() < 1e-12);
        let t = ContractionTable::from_covariance(&covariance_of(&state)).unwrap();
        prop_assert!(t.commutation_defect() < 1e-12);
    }

    #[test]
    fn phase_invariance(state in spd_state(), p in partition(), phi in 0.0f64..6.3) {
        let table = ContractionTable::pure_state(&state);
        let z = partition_operator(p);
        let base = normal_moment(&table, &z, 3).unwrap();
        let rotated = normal_moment(&table, &z.scaled(Complex64::from_polar(1.0, phi)), 3).unwrap();
        prop_assert!((base - rotated).abs() <= 1e-10 * base);
    }

    #[test]
    fn moments_exceed_one(state in spd_state()) {
        let s = symmetric_sum(&state, 12).unwrap();
        prop_assert!(s.exact_values().unwrap()[1..].iter().all(|v| *v > QuadraticNumber::one()));
        prop_assert!(!classify(&s).unwrap().unphysical_input);
    }

    #[test]
    fn affine_identity(state in spd_state()) {
        let s1 = symmetric_sum(&state, 1).unwrap().value(1);
        let w = t1_from_covariance(&covariance_of(&state)).unwrap();
        prop_assert!((s1 - w.first_order_moment()).abs() <= 1e-12);
        prop_assert!(w.t1 > 3.0);
    }

    #[test]
    fn ancilla_adds_three(state in spd_state()) {
        let g = covariance_of(&state);
        let t1 = t1_from_covariance(&g).unwrap().t1;
        let tp = analytic_tprime(&augment_with_vacuum(&g).unwrap(), &build_network()).unwrap();
        prop_assert!((tp - t1 - 3.0).abs() <= 1e-12);
    }

    #[test]
    fn reordering_on_fock(n in 0usize..5, m in 0usize..5, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let spec = ReorderSpec { n, m, c: Complex64::new(re, im) };
        prop_assert!(fock_verify_reorder(&spec, n + m + 6).unwrap());
    }

    #[test]
    fn decimal_parsing_is_exact(num in -100_000i64..100_000, places in 0u32..8) {
        let text = format!("{}", num as f64 / 10f64.powi(places as i32));
        let parsed = parse_decimal(&text).unwrap();
        let want: f64 = text.parse().unwrap();
        prop_assert_eq!(QuadraticNumber::from_rational(parsed).to_f64(), want);
    }
}

#[test]
fn threshold_chain() {
    let one = BigRational::one();
    for m in 1..=64 {
        let b = biseparable_threshold(m);
        assert!(one < b && b < full_separability_threshold(m));
    }
}

#[test]
fn epr_violation_decreases_with_order() {
    for r in [0.1, 0.5] {
        let ratios: Vec<f64> = (1..=6)
            .map(|n| {
                let c = epr_moment_bound_check(n, r).unwrap();
                assert!((c.value - c.closed_form).abs() <= 1e-9 * c.closed_form);
                c.value / c.bound
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn genuine_detections_are_class_one() {
    for state in full_corpus().unwrap() {
        let report = classify(&symmetric_sum(&state, 12).unwrap()).unwrap();
        if report.overall == Verdict::GenuineEntanglement {
            assert!(
                pt_class1_check(&covariance_of(&state)).unwrap().class1,
                "{:?}",
                state.matrix()
            );
        }
    }
}

#[test]
fn mode_symmetric_network_invariance() {
    let net = build_network();
    let g = covariance_of(&make_xi_state(0.6).unwrap());
    let base = analytic_tprime(&augment_with_vacuum(&g).unwrap(), &net).unwrap();
    for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
        let idx = |i: usize| if i < 3 { perm[i] } else { 3 + perm[i - 3] };
        let permuted = DMatrix::from_fn(6, 6, |r, c| g.gamma()[(idx(r), idx(c))]);
        let cov = CovarianceMatrix::new(permuted).unwrap();
        let t = analytic_tprime(&augment_with_vacuum(&cov).unwrap(), &net).unwrap();
        assert!((t - base).abs() <= 1e-12);
    }
}

#[test]
fn sampling_consistency_over_seeds() {
    let net = build_network();
    for xi in [0.0, 0.5] {
        let g = augment_with_vacuum(&covariance_of(&make_xi_state(xi).unwrap())).unwrap();
        let analytic = analytic_tprime(&g, &net).unwrap();
        let reports: Vec<_> = (0..20u64)
            .map(|seed| estimate(&sample(&g, &net, 10_000, seed).unwrap(), Some(analytic)).unwrap())
            .collect();
        let mean = reports.iter().map(|r| r.t_prime_estimate).sum::<f64>() / 20.0;
        let combined = (reports.iter().map(|r| r.std_error.powi(2)).sum::<f64>()).sqrt() / 20.0;
        assert!(
            (mean - analytic).abs() <= 4.0 * combined,
            "xi={xi}: {mean} vs {analytic}"
        );
    }
}
