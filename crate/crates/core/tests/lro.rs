use proptest::prelude::*;

use rgstep_core::lro::{
    gaussian_domination_check, infrared_check, integral_rep_check, log_partition_shifted,
    periodic_coupling, second_order_check, TorusModel,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_domination_random_fields(m in 2usize..5, gamma in 0.1..2.0f64, frac in 0.0..1.0f64,
                                         alpha in 1.05..1.95f64,
                                         h in prop::collection::vec(-2.0..2.0f64, 8)) {
        let model = TorusModel::new(m, gamma, gamma * frac, alpha).unwrap();
        prop_assert!(gaussian_domination_check(&model, &h[..2 * m]).unwrap());
    }

    #[test]
    fn infrared_bound_random_models(m in 2usize..5, gamma in 0.05..3.0f64, frac in 0.0..1.0f64,
                                    alpha in 1.05..1.95f64) {
        let model = TorusModel::new(m, gamma, gamma * frac, alpha).unwrap();
        for row in infrared_check(&model).unwrap() {
            prop_assert!(row.holds, "{row:?}");
        }
    }

    #[test]
    fn periodic_coupling_is_symmetric(m in 1usize..50, d in 1i64..100, alpha in 1.05..4.0f64) {
        let len = 2 * m as i64;
        prop_assume!(d % len != 0);
        let a = periodic_coupling(d, m, alpha).unwrap();
        let b = periodic_coupling(len - d, m, alpha).unwrap();
        let c = periodic_coupling(-d, m, alpha).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a, c);
        // the n = 0 term is a lower bound
        prop_assert!(a.hi() >= (d.rem_euclid(len).min(len - d.rem_euclid(len)) as f64).powf(-alpha));
    }
}

#[test]
fn infrared_bound_up_to_eight() {
    for m in 2..=8 {
        for &(gamma, eps) in &[(0.3, 0.1), (1.0, 0.5)] {
            for &alpha in &[1.2, 1.8] {
                let model = TorusModel::new(m, gamma, eps, alpha).unwrap();
                let rows = infrared_check(&model).unwrap();
                assert!(rows.iter().all(|r| r.holds), "m={m}: {rows:?}");
            }
        }
    }
}

#[test]
fn integral_representation_on_small_rings() {
    for m in 1..=6 {
        for j in 1..=m {
            for k in 1..=m {
                for &alpha in &[1.3, 1.5, 1.9] {
                    let (d, q) = integral_rep_check(j, k, m, alpha).unwrap();
                    assert!((d - q).abs() < 1e-8, "m={m} j={j} k={k} α={alpha}: {d} vs {q}");
                }
            }
        }
    }
}

#[test]
fn second_order_expansion_across_models() {
    for &(m, gamma, eps, alpha) in &[(2, 0.4, 0.1, 1.5), (3, 1.2, 0.6, 1.2), (4, 0.7, 0.3, 1.9)] {
        let model = TorusModel::new(m, gamma, eps, alpha).unwrap();
        for k in 1..2 * m {
            if k == m {
                continue;
            }
            let s = second_order_check(&model, k, 1e-2).unwrap();
            let tol = 1e-6 * s.predicted.abs().max(1.0);
            assert!((s.finite_difference - s.predicted).abs() < tol, "{s:?}");
        }
    }
}

#[test]
fn z_is_even_in_the_field() {
    let model = TorusModel::new(3, 0.7, 0.3, 1.5).unwrap();
    let h = [0.3, -0.1, 0.5, 0.0, -0.7, 0.2];
    let neg: Vec<f64> = h.iter().map(|x| -x).collect();
    let a = log_partition_shifted(&model, &h).unwrap();
    let b = log_partition_shifted(&model, &neg).unwrap();
    assert!((a - b).abs() < 1e-13);
}
