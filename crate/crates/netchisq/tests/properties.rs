//! Property tests for the statistical kernel.

use netchisq::{
    chi_sq1_sf, contrast_test, net_chi_sq, net_chi_sq_v1, net_chi_sq_v2, t_net_sq,
    ApplicabilityPolicy, CampaignPair, Rng, SubgroupCounts,
};
use proptest::prelude::*;

/// Subgroup with all four estimated rates strictly inside (0, 1).
fn interior_subgroup() -> impl Strategy<Value = SubgroupCounts> {
    (2u64..=5000, 2u64..=5000).prop_flat_map(|(n, k)| {
        (Just(n), 1..n, Just(k), 1..k).prop_map(|(n, a_t, k, a_c)| {
            SubgroupCounts::new(n, a_t, k, a_c).expect("responses below sizes")
        })
    })
}

fn interior_pair() -> impl Strategy<Value = CampaignPair> {
    (interior_subgroup(), interior_subgroup()).prop_map(|(s1, s2)| CampaignPair::new(s1, s2))
}

proptest! {
    #[test]
    fn centered_responses_are_antisymmetric(pair in interior_pair()) {
        let [c1, c2] = pair.derive_estimates().unwrap().centered();
        let tol = 1e-9 * c1.abs().max(1.0);
        prop_assert!((c1 + c2).abs() <= tol, "c1 = {c1}, c2 = {c2}");
    }

    #[test]
    fn estimates_stay_in_range(pair in interior_pair()) {
        let est = pair.derive_estimates().unwrap();
        for p in est
            .target_rates
            .iter()
            .chain(est.control_rates.iter())
            .chain([est.pooled_target_rate, est.weighted_control_rate, est.natural_control_rate].iter())
        {
            prop_assert!((0.0..=1.0).contains(p));
        }
        prop_assert!(est.variances[0] > 0.0);
        prop_assert!(est.variances[1] > 0.0);
        prop_assert!(est.weight_norm > 0.0);
        prop_assert!(est.precision_norm > 0.0);
    }

    #[test]
    fn equal_control_rates_pool_to_themselves(
        (k1, k2) in (40u64..=4000, 40u64..=4000),
        (n1, n2) in (10u64..=5000, 10u64..=5000),
        numer in 1u64..=9,
    ) {
        // control rates constructed equal: numer/10 in both subgroups
        let (d1, d2) = (k1 * 10, k2 * 10);
        let s1 = SubgroupCounts::new(n1, n1 / 2, d1, numer * k1).unwrap();
        let s2 = SubgroupCounts::new(n2, n2 / 2, d2, numer * k2).unwrap();
        let est = CampaignPair::new(s1, s2).derive_estimates().unwrap();
        let c = numer as f64 / 10.0;
        prop_assert_eq!(est.control_rates[0], est.control_rates[1]);
        prop_assert!((est.weighted_control_rate - c).abs() <= 4.0 * f64::EPSILON * c);
    }

    #[test]
    fn scaling_counts_behaves_linearly(pair in interior_pair(), m in 2u64..=8) {
        let est = pair.derive_estimates().unwrap();
        let scaled = pair.scaled(m).derive_estimates().unwrap();
        let mf = m as f64;
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1e-12);
        for i in 0..2 {
            prop_assert!(rel(scaled.target_rates[i], est.target_rates[i]));
            prop_assert!(rel(scaled.control_rates[i], est.control_rates[i]));
            prop_assert!(rel(scaled.uplift_responses[i], mf * est.uplift_responses[i]));
            prop_assert!(rel(scaled.null_expectations[i], mf * est.null_expectations[i]));
            prop_assert!(rel(scaled.variances[i], mf * est.variances[i]));
        }
        prop_assert!(rel(scaled.weight_norm, est.weight_norm));
        prop_assert!(rel(scaled.precision_norm, est.precision_norm));
    }

    #[test]
    fn comparison_tests_are_swap_symmetric(pair in interior_pair()) {
        let policy = ApplicabilityPolicy::default();
        let swapped = pair.swapped();
        let outcomes = [
            (net_chi_sq(&pair).unwrap(), net_chi_sq(&swapped).unwrap()),
            (
                net_chi_sq_v1(&pair, &policy).unwrap(),
                net_chi_sq_v1(&swapped, &policy).unwrap(),
            ),
            (
                net_chi_sq_v2(&pair, &policy).unwrap(),
                net_chi_sq_v2(&swapped, &policy).unwrap(),
            ),
            (t_net_sq(&pair).unwrap(), t_net_sq(&swapped).unwrap()),
            (contrast_test(&pair).unwrap(), contrast_test(&swapped).unwrap()),
        ];
        for (a, b) in outcomes {
            let tol = 1e-12 * a.statistic.abs().max(1.0);
            prop_assert!((a.statistic - b.statistic).abs() <= tol, "{:?}", a.method);
            prop_assert!((a.p_value - b.p_value).abs() <= 1e-12, "{:?}", a.method);
            prop_assert_eq!(a.applicable, b.applicable);
        }
    }

    #[test]
    fn p_values_are_proper_probabilities(pair in interior_pair()) {
        let policy = ApplicabilityPolicy::default();
        for out in [
            net_chi_sq(&pair).unwrap(),
            net_chi_sq_v1(&pair, &policy).unwrap(),
            net_chi_sq_v2(&pair, &policy).unwrap(),
            t_net_sq(&pair).unwrap(),
        ] {
            prop_assert!(out.statistic >= 0.0);
            prop_assert!((0.0..=1.0).contains(&out.p_value));
            prop_assert_eq!(out.dof, 1);
        }
    }

    #[test]
    fn contrast_coincides_with_t_net_sq(pair in interior_pair()) {
        let t = t_net_sq(&pair).unwrap();
        let c = contrast_test(&pair).unwrap();
        prop_assert!((t.statistic - c.statistic).abs() <= 1e-12 * t.statistic.max(1.0));
        prop_assert!((t.p_value - c.p_value).abs() <= 1e-12);
    }

    #[test]
    fn survival_function_is_monotone(x in 0.0f64..30.0, step in 1e-6f64..5.0) {
        let lo = chi_sq1_sf(x + step).unwrap();
        let hi = chi_sq1_sf(x).unwrap();
        prop_assert!(lo < hi, "sf({}) = {hi}, sf({}) = {lo}", x, x + step);
    }

    #[test]
    fn binomial_draws_stay_in_support(seed in any::<u64>(), n in 0u64..=20_000, p in 0.0f64..=1.0) {
        let mut rng = Rng::new(seed);
        let x = rng.sample_binomial(n, p).unwrap();
        prop_assert!(x <= n);
    }

    #[test]
    fn binomial_streams_are_deterministic(seed in any::<u64>()) {
        let mut a = Rng::new(seed);
        let mut b = Rng::new(seed);
        for _ in 0..16 {
            prop_assert_eq!(
                a.sample_binomial(512, 0.25).unwrap(),
                b.sample_binomial(512, 0.25).unwrap()
            );
        }
    }
}
