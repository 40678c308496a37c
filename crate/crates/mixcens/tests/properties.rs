//! Property tests for the distribution, censoring and posterior-summary
//! invariants.

use mixcens::bayes::hpd_interval;
use mixcens::dist::{order_stat_pdf, WeibullParams};
use mixcens::expectation::expected_failures_given_time;
use mixcens::quad::integrate_zero_inf;
use mixcens::{CensoredSample, CensoringScheme};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = WeibullParams> {
    (0.7f64..4.0, 0.2f64..5.0).prop_map(|(g, d)| WeibullParams::new(g, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_cdf_round_trip(p in params(), u in 0.001f64..0.999) {
        let x = p.quantile(u).unwrap();
        prop_assert!((p.cdf(x) - u).abs() < 1e-10);
    }

    #[test]
    fn cdf_is_monotone(p in params(), a in 0.01f64..10.0, b in 0.01f64..10.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(p.cdf(lo) <= p.cdf(hi) + 1e-15);
    }

    #[test]
    fn hazard_survival_pdf_identity(p in params(), t in 0.05f64..8.0) {
        let lhs = p.hazard(t) * p.survival(t);
        let rhs = p.pdf(t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }

    #[test]
    fn conditional_failure_count_monotone(
        p in params(),
        n in 2usize..40,
        frac in 0.1f64..1.0,
        t in 0.05f64..4.0,
    ) {
        let m = ((n as f64 * frac).ceil() as usize).clamp(1, n);
        let scheme = CensoringScheme::new(n, m, 0.3).unwrap();
        let a = expected_failures_given_time(t, scheme, &p);
        let b = expected_failures_given_time(t * 1.3, scheme, &p);
        prop_assert!(a <= b + 1e-10);
        prop_assert!((0.0..=n as f64 + 1e-9).contains(&a));
    }

    #[test]
    fn scheme_bounds_and_permutation_invariance(
        raw in proptest::collection::vec(0.01f64..20.0, 3..40),
        m_frac in 0.05f64..1.0,
        s in 0.0f64..2.0,
        rotate in 0usize..39,
    ) {
        let n = raw.len();
        let m = ((n as f64 * m_frac).ceil() as usize).clamp(1, n);
        let scheme = CensoringScheme::new(n, m, s).unwrap();
        let sample = CensoredSample::apply(&raw, scheme).unwrap();
        prop_assert!(sample.r() >= m && sample.r() <= n);
        prop_assert!(sample.failures().windows(2).all(|w| w[0] <= w[1]));

        let mut rotated = raw.clone();
        rotated.rotate_left(rotate % n);
        let again = CensoredSample::apply(&rotated, scheme).unwrap();
        prop_assert_eq!(sample, again);
    }

    #[test]
    fn log_likelihood_concave_in_rate(
        raw in proptest::collection::vec(0.05f64..10.0, 4..25),
        gamma in 0.5f64..3.0,
        delta in 0.1f64..4.0,
    ) {
        let n = raw.len();
        let scheme = CensoringScheme::new(n, (n / 2).max(1), 0.5).unwrap();
        let sample = CensoredSample::apply(&raw, scheme).unwrap();
        let ll = |d: f64| sample.log_likelihood(&WeibullParams::new(gamma, d).unwrap());
        let h = delta * 1e-3;
        let second = ll(delta + h) - 2.0 * ll(delta) + ll(delta - h);
        prop_assert!(second < 0.0);
    }

    #[test]
    fn hpd_lies_within_sample_range(
        chain in proptest::collection::vec(0.01f64..100.0, 10..400),
        alpha in 0.01f64..0.5,
    ) {
        let (lo, hi) = hpd_interval(&chain, alpha).unwrap();
        let min = chain.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = chain.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo >= min && hi <= max && lo <= hi);
    }
}

proptest! {
    // quadrature-backed checks are heavier; keep the case count small
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn order_statistic_density_normalizes(
        p in params(),
        n in 1usize..=30,
        i_frac in 0.0f64..1.0,
    ) {
        let i = ((n as f64 * i_frac).ceil() as usize).clamp(1, n);
        let mass = integrate_zero_inf(
            |t| order_stat_pdf(t, i, n, &p).unwrap_or(0.0),
            1e-10,
            0.0,
        )
        .unwrap();
        prop_assert!((mass - 1.0).abs() < 1e-8, "i={} n={} mass={}", i, n, mass);
    }
}
