//! Property tests for invariants that hold across whole parameter
//! ranges rather than at isolated points.

use drawdown_core::numkernel::{log_sum_exp_combine, scaled_mills, std_normal_cdf, SignedLog};
use drawdown_core::{
    depth_quantile, depth_tail_prob, length_quantile, length_tail_prob, ProcessSpec,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cdf_is_monotone_and_complementary(a in -35.0f64..35.0, b in -35.0f64..35.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let c_lo = std_normal_cdf(lo).unwrap();
        let c_hi = std_normal_cdf(hi).unwrap();
        prop_assert!(c_lo <= c_hi);
        let s = std_normal_cdf(a).unwrap() + std_normal_cdf(-a).unwrap();
        prop_assert!((s - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn scaled_mills_reconstructs_the_tail(x in -28.0f64..28.0) {
        let m = scaled_mills(x).unwrap();
        prop_assert!(m > 0.0);
        let tail = std_normal_cdf(-x).unwrap();
        if tail > 1e-280 {
            let recon = m * (-0.5 * x * x).exp();
            prop_assert!(((recon - tail) / tail).abs() < 1e-12);
        }
    }

    #[test]
    fn signed_lse_matches_linear_sum(terms in prop::collection::vec((-30.0f64..30.0, any::<bool>()), 1..8)) {
        let logs: Vec<SignedLog> = terms
            .iter()
            .map(|&(l, pos)| if pos { SignedLog::positive(l) } else { SignedLog::negative(l) })
            .collect();
        let combined = log_sum_exp_combine(&logs).unwrap();
        let linear: f64 = terms
            .iter()
            .map(|&(l, pos)| if pos { l.exp() } else { -l.exp() })
            .sum();
        let got = combined.value();
        let scale = terms.iter().map(|&(l, _)| l.exp()).sum::<f64>();
        prop_assert!((got - linear).abs() <= 1e-12 * scale);
    }

    #[test]
    fn tails_are_probabilities_and_monotone(
        sharpe in -2.0f64..3.0,
        horizon in 0.5f64..20.0,
        frac_a in 0.01f64..0.99,
        frac_b in 0.01f64..0.99,
    ) {
        let spec = ProcessSpec::new(sharpe, horizon).unwrap();
        let (lo, hi) = if frac_a < frac_b { (frac_a, frac_b) } else { (frac_b, frac_a) };
        let p_lo = length_tail_prob(&spec, lo * horizon).unwrap();
        let p_hi = length_tail_prob(&spec, hi * horizon).unwrap();
        prop_assert!((0.0..=1.0).contains(&p_lo) && (0.0..=1.0).contains(&p_hi));
        prop_assert!(p_hi <= p_lo + 1e-12);

        let d_lo = depth_tail_prob(&spec, lo * 3.0).unwrap();
        let d_hi = depth_tail_prob(&spec, hi * 3.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&d_lo) && (0.0..=1.0).contains(&d_hi));
        prop_assert!(d_hi <= d_lo + 1e-12);
    }
}

proptest! {
    // Each case costs two root-finds; keep the count modest.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quantile_tail_duality(
        sharpe in 0.25f64..3.0,
        horizon in 1.0f64..20.0,
        tail in 0.01f64..0.45,
    ) {
        let spec = ProcessSpec::new(sharpe, horizon).unwrap();
        let lq = length_quantile(&spec, tail).unwrap();
        prop_assert!(lq > 0.0 && lq < horizon);
        let back = length_tail_prob(&spec, lq).unwrap();
        prop_assert!((back - tail).abs() < 1e-8, "length duality: {back} vs {tail}");

        let dq = depth_quantile(&spec, tail).unwrap();
        prop_assert!(dq > 0.0);
        let back = depth_tail_prob(&spec, dq).unwrap();
        prop_assert!((back - tail).abs() < 1e-8, "depth duality: {back} vs {tail}");
    }
}
