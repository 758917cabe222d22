use std::sync::{Arc, OnceLock};

use fgnpc::*;
use proptest::prelude::*;

fn fgn_prior() -> &'static PcPrior {
    static P: OnceLock<PcPrior> = OnceLock::new();
    P.get_or_init(|| {
        let table = fgn_distance_table(DEFAULT_N_REF, &TableOptions::default()).unwrap();
        PcPrior::calibrated(ParameterKind::Hurst, table, 0.9, 0.1).unwrap()
    })
}

fn ar1_table() -> &'static Arc<DistanceTable> {
    static T: OnceLock<Arc<DistanceTable>> = OnceLock::new();
    T.get_or_init(|| ar1_distance_table(&TableOptions::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn categories_partition_and_order(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
        let (ca, cb) = (EvidenceCategory::from_bayes_factor(a), EvidenceCategory::from_bayes_factor(b));
        if a <= b {
            prop_assert!(ca <= cb);
        }
        prop_assert_eq!(EvidenceCategory::ALL.iter().filter(|c| **c == ca).count(), 1);
    }

    #[test]
    fn swapped_bayes_factor_inverts(x in -500.0f64..0.0, y in -500.0f64..0.0) {
        let r = BayesFactorResult::from_log_ml(x, y);
        prop_assert_eq!(r.swapped().log_bf(), -r.log_bf());
        prop_assert!((r.bf.ln() - (x - y)).abs() < 1e-9);
    }

    #[test]
    fn fgn_correlations_bounded(h in 0.001f64..0.999, n in 1usize..200) {
        let c = fgn_autocorrelation(h, n).unwrap();
        prop_assert_eq!(c.values()[0], 1.0);
        prop_assert!(c.values().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn prior_cdf_monotone(a in 0.0005f64..0.9995, b in 0.0005f64..0.9995) {
        let p = fgn_prior();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (fa, fb) = (p.cdf(lo).unwrap(), p.cdf(hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&fa) && (0.0..=1.0).contains(&fb));
        prop_assert!(fa <= fb);
        prop_assert!(p.density(lo).unwrap() > 0.0);
    }

    #[test]
    fn interpolated_distance_monotone_away_from_base(a in -0.9995f64..0.9995, b in -0.9995f64..0.9995) {
        let t = ar1_table();
        if a.abs() < b.abs() && a * b >= 0.0 {
            prop_assert!(t.distance(a).unwrap() <= t.distance(b).unwrap());
        }
        let d = t.distance(a).unwrap();
        prop_assert!((d - ar1_distance(a).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn precision_prior_matches_gumbel(kappa in -20.0f64..20.0, u in 0.05f64..5.0, alpha in 0.001f64..0.5) {
        let p = PrecisionPrior::new(u, alpha).unwrap();
        let tau = kappa.exp();
        let via_tau = (p.density_precision(tau) * tau).ln();
        // Far in the left tail the τ-scale density underflows.
        prop_assume!(via_tau > -700.0);
        prop_assert!((via_tau - precision_logprior(kappa, &p)).abs() < 1e-9 * (1.0 + via_tau.abs()));
    }
}
