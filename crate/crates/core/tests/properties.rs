use proptest::prelude::*;
use pseudodyn::exactnum::Scalar;
use pseudodyn::metrization::{glue_metric, lower_bound_check, metric_violations, random_atlas, GlueMode};
use pseudodyn::pseudogroup::word_metric;
use pseudodyn::scenario::bundled;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn word_metric_is_symmetric_and_triangular(a in 0i64..6, b in 0i64..6) {
        let sc = bundled("nonrecurrent").unwrap();
        let sys = &sc.system;
        let x = Scalar::frac(3, 2);
        let y = sc.nonrecurrent.as_ref().unwrap().g1_power(a - 3, &x);
        let z = sc.nonrecurrent.as_ref().unwrap().g1_power(b - 3, &x);
        let d = |p: &Scalar, q: &Scalar| word_metric(sys, p, q, 12).unwrap();
        let (dxy, dyx) = (d(&x, &y), d(&y, &x));
        prop_assert_eq!(dxy, dyx);
        if let (Some(xy), Some(yz), Some(xz)) = (dxy, d(&y, &z), d(&x, &z)) {
            prop_assert!(xz <= xy + yz);
        }
    }

    #[test]
    fn glued_metrics_are_metrics(seed in 1000u64..2000, n in 3usize..9, patches in 1usize..4, quasi in any::<bool>()) {
        let mode = if quasi { GlueMode::Quasilocal } else { GlueMode::Local };
        let atlas = random_atlas(seed, n, patches, mode);
        let g = glue_metric(&atlas, mode).unwrap();
        prop_assert!(metric_violations(&g.table).is_empty());
        prop_assert!(lower_bound_check(&atlas, &g).violations.is_empty());
    }
}
