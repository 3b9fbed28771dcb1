use bsboot_core::{FunctionalSpec, HFunction, PrecisionFunction, WeightedDistribution};
use proptest::prelude::*;

fn weighted() -> impl Strategy<Value = WeightedDistribution> {
    prop::collection::vec((0.01f64..50.0, 0.0f64..1.0), 1..30).prop_filter_map("degenerate", |mut pts| {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let total: f64 = pts.iter().map(|p| p.1).sum();
        if total <= 1e-9 {
            return None;
        }
        WeightedDistribution::new(
            pts.iter().map(|p| p.0).collect(),
            pts.iter().map(|p| p.1 / total).collect(),
        )
        .ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn linearity(g in weighted(), a in -5.0f64..5.0, b in -5.0f64..5.0, tau in 0.1f64..40.0) {
        let h1 = HFunction::Truncation(tau);
        let h2 = HFunction::SurvivalIndicator(tau);
        let lin = HFunction::Linear(vec![(a, h1.clone()), (b, h2.clone())]);
        let lhs = g.integrate(|x| lin.eval(x));
        let rhs = a * g.integrate(|x| h1.eval(x)) + b * g.integrate(|x| h2.eval(x));
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn mean_scales(g in weighted(), s in prop::sample::select(vec![0.5, 2.0, 4.0, 0.25])) {
        // powers of two keep the products exact
        let phi = FunctionalSpec::builtin("mean", None).unwrap();
        let base = phi.evaluate(&g).unwrap();
        let scaled = phi.evaluate(&g.scaled(s).unwrap()).unwrap();
        prop_assert_eq!(scaled, s * base);
    }

    #[test]
    fn variance_nonnegative(g in weighted()) {
        let phi = FunctionalSpec::builtin("variance", None).unwrap();
        let v = phi.evaluate(&g).unwrap();
        let scale = g.integrate(|x| x * x);
        prop_assert!(v >= -1e-12 * scale.max(1.0));
    }

    #[test]
    fn precision_stays_within_bounds(
        values in prop::collection::vec(1e-3f64..1e3, 1..6),
        x in 0.0f64..100.0,
    ) {
        let breakpoints: Vec<f64> = (1..values.len()).map(|i| 10.0 * i as f64).collect();
        let c = PrecisionFunction::piecewise(breakpoints, values).unwrap();
        let (lo, hi) = c.bounds();
        prop_assert!(lo > 0.0 && lo < 1.0);
        let v = c.eval(x);
        prop_assert!(v >= lo && v <= hi);
    }
}
