use harvestlab::measures::{concurrence, mutual_information};
use harvestlab::model::{evaluate, DetectorPair, Geometry, POSITIVITY_SLACK};
use harvestlab::optimize::{PointSpec, Quantity};
use harvestlab::{rescale_report, Alignment, CorrelationReport};
use proptest::prelude::*;

fn alignment() -> impl Strategy<Value = Alignment> {
    prop::sample::select(Alignment::ALL.to_vec())
}

fn log_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn state_is_positive(
        w in log_range(1e-3, 5.0),
        dw in 0.0..3.0f64,
        al in alignment(),
        l in log_range(1e-2, 20.0),
        dz in log_range(1e-3, 20.0),
    ) {
        let s = evaluate(&DetectorPair::from_difference(w, dw), &Geometry::new(al, l, dz)).unwrap();
        prop_assert!(s.positivity_margin() >= -POSITIVITY_SLACK);
        prop_assert!(s.p_a >= 0.0 && s.p_b >= 0.0);
        prop_assert!(mutual_information(&s) >= 0.0);
        prop_assert!(concurrence(&s) >= 0.0);
    }

    #[test]
    fn reports_scale_with_lambda_squared(
        w in log_range(1e-3, 5.0),
        dw in 0.0..3.0f64,
        al in alignment(),
        l in log_range(1e-2, 20.0),
        dz in log_range(1e-3, 20.0),
        lambda in log_range(1e-3, 1.0),
    ) {
        let s = evaluate(&DetectorPair::from_difference(w, dw), &Geometry::new(al, l, dz)).unwrap();
        let base = CorrelationReport::from_state(&s);
        let r = rescale_report(&base, lambda);
        let r2 = rescale_report(&base, 2.0 * lambda);
        prop_assert!((r2.mutual_info - 4.0 * r.mutual_info).abs() <= 1e-12 * r2.mutual_info.abs());
        prop_assert!((r2.concurrence - 4.0 * r.concurrence).abs() <= 1e-12 * r2.concurrence.abs());
    }

    #[test]
    fn alignments_agree_without_separation_along_the_normal(
        w in log_range(1e-3, 2.0),
        dw in 0.0..2.0f64,
        dz in log_range(1e-2, 10.0),
    ) {
        let p = DetectorPair::from_difference(w, dw);
        let l = 1e-9;
        let a = evaluate(&p, &Geometry::new(Alignment::Parallel, l, dz)).unwrap();
        let b = evaluate(&p, &Geometry::new(Alignment::Vertical, l, dz)).unwrap();
        prop_assert!((a.p_b - b.p_b).abs() <= 1e-6 * a.p_b.abs().max(1e-12));
        prop_assert!((a.x - b.x).norm() <= 1e-6 * a.x.norm().max(1e-12));
    }

    #[test]
    fn quantities_match_state(
        w in log_range(1e-3, 2.0),
        dw in 0.0..2.0f64,
        al in alignment(),
        l in log_range(1e-2, 10.0),
        dz in log_range(1e-2, 10.0),
    ) {
        let spec = PointSpec { omega_a: w, delta_omega: dw, separation: l, dz, alignment: al, lambda: 1.0 };
        let s = spec.state().unwrap();
        prop_assert_eq!(spec.value(Quantity::PA).unwrap(), s.p_a);
        prop_assert_eq!(spec.value(Quantity::AbsX).unwrap(), s.x.norm());
        prop_assert_eq!(spec.value(Quantity::MutualInfo).unwrap(), mutual_information(&s));
    }
}
