use igp_core::compendium::{gmic, kzh_minimal_has_only_crazy_perturbation_1 as kzh, nonextreme_fixture};
use igp_core::covering::{ComponentSet, CoveringContext};
use igp_core::exactfield::qe;
use igp_core::pwfunction::{PiecewiseFunction, Side};
use igp_core::QuadraticElement as QE;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = QE> {
    prop_oneof![
        (0i64..1000).prop_map(|n| QE::frac(n, 1000)),
        (0i64..1000, 1i64..200).prop_map(|(a, b)| (&QE::frac(a, 1000) + &qe(&format!("1/{b}*sqrt(2)"))).fractional_part()),
    ]
}

/// Component index of the interval containing the point `x`, if covered.
fn component_at(cs: &ComponentSet, x: &QE) -> Option<usize> {
    let eps = QE::frac(1, 10_000_000);
    cs.component_of(&(x - &eps), &(x + &eps))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn periodic(x in point(), n in -5i64..5) {
        let pi = kzh();
        let y = &x + &QE::from_integer(n);
        for side in [Side::Left, Side::At, Side::Right] {
            prop_assert_eq!(pi.limit(&x, side), pi.limit(&y, side));
        }
    }

    #[test]
    fn refinement_preserves_values(x in point(), extra in prop::collection::vec(point(), 1..4)) {
        let pi = kzh();
        let refined = pi.refined(&extra);
        prop_assert!(refined.check_table_consistency().consistent);
        for side in [Side::Left, Side::At, Side::Right] {
            prop_assert_eq!(pi.limit(&x, side), refined.limit(&x, side));
        }
    }
}

fn same_partition(a: &PiecewiseFunction, b: &PiecewiseFunction, probes: &[QE]) -> Result<(), TestCaseError> {
    let ra = CoveringContext::new(a).run(true).components;
    let rb = CoveringContext::new(b).run(true).components;
    for x in probes {
        for y in probes {
            let (ca, cb) = (component_at(&ra, x), component_at(&rb, x));
            prop_assert_eq!(ca.is_some(), cb.is_some());
            let same_a = ca.is_some() && ca == component_at(&ra, y);
            let same_b = cb.is_some() && cb == component_at(&rb, y);
            prop_assert_eq!(same_a, same_b, "{} and {}", x, y);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Extra breakpoints change the complex and the order in which faces and
    /// edges are processed, but not the covered components.
    #[test]
    fn covering_is_independent_of_processing_order(extra in prop::collection::vec((1i64..60).prop_map(|n| QE::frac(n, 60)), 1..3)) {
        let probes: Vec<QE> = (0..48).map(|i| QE::frac(2 * i + 1, 96)).collect();
        let fx = nonextreme_fixture().function;
        same_partition(&fx, &fx.refined(&extra), &probes)?;
        let g = gmic(&qe("3/5")).unwrap();
        same_partition(&g, &g.refined(&extra), &probes)?;
    }
}
