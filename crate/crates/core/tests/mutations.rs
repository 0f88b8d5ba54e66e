//! Single-edit corruptions must be caught.

use igp_core::compendium::{kzh_crazy_perturbation, kzh_minimal_has_only_crazy_perturbation_1 as kzh};
use igp_core::microperturb::{check_effective, CrazyPerturbation};
use igp_core::minimality::minimality_test;
use igp_core::pwfunction::BreakpointDatum;
use igp_core::QuadraticElement as QE;
use proptest::prelude::*;

fn nudge() -> impl Strategy<Value = QE> {
    (1i64..=1000, any::<bool>()).prop_map(|(n, neg)| QE::frac(if neg { -n } else { n }, 100_000))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn table_corruption_is_detected(i in 0usize..40, field in 0usize..3, delta in nudge()) {
        let pi = kzh();
        let mut datum: BreakpointDatum = pi.breakpoints()[i].clone();
        let slot = match field {
            0 => &mut datum.value,
            1 => &mut datum.left_limit,
            _ => &mut datum.right_limit,
        };
        *slot = &*slot + &delta;
        let bad = pi.with_datum(i, datum).unwrap();
        let caught = !bad.check_table_consistency().consistent || !minimality_test(&bad).unwrap().is_minimal;
        prop_assert!(caught);
    }
}

#[derive(Clone, Debug)]
enum CosetEdit {
    Scale(i64),
    Shift(i64),
    Drop,
}

fn coset_edit() -> impl Strategy<Value = CosetEdit> {
    prop_oneof![
        prop_oneof![Just(2i64), Just(-1), Just(3), Just(-2)].prop_map(CosetEdit::Scale),
        (1i64..500).prop_map(CosetEdit::Shift),
        Just(CosetEdit::Drop),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 5, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn coset_corruption_is_detected(piece in 0usize..2, coset in 0usize..2, edit in coset_edit()) {
        let mut doc = kzh_crazy_perturbation().to_document();
        let lo = doc.pieces[piece].interval[0].clone();
        let cosets = &mut doc.pieces[piece].cosets;
        match edit {
            CosetEdit::Scale(k) => cosets[coset].c = &cosets[coset].c * &QE::from_integer(k),
            // toward the interior, by less than any nonzero rational element of T
            CosetEdit::Shift(n) => {
                let step = QE::frac(n, 100_000);
                let b = &cosets[coset].b;
                cosets[coset].b = if b == &lo { b + &step } else { b - &step };
            }
            CosetEdit::Drop => {
                cosets.remove(coset);
            }
        }
        let bad = CrazyPerturbation::from_document(&doc).unwrap();
        prop_assert!(!check_effective(&kzh(), &bad).unwrap().effective);
    }
}
