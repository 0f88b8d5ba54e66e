//! End-to-end checks on the kzh function and its crazy perturbation, each
//! against an oracle that does not go through the face machinery.

use igp_core::compendium::{kzh_crazy_perturbation, kzh_minimal_has_only_crazy_perturbation_1 as kzh, KZH_T1, KZH_T2};
use igp_core::covering::CoveringContext;
use igp_core::exactfield::qe;
use igp_core::microperturb::{check_effective, find_epsilon, verify_perturbed_minimality, CrazyPerturbation, Epsilon};
use igp_core::minimality::minimality_test;
use igp_core::perturbation_space::{extremality_test_pwc, Verdict};
use igp_core::pwfunction::Side;
use igp_core::QuadraticElement as QE;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn iv(a: &str, b: &str) -> (QE, QE) {
    (qe(a), qe(b))
}

#[test]
fn table_has_41_breakpoints_and_is_symmetric() {
    let pi = kzh();
    assert_eq!(pi.len(), 40);
    assert!(pi.check_table_consistency().consistent);
    let f = qe("4/5");
    let mut xs = pi.breakpoint_xs();
    xs.push(QE::one());
    for x in &xs {
        let y = &f - x;
        assert_eq!(&pi.evaluate(x) + &pi.evaluate(&y), QE::one(), "value at {x}");
        assert_eq!(&pi.limit(x, Side::Left) + &pi.limit(&y, Side::Right), QE::one(), "left limit at {x}");
        assert_eq!(&pi.limit(x, Side::Right) + &pi.limit(&y, Side::Left), QE::one(), "right limit at {x}");
    }
    let mut slopes = pi.slopes();
    slopes.sort();
    slopes.dedup();
    assert_eq!(slopes, vec![qe("-5"), qe("5/11999"), qe("35/13")]);
}

#[test]
fn minimal() {
    let report = minimality_test(&kzh()).unwrap();
    assert!(report.is_minimal, "{:?}", report.violations.first());
}

#[test]
fn covering_leaves_two_intervals_then_merges_them() {
    let ctx = CoveringContext::new(&kzh());
    let result = ctx.run(true);
    let uncovered = vec![iv("219/800", "269/800"), iv("371/800", "421/800")];
    assert_eq!(result.before_merge.uncovered(), uncovered);
    assert_eq!(result.before_merge.component_count(), 2);
    // every other interval of the complex is covered
    for (lo, hi) in ctx.intervals() {
        let inside = uncovered.iter().any(|(a, b)| a <= &lo && &hi <= b);
        assert_eq!(result.before_merge.component_of(&lo, &hi).is_some(), !inside, "({lo}, {hi})");
    }
    assert!(result.components.uncovered().is_empty());
    let merged = result.components.component_of(&uncovered[0].0, &uncovered[0].1);
    assert!(merged.is_some());
    assert_eq!(merged, result.components.component_of(&uncovered[1].0, &uncovered[1].1));

    let evidence = &result.evidence[0];
    let t1 = qe(KZH_T1);
    let t2 = &evidence.amounts[2] - &evidence.amounts[0];
    assert!(evidence.generators.contains(&t1));
    assert!(evidence.generators.contains(&t2));
    // (rat, irr) coordinates not proportional
    assert_ne!(t1.rat() * t2.irr(), t1.irr() * t2.rat());
}

#[test]
fn extreme_relative_to_pwc_only_with_dense_merge() {
    let report = extremality_test_pwc(&kzh(), true).unwrap();
    assert_eq!(report.verdict, Verdict::Extreme);
    assert_eq!(report.dimension(), 0);
    assert_eq!(report.nullspace.rank, report.system.parameter_count());
    let without = extremality_test_pwc(&kzh(), false).unwrap();
    assert_eq!(without.verdict, Verdict::Inconclusive);
}

#[test]
fn perturbation_is_effective_with_calibrated_epsilon() {
    let pi = kzh();
    let pbar = kzh_crazy_perturbation();
    assert!(check_effective(&pi, &pbar).unwrap().effective);
    let report = find_epsilon(&pi, &pbar).unwrap().unwrap();
    let Epsilon::Finite(eps) = &report.epsilon else {
        panic!("expected a finite epsilon");
    };
    assert_eq!(eps, &(report.min_slack.clone().unwrap() / report.bound.clone()));
    assert!((eps.to_f64() - 0.0003958663221935161).abs() < 1e-12);
    assert!(eps >= &qe("3/10000"));
    for check in verify_perturbed_minimality(&pi, &pbar, &qe("3/10000")).unwrap() {
        assert!(check.minimal, "{:?}", check.failure);
    }
}

/// Samples `x`, `y` from the perturbed cosets and from random rationals and
/// checks `π ± 0.0003·π̄` pointwise: range, subadditivity and symmetry.
#[test]
fn sampled_points_of_perturbed_functions() {
    let pi = kzh();
    let pbar = kzh_crazy_perturbation();
    let f = qe("4/5");
    let eps = qe("3/10000");
    let (t1, t2) = (qe(KZH_T1), qe(KZH_T2));
    let reps = [qe("219/800"), qe("269/800"), qe("371/800"), qe("421/800")];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sample = |rng: &mut ChaCha8Rng| -> QE {
        if rng.gen_bool(0.7) {
            let b = &reps[rng.gen_range(0..4)];
            let a1 = QE::from_integer(rng.gen_range(-6..=6));
            let a2 = QE::from_integer(rng.gen_range(-2..=2));
            (b + &(&(&a1 * &t1) + &(&a2 * &t2))).fractional_part()
        } else {
            QE::frac(rng.gen_range(0..100_000), 100_000)
        }
    };
    let mut hits = 0;
    for sign in [1, -1] {
        let s = &eps * &QE::from_integer(sign);
        let g = |x: &QE| &pi.evaluate(x) + &(&s * &pbar.evaluate(x));
        for _ in 0..400 {
            let (x, y) = (sample(&mut rng), sample(&mut rng));
            if !pbar.micro(&x).is_zero() {
                hits += 1;
            }
            let gx = g(&x);
            assert!(gx.sign() >= 0 && gx <= QE::one(), "range at {x}");
            assert!((&(&gx + &g(&y)) - &g(&(&x + &y))).sign() >= 0, "subadditivity at ({x}, {y})");
            assert_eq!(&gx + &g(&(&f - &x)), QE::one(), "symmetry at {x}");
        }
    }
    assert!(hits > 100, "too few samples on the cosets: {hits}");
}

/// Scaling `π̄` by `c` divides `ε` by `|c|`.
#[test]
fn epsilon_is_homogeneous() {
    let pi = kzh();
    let pbar = kzh_crazy_perturbation();
    let eps = |p: &CrazyPerturbation| match find_epsilon(&pi, p).unwrap().unwrap().epsilon {
        Epsilon::Finite(e) => e,
        Epsilon::Unbounded => panic!("unbounded"),
    };
    let base = eps(&pbar);
    assert_eq!(eps(&pbar.negated()), base);
    let mut doc = pbar.to_document();
    for piece in &mut doc.pieces {
        for coset in &mut piece.cosets {
            coset.c = &coset.c * &qe("3");
        }
    }
    let tripled = CrazyPerturbation::from_document(&doc).unwrap();
    assert_eq!(eps(&tripled), &base / &qe("3"));
}
