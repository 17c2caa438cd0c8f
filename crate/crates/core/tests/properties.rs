//! Randomized property tests for the structural invariants of the interval
//! algebra, orbit enumeration, splicing and the interval functional.

use proptest::prelude::*;

use shiftlyap::cocycle::Potential;
use shiftlyap::intervals::IntervalSet;
use shiftlyap::symbolic::{splice_points, PeriodicOrbit, SymbolicPoint, TransitionSystem};
use shiftlyap::zeros::compute_j;

fn interval_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((-10.0f64..10.0, 0.001f64..5.0), 0..6).prop_map(|raw| {
        IntervalSet::from_intervals(raw.into_iter().map(|(a, len)| (a, a + len)).collect())
    })
}

proptest! {
    #[test]
    fn interval_inclusion_exclusion(a in interval_set(), b in interval_set()) {
        let lhs = a.measure() + b.measure();
        let rhs = a.union(&b).measure() + a.intersect(&b).measure();
        prop_assert!((lhs - rhs).abs() < 1e-9, "{lhs} vs {rhs}");
    }

    #[test]
    fn interval_subtract_consistent(a in interval_set(), b in interval_set()) {
        let diff = a.subtract(&b);
        let expect = a.measure() - a.intersect(&b).measure();
        prop_assert!((diff.measure() - expect).abs() < 1e-9);
        prop_assert!(diff.subset_of(&a, 1e-12));
        prop_assert!(diff.intersect(&b).measure() < 1e-9);
    }

    #[test]
    fn interval_union_contains_both(a in interval_set(), b in interval_set()) {
        let u = a.union(&b);
        prop_assert!(a.subset_of(&u, 1e-12));
        prop_assert!(b.subset_of(&u, 1e-12));
    }

    #[test]
    fn restrict_bounds_measure(a in interval_set(), lo in -10.0f64..10.0, len in 0.0f64..10.0) {
        let r = a.restrict(lo, lo + len);
        prop_assert!(r.measure() <= a.measure() + 1e-12);
        prop_assert!(r.measure() <= len + 1e-12);
        prop_assert!(r.subset_of(&a, 1e-12));
    }
}

fn random_system() -> impl Strategy<Value = TransitionSystem> {
    prop::collection::vec(any::<bool>(), 9).prop_filter_map("needs a cycle", |mut t| {
        t[0] = true;
        TransitionSystem::new(3, t).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn enumerated_orbits_are_canonical(sys in random_system(), max_period in 1usize..7) {
        let orbits = sys.enumerate_periodic_orbits(max_period).unwrap();
        let mut seen = std::collections::HashSet::new();
        for orbit in &orbits {
            let w = orbit.word();
            prop_assert!(w.len() <= max_period);
            prop_assert!(seen.insert(w.to_vec()), "duplicate {w:?}");
            // admissible cyclically
            for i in 0..w.len() {
                prop_assert!(sys.allowed(w[i], w[(i + 1) % w.len()]));
            }
            // canonical: least among rotations, and primitive
            for k in 1..w.len() {
                let rot = orbit.rotated_word(k);
                prop_assert!(rot.as_slice() >= w, "rotation {rot:?} below {w:?}");
                prop_assert!(rot.as_slice() != w, "non-primitive {w:?}");
            }
        }
    }

    #[test]
    fn splice_agrees_on_both_sides(
        wa in prop::collection::vec(0usize..2, 1..5),
        wb in prop::collection::vec(0usize..2, 1..5),
        anchor in 0usize..2,
    ) {
        // periodic points on the full 2-shift forced to share the symbol at 0
        let mut wa = wa;
        let mut wb = wb;
        wa[0] = anchor;
        wb[0] = anchor;
        let a = SymbolicPoint::periodic(&wa);
        let b = SymbolicPoint::periodic(&wb);
        let s = splice_points(&a, &b).unwrap();
        for n in -40i64..=0 {
            prop_assert_eq!(s.symbol_at(n), a.symbol_at(n), "past at {}", n);
        }
        for n in 0i64..=40 {
            prop_assert_eq!(s.symbol_at(n), b.symbol_at(n), "future at {}", n);
        }
        prop_assert!(s.validate(&TransitionSystem::full_shift(2)).unwrap());
    }

    #[test]
    fn potential_restriction_agrees(vals in prop::collection::vec(-2.0f64..2.0, 2)) {
        let full = TransitionSystem::full_shift(2);
        let gm = TransitionSystem::golden_mean();
        let v = Potential::from_symbol_values(&full, &vals).unwrap();
        let vr = v.restrict_to(&gm).unwrap();
        let orbit = PeriodicOrbit::new(&[0, 1]).unwrap();
        prop_assert_eq!(v.eval_orbit(&orbit).unwrap(), vr.eval_orbit(&orbit).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn j_never_increases_under_zero_refinement(
        sup_norm in 0.0f64..1.0,
        base in prop::collection::vec(0.01f64..0.99, 0..4),
        extra in prop::collection::vec(0.01f64..0.99, 1..3),
        raw in prop::collection::vec((0.0f64..1.0, 0.01f64..0.5), 1..4),
    ) {
        let (lo, hi) = (-2.5 - sup_norm, 2.5 + sup_norm);
        let lambda = hi - lo;
        let place = |t: f64| lo + t * lambda;
        let mut zeros: Vec<f64> = base.iter().map(|&t| place(t)).collect();
        zeros.sort_by(|a, b| a.partial_cmp(b).unwrap());
        zeros.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let s = IntervalSet::from_intervals(
            raw.iter()
                .map(|&(t, len)| (place(t * 0.9), place(t * 0.9) + len))
                .collect(),
        );
        let coarse = compute_j(&zeros, &s, sup_norm).unwrap().j_value;
        let mut refined = zeros.clone();
        refined.extend(extra.iter().map(|&t| place(t)));
        refined.sort_by(|a, b| a.partial_cmp(b).unwrap());
        refined.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let fine = compute_j(&refined, &s, sup_norm).unwrap().j_value;
        prop_assert!(fine <= coarse + 1e-9, "{fine} > {coarse}");
    }
}
