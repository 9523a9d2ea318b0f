//! Property-based and exhaustive invariants cross-checking the optimized
//! library paths against definition-level oracles.

mod common;

use proptest::prelude::*;

use sidonkit::certify::{ell, structural_trace};
use sidonkit::construct::construct_normalized;
use sidonkit::experiment::zero_statement_extraction;
use sidonkit::groundset::normalized_classes;
use sidonkit::systems::{
    find_nontrivial_quadruples, is_b_h_system, is_sidon_system,
};
use sidonkit::{DetectOptions, Family, KSet, TraceVerdict, DEFAULT_WORK_CAP};

fn kset_strategy(max_len: usize) -> impl Strategy<Value = KSet> {
    prop::collection::btree_set(-30i64..60, 1..=max_len)
        .prop_map(|s| KSet::new(s.into_iter().collect()).unwrap())
}

fn family_strategy(max_members: usize) -> impl Strategy<Value = Family> {
    prop::collection::btree_set(
        prop::collection::btree_set(0i64..25, 1..=3),
        0..=max_members,
    )
    .prop_map(|sets| {
        Family::new(
            sets.into_iter()
                .map(|s| KSet::new(s.into_iter().collect()).unwrap())
                .collect(),
        )
        .unwrap()
    })
}

fn uniform_family_strategy(k: usize, max_members: usize) -> impl Strategy<Value = Family> {
    prop::collection::btree_set(
        prop::collection::btree_set(0i64..30, k..=k).prop_filter("exact size", move |s| s.len() == k),
        0..=max_members,
    )
    .prop_map(|sets| {
        Family::new(
            sets.into_iter()
                .map(|s| KSet::new(s.into_iter().collect()).unwrap())
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn sumset_commutes_and_translates(a in kset_strategy(6), b in kset_strategy(6), z in -20i64..20) {
        let ab = a.sumset(&b).unwrap();
        prop_assert_eq!(&ab, &b.sumset(&a).unwrap());
        prop_assert_eq!(
            ab.elements(),
            &common::brute_sumset(a.elements(), b.elements())[..]
        );
        let shifted = a.translate(z).unwrap().sumset(&b).unwrap();
        prop_assert_eq!(shifted, ab.translate(z).unwrap());
    }

    #[test]
    fn sumset_size_bounds(a in kset_strategy(6), b in kset_strategy(6)) {
        let ab = a.sumset(&b).unwrap();
        prop_assert!(ab.len() >= a.len() + b.len() - 1);
        prop_assert!(ab.len() <= a.len() * b.len());
        prop_assert_eq!(KSet::min(&ab), KSet::min(&a) + KSet::min(&b));
        prop_assert_eq!(KSet::max(&ab), KSet::max(&a) + KSet::max(&b));
    }

    #[test]
    fn h_fold_matches_brute(a in kset_strategy(5), h in 1u32..=4) {
        let fold = a.h_fold_sumset(h).unwrap();
        prop_assert_eq!(fold.elements(), &common::brute_h_fold(a.elements(), h)[..]);
    }

    #[test]
    fn dilation_distributes_over_sumsets(a in kset_strategy(5), b in kset_strategy(5), c in prop_oneof![(-3i64..0).boxed(), (1i64..4).boxed()]) {
        let left = a.sumset(&b).unwrap().dilate(c).unwrap();
        let right = a.dilate(c).unwrap().sumset(&b.dilate(c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn b_h_routes_agree(a in kset_strategy(6), h in 1u32..=4) {
        let fast = a.is_b_h(h).unwrap();
        prop_assert_eq!(fast, common::brute_is_b_h_set(a.elements(), h));
        let collision = a.b_h_collision(h).unwrap();
        prop_assert_eq!(fast, collision.is_none());
        if let Some(w) = collision {
            prop_assert_ne!(&w.first, &w.second);
            prop_assert_eq!(w.first.iter().sum::<i64>(), w.sum);
            prop_assert_eq!(w.second.iter().sum::<i64>(), w.sum);
            prop_assert!(w.first.iter().all(|e| a.contains(*e)));
            prop_assert!(w.second.iter().all(|e| a.contains(*e)));
        }
    }

    #[test]
    fn family_text_round_trips(f in family_strategy(8)) {
        prop_assert_eq!(&Family::from_text(&f.to_text()).unwrap(), &f);
    }

    #[test]
    fn detected_quadruples_are_real_and_canonical(f in family_strategy(8)) {
        let found = find_nontrivial_quadruples(&f, DetectOptions::default()).unwrap();
        for tuple in &found {
            let left_sum = tuple.left[0].sumset(&tuple.left[1]).unwrap();
            let right_sum = tuple.right[0].sumset(&tuple.right[1]).unwrap();
            prop_assert_eq!(&left_sum, &tuple.common_sumset);
            prop_assert_eq!(&right_sum, &tuple.common_sumset);
            prop_assert_ne!(&tuple.left, &tuple.right);
            prop_assert!(tuple.left < tuple.right);
            for member in tuple.left.iter().chain(&tuple.right) {
                prop_assert!(f.members().contains(member));
            }
        }
    }

    #[test]
    fn adding_members_preserves_collisions(f in family_strategy(7), extra in kset_strategy(3)) {
        let before = find_nontrivial_quadruples(&f, DetectOptions::default()).unwrap();
        let mut members = f.members().to_vec();
        if !members.contains(&extra) {
            members.push(extra);
        }
        let superfamily = Family::new(members).unwrap();
        let after = find_nontrivial_quadruples(&superfamily, DetectOptions::default()).unwrap();
        for tuple in &before {
            prop_assert!(after.contains(tuple));
        }
    }

    #[test]
    fn detection_is_translation_invariant(f in family_strategy(7), z in -15i64..15) {
        let shifted = Family::new(
            f.members().iter().map(|m| m.translate(z).unwrap()).collect(),
        )
        .unwrap();
        let base = find_nontrivial_quadruples(&f, DetectOptions::default()).unwrap();
        let moved = find_nontrivial_quadruples(&shifted, DetectOptions::default()).unwrap();
        prop_assert_eq!(base.len(), moved.len());
        for (t, s) in base.iter().zip(&moved) {
            prop_assert_eq!(&t.common_sumset.translate(2 * z).unwrap(), &s.common_sumset);
        }
    }

    #[test]
    fn three_fold_systems_are_sidon_systems(f in family_strategy(7)) {
        if is_b_h_system(&f, 3, DetectOptions::default()).unwrap() {
            prop_assert!(is_sidon_system(&f, DetectOptions::default()).unwrap());
        }
    }

    #[test]
    fn extraction_invariants(f in uniform_family_strategy(3, 10), h in 2u32..=3) {
        let (extracted, stats) = zero_statement_extraction(&f, 3, h).unwrap();
        prop_assert_eq!(stats.family_size as usize, f.len());
        prop_assert!(stats.extracted_size <= stats.represented_classes);
        prop_assert_eq!(
            stats.represented_classes - stats.bad_classes,
            stats.extracted_size
        );
        let ell_value = u32::try_from(ell(3, h).unwrap().ell).unwrap();
        let mut classes = std::collections::HashSet::new();
        for member in extracted.members() {
            prop_assert!(f.members().contains(member));
            let class = member.normalize().unwrap().into_kset();
            prop_assert!(class.is_b_h(ell_value).unwrap());
            prop_assert!(classes.insert(class), "two translates of one class");
        }
        // The pair-collision guarantee is unconditional; its three-fold
        // analogue is not (see three_fold_collisions_survive_the_filter in
        // the construct module), so assert it only at h = 2.
        if h == 2 {
            prop_assert!(is_b_h_system(&extracted, h, DetectOptions::default()).unwrap());
        }
    }
}

#[test]
fn b_h_is_downward_closed_exhaustively() {
    // Over all 3-subsets of {0..12}: a level-h certificate survives every
    // cut to a smaller h, because padded collisions stay collisions.
    for a in 0i64..=12 {
        for b in a + 1..=12 {
            for c in b + 1..=12 {
                let set = KSet::new(vec![a, b, c]).unwrap();
                for h in 2u32..=4 {
                    if set.is_b_h(h).unwrap() {
                        assert!(
                            set.is_b_h(h - 1).unwrap(),
                            "{set} is B_{h} but not B_{}",
                            h - 1
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn filtration_levels_are_monotone() {
    for h in 2u32..=4 {
        for k in 1u32..=8 {
            let here = ell(k, h).unwrap();
            assert_eq!(here.ell, 1u64 << (here.i_zero + 1));
            assert!(ell(k + 1, h).unwrap().ell >= here.ell);
            assert!(ell(k, h + 1).unwrap().ell >= here.ell);
            // The recursion stops at the first level whose j value clears
            // k^(h-1); check the stopping rule from the decimal rendering.
            let threshold = u128::from(k).pow(h - 1);
            let js: Vec<u128> = here
                .j_sequence_decimal()
                .iter()
                .map(|s| s.parse().unwrap())
                .collect();
            assert_eq!(js.len(), here.i_zero + 1);
            assert!(*js.last().unwrap() > threshold);
            for j in &js[..js.len() - 1] {
                assert!(*j <= threshold);
            }
        }
    }
}

#[test]
fn trace_accepts_trivial_quadruples_from_filtered_families() {
    let (k3, _) = construct_normalized(12, 3, 2, DEFAULT_WORK_CAP).unwrap();
    let (k2, _) = construct_normalized(9, 2, 2, DEFAULT_WORK_CAP).unwrap();
    for family in [&k3, &k2] {
        for a in family.members() {
            for b in family.members() {
                let direct = structural_trace(a, b, a, b, 2).unwrap();
                assert_eq!(direct.verdict, TraceVerdict::PairsEqual, "{a} {b}");
                let swapped = structural_trace(a, b, b, a, 2).unwrap();
                assert_eq!(swapped.verdict, TraceVerdict::PairsEqual, "{a} {b}");
                assert_ne!(direct.verdict, TraceVerdict::TheoremViolation);
            }
        }
    }
}

#[test]
fn oracle_agrees_on_dense_singleton_family() {
    // Singletons give the densest collision structure; a direct order and
    // content comparison against the definition-level scan.
    let family = Family::new((0..6).map(|i| KSet::new(vec![i]).unwrap()).collect()).unwrap();
    let fast = find_nontrivial_quadruples(&family, DetectOptions::default()).unwrap();
    let slow = common::oracle_quadruples(&family);
    assert_eq!(fast, slow);
    assert!(!fast.is_empty());
}

#[test]
fn same_min_sweep_matches_unfiltered_class_detection() {
    // find_same_min_quadruples is definitionally detection over the full
    // normalized-class family.
    use sidonkit::systems::find_same_min_quadruples;
    for (n, k) in [(6i64, 3u32), (5, 2), (4, 3)] {
        let classes = normalized_classes(n, k, DEFAULT_WORK_CAP).unwrap();
        let family = Family::new(classes).unwrap();
        let direct = find_nontrivial_quadruples(&family, DetectOptions::default()).unwrap();
        let swept = find_same_min_quadruples(n, k, DetectOptions::default()).unwrap();
        assert_eq!(direct, swept);
    }
}
