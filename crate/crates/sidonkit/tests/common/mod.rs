//! Independent oracles: definition-level reimplementations used to
//! cross-check the library's optimized paths. Everything here favors the
//! most literal possible reading over speed.

#![allow(dead_code)]

use std::collections::BTreeMap;

use sidonkit::{AdditiveTuple, Family, KSet};

/// Sumset by double loop over raw slices.
pub fn brute_sumset(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| x + y))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// h-fold sumset by repeated application of `brute_sumset`.
pub fn brute_h_fold(a: &[i64], h: u32) -> Vec<i64> {
    assert!(h >= 1);
    let mut acc = a.to_vec();
    for _ in 1..h {
        acc = brute_sumset(&acc, a);
    }
    acc
}

/// All sums of h-element multisets drawn from `a`, as (multiset, sum)
/// pairs in lexicographic multiset order.
pub fn multiset_sums(a: &[i64], h: u32) -> Vec<(Vec<i64>, i64)> {
    fn extend(a: &[i64], left: u32, start: usize, current: &mut Vec<i64>, out: &mut Vec<(Vec<i64>, i64)>) {
        if left == 0 {
            out.push((current.clone(), current.iter().sum()));
            return;
        }
        for i in start..a.len() {
            current.push(a[i]);
            extend(a, left - 1, i, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(a, h, 0, &mut Vec::new(), &mut out);
    out
}

/// B_h test straight from the definition: distinct h-multisets never share
/// a sum.
pub fn brute_is_b_h_set(a: &[i64], h: u32) -> bool {
    let sums = multiset_sums(a, h);
    let mut seen = std::collections::HashSet::new();
    sums.iter().all(|(_, s)| seen.insert(*s))
}

/// Classical Sidon test for a plain integer set.
pub fn brute_is_sidon_set(a: &[i64]) -> bool {
    brute_is_b_h_set(a, 2)
}

/// Maximum classical Sidon subset of {1..n} by scanning all subsets.
pub fn brute_max_sidon_subset(n: u32) -> usize {
    assert!(n <= 20);
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let subset: Vec<i64> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| i as i64 + 1)
            .collect();
        if subset.len() > best && brute_is_sidon_set(&subset) {
            best = subset.len();
        }
    }
    best
}

/// Nondecreasing index tuples of length h over 0..m, lexicographically.
fn index_tuples(m: usize, h: u32) -> Vec<Vec<usize>> {
    fn extend(m: usize, left: u32, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            current.push(i);
            extend(m, left - 1, i, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(m, h, 0, &mut Vec::new(), &mut out);
    out
}

/// Definition-level collision scan: enumerate every unordered h-tuple of
/// members, group equal sumsets, and emit colliding tuple pairs in the
/// canonical order (groups by ascending sumset, pairs by enumeration
/// rank). Mirrors the library's output contract with none of its
/// machinery.
pub fn oracle_h_tuples(family: &Family, h: u32) -> Vec<AdditiveTuple> {
    let members = family.members();
    let tuples = index_tuples(members.len(), h);
    let mut by_sumset: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (rank, tuple) in tuples.iter().enumerate() {
        let mut sum = members[tuple[0]].elements().to_vec();
        for &idx in &tuple[1..] {
            sum = brute_sumset(&sum, members[idx].elements());
        }
        by_sumset.entry(sum).or_default().push(rank);
    }
    let mut out = Vec::new();
    for (sum, ranks) in by_sumset {
        if ranks.len() < 2 {
            continue;
        }
        let key = KSet::new(sum).expect("sumsets are nonempty and increasing");
        for i in 0..ranks.len() {
            for j in i + 1..ranks.len() {
                let pick = |rank: usize| -> Vec<KSet> {
                    tuples[rank].iter().map(|&t| members[t].clone()).collect()
                };
                out.push(AdditiveTuple {
                    left: pick(ranks[i]),
                    right: pick(ranks[j]),
                    common_sumset: key.clone(),
                });
            }
        }
    }
    out
}

/// Quadruple case of the oracle.
pub fn oracle_quadruples(family: &Family) -> Vec<AdditiveTuple> {
    oracle_h_tuples(family, 2)
}
