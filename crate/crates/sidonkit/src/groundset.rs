//! Finite integer sets and their additive arithmetic.
//!
//! `KSet` is a nonempty, strictly increasing sequence of i64 elements. All
//! arithmetic is overflow-checked. B_h membership has two deliberately
//! independent implementations: a staged cardinality scan (`is_b_h`) used on
//! hot paths, and a definition-level multiset enumeration (`b_h_collision`)
//! that also produces a witness; the test suite holds them equal.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::binom::binomial;
use crate::{Error, Result};

/// Cap on the final stage size of the cardinality scan.
const BH_SCAN_CAP: u128 = 20_000_000;
/// Cap on enumerated multisets in the definition-level oracle.
const BH_ENUM_CAP: u128 = 2_000_000;

/// A finite set of integers, stored strictly increasing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct KSet(Vec<i64>);

impl KSet {
    /// Build from an already strictly increasing sequence.
    pub fn new(elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Domain("a set needs at least one element".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "elements must be strictly increasing".into(),
            ));
        }
        Ok(KSet(elements))
    }

    /// Build from arbitrary values, sorting and collapsing duplicates.
    pub fn from_unsorted(mut elements: Vec<i64>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        Self::new(elements)
    }

    fn from_sorted_dedup(elements: Vec<i64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(!elements.is_empty());
        KSet(elements)
    }

    pub fn elements(&self) -> &[i64] {
        &self.0
    }

    // Never empty, so no is_empty counterpart.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn min(&self) -> i64 {
        self.0[0]
    }

    pub fn max(&self) -> i64 {
        *self.0.last().unwrap()
    }

    /// Second-smallest element, if the set has one.
    pub fn second_min(&self) -> Option<i64> {
        self.0.get(1).copied()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &KSet) -> bool {
        let mut it = other.0.iter();
        'outer: for &a in &self.0 {
            for &b in it.by_ref() {
                if b == a {
                    continue 'outer;
                }
                if b > a {
                    return false;
                }
            }
            return false;
        }
        true
    }

    /// Elements common to both sets, None when disjoint.
    pub fn intersect(&self, other: &KSet) -> Option<KSet> {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        if out.is_empty() {
            None
        } else {
            Some(KSet(out))
        }
    }

    pub fn intersection_size(&self, other: &KSet) -> usize {
        self.intersect(other).map_or(0, |s| s.len())
    }

    /// A + B = { a + b : a in A, b in B }.
    pub fn sumset(&self, other: &KSet) -> Result<KSet> {
        let mut sums = Vec::with_capacity(self.0.len() * other.0.len());
        for &a in &self.0 {
            for &b in &other.0 {
                sums.push(a.checked_add(b).ok_or(Error::Overflow)?);
            }
        }
        sums.sort_unstable();
        sums.dedup();
        Ok(KSet(sums))
    }

    /// h-fold iterated sumset hA, h >= 1.
    pub fn h_fold_sumset(&self, h: u32) -> Result<KSet> {
        if h == 0 {
            return Err(Error::Domain("fold count must be at least 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..h {
            acc = acc.sumset(self)?;
        }
        Ok(acc)
    }

    pub fn translate(&self, z: i64) -> Result<KSet> {
        let shifted = self
            .0
            .iter()
            .map(|&a| a.checked_add(z).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(KSet(shifted))
    }

    /// Multiply every element by a nonzero constant.
    pub fn dilate(&self, c: i64) -> Result<KSet> {
        if c == 0 {
            return Err(Error::Domain("dilation constant must be nonzero".into()));
        }
        let mut scaled = self
            .0
            .iter()
            .map(|&a| a.checked_mul(c).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        if c < 0 {
            scaled.reverse();
        }
        Ok(KSet(scaled))
    }

    /// Translate so the minimum becomes 0.
    pub fn normalize(&self) -> Result<NormalizedClass> {
        let m = self.min();
        let shifted = self
            .0
            .iter()
            .map(|&a| a.checked_sub(m).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(NormalizedClass(KSet(shifted)))
    }

    /// Whether all h-element multisets of this set have distinct sums.
    ///
    /// Staged cardinality scan: the i-fold sumset of a B_i set has exactly
    /// C(k+i-1, i) elements, and a shortfall at any stage i <= h already
    /// refutes B_h (pad both colliding multisets with a common element).
    pub fn is_b_h(&self, h: u32) -> Result<bool> {
        if h == 0 {
            return Err(Error::Domain("h must be at least 1".into()));
        }
        let k = self.0.len() as u64;
        let mut acc = self.clone();
        for i in 2..=u64::from(h) {
            let expected = binomial(k + i - 1, i).ok_or(Error::Overflow)?;
            if expected > BH_SCAN_CAP {
                return Err(Error::ResourceGuard {
                    required: expected,
                    cap: BH_SCAN_CAP,
                });
            }
            acc = acc.sumset(self)?;
            debug_assert!((acc.len() as u128) <= expected);
            if (acc.len() as u128) < expected {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First pair of distinct h-element multisets with equal sum, if any.
    ///
    /// Definition-level oracle: enumerates nondecreasing h-tuples of elements
    /// in lexicographic order and reports the first repeated total. `None`
    /// means the set is B_h.
    pub fn b_h_collision(&self, h: u32) -> Result<Option<BhCollision>> {
        if h == 0 {
            return Err(Error::Domain("h must be at least 1".into()));
        }
        let k = self.0.len();
        let count = binomial((k as u64) + u64::from(h) - 1, u64::from(h)).ok_or(Error::Overflow)?;
        if count > BH_ENUM_CAP {
            return Err(Error::ResourceGuard {
                required: count,
                cap: BH_ENUM_CAP,
            });
        }
        let h = h as usize;
        let mut seen: HashMap<i64, Vec<i64>> = HashMap::with_capacity(count as usize);
        // Odometer over nondecreasing index tuples.
        let mut idx = vec![0usize; h];
        loop {
            let mut sum = 0i64;
            for &i in &idx {
                sum = sum.checked_add(self.0[i]).ok_or(Error::Overflow)?;
            }
            let tuple: Vec<i64> = idx.iter().map(|&i| self.0[i]).collect();
            if let Some(first) = seen.get(&sum) {
                return Ok(Some(BhCollision {
                    first: first.clone(),
                    second: tuple,
                    sum,
                }));
            }
            seen.insert(sum, tuple);
            // Advance: bump the rightmost position that can still grow and
            // reset the tail to the same value, keeping the tuple
            // nondecreasing.
            let mut pos = h;
            loop {
                if pos == 0 {
                    return Ok(None);
                }
                pos -= 1;
                if idx[pos] + 1 < k {
                    let next = idx[pos] + 1;
                    for slot in &mut idx[pos..] {
                        *slot = next;
                    }
                    break;
                }
            }
        }
    }
}

impl fmt::Debug for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for KSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// A set translated so its minimum is 0; the canonical representative of a
/// translation class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NormalizedClass(KSet);

impl NormalizedClass {
    pub fn as_kset(&self) -> &KSet {
        &self.0
    }

    pub fn into_kset(self) -> KSet {
        self.0
    }
}

/// Two distinct h-element multisets (sorted ascending) with the same total.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BhCollision {
    pub first: Vec<i64>,
    pub second: Vec<i64>,
    pub sum: i64,
}

/// All k-sets in {0..n} containing 0, in lexicographic order.
///
/// There are C(n, k-1) of them; `cap` bounds that count.
pub fn normalized_classes(n: i64, k: u32, cap: u128) -> Result<Vec<KSet>> {
    if n < 0 {
        return Err(Error::Domain("n must be nonnegative".into()));
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let count = binomial(n as u64, u64::from(k) - 1).ok_or(Error::Overflow)?;
    if count > cap {
        return Err(Error::ResourceGuard {
            required: count,
            cap,
        });
    }
    let k = k as usize;
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0i64; k];
    fn extend(current: &mut Vec<i64>, depth: usize, k: usize, n: i64, out: &mut Vec<KSet>) {
        if depth == k {
            out.push(KSet::from_sorted_dedup(current.clone()));
            return;
        }
        let lo = current[depth - 1] + 1;
        for v in lo..=(n - (k - depth - 1) as i64) {
            current[depth] = v;
            extend(current, depth + 1, k, n, out);
        }
    }
    if k == 1 {
        out.push(KSet::from_sorted_dedup(vec![0]));
    } else {
        extend(&mut current, 1, k, n, &mut out);
    }
    Ok(out)
}
