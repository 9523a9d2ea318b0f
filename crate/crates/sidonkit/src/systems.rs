//! Families of integer sets and exhaustive additive-collision detection.
//!
//! A family is additively h-distinguishing (a Sidon system when h = 2) if
//! distinct unordered h-tuples of members always have distinct h-fold
//! sumsets. Detection enumerates every nondecreasing index tuple, computes
//! its sumset, and groups equal sumsets; any group with two or more tuples
//! is a collision. Enumeration order is the lex order of index tuples, and
//! grouping is performed sequentially after ordered parallel key
//! computation, so results do not depend on the number of worker threads.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::binom::binomial;
use crate::groundset::KSet;
use crate::{Error, Result};

/// Tuples per parallel work chunk.
const CHUNK: u64 = 1 << 15;
/// Chunks evaluated per batch; bounds transient key memory.
const BATCH_CHUNKS: usize = 16;
/// Below this tuple count a plain sequential scan is used.
const SEQUENTIAL_CUTOFF: u128 = 1 << 14;
/// Emission ceiling when no explicit limit is requested.
const MAX_EMITTED: usize = 1_000_000;

/// A family of distinct sets, kept in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Family {
    members: Vec<KSet>,
}

impl Family {
    /// Builds a family from the given members, sorting them; duplicate
    /// members are rejected.
    pub fn new(mut members: Vec<KSet>) -> Result<Family> {
        members.sort();
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Domain(format!("duplicate member {}", w[0])));
            }
        }
        Ok(Family { members })
    }

    pub fn members(&self) -> &[KSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Common member cardinality, if every member has the same one.
    pub fn uniform_cardinality(&self) -> Option<usize> {
        let first = self.members.first()?.len();
        self.members
            .iter()
            .all(|m| m.len() == first)
            .then_some(first)
    }

    /// Parses the line-oriented text format: one set per line as
    /// comma-separated integers in strictly increasing order; blank lines
    /// and lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Family> {
        let mut members = Vec::new();
        let mut seen: HashMap<KSet, usize> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let data = raw.trim();
            if data.is_empty() || data.starts_with('#') {
                continue;
            }
            let mut elements = Vec::new();
            for piece in data.split(',') {
                let piece = piece.trim();
                elements.push(piece.parse::<i64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad integer {piece:?}: {e}"),
                })?);
            }
            let set = KSet::new(elements).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if let Some(first) = seen.insert(set.clone(), line_no) {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate of the set on line {first}"),
                });
            }
            members.push(set);
        }
        members.sort();
        Ok(Family { members })
    }

    /// Renders the family in the text format accepted by `from_text`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.members {
            let line: Vec<String> = m.elements().iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(", "));
            out.push('\n');
        }
        out
    }
}

/// Canonical identifier of an h-fold sumset: its full ascending value list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SumsetKey(KSet);

impl SumsetKey {
    pub fn as_set(&self) -> &KSet {
        &self.0
    }
}

/// Two distinct unordered member tuples sharing one sumset. `left` is the
/// lexicographically smaller tuple; both are in ascending member order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdditiveTuple {
    pub left: Vec<KSet>,
    pub right: Vec<KSet>,
    pub common_sumset: KSet,
}

/// Resource knobs for exhaustive detection.
#[derive(Debug, Clone, Copy)]
pub struct DetectOptions {
    /// Maximum number of index tuples that may be enumerated.
    pub cap: u128,
    /// Maximum number of collision pairs to report; `None` applies a
    /// generous built-in ceiling.
    pub limit: Option<usize>,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            cap: crate::DEFAULT_WORK_CAP,
            limit: None,
        }
    }
}

fn tuple_count(m: usize, h: u32) -> Option<u128> {
    binomial(m as u64 + h as u64 - 1, h as u64)
}

/// Nondecreasing index tuple with the given lexicographic rank, over
/// indices 0..m. Inverse of the enumeration order used by detection.
fn unrank_tuple(mut rank: u128, m: usize, h: u32) -> Vec<u32> {
    let m = m as u64;
    let mut out = Vec::with_capacity(h as usize);
    let mut lo = 0u64;
    for pos in 0..h {
        let rem = (h - pos - 1) as u64;
        // tuples whose entry at `pos` is >= i (later entries free):
        // C(m - i + rem, rem + 1), decreasing in i.
        let total_lo = binomial(m - lo + rem, rem + 1).expect("within counted range");
        let (mut a, mut b) = (lo, m - 1);
        while a < b {
            let mid = (a + b).div_ceil(2);
            let consumed = total_lo - binomial(m - mid + rem, rem + 1).expect("within range");
            if consumed <= rank {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        rank -= total_lo - binomial(m - a + rem, rem + 1).expect("within range");
        out.push(a as u32);
        lo = a;
    }
    out
}

/// Advances a nondecreasing tuple to its lex successor; false at the end.
fn advance_tuple(idx: &mut [u32], m: usize) -> bool {
    let last = (m - 1) as u32;
    for p in (0..idx.len()).rev() {
        if idx[p] < last {
            let v = idx[p] + 1;
            for slot in idx.iter_mut().skip(p) {
                *slot = v;
            }
            return true;
        }
    }
    false
}

fn tuple_sumset(family: &Family, idx: &[u32]) -> Result<KSet> {
    let mut acc = family.members[idx[0] as usize].clone();
    for &i in &idx[1..] {
        acc = acc.sumset(&family.members[i as usize])?;
    }
    Ok(acc)
}

/// Finds every pair of distinct unordered h-tuples of members with equal
/// h-fold sumsets, in ascending (common sumset, left, right) order.
/// Repeated members within a tuple are allowed; an empty result means the
/// family is additively h-distinguishing.
pub fn find_nontrivial_h_tuples(
    family: &Family,
    h: u32,
    opts: DetectOptions,
) -> Result<Vec<AdditiveTuple>> {
    if h == 0 {
        return Err(Error::Domain("h must be at least 1".into()));
    }
    let m = family.len();
    let count = tuple_count(m, h).ok_or(Error::Overflow)?;
    if count > opts.cap {
        return Err(Error::ResourceGuard {
            required: count,
            cap: opts.cap,
        });
    }
    if count < 2 {
        return Ok(Vec::new());
    }

    let mut groups: HashMap<KSet, Vec<u64>> = HashMap::new();
    let count64 = count as u64;
    if count <= SEQUENTIAL_CUTOFF {
        let mut idx = vec![0u32; h as usize];
        let mut rank = 0u64;
        loop {
            let key = tuple_sumset(family, &idx)?;
            groups.entry(key).or_default().push(rank);
            rank += 1;
            if !advance_tuple(&mut idx, m) {
                break;
            }
        }
        debug_assert_eq!(rank, count64);
    } else {
        // Ordered parallel key computation in bounded batches, sequential
        // grouping: identical results for any worker count.
        let chunk_starts: Vec<u64> = (0..count64).step_by(CHUNK as usize).collect();
        for batch in chunk_starts.chunks(BATCH_CHUNKS) {
            let computed: Vec<Result<Vec<KSet>>> = batch
                .par_iter()
                .map(|&start| {
                    let len = CHUNK.min(count64 - start);
                    let mut idx = unrank_tuple(start as u128, m, h);
                    let mut keys = Vec::with_capacity(len as usize);
                    for step in 0..len {
                        keys.push(tuple_sumset(family, &idx)?);
                        if step + 1 < len && !advance_tuple(&mut idx, m) {
                            return Err(Error::Domain("enumeration ended early".into()));
                        }
                    }
                    Ok(keys)
                })
                .collect();
            for (&start, keys) in batch.iter().zip(computed) {
                for (offset, key) in keys?.into_iter().enumerate() {
                    groups.entry(key).or_default().push(start + offset as u64);
                }
            }
        }
    }

    let mut colliding: Vec<(KSet, Vec<u64>)> = groups
        .into_iter()
        .filter(|(_, ranks)| ranks.len() >= 2)
        .collect();
    colliding.sort_by(|a, b| a.0.cmp(&b.0));

    let cap_out = opts.limit.unwrap_or(MAX_EMITTED);
    let mut out = Vec::new();
    'emit: for (key, ranks) in colliding {
        for (p, &r1) in ranks.iter().enumerate() {
            for &r2 in &ranks[p + 1..] {
                if out.len() >= cap_out {
                    break 'emit;
                }
                let make = |rank: u64| -> Vec<KSet> {
                    unrank_tuple(rank as u128, m, h)
                        .iter()
                        .map(|&i| family.members[i as usize].clone())
                        .collect()
                };
                out.push(AdditiveTuple {
                    left: make(r1),
                    right: make(r2),
                    common_sumset: key.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// The h = 2 case of `find_nontrivial_h_tuples`: every pair of distinct
/// unordered member pairs with equal sumsets.
pub fn find_nontrivial_quadruples(
    family: &Family,
    opts: DetectOptions,
) -> Result<Vec<AdditiveTuple>> {
    find_nontrivial_h_tuples(family, 2, opts)
}

/// True when distinct unordered h-tuples always have distinct sumsets.
pub fn is_b_h_system(family: &Family, h: u32, opts: DetectOptions) -> Result<bool> {
    let probe = DetectOptions {
        limit: Some(1),
        ..opts
    };
    Ok(find_nontrivial_h_tuples(family, h, probe)?.is_empty())
}

/// The h = 2 case: distinct unordered pairs have distinct sumsets.
pub fn is_sidon_system(family: &Family, opts: DetectOptions) -> Result<bool> {
    is_b_h_system(family, 2, opts)
}

/// Exhaustively searches the k-subsets of {0..n} containing 0 — all of
/// them, with no filtering — for nontrivial equal-sumset quadruples.
/// Every member contains 0, so any reported quadruple shares its minimum.
pub fn find_same_min_quadruples(
    n: i64,
    k: u32,
    opts: DetectOptions,
) -> Result<Vec<AdditiveTuple>> {
    let classes = crate::groundset::normalized_classes(n, k, opts.cap)?;
    let family = Family::new(classes)?;
    find_nontrivial_quadruples(&family, opts)
}

/// Size ceiling for pairwise-distinguishing families of k-subsets of
/// {1..n}: C(n-1, k-1) + n - k. Requires n > k >= 2.
pub fn upper_bound(n: u64, k: u32) -> Result<u128> {
    if k < 2 {
        return Err(Error::Domain("bound needs k at least 2".into()));
    }
    if n <= k as u64 {
        return Err(Error::Domain("bound needs n greater than k".into()));
    }
    let b = binomial(n - 1, k as u64 - 1).ok_or(Error::Overflow)?;
    b.checked_add((n - k as u64) as u128).ok_or(Error::Overflow)
}

/// Pair sumset key via checked addition, sort, and dedup.
pub fn pair_key_merge(a: &KSet, b: &KSet) -> Result<SumsetKey> {
    Ok(SumsetKey(a.sumset(b)?))
}

/// Pair sumset key via a bit table over the value range; equivalent to
/// `pair_key_merge` for nonnegative sets with a bounded span.
pub fn pair_key_dense(a: &KSet, b: &KSet) -> Result<SumsetKey> {
    if a.min() < 0 || b.min() < 0 {
        return Err(Error::Domain("dense path needs nonnegative elements".into()));
    }
    let max = a.max().checked_add(b.max()).ok_or(Error::Overflow)?;
    if max >= (1 << 24) {
        return Err(Error::Domain("value range too large for the dense path".into()));
    }
    let words = (max as usize >> 6) + 1;
    let mut bits = vec![0u64; words];
    for &x in a.elements() {
        for &y in b.elements() {
            let s = (x + y) as usize;
            bits[s >> 6] |= 1u64 << (s & 63);
        }
    }
    let mut values = Vec::new();
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let bit = word.trailing_zeros() as usize;
            values.push(((w << 6) + bit) as i64);
            word &= word - 1;
        }
    }
    Ok(SumsetKey(KSet::new(values)?))
}
