//! Exact and greedy extremal search: largest B_h-systems of k-subsets of
//! {1..n} on instances small enough to enumerate.
//!
//! The exact search is depth-first branch and bound over a fixed
//! lexicographic ground order, include branch first. Compatibility is
//! tracked with a table of h-fold sumsets of member multisets; adding a
//! member contributes exactly the multisets that contain it, so the check
//! and the rollback are both incremental. Sizes are certified optimal
//! unless the node budget runs out; witnesses are reproducible because the
//! branch order is fixed.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::binom::binomial;
use crate::groundset::KSet;
use crate::systems::{upper_bound, Family};
use crate::{Error, Result};

/// Ground-set ceiling for the greedy scan.
const GREEDY_GROUND_CAP: u128 = 1_000_000;

/// Resource limits for the exact search.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Largest ground-set count accepted by exact mode.
    pub max_ground_sets: u64,
    /// Search nodes explored before giving up on optimality.
    pub node_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_ground_sets: 40,
            node_budget: 10_000_000,
        }
    }
}

/// Member order for the greedy scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyOrder {
    Lexicographic,
    Random { seed: u64 },
}

/// Result of an exact search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub size: u64,
    pub witness: Family,
    /// False when the node budget ran out before the size was certified.
    pub optimal: bool,
    pub nodes: u64,
}

/// All k-subsets of {1..n} in lexicographic order.
fn ground_sets(n: u64, k: u32) -> Vec<KSet> {
    if k == 0 || u64::from(k) > n {
        return Vec::new();
    }
    let k = k as usize;
    let mut out = Vec::new();
    let mut current = vec![0i64; k];
    fn extend(current: &mut Vec<i64>, depth: usize, k: usize, n: i64, out: &mut Vec<KSet>) {
        if depth == k {
            out.push(KSet::new(current.clone()).expect("strictly increasing by construction"));
            return;
        }
        let lo = if depth == 0 { 1 } else { current[depth - 1] + 1 };
        for v in lo..=(n - (k - depth - 1) as i64) {
            current[depth] = v;
            extend(current, depth + 1, k, n, out);
        }
    }
    extend(&mut current, 0, k, n as i64, &mut out);
    out
}

/// Incremental conflict table: the h-fold sumsets of every size-h member
/// multiset of the current family, all distinct.
struct ConflictTable {
    h: u32,
    keys: HashSet<KSet>,
    members: Vec<KSet>,
}

impl ConflictTable {
    fn new(h: u32) -> Self {
        ConflictTable {
            h,
            keys: HashSet::new(),
            members: Vec::new(),
        }
    }

    /// Sumsets of all h-multisets over `members` + {candidate} that use the
    /// candidate at least once: j copies of it plus an (h-j)-multiset of
    /// existing members, for j = 1..h.
    fn new_keys(&self, candidate: &KSet) -> Result<Vec<KSet>> {
        let mut keys = Vec::new();
        for j in 1..=self.h {
            let base = candidate.h_fold_sumset(j)?;
            let rest = self.h - j;
            if rest == 0 {
                keys.push(base);
                continue;
            }
            // Odometer over nondecreasing index tuples of length `rest`.
            if self.members.is_empty() {
                continue;
            }
            let m = self.members.len();
            let mut idx = vec![0usize; rest as usize];
            loop {
                let mut key = base.clone();
                for &i in &idx {
                    key = key.sumset(&self.members[i])?;
                }
                keys.push(key);
                let mut p = rest as usize;
                loop {
                    if p == 0 {
                        break;
                    }
                    p -= 1;
                    if idx[p] + 1 < m {
                        let next = idx[p] + 1;
                        for slot in idx.iter_mut().skip(p) {
                            *slot = next;
                        }
                        break;
                    }
                    if p == 0 {
                        idx.clear();
                        break;
                    }
                }
                if idx.is_empty() {
                    break;
                }
            }
        }
        Ok(keys)
    }

    /// Add the candidate if all its new sumsets are fresh; returns whether
    /// it was added. On success the new keys are recorded for rollback.
    fn try_add(&mut self, candidate: &KSet) -> Result<Option<Vec<KSet>>> {
        let keys = self.new_keys(candidate)?;
        let mut fresh: HashSet<&KSet> = HashSet::with_capacity(keys.len());
        for key in &keys {
            if self.keys.contains(key) || !fresh.insert(key) {
                return Ok(None);
            }
        }
        for key in &keys {
            self.keys.insert(key.clone());
        }
        self.members.push(candidate.clone());
        Ok(Some(keys))
    }

    fn rollback(&mut self, keys: &[KSet]) {
        for key in keys {
            self.keys.remove(key);
        }
        self.members.pop();
    }
}

fn check_extremal_domain(k: u32, h: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if h < 2 {
        return Err(Error::Domain("h must be at least 2".into()));
    }
    Ok(())
}

/// Scan the ground sets in the given order, keeping each set whose
/// addition leaves every h-fold sumset distinct.
pub fn greedy_sidon(n: u64, k: u32, h: u32, order: GreedyOrder) -> Result<Family> {
    check_extremal_domain(k, h)?;
    let count = binomial(n, u64::from(k)).ok_or(Error::Overflow)?;
    if count > GREEDY_GROUND_CAP {
        return Err(Error::ResourceGuard {
            required: count,
            cap: GREEDY_GROUND_CAP,
        });
    }
    let mut ground = ground_sets(n, k);
    if let GreedyOrder::Random { seed } = order {
        ground.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut table = ConflictTable::new(h);
    for candidate in &ground {
        table.try_add(candidate)?;
    }
    Family::new(table.members)
}

struct SearchState {
    table: ConflictTable,
    current: Vec<KSet>,
    best: Vec<KSet>,
    nodes: u64,
    node_budget: u64,
    budget_exhausted: bool,
    /// Proven ceiling on the achievable size, when one is known.
    size_cap: Option<u128>,
}

impl SearchState {
    fn cap_reached(&self) -> bool {
        matches!(self.size_cap, Some(cap) if self.best.len() as u128 >= cap)
    }

    fn dfs(&mut self, ground: &[KSet], idx: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            self.budget_exhausted = true;
            return Ok(());
        }
        if self.current.len() + (ground.len() - idx) <= self.best.len() {
            return Ok(());
        }
        if idx == ground.len() {
            return Ok(());
        }
        if let Some(keys) = self.table.try_add(&ground[idx])? {
            self.current.push(ground[idx].clone());
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
            if !self.cap_reached() {
                self.dfs(ground, idx + 1)?;
            }
            self.current.pop();
            self.table.rollback(&keys);
        }
        if self.budget_exhausted || self.cap_reached() {
            return Ok(());
        }
        self.dfs(ground, idx + 1)
    }
}

/// Maximum-size B_h-system of k-subsets of {1..n}, by branch and bound.
///
/// The greedy lexicographic family seeds the incumbent. For k >= 2 the
/// counting bound on Sidon systems caps the search, which also applies to
/// every B_h-system with h >= 2 since pair collisions lift to h-fold
/// collisions. `optimal` is false only when the node budget was exhausted.
pub fn exact_max_sidon(n: u64, k: u32, h: u32, limits: SearchLimits) -> Result<SearchOutcome> {
    check_extremal_domain(k, h)?;
    let count = binomial(n, u64::from(k)).ok_or(Error::Overflow)?;
    if count > u128::from(limits.max_ground_sets) {
        return Err(Error::InstanceTooLarge {
            ground_sets: count,
            limit: limits.max_ground_sets,
        });
    }
    let ground = ground_sets(n, k);
    let warm = greedy_sidon(n, k, h, GreedyOrder::Lexicographic)?;
    let size_cap = if k >= 2 && n > u64::from(k) {
        Some(upper_bound(n, k)?)
    } else {
        None
    };
    let mut state = SearchState {
        table: ConflictTable::new(h),
        current: Vec::new(),
        best: warm.members().to_vec(),
        nodes: 0,
        node_budget: limits.node_budget,
        budget_exhausted: false,
        size_cap,
    };
    if !state.cap_reached() && !ground.is_empty() {
        state.dfs(&ground, 0)?;
    }
    Ok(SearchOutcome {
        size: state.best.len() as u64,
        witness: Family::new(state.best)?,
        optimal: !state.budget_exhausted,
        nodes: state.nodes,
    })
}
