//! Seeded Monte Carlo experiments on random families of k-subsets of
//! {1..n}, around the density threshold for delta-additivity.
//!
//! Each trial samples a binomial random family, then evaluates two
//! one-sided certificates: a counting certificate (a large-enough family
//! is delta-additive outright) and an extraction certificate (a large
//! filtered subsystem witnesses that it is not). Neither firing is a
//! reported outcome, not an error. Trials derive independent RNG streams
//! from (seed, trial index), so records are reproducible under any
//! execution order.

use std::fmt;
use std::io::Write;

use rand::distributions::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use rayon::prelude::*;
use serde::Serialize;

use crate::binom::{binomial, binomial_f64};
use crate::certify::ell;
use crate::groundset::KSet;
use crate::systems::{find_nontrivial_h_tuples, upper_bound, DetectOptions, Family};
use crate::{Error, Result};

/// Parameters of one experiment sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: u64,
    pub k: u32,
    pub h: u32,
    /// Per-set inclusion probability.
    pub p: f64,
    /// Subfamily fraction in the additivity notion under test.
    pub delta: f64,
    /// Slack used only when reporting threshold constants.
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
    /// Tuple-count ceiling for per-trial verification of the extracted
    /// subfamily; larger extractions are recorded as skipped.
    pub verify_cap: u128,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.k < 2 || self.n <= u64::from(self.k) {
            return Err(Error::Domain(format!(
                "need n > k >= 2; got n={}, k={}",
                self.n, self.k
            )));
        }
        if self.h < 2 {
            return Err(Error::Domain("h must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p must lie in [0,1]; got {}", self.p)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain(format!(
                "delta must lie in (0,1); got {}",
                self.delta
            )));
        }
        if !self.gamma.is_finite() || self.gamma < 0.0 {
            return Err(Error::Domain(format!(
                "gamma must be finite and nonnegative; got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Class counts from one extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExtractionStats {
    pub family_size: u64,
    /// Distinct translation classes present in the family.
    pub represented_classes: u64,
    /// Represented classes failing the B_ell filter.
    pub bad_classes: u64,
    /// Members kept: one per surviving class.
    pub extracted_size: u64,
}

/// Outcome of the per-trial verification of the extracted subfamily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for VerifyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyStatus::Pass => "pass",
            VerifyStatus::Fail => "fail",
            VerifyStatus::Skipped => "skipped",
        })
    }
}

/// One trial's results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub trial: u64,
    pub n: u64,
    pub k: u32,
    pub h: u32,
    pub p: f64,
    pub delta: f64,
    pub family_size: u64,
    pub represented_classes: u64,
    pub bad_classes: u64,
    pub extracted_size: u64,
    /// Extraction kept at least a delta fraction of the family, certifying
    /// that the family is not (delta, h)-additive.
    pub zero_cert: bool,
    /// delta times the family size exceeds the counting bound, certifying
    /// delta-additivity with no search.
    pub one_cert: bool,
    pub verified: VerifyStatus,
}

/// Exact expected represented-class count with its first- and second-order
/// counting brackets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationBracket {
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

/// Lexicographic k-subset of {1..n} with the given rank.
fn unrank_subset(mut rank: u128, n: u64, k: u32) -> Vec<i64> {
    let mut out = Vec::with_capacity(k as usize);
    let mut prev = 0u64;
    for pos in 0..k {
        let remaining = k - pos - 1;
        for value in prev + 1..=n {
            let below = binomial(n - value, u64::from(remaining))
                .expect("within the precomputed total count");
            if rank < below {
                out.push(value as i64);
                prev = value;
                break;
            }
            rank -= below;
        }
    }
    out
}

/// Uniform m-subset of {0..count-1} in increasing order, in O(m) memory.
fn sample_distinct_ranks(rng: &mut impl Rng, count: u128, m: u64) -> Vec<u128> {
    // Floyd's algorithm: each prefix stays uniform over its range.
    let mut chosen = std::collections::HashSet::with_capacity(m as usize);
    for j in (count - u128::from(m))..count {
        let t = rng.gen_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let mut ranks: Vec<u128> = chosen.into_iter().collect();
    ranks.sort_unstable();
    ranks
}

fn sample_family_with(n: u64, k: u32, p: f64, rng: &mut impl Rng) -> Result<Family> {
    if k == 0 || u64::from(k) > n {
        return Err(Error::Domain(format!(
            "need 1 <= k <= n; got n={n}, k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0,1]; got {p}")));
    }
    let count = binomial(n, u64::from(k)).ok_or(Error::Overflow)?;
    let count_u64 = u64::try_from(count).map_err(|_| Error::Overflow)?;
    let binomial_dist = Binomial::new(count_u64, p)
        .map_err(|e| Error::Domain(format!("invalid binomial parameters: {e}")))?;
    let m = binomial_dist.sample(rng);
    let members = sample_distinct_ranks(rng, count, m)
        .into_iter()
        .map(|rank| KSet::new(unrank_subset(rank, n, k)).expect("unranked subsets are increasing"))
        .collect();
    Family::new(members)
}

/// Binomial random family: each k-subset of {1..n} included independently
/// with probability p, realized as an exact two-stage draw (member count,
/// then a uniform subset of that size). Deterministic per seed.
pub fn sample_family(n: u64, k: u32, p: f64, seed: u64) -> Result<Family> {
    sample_family_with(n, k, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Counting certificate for delta-additivity: every subfamily of at least
/// delta times the family size is larger than the maximal Sidon-system
/// bound, so it must contain a nontrivial quadruple.
///
/// `n` defaults to the largest element present.
pub fn one_statement_certificate(family: &Family, delta: f64, n: Option<u64>) -> Result<bool> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "delta must lie in (0,1); got {delta}"
        )));
    }
    if family.is_empty() {
        return Ok(false);
    }
    let k = family
        .uniform_cardinality()
        .ok_or_else(|| Error::Domain("family members must share one cardinality".into()))?;
    let k = u32::try_from(k).map_err(|_| Error::Overflow)?;
    let n = match n {
        Some(n) => n,
        None => {
            let max = family.members().iter().map(KSet::max).max().unwrap();
            u64::try_from(max)
                .map_err(|_| Error::Domain("members must be positive to infer n".into()))?
        }
    };
    let bound = upper_bound(n, k)?;
    Ok(delta * family.len() as f64 > bound as f64)
}

/// Keep one member per translation class, dropping classes that fail the
/// B_{ell(k,h)} filter.
///
/// At h = 2 the survivors are provably a Sidon system (one translate per
/// filtered class cannot produce a pair collision). For h ≥ 3 the filter
/// admits rare collisions, which is exactly what the per-trial verification
/// pass is for. Ties inside a class break to the lexicographically smallest
/// member.
pub fn zero_statement_extraction(
    family: &Family,
    k: u32,
    h: u32,
) -> Result<(Family, ExtractionStats)> {
    if let Some(card) = family.uniform_cardinality() {
        if card != k as usize {
            return Err(Error::Domain(format!(
                "family members have {card} elements, expected {k}"
            )));
        }
    }
    let params = ell(k, h)?;
    let ell_value = u32::try_from(params.ell)
        .map_err(|_| Error::Domain(format!("filtration level {} is too large", params.ell)))?;
    let mut classes: std::collections::HashMap<KSet, KSet> = std::collections::HashMap::new();
    for member in family.members() {
        let class = member.normalize()?.into_kset();
        classes
            .entry(class)
            .and_modify(|kept| {
                if member < kept {
                    *kept = member.clone();
                }
            })
            .or_insert_with(|| member.clone());
    }
    let represented = classes.len() as u64;
    let mut kept = Vec::new();
    let mut bad = 0u64;
    for (class, member) in classes {
        if class.is_b_h(ell_value)? {
            kept.push(member);
        } else {
            bad += 1;
        }
    }
    let stats = ExtractionStats {
        family_size: family.len() as u64,
        represented_classes: represented,
        bad_classes: bad,
        extracted_size: kept.len() as u64,
    };
    Ok((Family::new(kept)?, stats))
}

/// Expected number of represented translation classes, exactly and with
/// its first-order (upper) and second-order (lower) counting brackets.
///
/// A class with maximum m has n - m translates inside {1..n}, so it is
/// represented with probability 1 - (1-p)^(n-m); there are C(m-1, k-2)
/// classes with that maximum.
pub fn expectation_x(n: u64, k: u32, p: f64) -> Result<ExpectationBracket> {
    if k < 2 || n <= u64::from(k) {
        return Err(Error::Domain(format!(
            "need n > k >= 2; got n={n}, k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0,1]; got {p}")));
    }
    let mut exact = 0.0;
    let mut correction = 0.0;
    for m in u64::from(k) - 1..n {
        let classes = binomial_f64(m - 1, u64::from(k) - 2);
        let translates = (n - m) as i32;
        exact += classes * (1.0 - (1.0 - p).powi(translates));
        correction += classes * binomial_f64(n - m, 2) * p * p;
    }
    let upper = n as f64 * p * binomial_f64(n - 1, u64::from(k) - 1)
        - f64::from(k - 1) * p * binomial_f64(n, u64::from(k));
    Ok(ExpectationBracket {
        lower: upper - correction,
        exact,
        upper,
    })
}

/// Two-sided concentration bound 2 max(e^(-lambda^2/4), e^(-lambda sigma/2)).
pub fn chernoff_tail(lambda: f64, sigma: f64) -> f64 {
    2.0 * (-lambda * lambda / 4.0).exp().max((-lambda * sigma / 2.0).exp())
}

/// Relative-deviation form 2 e^(-min(eps^2/4, eps/2) mean).
pub fn chernoff_weak(eps: f64, mean: f64) -> f64 {
    2.0 * (-(eps * eps / 4.0).min(eps / 2.0) * mean).exp()
}

/// The two density-threshold constants: below (1-delta)(k+1)/n the family
/// is typically not delta-additive, above (1+gamma)k/(delta n) it is.
pub fn threshold_constants(k: u32, delta: f64, gamma: f64) -> (f64, f64) {
    let c_upper = (1.0 + gamma) * f64::from(k) / delta;
    let c_lower = (1.0 - delta) * f64::from(k + 1);
    (c_lower, c_upper)
}

fn run_trial(config: &ExperimentConfig, trial: u64) -> Result<ExperimentRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial);
    let family = sample_family_with(config.n, config.k, config.p, &mut rng)?;
    let (extracted, stats) = zero_statement_extraction(&family, config.k, config.h)?;
    let zero_cert = stats.extracted_size as f64 >= config.delta * stats.family_size as f64;
    let one_cert = one_statement_certificate(&family, config.delta, Some(config.n))?;
    let verified = match find_nontrivial_h_tuples(
        &extracted,
        config.h,
        DetectOptions {
            cap: config.verify_cap,
            limit: Some(1),
        },
    ) {
        Ok(collisions) if collisions.is_empty() => VerifyStatus::Pass,
        Ok(_) => VerifyStatus::Fail,
        Err(Error::ResourceGuard { .. }) => VerifyStatus::Skipped,
        Err(e) => return Err(e),
    };
    Ok(ExperimentRecord {
        trial,
        n: config.n,
        k: config.k,
        h: config.h,
        p: config.p,
        delta: config.delta,
        family_size: stats.family_size,
        represented_classes: stats.represented_classes,
        bad_classes: stats.bad_classes,
        extracted_size: stats.extracted_size,
        zero_cert,
        one_cert,
        verified,
    })
}

/// Run every trial of the configured experiment, in trial order.
///
/// Trials are independent given (seed, trial), so the result does not
/// depend on how the work is scheduled.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect()
}

/// CSV header matching [`write_csv`] rows.
pub const CSV_HEADER: &str = "trial,n,k,h,p,delta,family_size,represented_classes,bad_classes,extracted_size,zero_cert,one_cert,verified";

/// Write records as CSV, one row per trial, floats in shortest
/// round-trip form.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: &mut W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.n,
            r.k,
            r.h,
            r.p,
            r.delta,
            r.family_size,
            r.represented_classes,
            r.bad_classes,
            r.extracted_size,
            r.zero_cert,
            r.one_cert,
            r.verified
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_WORK_CAP;

    fn ks(v: &[i64]) -> KSet {
        KSet::new(v.to_vec()).unwrap()
    }

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            n: 20,
            k: 2,
            h: 2,
            p: 0.3,
            delta: 0.5,
            gamma: 0.1,
            trials: 5,
            seed: 7,
            verify_cap: DEFAULT_WORK_CAP,
        }
    }

    #[test]
    fn sampler_boundary_probabilities() {
        let empty = sample_family(6, 2, 0.0, 1).unwrap();
        assert!(empty.is_empty());
        let full = sample_family(4, 2, 1.0, 1).unwrap();
        assert_eq!(full.len(), 6);
        let expected: Vec<KSet> = vec![
            ks(&[1, 2]),
            ks(&[1, 3]),
            ks(&[1, 4]),
            ks(&[2, 3]),
            ks(&[2, 4]),
            ks(&[3, 4]),
        ];
        assert_eq!(full.members(), &expected[..]);
    }

    #[test]
    fn sampler_is_deterministic_and_in_range() {
        let a = sample_family(30, 3, 0.2, 99).unwrap();
        let b = sample_family(30, 3, 0.2, 99).unwrap();
        assert_eq!(a, b);
        assert!(a
            .members()
            .iter()
            .all(|m| m.len() == 3 && m.min() >= 1 && m.max() <= 30));
    }

    #[test]
    fn unranking_covers_all_subsets_in_order() {
        let total = binomial(6, 3).unwrap();
        let mut seen = Vec::new();
        for rank in 0..total {
            seen.push(unrank_subset(rank, 6, 3));
        }
        assert_eq!(seen.len(), 20);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        assert!(seen.iter().all(|s| s.len() == 3));
    }

    #[test]
    fn counting_certificate_pinned_examples() {
        let forty: Vec<KSet> = (0..40)
            .map(|rank| KSet::new(unrank_subset(rank, 10, 2)).unwrap())
            .collect();
        let family = Family::new(forty).unwrap();
        assert!(one_statement_certificate(&family, 0.5, Some(10)).unwrap());

        let eighty: Vec<KSet> = (0..80)
            .map(|rank| KSet::new(unrank_subset(rank, 10, 3)).unwrap())
            .collect();
        let family = Family::new(eighty).unwrap();
        assert!(!one_statement_certificate(&family, 0.5, Some(10)).unwrap());

        let empty = Family::new(Vec::new()).unwrap();
        assert!(!one_statement_certificate(&empty, 0.5, None).unwrap());
    }

    #[test]
    fn counting_certificate_infers_n_from_members() {
        let family = Family::new(vec![ks(&[1, 2]), ks(&[1, 10])]).unwrap();
        assert!(!one_statement_certificate(&family, 0.5, None).unwrap());
    }

    #[test]
    fn extraction_keeps_one_translate_per_class() {
        let family = Family::new(vec![ks(&[1, 2]), ks(&[3, 4]), ks(&[5, 9])]).unwrap();
        let (extracted, stats) = zero_statement_extraction(&family, 2, 2).unwrap();
        assert_eq!(extracted.members(), &[ks(&[1, 2]), ks(&[5, 9])][..]);
        assert_eq!(stats.family_size, 3);
        assert_eq!(stats.represented_classes, 2);
        assert_eq!(stats.bad_classes, 0);
        assert_eq!(stats.extracted_size, 2);
    }

    #[test]
    fn extraction_discards_filtered_classes() {
        // {0,3,9} fails the level-8 filter; {0,1,9} passes.
        let family = Family::new(vec![ks(&[0, 3, 9]), ks(&[2, 3, 11]), ks(&[1, 4, 10])]).unwrap();
        let (extracted, stats) = zero_statement_extraction(&family, 3, 2).unwrap();
        assert_eq!(stats.represented_classes, 2);
        assert_eq!(stats.bad_classes, 1);
        assert_eq!(extracted.members(), &[ks(&[2, 3, 11])][..]);
    }

    #[test]
    fn extraction_of_empty_family_is_empty() {
        let family = Family::new(Vec::new()).unwrap();
        let (extracted, stats) = zero_statement_extraction(&family, 3, 2).unwrap();
        assert!(extracted.is_empty());
        assert_eq!(stats.family_size, 0);
        assert_eq!(stats.represented_classes, 0);
    }

    #[test]
    fn extraction_rejects_mismatched_cardinality() {
        let family = Family::new(vec![ks(&[1, 2])]).unwrap();
        assert!(matches!(
            zero_statement_extraction(&family, 3, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn expectation_bracket_pinned() {
        let b = expectation_x(4, 2, 0.5).unwrap();
        assert_eq!(b.lower, 2.0);
        assert_eq!(b.exact, 2.125);
        assert_eq!(b.upper, 3.0);
        let zero = expectation_x(10, 3, 0.0).unwrap();
        assert_eq!((zero.lower, zero.exact, zero.upper), (0.0, 0.0, 0.0));
    }

    #[test]
    fn expectation_bracket_orders() {
        for &n in &[10u64, 25, 60] {
            for &k in &[2u32, 3, 4] {
                for &p in &[1e-4, 1e-3, 1e-2, 1e-1] {
                    let b = expectation_x(n, k, p).unwrap();
                    assert!(b.lower <= b.exact + 1e-12, "{n} {k} {p}: {b:?}");
                    assert!(b.exact <= b.upper + 1e-12, "{n} {k} {p}: {b:?}");
                }
            }
        }
    }

    #[test]
    fn first_order_term_matches_the_counting_identity() {
        // sum over m of (n-m) C(m-1, k-2) telescopes to the closed form
        // used by the upper bracket.
        for n in 3u64..40 {
            for k in 2u32..5 {
                if n <= u64::from(k) {
                    continue;
                }
                let mut lhs = 0u128;
                for m in u64::from(k) - 1..n {
                    lhs += u128::from(n - m) * binomial(m - 1, u64::from(k) - 2).unwrap();
                }
                let rhs = u128::from(n) * binomial(n - 1, u64::from(k) - 1).unwrap()
                    - u128::from(k - 1) * binomial(n, u64::from(k)).unwrap();
                assert_eq!(lhs, rhs, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn chernoff_pinned_values() {
        assert!((chernoff_tail(2.0, 4.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!((chernoff_weak(1.0, 10.0) - 2.0 * (-2.5f64).exp()).abs() < 1e-15);
        assert!((chernoff_tail(1e-9, 3.0) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn threshold_constants_formulas() {
        let (c_lower, c_upper) = threshold_constants(2, 0.5, 0.25);
        assert_eq!(c_lower, 1.5);
        assert_eq!(c_upper, 5.0);
    }

    #[test]
    fn experiment_records_are_deterministic_and_ordered() {
        let cfg = config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        for (i, record) in a.iter().enumerate() {
            assert_eq!(record.trial, i as u64);
            assert_eq!(record.n, 20);
            assert!(record.extracted_size <= record.represented_classes);
            assert_eq!(record.verified, VerifyStatus::Pass);
        }
    }

    #[test]
    fn experiment_with_p_zero_fires_the_zero_certificate() {
        let cfg = ExperimentConfig {
            p: 0.0,
            trials: 3,
            ..config()
        };
        for record in run_experiment(&cfg).unwrap() {
            assert_eq!(record.family_size, 0);
            assert!(record.zero_cert);
            assert!(!record.one_cert);
            assert_eq!(record.verified, VerifyStatus::Pass);
        }
    }

    #[test]
    fn tiny_verify_cap_skips_verification() {
        let cfg = ExperimentConfig {
            verify_cap: 1,
            ..config()
        };
        let records = run_experiment(&cfg).unwrap();
        assert!(records
            .iter()
            .any(|r| r.verified == VerifyStatus::Skipped));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for bad in [
            ExperimentConfig { delta: 0.0, ..config() },
            ExperimentConfig { delta: 1.0, ..config() },
            ExperimentConfig { p: 1.5, ..config() },
            ExperimentConfig { n: 2, ..config() },
            ExperimentConfig { h: 1, ..config() },
        ] {
            assert!(run_experiment(&bad).is_err());
        }
    }

    #[test]
    fn csv_output_is_exact_and_reproducible() {
        let records = run_experiment(&config()).unwrap();
        let mut first = Vec::new();
        write_csv(&records, &mut first).unwrap();
        let mut second = Vec::new();
        write_csv(&records, &mut second).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 13);
        assert_eq!(fields[0], "0");
        assert_eq!(fields[4], "0.3");
        assert_eq!(fields[5], "0.5");
        assert!(fields[12] == "pass" || fields[12] == "fail" || fields[12] == "skipped");
        assert_eq!(text.lines().count(), 6);
    }

    #[test]
    fn sampler_mean_tracks_the_binomial_mean() {
        // N = C(100,2) = 4950, Np = 49.5, sigma^2 = Np(1-p).
        let trials = 400;
        let mut total = 0u64;
        for seed in 0..trials {
            total += sample_family(100, 2, 0.01, seed).unwrap().len() as u64;
        }
        let mean = total as f64 / trials as f64;
        let sigma = (4950.0f64 * 0.01 * 0.99).sqrt();
        let tolerance = 4.0 * sigma / (trials as f64).sqrt();
        assert!((mean - 49.5).abs() < tolerance, "mean {mean}");
    }
}
