//! Exact binomial coefficients and the summation identities the expectation
//! formulas rely on.

/// C(n, k) in exact u128 arithmetic, None on overflow.
///
/// Out-of-range k (negative handled by the unsigned type, k > n) yields 0.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Multiply before dividing; every prefix is itself a binomial, so the
        // division is exact.
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// C(n, k) as f64, for expectation formulas at scales beyond exact range.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    match binomial(n, k) {
        Some(v) => v as f64,
        None => {
            if k > n {
                return 0.0;
            }
            let k = k.min(n - k);
            let mut acc = 0.0f64;
            for i in 0..k {
                acc += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
            }
            acc.exp()
        }
    }
}

/// Sum over i in K..=L of C(i, K); equals C(L+1, K+1).
pub fn hockey_stick(k: u64, l: u64) -> Option<u128> {
    let mut acc: u128 = 0;
    for i in k..=l {
        acc = acc.checked_add(binomial(i, k)?)?;
    }
    Some(acc)
}

/// Sum over i in K..=L of i * C(i-1, K-1); equals K * C(L+1, K+1).
pub fn weighted_hockey_stick(k: u64, l: u64) -> Option<u128> {
    if k == 0 {
        return Some(0);
    }
    let mut acc: u128 = 0;
    for i in k..=l {
        let term = binomial(i - 1, k - 1)?.checked_mul(i as u128)?;
        acc = acc.checked_add(term)?;
    }
    Some(acc)
}
