//! Prime tables and segmented sieves.
//!
//! `PrimeTable` holds every prime up to a limit together with the running sum
//! of their natural logs, so `prime_count` (the counting function on primes)
//! and `theta` (the first Chebyshev function) are a binary search each. The
//! cumulative logs are stored as double-double pairs: at a limit of 1e9 the
//! running total is ~1e9 and one f64 ulp is ~1e-7, far coarser than the
//! 1e-12 contract on consecutive differences, so plain f64 prefix sums would
//! not do.
//!
//! `omega_segment` sieves the number-of-prime-factors-with-multiplicity
//! function over a window [lo, hi] without factorizing anything: each prime
//! power p^j <= hi contributes one count to its multiples (one per division
//! by p), and whatever cofactor survives all primes <= sqrt(hi) is itself a
//! prime > sqrt(hi), worth exactly one more count. This is the throughput
//! path that the series accumulator drives over ranges up to 1e10.

use crate::error::{Error, Result};
use crate::summation::DoubleDouble;
use rayon::prelude::*;

/// Largest prime-table limit accepted by default. Tables store 24 bytes per
/// prime; beyond this, use the segmented operations instead of a bigger table.
pub const DEFAULT_TABLE_BUDGET: u64 = 1_000_000_000;

/// Hard cap on a single sieve window; longer requests must be split.
pub const MAX_SEGMENT_LEN: u64 = 1 << 26;

/// Window size used while building a table; also the granularity of the
/// parallel build.
const BUILD_SEGMENT: u64 = 1 << 20;

/// All primes up to a limit, with cumulative logs for O(log) theta queries.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    cumulative_log: Vec<DoubleDouble>,
}

/// Build a table of every prime `<= limit` under the default memory budget.
pub fn build_prime_table(limit: u64) -> Result<PrimeTable> {
    build_prime_table_with_budget(limit, DEFAULT_TABLE_BUDGET)
}

/// Build a table of every prime `<= limit`, refusing limits above `budget`.
pub fn build_prime_table_with_budget(limit: u64, budget: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::Domain(format!(
            "prime table limit must be at least 2, got {limit}"
        )));
    }
    if limit > budget {
        return Err(Error::Capacity(format!(
            "prime table to {limit} exceeds the budget of {budget}; \
             raise the budget or switch to the segmented operations"
        )));
    }

    let base = simple_sieve(limit.isqrt().max(2).min(limit));

    let mut ranges = Vec::new();
    let mut lo = 2u64;
    while lo <= limit {
        let hi = limit.min(lo + BUILD_SEGMENT - 1);
        ranges.push((lo, hi));
        lo = hi + 1;
    }

    // Per-window prime lists are concatenated in window order, so the result
    // does not depend on how the windows were scheduled.
    let chunks: Vec<Vec<u64>> = ranges
        .into_par_iter()
        .map(|(lo, hi)| {
            let len = (hi - lo + 1) as usize;
            let mut composite = vec![false; len];
            for &p in &base {
                if p > hi / p {
                    break;
                }
                let mut m = (lo.div_ceil(p) * p).max(p * p);
                while m <= hi {
                    composite[(m - lo) as usize] = true;
                    m += p;
                }
            }
            (0..len)
                .filter(|&i| !composite[i])
                .map(|i| lo + i as u64)
                .collect()
        })
        .collect();

    let mut primes = Vec::with_capacity(chunks.iter().map(Vec::len).sum());
    for chunk in chunks {
        primes.extend(chunk);
    }

    let mut cumulative_log = Vec::with_capacity(primes.len());
    let mut acc = DoubleDouble::ZERO;
    for &p in &primes {
        acc = acc.add_f64((p as f64).ln());
        cumulative_log.push(acc);
    }

    Ok(PrimeTable {
        limit,
        primes,
        cumulative_log,
    })
}

/// Plain sieve for the base primes; only ever called with `limit <= sqrt(budget)`.
fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

impl PrimeTable {
    /// Inclusive upper bound the table covers.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Ascending primes `<= limit`.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes in the table.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `<= t` as a slice of the table.
    pub fn primes_up_to(&self, t: f64) -> Result<&[u64]> {
        Ok(&self.primes[..self.count_up_to(t)? as usize])
    }

    /// Number of primes `<= t`.
    pub fn prime_count(&self, t: f64) -> Result<u64> {
        self.count_up_to(t)
    }

    /// Sum of `ln p` over primes `p <= t` (first Chebyshev function).
    pub fn theta(&self, t: f64) -> Result<f64> {
        let count = self.count_up_to(t)? as usize;
        if count == 0 {
            Ok(0.0)
        } else {
            Ok(self.cumulative_log[count - 1].to_f64())
        }
    }

    /// Cumulative log sum over the first `i + 1` primes, rounded to f64.
    pub fn cumulative_log(&self, i: usize) -> f64 {
        self.cumulative_log[i].to_f64()
    }

    /// Unrounded cumulative log sum, for exact-difference checks.
    pub fn cumulative_log_parts(&self, i: usize) -> DoubleDouble {
        self.cumulative_log[i]
    }

    fn count_up_to(&self, t: f64) -> Result<u64> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("argument must be finite, got {t}")));
        }
        if t > self.limit as f64 {
            return Err(Error::Range(format!(
                "argument {t} exceeds the table limit {}",
                self.limit
            )));
        }
        if t < 2.0 {
            return Ok(0);
        }
        let bound = t.floor() as u64;
        Ok(self.primes.partition_point(|&p| p <= bound) as u64)
    }
}

/// Prime factorization `n = prod p_i^{k_i}` with `p_i` ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub(crate) fn from_parts(n: u64, factors: Vec<(u64, u32)>) -> Self {
        debug_assert_eq!(
            factors
                .iter()
                .fold(1u64, |acc, &(p, k)| acc * p.pow(k)),
            n
        );
        Factorization { n, factors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `(prime, exponent)` pairs, primes ascending.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of prime factors counted with multiplicity.
    pub fn omega(&self) -> u32 {
        self.factors.iter().map(|&(_, k)| k).sum()
    }

    /// Number of distinct prime factors.
    pub fn distinct_count(&self) -> usize {
        self.factors.len()
    }
}

/// Factor `n` by trial division over the table primes.
///
/// Requires `n <= limit^2`: once every table prime has been tried, a
/// surviving cofactor has no divisor `<= limit`, which certifies it prime
/// only when it is at most `limit^2`.
pub fn factorize(n: u64, table: &PrimeTable) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let limit = table.limit() as u128;
    if n as u128 > limit * limit {
        return Err(Error::Capacity(format!(
            "factoring {n} needs primes past {}; build a larger table",
            table.limit()
        )));
    }
    let mut rem = n;
    let mut factors = Vec::new();
    for &p in table.primes() {
        if p > rem / p {
            break;
        }
        if rem.is_multiple_of(p) {
            let mut k = 0u32;
            while rem.is_multiple_of(p) {
                rem /= p;
                k += 1;
            }
            factors.push((p, k));
        }
    }
    if rem > 1 {
        factors.push((rem, 1));
    }
    Ok(Factorization::from_parts(n, factors))
}

/// Reusable buffers for `omega_segment_into`, so the streaming accumulator
/// does not reallocate ~40 MB per window.
#[derive(Debug, Default)]
pub(crate) struct OmegaScratch {
    pub omega: Vec<u8>,
    rem: Vec<u64>,
}

/// Number of prime factors with multiplicity for every n in `[lo, hi]`.
pub fn omega_segment(lo: u64, hi: u64, table: &PrimeTable) -> Result<Vec<u8>> {
    let mut scratch = OmegaScratch::default();
    omega_segment_into(lo, hi, table, &mut scratch)?;
    Ok(scratch.omega)
}

pub(crate) fn omega_segment_into(
    lo: u64,
    hi: u64,
    table: &PrimeTable,
    scratch: &mut OmegaScratch,
) -> Result<()> {
    if lo < 2 || lo > hi {
        return Err(Error::Domain(format!(
            "window must satisfy 2 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let len = hi - lo + 1;
    if len > MAX_SEGMENT_LEN {
        return Err(Error::Capacity(format!(
            "window of {len} exceeds the maximum segment length {MAX_SEGMENT_LEN}"
        )));
    }
    let root = hi.isqrt();
    if table.limit() < root {
        return Err(Error::Capacity(format!(
            "sieving to {hi} needs primes to {root}, table stops at {}",
            table.limit()
        )));
    }

    let len = len as usize;
    scratch.omega.clear();
    scratch.omega.resize(len, 0);
    scratch.rem.clear();
    scratch.rem.extend(lo..=hi);
    let omega = &mut scratch.omega[..];
    let rem = &mut scratch.rem[..];

    for &p in table.primes() {
        if p > root {
            break;
        }
        // One count per prime-power divisor: a multiple of p^j gains a count
        // and sheds one factor of p at the p^j pass, so after all passes each
        // n has been credited (and divided) exactly ord_p(n) times.
        let mut pj = p;
        loop {
            let mut m = lo.div_ceil(pj) * pj;
            while m <= hi {
                let i = (m - lo) as usize;
                omega[i] += 1;
                rem[i] /= p;
                m += pj;
            }
            if pj > hi / p {
                break;
            }
            pj *= p;
        }
    }

    // Whatever survives has no factor <= sqrt(hi): it is 1 or a single prime.
    for i in 0..len {
        if rem[i] > 1 {
            omega[i] += 1;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor_by_trial(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                let mut k = 0;
                while n.is_multiple_of(d) {
                    n /= d;
                    k += 1;
                }
                out.push((d, k));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn small_tables_list_exactly_the_primes() {
        assert_eq!(build_prime_table(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(build_prime_table(2).unwrap().primes(), &[2]);
        assert_eq!(build_prime_table(100).unwrap().len(), 25);
    }

    #[test]
    fn known_prime_counts() {
        let table = build_prime_table(100_000).unwrap();
        assert_eq!(table.prime_count(10.0).unwrap(), 4);
        assert_eq!(table.prime_count(1.5).unwrap(), 0);
        assert_eq!(table.prime_count(100.0).unwrap(), 25);
        assert_eq!(table.prime_count(1_000.0).unwrap(), 168);
        assert_eq!(table.prime_count(10_000.0).unwrap(), 1_229);
        assert_eq!(table.prime_count(100_000.0).unwrap(), 9_592);
    }

    #[test]
    fn limit_below_two_is_a_domain_error() {
        assert!(matches!(build_prime_table(1), Err(Error::Domain(_))));
        assert!(matches!(build_prime_table(0), Err(Error::Domain(_))));
    }

    #[test]
    fn oversized_limit_is_a_capacity_error() {
        let err = build_prime_table_with_budget(1_000_001, 1_000_000).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn table_matches_trial_division_to_1e5() {
        let table = build_prime_table(100_000).unwrap();
        let mut idx = 0;
        for n in 2..=100_000u64 {
            let is_prime = factor_by_trial(n).len() == 1 && factor_by_trial(n)[0].1 == 1;
            if is_prime {
                assert_eq!(table.primes()[idx], n);
                idx += 1;
            }
        }
        assert_eq!(idx, table.len());
    }

    #[test]
    fn theta_at_known_points() {
        let table = build_prime_table(100).unwrap();
        assert!((table.theta(10.0).unwrap() - 210.0f64.ln()).abs() < 1e-12);
        assert!((table.theta(4.0).unwrap() - 6.0f64.ln()).abs() < 1e-12);
        assert_eq!(table.theta(1.0).unwrap(), 0.0);
    }

    #[test]
    fn theta_is_nondecreasing_and_below_pi_log() {
        let table = build_prime_table(10_000).unwrap();
        let mut prev = 0.0;
        for t in 2..=10_000u64 {
            let t = t as f64;
            let theta = table.theta(t).unwrap();
            assert!(theta >= prev);
            let pi = table.prime_count(t).unwrap() as f64;
            assert!(theta <= pi * t.ln() + 1e-9);
            prev = theta;
        }
    }

    #[test]
    fn pi_and_theta_jump_exactly_at_primes() {
        // At small scale the rounded f64 values themselves resolve 1e-12.
        let table = build_prime_table(4_000).unwrap();
        for &p in table.primes() {
            let before = (p - 1) as f64;
            let at = p as f64;
            assert_eq!(
                table.prime_count(at).unwrap(),
                table.prime_count(before).unwrap() + 1
            );
            let jump = table.theta(at).unwrap() - table.theta(before).unwrap();
            assert!(
                (jump - (p as f64).ln()).abs() < 1e-12,
                "theta jump at p={p}: {jump}"
            );
        }
    }

    #[test]
    fn cumulative_log_steps_by_log_p_at_depth() {
        // At 1e6 the running sum is ~1e6 and a bare f64 difference could not
        // resolve 1e-12; the unrounded pairs must.
        let table = build_prime_table(1_000_000).unwrap();
        assert!(table.len() > 2);
        for i in 1..table.len() {
            let diff = table
                .cumulative_log_parts(i)
                .sub_to_f64(table.cumulative_log_parts(i - 1));
            let expect = (table.primes()[i] as f64).ln();
            assert!(
                (diff - expect).abs() < 1e-12,
                "step {i}: {diff} vs {expect}"
            );
            assert!(table.cumulative_log(i) > table.cumulative_log(i - 1));
        }
    }

    #[test]
    fn queries_past_the_limit_are_range_errors() {
        let table = build_prime_table(100).unwrap();
        assert!(matches!(table.prime_count(101.0), Err(Error::Range(_))));
        assert!(matches!(table.theta(1e9), Err(Error::Range(_))));
    }

    #[test]
    fn factorize_known_values() {
        let table = build_prime_table(1_000).unwrap();
        assert_eq!(
            factorize(72, &table).unwrap().factors(),
            &[(2, 3), (3, 2)]
        );
        assert_eq!(
            factorize(9_991, &table).unwrap().factors(),
            &[(97, 1), (103, 1)]
        );
        assert_eq!(factorize(1, &table).unwrap().factors(), &[]);
        let f = factorize(97, &table).unwrap();
        assert_eq!(f.factors(), &[(97, 1)]);
        assert_eq!(f.omega(), 1);
    }

    #[test]
    fn factorize_needs_a_big_enough_table() {
        let table = build_prime_table(10).unwrap();
        // 9991 = 97 * 103 > 10^2: the table cannot certify the cofactor.
        assert!(matches!(factorize(9_991, &table), Err(Error::Capacity(_))));
        // 100 = 10^2 is still in contract.
        assert_eq!(factorize(100, &table).unwrap().factors(), &[(2, 2), (5, 2)]);
    }

    #[test]
    fn factorize_matches_trial_division_to_2e4() {
        let table = build_prime_table(200).unwrap();
        for n in 1..=20_000u64 {
            assert_eq!(
                factorize(n, &table).unwrap().factors(),
                factor_by_trial(n).as_slice(),
                "n={n}"
            );
        }
    }

    #[test]
    fn omega_segment_first_values() {
        let table = build_prime_table(100).unwrap();
        assert_eq!(
            omega_segment(2, 10, &table).unwrap(),
            vec![1, 1, 2, 1, 2, 1, 3, 2, 2]
        );
        assert_eq!(omega_segment(4, 4, &table).unwrap(), vec![2]);
    }

    #[test]
    fn omega_segment_spots_large_prime_cofactors() {
        let table = build_prime_table(100).unwrap();
        // 9990 = 2*3^3*5*37, 9991 = 97*103, 9992 = 2^3*1249; the cofactors
        // 103 and 1249 exceed sqrt(9992) and must earn their single count
        // from the residual rule.
        let omega = omega_segment(9_990, 9_992, &table).unwrap();
        assert_eq!(omega, vec![6, 2, 4]);
    }

    #[test]
    fn omega_segment_matches_factorize_to_1e5() {
        let table = build_prime_table(1_000).unwrap();
        let omega = omega_segment(2, 100_000, &table).unwrap();
        for n in 2..=100_000u64 {
            let expect = factorize(n, &table).unwrap().omega();
            assert_eq!(
                omega[(n - 2) as usize] as u32,
                expect,
                "omega mismatch at n={n}"
            );
        }
    }

    #[test]
    fn omega_segment_is_independent_of_the_partition() {
        let table = build_prime_table(1_000).unwrap();
        let whole = omega_segment(2, 5_000, &table).unwrap();
        let mut stitched = Vec::new();
        for (lo, hi) in [(2u64, 499u64), (500, 1_700), (1_701, 1_701), (1_702, 5_000)] {
            stitched.extend(omega_segment(lo, hi, &table).unwrap());
        }
        assert_eq!(whole, stitched);
    }

    #[test]
    fn omega_segment_rejects_bad_windows() {
        let table = build_prime_table(1_000).unwrap();
        assert!(matches!(omega_segment(1, 10, &table), Err(Error::Domain(_))));
        assert!(matches!(omega_segment(10, 9, &table), Err(Error::Domain(_))));
        // sqrt(2e6) > 1000: table too small.
        assert!(matches!(
            omega_segment(2, 2_000_000, &table),
            Err(Error::Capacity(_))
        ));
    }
}
