//! Exact algebraic cross-checks between independently computed quantities.
//!
//! Four decomposition identities tie each weighted statistic to an unweighted
//! companion minus a small correction summed over primes up to sqrt(x); they
//! hold exactly, so any drift beyond floating-point tolerance exposes a bug
//! in either the sieve or the accumulator. The divisor-sum relations compare
//! the von Mangoldt divisor sum (which telescopes to `ln n`) against the
//! two-factor weight summed over divisors, for three factorization shapes.
//! The prime-sum inequality bounds the summatory weight written as a sum
//! over primes.
//!
//! Every check returns an [`IdentityReport`] with both sides, absolute and
//! relative differences, and a pass flag at the caller's tolerance. Relative
//! difference is `abs_diff / max(|lhs|, 1)` so checks near zero degrade to
//! absolute comparison instead of blowing up.

use crate::error::{Error, Result};
use crate::master::{psi_prime_sum, sum_pi_over_primes, MasterSeries, SeriesPoint};
use crate::sieve::{factorize, Factorization, PrimeTable};
use crate::summation::CompensatedSum;
use serde::Serialize;

/// Relative tolerance used when the caller has no opinion.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Outcome of one identity evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub name: &'static str,
    /// The x (for summatory identities) or n (for divisor relations).
    pub x_or_n: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub pass: bool,
    /// Nonnegative exponent offsets, present only for the offset relation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<u64>>,
}

impl IdentityReport {
    fn equality(name: &'static str, x_or_n: f64, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        let rel_diff = abs_diff / lhs.abs().max(1.0);
        IdentityReport {
            name,
            x_or_n,
            lhs,
            rhs,
            abs_diff,
            rel_diff,
            pass: rel_diff <= tolerance,
            coefficients: None,
        }
    }
}

/// Corrections summed over primes `p <= sqrt(x)`: `ln^2 p`, `1/p^2`, and
/// `ln p / p^2`.
fn sqrt_prime_corrections(x: f64, table: &PrimeTable) -> Result<(f64, f64, f64)> {
    let root = x.sqrt();
    if (table.limit() as f64) < root {
        return Err(Error::Capacity(format!(
            "decompositions at x = {x} need primes to {}, table stops at {}",
            root.floor(),
            table.limit()
        )));
    }
    let mut log_sq = CompensatedSum::new();
    let mut inv_sq = CompensatedSum::new();
    let mut log_over_sq = CompensatedSum::new();
    for &p in table.primes_up_to(root)? {
        let pf = p as f64;
        let lp = pf.ln();
        log_sq.add(lp * lp);
        inv_sq.add(1.0 / (pf * pf));
        log_over_sq.add(lp / (pf * pf));
    }
    Ok((log_sq.value(), inv_sq.value(), log_over_sq.value()))
}

/// The four exact decompositions at one series point:
///
/// 1. summatory weight = sum of `ln n` minus the Chebyshev log sum at sqrt(x)
/// 2. weight-times-log sum = squared-log sum minus `2 * sum ln^2 p`
/// 3. weight-over-(n ln n) sum = reciprocal sum minus `sum 1/p^2 / 2`
/// 4. weight-over-n sum = log-over-n sum minus `sum ln p / p^2`
///
/// with every prime sum over `p <= sqrt(x)`. The squares `p^2 <= x` are
/// exactly where the weighted and unweighted statistics disagree, which is
/// why each correction is a prime sum to sqrt(x).
pub fn check_decompositions(
    point: &SeriesPoint,
    table: &PrimeTable,
    tolerance: f64,
) -> Result<Vec<IdentityReport>> {
    let x = point.x;
    if !(x >= 4.0) {
        return Err(Error::Domain(format!(
            "decompositions need x >= 4, got {x}"
        )));
    }
    let theta_root = table.theta(x.sqrt())?;
    let (log_sq, inv_sq, log_over_sq) = sqrt_prime_corrections(x, table)?;
    Ok(vec![
        IdentityReport::equality(
            "psi_decomposition",
            x,
            point.psi,
            point.sum_logn - theta_root,
            tolerance,
        ),
        IdentityReport::equality(
            "upsilon_log_decomposition",
            x,
            point.sum_upsilon_logn,
            point.sum_log2n - 2.0 * log_sq,
            tolerance,
        ),
        IdentityReport::equality(
            "upsilon_over_nlogn_decomposition",
            x,
            point.sum_upsilon_over_nlogn,
            point.sum_recip - 0.5 * inv_sq,
            tolerance,
        ),
        IdentityReport::equality(
            "upsilon_over_n_decomposition",
            x,
            point.sum_upsilon_over_n,
            point.sum_logn_over_n - log_over_sq,
            tolerance,
        ),
    ])
}

/// Streamed summatory weight against its closed prime-sum form
/// `sum over p <= x/2 of pi(x/p) ln p`.
pub fn check_psi_prime_sum(
    series: &MasterSeries,
    x: f64,
    table: &PrimeTable,
    tolerance: f64,
) -> Result<IdentityReport> {
    let point = series.point_at(x).ok_or_else(|| {
        Error::Domain(format!("x = {x} is not a grid point of this series"))
    })?;
    let rhs = psi_prime_sum(x, table)?;
    Ok(IdentityReport::equality(
        "psi_prime_sum",
        x,
        point.psi,
        rhs,
        tolerance,
    ))
}

/// The prime-sum bound: `sum pi(x/p) ln p <= ln(x/2) * sum pi(x/p)`,
/// both sums over `p <= x/2`. Equality occurs at x = 4, so the pass
/// criterion allows the left side to exceed the right by the tolerance.
pub fn check_pi_sum_inequality(
    x: f64,
    table: &PrimeTable,
    tolerance: f64,
) -> Result<IdentityReport> {
    let lhs = psi_prime_sum(x, table)?;
    let rhs = (x / 2.0).ln() * sum_pi_over_primes(x, table)?;
    let abs_diff = (lhs - rhs).abs();
    let rel_diff = abs_diff / lhs.abs().max(1.0);
    Ok(IdentityReport {
        name: "pi_sum_inequality",
        x_or_n: x,
        lhs,
        rhs,
        abs_diff,
        rel_diff,
        pass: lhs <= rhs + tolerance * rhs.abs().max(1.0),
        coefficients: None,
    })
}

/// Sum of the von Mangoldt function over the divisors of n: each prime power
/// divisor `p^j` contributes `ln p`, so the total is `sum k_i ln p_i`, which
/// telescopes to `ln n`.
pub fn mangoldt_divisor_sum(f: &Factorization) -> f64 {
    f.factors()
        .iter()
        .map(|&(p, k)| k as f64 * (p as f64).ln())
        .sum()
}

/// `mangoldt_divisor_sum` against `ln n`.
pub fn check_mangoldt_identity(f: &Factorization, tolerance: f64) -> IdentityReport {
    IdentityReport::equality(
        "mangoldt_log_identity",
        f.n() as f64,
        mangoldt_divisor_sum(f),
        (f.n() as f64).ln(),
        tolerance,
    )
}

/// Sum of the two-factor weight over the divisors of n, evaluated
/// combinatorially: the divisors with exactly two prime factors are the
/// squares `p_i^2` (needing `k_i >= 2`), each worth `ln p_i`, and the pairs
/// `p_i p_j` for `i < j`, each worth `ln p_i + ln p_j`.
pub fn upsilon_divisor_sum(f: &Factorization) -> f64 {
    let logs: Vec<f64> = f
        .factors()
        .iter()
        .map(|&(p, _)| (p as f64).ln())
        .collect();
    let mut total = 0.0;
    for (i, &(_, k)) in f.factors().iter().enumerate() {
        if k >= 2 {
            total += logs[i];
        }
    }
    for i in 0..logs.len() {
        for j in (i + 1)..logs.len() {
            total += logs[i] + logs[j];
        }
    }
    total
}

fn shape_error(f: &Factorization, want: &str) -> Error {
    Error::Shape(format!(
        "n = {} = {:?} does not have the shape {want}",
        f.n(),
        f.factors()
    ))
}

/// Relation on prime powers `n = p^k`, `k >= 2`: the von Mangoldt divisor
/// sum equals k times the weight divisor sum.
pub fn check_relation_prime_power(f: &Factorization, tolerance: f64) -> Result<IdentityReport> {
    let &[(_, k)] = f.factors() else {
        return Err(shape_error(f, "p^k with k >= 2"));
    };
    if k < 2 {
        return Err(shape_error(f, "p^k with k >= 2"));
    }
    Ok(IdentityReport::equality(
        "prime_power_relation",
        f.n() as f64,
        mangoldt_divisor_sum(f),
        k as f64 * upsilon_divisor_sum(f),
        tolerance,
    ))
}

/// Relation on `n = (p_1 p_2 ... p_k)^k`, `k >= 2` distinct primes all
/// raised to the kth power: the two divisor sums agree exactly.
pub fn check_relation_uniform_power(f: &Factorization, tolerance: f64) -> Result<IdentityReport> {
    let r = f.distinct_count() as u32;
    if r < 2 || f.factors().iter().any(|&(_, k)| k != r) {
        return Err(shape_error(
            f,
            "(p_1 ... p_k)^k with k >= 2 distinct primes",
        ));
    }
    Ok(IdentityReport::equality(
        "uniform_power_relation",
        f.n() as f64,
        mangoldt_divisor_sum(f),
        upsilon_divisor_sum(f),
        tolerance,
    ))
}

/// Relation on `n = prod p_i^{k_i}` with every `k_i >= 2` and the number of
/// distinct primes r at most every exponent: the von Mangoldt divisor sum
/// equals the weight divisor sum plus `sum c_i ln p_i` with offsets
/// `c_i = k_i - r`, all nonnegative under the shape precondition. The report
/// carries the offsets.
pub fn check_relation_offset(f: &Factorization, tolerance: f64) -> Result<IdentityReport> {
    let r = f.distinct_count() as u32;
    if r == 0 || f.factors().iter().any(|&(_, k)| k < 2 || k < r) {
        return Err(shape_error(
            f,
            "prod p_i^{k_i} with all k_i >= 2 and k_i >= r",
        ));
    }
    let coefficients: Vec<u64> = f.factors().iter().map(|&(_, k)| (k - r) as u64).collect();
    let offset_sum: f64 = f
        .factors()
        .iter()
        .map(|&(p, k)| (k - r) as f64 * (p as f64).ln())
        .sum();
    let mut report = IdentityReport::equality(
        "offset_power_relation",
        f.n() as f64,
        mangoldt_divisor_sum(f),
        upsilon_divisor_sum(f) + offset_sum,
        tolerance,
    );
    report.coefficients = Some(coefficients);
    Ok(report)
}

/// Aggregate outcome of checking one relation over every qualifying n.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub name: &'static str,
    pub checked: u64,
    pub failures: u64,
    pub max_rel_diff: f64,
    /// The n attaining `max_rel_diff` (0 when nothing qualified).
    pub worst_n: u64,
}

impl ScanSummary {
    fn new(name: &'static str) -> Self {
        ScanSummary {
            name,
            checked: 0,
            failures: 0,
            max_rel_diff: 0.0,
            worst_n: 0,
        }
    }

    fn record(&mut self, report: &IdentityReport) {
        self.checked += 1;
        if !report.pass {
            self.failures += 1;
        }
        if report.rel_diff > self.max_rel_diff || self.checked == 1 {
            self.max_rel_diff = report.rel_diff;
            self.worst_n = report.x_or_n as u64;
        }
    }

    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// The von Mangoldt identity checked on every `1 <= n <= limit`.
pub fn scan_mangoldt(limit: u64, table: &PrimeTable, tolerance: f64) -> Result<ScanSummary> {
    let mut summary = ScanSummary::new("mangoldt_log_identity");
    for n in 1..=limit {
        let f = factorize(n, table)?;
        summary.record(&check_mangoldt_identity(&f, tolerance));
    }
    Ok(summary)
}

/// The three divisor-sum relations checked on every qualifying `n <= limit`,
/// plus the smallest offset coefficient seen (the shape precondition makes
/// every offset nonnegative; the scan verifies that construction holds).
#[derive(Debug, Clone, Serialize)]
pub struct RelationScan {
    pub prime_power: ScanSummary,
    pub uniform_power: ScanSummary,
    pub offset_power: ScanSummary,
    pub min_offset_seen: Option<u64>,
}

impl RelationScan {
    pub fn pass(&self) -> bool {
        self.prime_power.pass() && self.uniform_power.pass() && self.offset_power.pass()
    }
}

pub fn scan_relations(limit: u64, table: &PrimeTable, tolerance: f64) -> Result<RelationScan> {
    let mut scan = RelationScan {
        prime_power: ScanSummary::new("prime_power_relation"),
        uniform_power: ScanSummary::new("uniform_power_relation"),
        offset_power: ScanSummary::new("offset_power_relation"),
        min_offset_seen: None,
    };
    for n in 2..=limit {
        let f = factorize(n, table)?;
        let r = f.distinct_count() as u32;
        if r == 1 && f.factors()[0].1 >= 2 {
            scan.prime_power.record(&check_relation_prime_power(&f, tolerance)?);
        }
        if r >= 2 && f.factors().iter().all(|&(_, k)| k == r) {
            scan.uniform_power
                .record(&check_relation_uniform_power(&f, tolerance)?);
        }
        if r >= 1 && f.factors().iter().all(|&(_, k)| k >= 2 && k >= r) {
            let report = check_relation_offset(&f, tolerance)?;
            if let Some(coeffs) = &report.coefficients {
                for &c in coeffs {
                    scan.min_offset_seen =
                        Some(scan.min_offset_seen.map_or(c, |m: u64| m.min(c)));
                }
            }
            scan.offset_power.record(&report);
        }
    }
    Ok(scan)
}
