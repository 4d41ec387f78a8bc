//! Independent recomputation of every statistic by per-integer trial
//! division.
//!
//! Nothing here touches the prime table, the segmented sieve, the square
//! walker, or the parallel fold: each n is factored from scratch against
//! 2, 3, 5, 7, ... and the eight sums accumulate sequentially. That makes
//! this module slow (quadratic-ish) and trustworthy, which is exactly the
//! point: agreement with the pipeline at 1e-10 relative validates the whole
//! streaming path end to end. A scale guard keeps the oracle honest about
//! what trial division can cover interactively.

use crate::error::{Error, Result};
use crate::master::{accumulate_series, SeriesPoint};
use crate::sieve::{Factorization, PrimeTable};
use crate::summation::CompensatedSum;
use serde::Serialize;

/// Largest limit the trial-division oracle accepts.
pub const MAX_ORACLE_LIMIT: u64 = 1_000_000;

/// Relative deviation the comparison tolerates unless configured otherwise.
pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-10;

/// Factor n by unassisted trial division; no table, no precomputation.
pub fn factor_naive(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut rem = n;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d <= rem / d {
        if rem.is_multiple_of(d) {
            let mut k = 0u32;
            while rem.is_multiple_of(d) {
                rem /= d;
                k += 1;
            }
            factors.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        factors.push((rem, 1));
    }
    Ok(Factorization::from_parts(n, factors))
}

/// All eight sums and the count at `x = limit`, recomputed integer by
/// integer.
pub fn series_by_trial_division(limit: u64) -> Result<SeriesPoint> {
    if limit < 4 {
        return Err(Error::Domain(format!(
            "the statistics start at x = 4, got {limit}"
        )));
    }
    if limit > MAX_ORACLE_LIMIT {
        return Err(Error::Capacity(format!(
            "trial division is limited to {MAX_ORACLE_LIMIT}, got {limit}; \
             the sieve pipeline covers larger ranges"
        )));
    }
    let mut psi = CompensatedSum::new();
    let mut sum_logn = CompensatedSum::new();
    let mut sum_log2n = CompensatedSum::new();
    let mut sum_recip = CompensatedSum::new();
    let mut sum_logn_over_n = CompensatedSum::new();
    let mut sum_upsilon_over_n = CompensatedSum::new();
    let mut sum_upsilon_logn = CompensatedSum::new();
    let mut sum_upsilon_over_nlogn = CompensatedSum::new();
    let mut count = 0u64;

    for n in 2..=limit {
        let f = factor_naive(n)?;
        // The weight, restated from the definition rather than shared with
        // the streaming classifier.
        let ups = match f.factors() {
            [(p, 2)] => (*p as f64).ln(),
            [(_, 1), (_, 1)] => (n as f64).ln(),
            _ => continue,
        };
        let nf = n as f64;
        let lnn = nf.ln();
        psi.add(ups);
        sum_logn.add(lnn);
        sum_log2n.add(lnn * lnn);
        sum_recip.add(1.0 / nf);
        sum_logn_over_n.add(lnn / nf);
        sum_upsilon_over_n.add(ups / nf);
        sum_upsilon_logn.add(ups * lnn);
        sum_upsilon_over_nlogn.add(ups / (nf * lnn));
        count += 1;
    }

    Ok(SeriesPoint {
        x: limit as f64,
        psi: psi.value(),
        sum_logn: sum_logn.value(),
        sum_log2n: sum_log2n.value(),
        sum_recip: sum_recip.value(),
        sum_logn_over_n: sum_logn_over_n.value(),
        sum_upsilon_over_n: sum_upsilon_over_n.value(),
        sum_upsilon_logn: sum_upsilon_logn.value(),
        sum_upsilon_over_nlogn: sum_upsilon_over_nlogn.value(),
        semiprime_count: count,
    })
}

/// One statistic compared across the two routes.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub name: &'static str,
    pub pipeline: f64,
    pub oracle: f64,
    pub rel_deviation: f64,
}

/// Side-by-side comparison of the sieve pipeline and the trial-division
/// recomputation at one limit.
#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub limit: u64,
    pub tolerance: f64,
    pub rows: Vec<OracleRow>,
    pub max_rel_deviation: f64,
    pub pass: bool,
}

/// A named projection of one statistic out of a [`SeriesPoint`].
type Column = (&'static str, fn(&SeriesPoint) -> f64);

pub fn compare_with_pipeline(
    limit: u64,
    table: &PrimeTable,
    segment_size: u64,
    tolerance: f64,
) -> Result<OracleComparison> {
    let oracle = series_by_trial_division(limit)?;
    let series = accumulate_series(&[limit as f64], table, segment_size)?;
    let pipeline = series.points()[0];

    let columns: [Column; 9] = [
        ("psi", |p| p.psi),
        ("sum_logn", |p| p.sum_logn),
        ("sum_log2n", |p| p.sum_log2n),
        ("sum_recip", |p| p.sum_recip),
        ("sum_logn_over_n", |p| p.sum_logn_over_n),
        ("sum_upsilon_over_n", |p| p.sum_upsilon_over_n),
        ("sum_upsilon_logn", |p| p.sum_upsilon_logn),
        ("sum_upsilon_over_nlogn", |p| p.sum_upsilon_over_nlogn),
        ("semiprime_count", |p| p.semiprime_count as f64),
    ];
    let rows: Vec<OracleRow> = columns
        .iter()
        .map(|&(name, get)| {
            let a = get(&pipeline);
            let b = get(&oracle);
            OracleRow {
                name,
                pipeline: a,
                oracle: b,
                rel_deviation: (a - b).abs() / b.abs().max(1.0),
            }
        })
        .collect();
    let max_rel_deviation = rows.iter().map(|r| r.rel_deviation).fold(0.0, f64::max);
    Ok(OracleComparison {
        limit,
        tolerance,
        rows,
        max_rel_deviation,
        pass: max_rel_deviation <= tolerance,
    })
}
