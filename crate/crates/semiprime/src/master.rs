//! The semiprime weight and its summatory statistics.
//!
//! The weight assigns `ln p` to squares of primes, `ln n` to products of two
//! distinct primes, and zero to everything else; only integers with exactly
//! two prime factors counted with multiplicity carry weight. This module
//! streams that weight (and seven companion sums over the same integers)
//! across `[2, x]` with the segmented omega sieve and reports the running
//! totals at each requested grid point.
//!
//! Determinism contract: the range is split into windows at fixed absolute
//! boundaries (multiples of the segment size), each window is accumulated
//! sequentially into its own compensated sums, and the per-window partials
//! are folded in ascending window order. Worker threads only change which
//! window is computed when, never the fold order, so results are identical
//! bit for bit whatever the thread count. Grid points are snapshotted inside
//! the window scan, not by re-segmenting at grid boundaries, so restricting
//! the grid cannot perturb the values at the points that remain.

use crate::error::{Error, Result};
use crate::sieve::{omega_segment_into, Factorization, OmegaScratch, PrimeTable, MAX_SEGMENT_LEN};
use crate::summation::CompensatedSum;
use rayon::prelude::*;
use serde::Serialize;

/// Window length for the streaming accumulator unless configured otherwise.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 22;

/// Largest x any streaming operation accepts.
pub const MAX_SERIES_X: f64 = 1e10;

/// Upper bound on the number of windows a single run may generate.
const MAX_SEGMENT_JOBS: u64 = 1 << 22;

/// Weight of one integer: `ln p` for p^2, `ln n` for a product of two
/// distinct primes, zero otherwise.
pub fn upsilon(f: &Factorization) -> f64 {
    match f.factors() {
        [(p, 2)] => (*p as f64).ln(),
        [(_, 1), (_, 1)] => (f.n() as f64).ln(),
        _ => 0.0,
    }
}

/// Running totals over integers `n <= x` with exactly two prime factors.
///
/// `psi` is the summatory weight; the companions are the plain and weighted
/// sums the asymptotic estimates and exact identities need. All eight are
/// compensated sums; `semiprime_count` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub psi: f64,
    pub sum_logn: f64,
    pub sum_log2n: f64,
    pub sum_recip: f64,
    pub sum_logn_over_n: f64,
    pub sum_upsilon_over_n: f64,
    pub sum_upsilon_logn: f64,
    pub sum_upsilon_over_nlogn: f64,
    pub semiprime_count: u64,
}

/// The accumulated statistics at every grid point of one run.
#[derive(Debug, Clone)]
pub struct MasterSeries {
    points: Vec<SeriesPoint>,
}

impl MasterSeries {
    pub fn points(&self) -> &[SeriesPoint] {
        &self.points
    }

    /// The row for an exact grid value used in the run, if present.
    pub fn point_at(&self, x: f64) -> Option<&SeriesPoint> {
        self.points.iter().find(|p| p.x == x)
    }
}

/// The eight compensated accumulators plus the exact count.
#[derive(Debug, Clone, Copy, Default)]
struct SumSet {
    psi: CompensatedSum,
    sum_logn: CompensatedSum,
    sum_log2n: CompensatedSum,
    sum_recip: CompensatedSum,
    sum_logn_over_n: CompensatedSum,
    sum_upsilon_over_n: CompensatedSum,
    sum_upsilon_logn: CompensatedSum,
    sum_upsilon_over_nlogn: CompensatedSum,
    count: u64,
}

impl SumSet {
    /// Credit one qualifying integer. `square_root` is `Some(r)` when
    /// `n = r^2`; with exactly two prime factors that forces `n = p^2`, so
    /// the weight is `ln r` rather than `ln n`.
    fn add_semiprime(&mut self, n: u64, square_root: Option<u64>) {
        let nf = n as f64;
        let lnn = nf.ln();
        let ups = match square_root {
            Some(r) => (r as f64).ln(),
            None => lnn,
        };
        self.psi.add(ups);
        self.sum_logn.add(lnn);
        self.sum_log2n.add(lnn * lnn);
        self.sum_recip.add(1.0 / nf);
        self.sum_logn_over_n.add(lnn / nf);
        self.sum_upsilon_over_n.add(ups / nf);
        self.sum_upsilon_logn.add(ups * lnn);
        self.sum_upsilon_over_nlogn.add(ups / (nf * lnn));
        self.count += 1;
    }

    fn absorb(&mut self, other: &SumSet) {
        self.psi.absorb(&other.psi);
        self.sum_logn.absorb(&other.sum_logn);
        self.sum_log2n.absorb(&other.sum_log2n);
        self.sum_recip.absorb(&other.sum_recip);
        self.sum_logn_over_n.absorb(&other.sum_logn_over_n);
        self.sum_upsilon_over_n.absorb(&other.sum_upsilon_over_n);
        self.sum_upsilon_logn.absorb(&other.sum_upsilon_logn);
        self.sum_upsilon_over_nlogn.absorb(&other.sum_upsilon_over_nlogn);
        self.count += other.count;
    }

    fn snapshot(&self, x: f64) -> SeriesPoint {
        SeriesPoint {
            x,
            psi: self.psi.value(),
            sum_logn: self.sum_logn.value(),
            sum_log2n: self.sum_log2n.value(),
            sum_recip: self.sum_recip.value(),
            sum_logn_over_n: self.sum_logn_over_n.value(),
            sum_upsilon_over_n: self.sum_upsilon_over_n.value(),
            sum_upsilon_logn: self.sum_upsilon_logn.value(),
            sum_upsilon_over_nlogn: self.sum_upsilon_over_nlogn.value(),
            semiprime_count: self.count,
        }
    }
}

/// One window's contribution: totals over the whole window plus the running
/// state at each grid cut that falls inside it.
struct SegmentOutput {
    full: SumSet,
    at_cuts: Vec<(u64, SumSet)>,
}

fn process_segment(
    lo: u64,
    hi: u64,
    cuts: &[u64],
    table: &PrimeTable,
    scratch: &mut OmegaScratch,
) -> Result<SegmentOutput> {
    omega_segment_into(lo, hi, table, scratch)?;
    let omega = &scratch.omega;

    // Walk the perfect squares alongside n instead of testing each n.
    let mut root = (lo - 1).isqrt() + 1;
    let mut next_square = root * root;

    let mut sums = SumSet::default();
    let mut at_cuts = Vec::with_capacity(cuts.len());
    let mut cut_iter = cuts.iter().copied().peekable();

    for n in lo..=hi {
        if omega[(n - lo) as usize] == 2 {
            let square = if n == next_square { Some(root) } else { None };
            sums.add_semiprime(n, square);
        }
        if n == next_square {
            root += 1;
            next_square = root * root;
        }
        if cut_iter.peek() == Some(&n) {
            at_cuts.push((n, sums));
            cut_iter.next();
        }
    }
    Ok(SegmentOutput {
        full: sums,
        at_cuts,
    })
}

/// Stream the eight sums over `[2, max(grid)]`, reporting totals at every
/// grid point.
///
/// The grid must be strictly ascending with every point in `[4, 1e10]`, and
/// the table must hold the primes up to `sqrt(max(grid))`.
pub fn accumulate_series(
    grid: &[f64],
    table: &PrimeTable,
    segment_size: u64,
) -> Result<MasterSeries> {
    if grid.is_empty() {
        return Err(Error::Domain("grid must be nonempty".into()));
    }
    let mut prev = 0.0;
    for &x in grid {
        if !(x >= 4.0) {
            return Err(Error::Domain(format!("grid points must be >= 4, got {x}")));
        }
        if x > MAX_SERIES_X {
            return Err(Error::Domain(format!(
                "grid point {x} exceeds the supported maximum {MAX_SERIES_X}"
            )));
        }
        if x <= prev {
            return Err(Error::Domain(format!(
                "grid must be strictly ascending, got {prev} then {x}"
            )));
        }
        prev = x;
    }
    if segment_size == 0 {
        return Err(Error::Domain("segment size must be positive".into()));
    }
    if segment_size > MAX_SEGMENT_LEN {
        return Err(Error::Capacity(format!(
            "segment size {segment_size} exceeds the maximum {MAX_SEGMENT_LEN}"
        )));
    }

    let n_max = grid.last().copied().unwrap_or(4.0).floor() as u64;
    let root = n_max.isqrt();
    if table.limit() < root {
        return Err(Error::Capacity(format!(
            "streaming to {n_max} needs primes to {root}, table stops at {}",
            table.limit()
        )));
    }
    if n_max / segment_size + 1 > MAX_SEGMENT_JOBS {
        return Err(Error::Capacity(format!(
            "segment size {segment_size} splits [2, {n_max}] into too many windows"
        )));
    }

    // Deduplicated snapshot positions; a window is cut where the running
    // totals of n <= floor(x) must be recorded.
    let mut cuts: Vec<u64> = grid.iter().map(|&x| x.floor() as u64).collect();
    cuts.dedup();

    // Fixed absolute windows: window k covers [k*S, (k+1)*S - 1]. The
    // partition depends only on the segment size, never on the grid.
    let mut jobs: Vec<(u64, u64, Vec<u64>)> = Vec::new();
    let mut k = 2 / segment_size;
    loop {
        let lo = (k * segment_size).max(2);
        if lo > n_max {
            break;
        }
        let hi = n_max.min(k * segment_size + (segment_size - 1));
        let in_window: Vec<u64> = cuts
            .iter()
            .copied()
            .filter(|&c| c >= lo && c <= hi)
            .collect();
        jobs.push((lo, hi, in_window));
        k += 1;
    }

    let outputs: Vec<Result<SegmentOutput>> = jobs
        .par_iter()
        .map_init(OmegaScratch::default, |scratch, (lo, hi, cuts)| {
            process_segment(*lo, *hi, cuts, table, scratch)
        })
        .collect();

    // Ordered fold: ascending windows, so the result is independent of the
    // worker count that produced the partials.
    let mut global = SumSet::default();
    let mut at_cuts: Vec<(u64, SumSet)> = Vec::with_capacity(cuts.len());
    for output in outputs {
        let output = output?;
        for (cut, partial) in &output.at_cuts {
            let mut merged = global;
            merged.absorb(partial);
            at_cuts.push((*cut, merged));
        }
        global.absorb(&output.full);
    }

    let points = grid
        .iter()
        .map(|&x| {
            let cut = x.floor() as u64;
            let idx = at_cuts
                .binary_search_by_key(&cut, |&(c, _)| c)
                .expect("every grid floor was assigned to a window");
            at_cuts[idx].1.snapshot(x)
        })
        .collect();
    Ok(MasterSeries { points })
}

/// The summatory weight written as a sum over primes:
/// `sum over p <= x/2 of pi(x/p) * ln p`.
///
/// Exactly equal to the streamed `psi` at every x >= 4; computing it needs
/// the primes up to x/2 in the table.
pub fn psi_prime_sum(x: f64, table: &PrimeTable) -> Result<f64> {
    let primes = prime_sum_range(x, table)?;
    let mut acc = CompensatedSum::new();
    for &p in primes {
        let count = table.prime_count(x / p as f64)?;
        acc.add(count as f64 * (p as f64).ln());
    }
    Ok(acc.value())
}

/// The unweighted companion `sum over p <= x/2 of pi(x/p)`, an exact integer
/// returned as a real.
pub fn sum_pi_over_primes(x: f64, table: &PrimeTable) -> Result<f64> {
    let primes = prime_sum_range(x, table)?;
    let mut total: u64 = 0;
    for &p in primes {
        total += table.prime_count(x / p as f64)?;
    }
    Ok(total as f64)
}

fn prime_sum_range(x: f64, table: &PrimeTable) -> Result<&[u64]> {
    if !(x >= 4.0) {
        return Err(Error::Domain(format!("x must be >= 4, got {x}")));
    }
    if x > MAX_SERIES_X {
        return Err(Error::Domain(format!(
            "x = {x} exceeds the supported maximum {MAX_SERIES_X}"
        )));
    }
    if (table.limit() as f64) < x / 2.0 {
        return Err(Error::Capacity(format!(
            "the prime sums at x = {x} need primes to {}, table stops at {}",
            (x / 2.0).floor(),
            table.limit()
        )));
    }
    table.primes_up_to(x / 2.0)
}
