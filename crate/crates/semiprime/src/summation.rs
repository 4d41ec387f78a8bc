//! Compensated floating-point accumulation.
//!
//! Every statistic in this crate is a sum of tens of millions of terms, and
//! several acceptance checks compare two independently computed routes to the
//! same quantity at 1e-9 relative or tighter. Plain `f64` accumulation loses
//! low bits linearly in the term count; the Neumaier variant of Kahan
//! summation tracks the rounding error of each addition in a running
//! compensation term, which also survives the addend being larger in
//! magnitude than the running sum (the case plain Kahan mishandles, and the
//! common case when whole-segment partial sums are merged).
//!
//! `CompensatedSum` is the workhorse. The double-double helpers below it back
//! the cumulative log-of-primes table, where consecutive entries must differ
//! by exactly the log that was added even when the running total is ~1e9 and
//! a single f64 ulp is far coarser than the 1e-12 contract.

/// Running sum with Neumaier error compensation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one term.
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Fold another accumulator into this one.
    ///
    /// Merge order is the caller's contract: merging segment partials in
    /// ascending segment order makes results independent of how many worker
    /// threads produced them.
    pub fn absorb(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    /// Best f64 estimate of the true sum.
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Error-free transformation: `a + b` as a rounded sum and exact residual.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bv = s - a;
    let err = (a - (s - bv)) + (b - bv);
    (s, err)
}

/// `two_sum` specialisation valid when `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Unevaluated double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
///
/// Gives ~32 significant decimal digits, enough that differences of adjacent
/// cumulative log sums reproduce the added term to well below 1e-12 absolute
/// at any table size this crate permits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    /// Add an f64 term, renormalising the pair.
    pub fn add_f64(self, x: f64) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, x);
        let lo = self.lo + e;
        let (hi, lo) = quick_two_sum(s, lo);
        DoubleDouble { hi, lo }
    }

    /// Exact-as-possible difference `self - other`, rounded to f64.
    pub fn sub_to_f64(self, other: DoubleDouble) -> f64 {
        let (s, e) = two_sum(self.hi, -other.hi);
        (self.lo - other.lo + e) + s
    }

    /// Round the pair to the nearest f64.
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms_after_large() {
        let mut acc = CompensatedSum::new();
        acc.add(1e16);
        for _ in 0..1000 {
            acc.add(1.0);
        }
        acc.add(-1e16);
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn compensated_sum_handles_addend_larger_than_sum() {
        // Plain Kahan drops the compensation here; Neumaier keeps it.
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn absorb_matches_flat_accumulation_bit_for_bit() {
        let terms: Vec<f64> = (1..=10_000).map(|k| 1.0 / k as f64).collect();
        let mut flat = CompensatedSum::new();
        for &t in &terms {
            flat.add(t);
        }
        // Same split must give the same answer no matter how the halves were
        // produced, as long as they are absorbed in order.
        let mut left = CompensatedSum::new();
        let mut right = CompensatedSum::new();
        for &t in &terms[..5_000] {
            left.add(t);
        }
        for &t in &terms[5_000..] {
            right.add(t);
        }
        let mut merged = CompensatedSum::new();
        merged.absorb(&left);
        merged.absorb(&right);
        assert!((merged.value() - flat.value()).abs() < 1e-12);

        let mut again = CompensatedSum::new();
        again.absorb(&left);
        again.absorb(&right);
        assert_eq!(merged.value().to_bits(), again.value().to_bits());
    }

    #[test]
    fn double_double_tracks_sub_ulp_differences() {
        // Accumulate many logs so hi grows to ~1e5, then check that adjacent
        // prefix sums still differ by exactly the term that was added.
        let mut acc = DoubleDouble::ZERO;
        let mut prev = acc;
        for k in 2..50_000u64 {
            let term = (k as f64).ln();
            prev = acc;
            acc = acc.add_f64(term);
            if k % 9973 == 0 {
                let diff = acc.sub_to_f64(prev);
                assert!(
                    (diff - term).abs() < 1e-13,
                    "k={k}: diff {diff} vs term {term}"
                );
            }
        }
        let _ = prev;
    }
}
