//! Randomized cross-checks between independent implementations of the same
//! quantities: the windowed classifier against per-integer factoring, the
//! divisor-sum closed forms against brute-force divisor enumeration, and the
//! streaming pipeline against trial division.

use proptest::prelude::*;
use semiprime::master::{accumulate_series, upsilon, SeriesPoint};
use semiprime::oracle::series_by_trial_division;
use semiprime::sieve::{build_prime_table, factorize, omega_segment, PrimeTable};
use std::sync::OnceLock;

/// Shared table covering every n the strategies below can produce
/// (factoring needs primes to sqrt(n)).
fn table() -> &'static PrimeTable {
    static TABLE: OnceLock<PrimeTable> = OnceLock::new();
    TABLE.get_or_init(|| build_prime_table(1_000).expect("table to 1e3 builds"))
}

fn assert_points_bit_equal(a: &SeriesPoint, b: &SeriesPoint) {
    assert_eq!(a.x.to_bits(), b.x.to_bits(), "x differs");
    let fields: [(&str, f64, f64); 8] = [
        ("psi", a.psi, b.psi),
        ("sum_logn", a.sum_logn, b.sum_logn),
        ("sum_log2n", a.sum_log2n, b.sum_log2n),
        ("sum_recip", a.sum_recip, b.sum_recip),
        ("sum_logn_over_n", a.sum_logn_over_n, b.sum_logn_over_n),
        ("sum_upsilon_over_n", a.sum_upsilon_over_n, b.sum_upsilon_over_n),
        ("sum_upsilon_logn", a.sum_upsilon_logn, b.sum_upsilon_logn),
        (
            "sum_upsilon_over_nlogn",
            a.sum_upsilon_over_nlogn,
            b.sum_upsilon_over_nlogn,
        ),
    ];
    for (name, x, y) in fields {
        assert_eq!(x.to_bits(), y.to_bits(), "{name}: {x} vs {y}");
    }
    assert_eq!(a.semiprime_count, b.semiprime_count, "count differs");
}

proptest! {
    /// The windowed prime-factor counter agrees with factoring each integer
    /// on its own.
    #[test]
    fn omega_window_matches_per_integer_factoring(
        lo in 2u64..=999_700,
        len in 1u64..=300,
    ) {
        let hi = lo + len - 1;
        let window = omega_segment(lo, hi, table()).unwrap();
        for (i, n) in (lo..=hi).enumerate() {
            let expected = factorize(n, table()).unwrap().omega();
            prop_assert_eq!(
                u32::from(window[i]), expected,
                "prime-factor count of {} disagrees", n
            );
        }
    }

    /// Divisor sums of the weight and of the von Mangoldt function computed
    /// from the factorization match brute-force enumeration of divisors, and
    /// the von Mangoldt divisor sum telescopes to ln n.
    #[test]
    fn divisor_sums_match_brute_force(n in 2u64..=100_000) {
        let f = factorize(n, table()).unwrap();

        let mut divisors = Vec::new();
        let mut d = 1u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                divisors.push(d);
                if d * d != n {
                    divisors.push(n / d);
                }
            }
            d += 1;
        }

        let mut brute_mangoldt = 0.0f64;
        let mut brute_upsilon = 0.0f64;
        for divisor in divisors {
            let fd = factorize(divisor, table()).unwrap();
            // Von Mangoldt: ln p on prime powers, else zero.
            if let [(p, _)] = fd.factors() {
                brute_mangoldt += (*p as f64).ln();
            }
            brute_upsilon += upsilon(&fd);
        }

        let mangoldt = semiprime::identities::mangoldt_divisor_sum(&f);
        let upsilon_sum = semiprime::identities::upsilon_divisor_sum(&f);
        let scale = brute_mangoldt.abs().max(1.0);
        prop_assert!(
            (mangoldt - brute_mangoldt).abs() <= 1e-11 * scale,
            "mangoldt divisor sum of {}: {} vs brute {}", n, mangoldt, brute_mangoldt
        );
        let scale = brute_upsilon.abs().max(1.0);
        prop_assert!(
            (upsilon_sum - brute_upsilon).abs() <= 1e-11 * scale,
            "upsilon divisor sum of {}: {} vs brute {}", n, upsilon_sum, brute_upsilon
        );
        let lnn = (n as f64).ln();
        prop_assert!(
            (mangoldt - lnn).abs() <= 1e-11 * lnn.max(1.0),
            "mangoldt sum of {} is {} but ln n is {}", n, mangoldt, lnn
        );
    }

    /// Evaluating a sub-grid reproduces the full run's rows bit for bit:
    /// window boundaries are anchored to absolute positions, not to the
    /// requested points.
    #[test]
    fn grid_restriction_is_bit_exact(
        points in prop::collection::btree_set(4u64..30_000, 2..6),
        pick in prop::collection::vec(any::<prop::sample::Index>(), 1..4),
    ) {
        let full: Vec<f64> = points
            .iter()
            .enumerate()
            // Alternate integer and half-integer points so cuts land both on
            // and between integers.
            .map(|(i, &v)| if i % 2 == 0 { v as f64 } else { v as f64 + 0.5 })
            .collect();
        let mut chosen: Vec<usize> = pick.iter().map(|ix| ix.index(full.len())).collect();
        chosen.sort_unstable();
        chosen.dedup();
        let sub: Vec<f64> = chosen.iter().map(|&i| full[i]).collect();

        // A small segment size forces several windows even on these ranges.
        let all = accumulate_series(&full, table(), 1 << 12).unwrap();
        let restricted = accumulate_series(&sub, table(), 1 << 12).unwrap();
        for (row, &i) in restricted.points().iter().zip(&chosen) {
            assert_points_bit_equal(row, &all.points()[i]);
        }
    }

    /// On ranges small enough for trial division, the segmented pipeline
    /// reproduces the oracle exactly: same terms, same accumulation order.
    #[test]
    fn pipeline_matches_oracle_bitwise(limit in 4u64..=3_000) {
        let oracle = series_by_trial_division(limit).unwrap();
        let series = accumulate_series(&[limit as f64], table(), 1 << 22).unwrap();
        assert_points_bit_equal(&series.points()[0], &oracle);
    }
}
