//! Deterministic rendering of result tables.
//!
//! Every real is printed with exactly twelve digits after the decimal point
//! (Rust's formatter rounds ties to even), so identical runs produce
//! byte-identical output whatever thread count produced the numbers. The
//! JSON encoding carries the same values the CSV shows: each float is
//! rounded through the twelve-digit text form before serialization, so
//! parsing either format yields identical numbers.

use crate::asymptotics::ResidualRow;
use serde::Serialize;

/// Digits after the decimal point in all rendered reals.
pub const FRACTION_DIGITS: usize = 12;

/// Canonical text form of a value: fixed twelve fraction digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.FRACTION_DIGITS$}")
}

/// The value a consumer of our output will parse: the canonical text form
/// read back as f64.
pub fn rounded_value(v: f64) -> f64 {
    format_value(v).parse().expect("fixed-point f64 round-trips")
}

/// CSV residual table: header plus one line per (x, statistic) row,
/// LF-terminated UTF-8.
pub fn residual_csv(rows: &[ResidualRow]) -> String {
    let mut out =
        String::from("x,statistic,actual,main_term,residual,normalizer,normalized_residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_value(r.x),
            r.statistic.name(),
            format_value(r.actual),
            format_value(r.main_term),
            format_value(r.residual),
            format_value(r.normalizer),
            format_value(r.normalized_residual),
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonRow {
    x: f64,
    statistic: &'static str,
    actual: f64,
    main_term: f64,
    residual: f64,
    normalizer: f64,
    normalized_residual: f64,
}

/// JSON residual table: an array of row objects carrying the same rounded
/// values as the CSV, LF-terminated.
pub fn residual_json(rows: &[ResidualRow]) -> String {
    let json_rows: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            x: rounded_value(r.x),
            statistic: r.statistic.name(),
            actual: rounded_value(r.actual),
            main_term: rounded_value(r.main_term),
            residual: rounded_value(r.residual),
            normalizer: rounded_value(r.normalizer),
            normalized_residual: rounded_value(r.normalized_residual),
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&json_rows).expect("rows serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{residual_report, Statistic};
    use crate::master::accumulate_series;
    use crate::sieve::build_prime_table;

    #[test]
    fn formatting_matches_the_documented_examples() {
        assert_eq!(format_value(10.0f64.ln()), "2.302585092994");
        assert_eq!(format_value(2.0f64.ln()), "0.693147180560");
        assert_eq!(format_value(0.0), "0.000000000000");
        assert_eq!(format_value(-2.454220421029402), "-2.454220421029");
        assert_eq!(format_value(100000000.0), "100000000.000000000000");
    }

    #[test]
    fn rounding_is_half_even_at_the_last_digit() {
        // 2^-13 and 3*2^-13 are exact in binary and end in ...5 at the 13th
        // fractional digit: genuine ties. Half-even keeps the even 2 and
        // bumps the odd 7.
        assert_eq!(format_value(0.0001220703125), "0.000122070312");
        assert_eq!(format_value(0.0003662109375), "0.000366210938");
    }

    fn sample_rows() -> Vec<ResidualRow> {
        let table = build_prime_table(100).unwrap();
        let series = accumulate_series(&[10.0, 100.0], &table, 1 << 12).unwrap();
        residual_report(&series).unwrap()
    }

    #[test]
    fn csv_has_the_contract_header_and_row_order() {
        let rows = sample_rows();
        let csv = residual_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "x,statistic,actual,main_term,residual,normalizer,normalized_residual"
        );
        assert_eq!(lines.len(), 1 + 12);
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
        // First data row: x=10, statistic names ascending start at psi.
        assert!(lines[1].starts_with("10.000000000000,psi,"));
        assert!(lines[2].starts_with("10.000000000000,sum_log2n,"));
    }

    #[test]
    fn json_and_csv_carry_identical_values() {
        let rows = sample_rows();
        let csv = residual_csv(&rows);
        let json = residual_json(&rows);
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
        let csv_lines: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(parsed.len(), csv_lines.len());
        for (obj, line) in parsed.iter().zip(csv_lines) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(obj["statistic"].as_str().unwrap(), fields[1]);
            for (key, idx) in [
                ("x", 0),
                ("actual", 2),
                ("main_term", 3),
                ("residual", 4),
                ("normalizer", 5),
                ("normalized_residual", 6),
            ] {
                let from_csv: f64 = fields[idx].parse().unwrap();
                let from_json = obj[key].as_f64().unwrap();
                assert_eq!(
                    from_json.to_bits(),
                    from_csv.to_bits(),
                    "field {key} differs: {from_json} vs {from_csv}"
                );
            }
        }
    }

    #[test]
    fn statistic_names_sort_ascending_as_emitted() {
        let names: Vec<&str> = Statistic::ALL.iter().map(|s| s.name()).collect();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        assert_eq!(names, sorted);
    }
}
