//! Main terms, residuals, and boundedness checks for the six statistics with
//! known growth laws.
//!
//! Each statistic grows like a simple closed form in x (its main term), with
//! an error term that stays within a constant multiple of a smaller
//! normalizer. With no explicit constants available, the empirical checks
//! are: the residual divided by its normalizer stays inside a configured
//! bound across the whole grid, and for the two x-normalized statistics the
//! normalized residual stops moving (consecutive differences shrink) as x
//! grows.
//!
//! All main terms need `ln ln x > 0`, hence the domain `x >= 4` everywhere.

use crate::error::{Error, Result};
use crate::master::{MasterSeries, SeriesPoint};
use serde::{Serialize, Serializer};

/// The six statistics with a known main term.
///
/// Declared in ascending order of their display names so iterating `ALL`
/// yields deterministic, name-sorted report rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// Summatory weight; grows like `x ln ln x`, normalizer `x`.
    Psi,
    /// Sum of `ln^2 n`; grows like `x ln x ln ln x`, normalizer `x ln x`.
    SumLog2N,
    /// Sum of `ln n`; grows like `x ln ln x`, normalizer `x`.
    SumLogN,
    /// Sum of `ln n / n`; grows like `ln x ln ln x`, normalizer `ln x`.
    SumLogNOverN,
    /// Sum of `1/n`; grows like `(ln ln x)^2 / 2`, normalizer `ln ln x`.
    SumRecip,
    /// Weighted sum `weight(n)/n`; same law as `SumLogNOverN`.
    SumUpsilonOverN,
}

impl Statistic {
    pub const ALL: [Statistic; 6] = [
        Statistic::Psi,
        Statistic::SumLog2N,
        Statistic::SumLogN,
        Statistic::SumLogNOverN,
        Statistic::SumRecip,
        Statistic::SumUpsilonOverN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Psi => "psi",
            Statistic::SumLog2N => "sum_log2n",
            Statistic::SumLogN => "sum_logn",
            Statistic::SumLogNOverN => "sum_logn_over_n",
            Statistic::SumRecip => "sum_recip",
            Statistic::SumUpsilonOverN => "sum_upsilon_over_n",
        }
    }

    /// The accumulated value of this statistic at one series point.
    pub fn value(self, point: &SeriesPoint) -> f64 {
        match self {
            Statistic::Psi => point.psi,
            Statistic::SumLog2N => point.sum_log2n,
            Statistic::SumLogN => point.sum_logn,
            Statistic::SumLogNOverN => point.sum_logn_over_n,
            Statistic::SumRecip => point.sum_recip,
            Statistic::SumUpsilonOverN => point.sum_upsilon_over_n,
        }
    }
}

impl Serialize for Statistic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

fn require_domain(x: f64) -> Result<()> {
    if x >= 4.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "asymptotic estimates need x >= 4, got {x}"
        )))
    }
}

/// Leading-order growth of the statistic at x.
pub fn main_term(stat: Statistic, x: f64) -> Result<f64> {
    require_domain(x)?;
    let lx = x.ln();
    let llx = lx.ln();
    Ok(match stat {
        Statistic::Psi | Statistic::SumLogN => x * llx,
        Statistic::SumLog2N => x * lx * llx,
        Statistic::SumRecip => 0.5 * llx * llx,
        Statistic::SumLogNOverN | Statistic::SumUpsilonOverN => lx * llx,
    })
}

/// Scale of the error term the residual is measured against.
pub fn normalizer(stat: Statistic, x: f64) -> Result<f64> {
    require_domain(x)?;
    let lx = x.ln();
    Ok(match stat {
        Statistic::Psi | Statistic::SumLogN => x,
        Statistic::SumLog2N => x * lx,
        Statistic::SumRecip => lx.ln(),
        Statistic::SumLogNOverN | Statistic::SumUpsilonOverN => lx,
    })
}

/// One (grid point, statistic) measurement.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualRow {
    pub x: f64,
    pub statistic: Statistic,
    pub actual: f64,
    pub main_term: f64,
    pub residual: f64,
    pub normalizer: f64,
    pub normalized_residual: f64,
}

/// Residuals of all six statistics at every series point, ordered by x
/// ascending, then statistic name ascending.
pub fn residual_report(series: &MasterSeries) -> Result<Vec<ResidualRow>> {
    let mut rows = Vec::with_capacity(series.points().len() * Statistic::ALL.len());
    for point in series.points() {
        for stat in Statistic::ALL {
            let actual = stat.value(point);
            let main = main_term(stat, point.x)?;
            let norm = normalizer(stat, point.x)?;
            rows.push(ResidualRow {
                x: point.x,
                statistic: stat,
                actual,
                main_term: main,
                residual: actual - main,
                normalizer: norm,
                normalized_residual: (actual - main) / norm,
            });
        }
    }
    Ok(rows)
}

/// Worst normalized residual of one statistic over the grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StatisticExtreme {
    pub statistic: Statistic,
    pub max_abs_normalized_residual: f64,
    pub at_x: f64,
    pub pass: bool,
}

/// Whether every normalized residual stays inside `[-bound, bound]`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundednessReport {
    pub bound: f64,
    pub extremes: Vec<StatisticExtreme>,
    pub pass: bool,
}

pub fn boundedness_check(rows: &[ResidualRow], bound: f64) -> Result<BoundednessReport> {
    if !(bound > 0.0) {
        return Err(Error::Domain(format!("bound must be positive, got {bound}")));
    }
    let mut extremes = Vec::new();
    for stat in Statistic::ALL {
        let mut worst: Option<(f64, f64)> = None;
        for row in rows.iter().filter(|r| r.statistic == stat) {
            let a = row.normalized_residual.abs();
            if worst.is_none_or(|(w, _)| a > w) {
                worst = Some((a, row.x));
            }
        }
        if let Some((max_abs, at_x)) = worst {
            extremes.push(StatisticExtreme {
                statistic: stat,
                max_abs_normalized_residual: max_abs,
                at_x,
                pass: max_abs <= bound,
            });
        }
    }
    let pass = extremes.iter().all(|e| e.pass);
    Ok(BoundednessReport {
        bound,
        extremes,
        pass,
    })
}

/// Tail behaviour of one statistic's normalized residual: the absolute
/// consecutive differences over the last `tail_points` grid points.
#[derive(Debug, Clone, Serialize)]
pub struct TrendReport {
    pub statistic: Statistic,
    pub threshold: f64,
    pub tail_differences: Vec<f64>,
    pub pass: bool,
}

/// Check that the normalized residual has stopped moving: every consecutive
/// difference across the last `tail_points` grid points is below `threshold`.
pub fn stabilization_check(
    rows: &[ResidualRow],
    stat: Statistic,
    threshold: f64,
    tail_points: usize,
) -> Result<TrendReport> {
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    if tail_points < 2 {
        return Err(Error::Domain(
            "stabilization needs at least two tail points".into(),
        ));
    }
    let residuals: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.statistic == stat)
        .map(|r| (r.x, r.normalized_residual))
        .collect();
    if residuals.len() < tail_points {
        return Err(Error::Domain(format!(
            "stabilization over {tail_points} points needs that many grid rows, got {}",
            residuals.len()
        )));
    }
    let tail = &residuals[residuals.len() - tail_points..];
    let tail_differences: Vec<f64> = tail
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs())
        .collect();
    let pass = tail_differences.iter().all(|&d| d < threshold);
    Ok(TrendReport {
        statistic: stat,
        threshold,
        tail_differences,
        pass,
    })
}
