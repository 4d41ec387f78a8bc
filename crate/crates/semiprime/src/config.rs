//! Run configuration shared by the CLI commands.

use crate::error::{Error, Result};
use crate::master::{DEFAULT_SEGMENT_SIZE, MAX_SERIES_X};
use crate::sieve::MAX_SEGMENT_LEN;
use serde::Serialize;

pub const DEFAULT_LIMIT: f64 = 1e8;
pub const DEFAULT_GRID_START: f64 = 1e4;
pub const DEFAULT_GRID_STOP: f64 = 1e8;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_BOUND: f64 = 5.0;

/// Most points a single grid may carry; a ratio barely above 1 would
/// otherwise explode the run.
pub const MAX_GRID_POINTS: usize = 10_000;

/// Default grid ratio: sqrt(10), two points per decade.
pub fn default_grid_ratio() -> f64 {
    10.0f64.sqrt()
}

/// Everything a run needs to be reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Largest x the run may touch.
    pub limit: f64,
    pub grid_start: f64,
    pub grid_stop: f64,
    pub grid_ratio: f64,
    pub segment_size: u64,
    pub workers: usize,
    /// Relative tolerance for identity checks.
    pub tolerance: f64,
    /// Allowed magnitude of normalized residuals.
    pub bound: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            limit: DEFAULT_LIMIT,
            grid_start: DEFAULT_GRID_START,
            grid_stop: DEFAULT_GRID_STOP,
            grid_ratio: default_grid_ratio(),
            segment_size: DEFAULT_SEGMENT_SIZE,
            workers: std::thread::available_parallelism()
                .map(usize::from)
                .unwrap_or(1),
            tolerance: DEFAULT_TOLERANCE,
            bound: DEFAULT_BOUND,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.limit >= 4.0 && self.limit <= MAX_SERIES_X) {
            return fail(format!(
                "limit must be in [4, {MAX_SERIES_X}], got {}",
                self.limit
            ));
        }
        if !(self.grid_start >= 4.0) {
            return fail(format!("grid start must be >= 4, got {}", self.grid_start));
        }
        if !(self.grid_stop >= self.grid_start) {
            return fail(format!(
                "grid stop {} is below grid start {}",
                self.grid_stop, self.grid_start
            ));
        }
        if !(self.grid_stop <= self.limit) {
            return fail(format!(
                "grid stop {} exceeds the limit {}",
                self.grid_stop, self.limit
            ));
        }
        if !(self.grid_ratio > 1.0) {
            return fail(format!("grid ratio must exceed 1, got {}", self.grid_ratio));
        }
        if self.segment_size == 0 || self.segment_size > MAX_SEGMENT_LEN {
            return fail(format!(
                "segment size must be in [1, {MAX_SEGMENT_LEN}], got {}",
                self.segment_size
            ));
        }
        if self.workers == 0 {
            return fail("workers must be at least 1".into());
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return fail(format!(
                "tolerance must be in (0, 1), got {}",
                self.tolerance
            ));
        }
        if !(self.bound > 0.0) {
            return fail(format!("bound must be positive, got {}", self.bound));
        }
        Ok(())
    }

    /// The geometric grid this configuration describes.
    pub fn grid(&self) -> Result<Vec<f64>> {
        geometric_grid(self.grid_start, self.grid_stop, self.grid_ratio)
    }
}

/// Geometric grid from `start` to `stop` by factors of `ratio`. A point
/// within one part in 1e9 of `stop` is snapped onto it, so accumulated
/// rounding in the repeated multiplication cannot drop the endpoint.
pub fn geometric_grid(start: f64, stop: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(start >= 4.0) {
        return Err(Error::Config(format!(
            "grid start must be >= 4, got {start}"
        )));
    }
    if !(stop >= start) {
        return Err(Error::Config(format!(
            "grid stop {stop} is below grid start {start}"
        )));
    }
    if !(ratio > 1.0) {
        return Err(Error::Config(format!("grid ratio must exceed 1, got {ratio}")));
    }
    let mut points = Vec::new();
    let mut x = start;
    while x <= stop * (1.0 + 1e-9) {
        points.push(if (x - stop).abs() <= stop * 1e-9 { stop } else { x });
        if points.len() > MAX_GRID_POINTS {
            return Err(Error::Config(format!(
                "grid from {start} to {stop} at ratio {ratio} exceeds {MAX_GRID_POINTS} points"
            )));
        }
        x *= ratio;
    }
    Ok(points)
}
