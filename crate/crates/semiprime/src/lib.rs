//! Weighted sums over integers with exactly two prime factors.
//!
//! The library is organised around one weight function: it assigns `ln p` to
//! prime squares `p^2`, `ln n` to products `n = p*q` of two distinct primes,
//! and zero elsewhere. Everything else is machinery to measure that weight at
//! scale:
//!
//! - [`sieve`]: prime tables with O(log) counting and Chebyshev-log queries,
//!   trial-division factorization, and a segmented sieve for the
//!   number-of-prime-factors function over arbitrary windows.
//! - [`master`]: the weight itself and a deterministic parallel accumulator
//!   that streams eight summatory statistics across `[2, x]`, plus the two
//!   sums over primes that mirror the summatory weight exactly.
//! - [`asymptotics`]: main terms of the known growth laws for six of the
//!   statistics and normalized-residual tables that measure how tightly the
//!   data hugs them.
//! - [`identities`]: exact algebraic cross-checks (decompositions of each
//!   statistic into another plus a prime correction, divisor-sum relations,
//!   and a prime-sum inequality), each reported with explicit tolerances.
//! - [`oracle`]: an independent per-integer trial-division recomputation of
//!   every statistic, for validating the sieve pipeline end to end.
//! - [`config`] and [`report`]: run configuration, grid generation, and
//!   deterministic CSV/JSON rendering used by the CLI.

// Domain validation throughout this crate is written as `!(x >= bound)`
// rather than `x < bound` so that NaN fails closed instead of slipping past
// the comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod identities;
pub mod master;
pub mod oracle;
pub mod report;
pub mod sieve;
pub mod summation;

pub use error::{Error, Result};
