//! Gaussian primes in sectors, Hurwitz continued fractions, and the
//! exponential sums that control how often `‖pc‖` is small.
//!
//! Modules, bottom up:
//! - [`gint`]: Gaussian integers, extended-precision complex numbers, Hurwitz expansions.
//! - [`gsieve`]: prime tables and sector counts.
//! - [`dioph`]: constrained prime counts and spacing audits.
//! - [`expsum`]: Vaaler's approximation and the type I / type II sums.
//! - [`metrical`]: `F_N(α)`, `G_N` and the sieve-error quantities `T_P`, `E_P`.

pub mod dioph;
pub mod error;
pub mod expsum;
pub mod gint;
pub mod gsieve;
pub mod metrical;
pub mod report;

pub use error::{Error, Result};
pub use gint::{ComplexHP, GaussInt};
