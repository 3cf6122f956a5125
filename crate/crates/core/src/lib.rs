//! Fractional (Caputo) geometry on nonholonomic grid charts and fractional Ricci flow.
//!
//! The crate is organised bottom-up:
//!
//! - [`fraccalc`]: one-dimensional Caputo / Riemann-Liouville operators on uniform grids and
//!   the axis-wise multi-dimensional calculus built from them.
//! - [`geometry`]: grid charts with an h/v split, N-connections, N-adapted frames, anholonomy,
//!   vielbeins and d-metric conversions.
//! - [`connection`]: canonical d-connection, torsion, curvature, Ricci, distortion to
//!   Levi-Civita and metricity checks.
//! - [`perelman`]: fractional volume integrals, the F and W functionals and thermodynamics.
//! - [`flow`]: the fractional initial-value stepper and the Ricci flow driver.

// `!(x <= tol)` guards also reject NaN; index loops mirror the tensor notation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod connection;
pub mod error;
pub mod fraccalc;
pub mod flow;
pub mod geometry;
pub mod perelman;
pub mod scenarios;
pub mod tensor;

pub use error::{Error, Result};
