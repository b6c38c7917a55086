//! Constructive certificates for the Steinhaus-type property of boundary
//! patches of convex bodies.
//!
//! Given a patch `U = ∂K ∩ (x0 + εB)` of the boundary of a convex body, this
//! crate decides whether `x0` is a flattening point of the boundary and, when
//! it is not, produces a checkable witness: an explicit ball that lies inside
//! the Minkowski sum `U + U`. Every witness is re-verifiable on its own
//! (`witness_verify`) and can be cross-checked against an independent
//! rasterized Minkowski-sum oracle ([`grid`]).
//!
//! The crate also ships an exact rational engine for one-dimensional
//! Cantor-type sets and their iterated sumsets ([`interval1d`]), and a batch
//! experiment runner ([`experiments`]) used by the `steinhaus` CLI.
//!
//! Modules:
//!
//! * [`geometry`] — vectors, norms, gauges, linear functionals, dual norms,
//!   supporting functionals.
//! * [`bodies`] — convex-body representations, boundary sampling, the
//!   flattening-point detector, and the symmetric gauge-body construction
//!   used to renorm general bodies.
//! * [`paths`] — paths on spheres, climb-window search, certificate
//!   construction and verification, the patch decision procedure, and the
//!   two-hyperplane dichotomy check.
//! * [`grid`] — rasterized Minkowski sums and interior detection by nested
//!   witness blocks.
//! * [`interval1d`] — exact rational interval unions, Cantor stages, k-fold
//!   sumsets and their measures.
//! * [`experiments`] — config ingestion, experiment dispatch, reports.

pub mod bodies;
pub mod describe;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod grid;
pub mod interval1d;
pub mod paths;

pub use error::{Error, Result};
