//! Bound states of soft quantum layers built on surfaces of revolution.
//!
//! A layer is the region within normal distance of a surface; the transverse
//! profile is either a δ-interaction on the surface or a bounded potential
//! well. The crate computes the geometry of the surface, the transverse
//! ground state, variational certificates for a bound state below the
//! threshold, and discretized spectra.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
pub mod profiles;
pub mod quadrature;
pub mod report;
pub mod run;
pub mod spectral;
pub mod spline;
pub mod transverse;
pub mod variational;

pub use error::{Error, Result};
