//! Spectral efficiency of device-to-device (D2D) links sharing a cellular
//! uplink, modeled with Poisson point processes.
//!
//! The crate is split the same way the computation is:
//!
//! * [`model`] holds the normalized system parameters and interferer geometries.
//! * [`specfun`] and [`quad`] are the numerical substrate (special functions,
//!   adaptive quadrature, series summation).
//! * [`analytic`] evaluates the closed forms and integrals for SIR
//!   distributions, link and average spectral efficiencies, exclusion regions
//!   and system-level quantities.
//! * [`mcsim`] is an independent Monte Carlo simulator used to validate every
//!   analytic result.
//!
//! All distances are normalized by the cell radius and the network is
//! interference limited, so only the D2D/cellular power ratio `mu` enters.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod mcsim;
pub mod model;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use model::{
    mean_neighbor_distance, typical_geometry, validate_params, CurveKind, DistributionCurve, GeometrySnapshot,
    McEstimate, Mode, SystemParams, Viewpoint,
};

/// log2(e), the nats-to-bits factor.
pub const LOG2_E: f64 = std::f64::consts::LOG2_E;
