//! Deterministic evaluation of SIR distributions, link and average spectral
//! efficiencies, exclusion-region bounds and system-level quantities.

mod average;
mod cdf;
mod exclusion;
mod sir;
mod system;

pub use average::{
    avg_se_d2d, avg_se_d2d_closed_form, avg_se_d2d_corollary1, avg_se_d2d_quadrature, avg_se_uplink, avg_se_uplink_2d,
    avg_se_uplink_eta4, avg_se_uplink_overlay,
};
pub use cdf::{
    cdf_link_se_approx, cdf_link_se_exact, cdf_rho, cdf_rho_overlay, cdf_rho_underlay_eta4, cdf_varrho, cdf_varrho_erf,
    cdf_varrho_kanter, cdf_varrho_series, cdf_varrho_with_method, CdfMethod,
};
pub use exclusion::{avg_se_d2d_exclusion_lb, avg_se_uplink_exclusion};
pub use sir::{cdf_inst_sir, link_se, link_se_inverse, local_avg_sir_d2d, local_avg_sir_uplink};
pub use system::{d2d_vs_uplink_contour, max_d2d_load, system_se, Contour, MaxLoad, SweepResult, SweepRow, SystemSe};

use serde::{Deserialize, Serialize};

/// Which link of the pair is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkSide {
    CellularUplink,
    D2d,
}

/// Approximation `e^x E_1(x) log2(e) ~ A ln(1 + B/x)` used for closed-form SE CDFs.
pub const SE_APPROX_A: f64 = 1.4;
pub const SE_APPROX_B: f64 = 0.82;
