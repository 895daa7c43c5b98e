//! Monte Carlo oracle: Poisson point process geometries, fading and
//! exclusion-region layouts, used to check the analytic results.
//!
//! Work is split into chunks of 2^14 geometries, each with its own ChaCha8
//! stream derived from `(seed, chunk index)`. Chunks may run on any number of
//! threads; results are folded in chunk order, so the output depends only on
//! the configuration.

mod estimate;
mod hex;
mod ppp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use estimate::{
    empirical_cdf_inst_sir, empirical_cdf_local_avg_sir, full_plane_sir, mc_avg_se, realize_geometry, InstSirSetup,
};
pub use hex::{hex_exclusion_layout, lattice_constant, HexLattice};
pub use ppp::sample_ppp_annulus;

/// Geometries per RNG stream.
pub const CHUNK_SIZE: u64 = 1 << 14;

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_geometry: u64,
    /// Fading draws per geometry, instantaneous-SIR CDFs only.
    pub n_fading: u32,
    pub seed: u64,
    /// Radius beyond which "infinite" fields are replaced by their mean power.
    pub r_trunc: f64,
    pub tail_correction: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_geometry: 100_000,
            n_fading: 1,
            seed: 1,
            r_trunc: 30.0,
            tail_correction: true,
        }
    }
}

impl SimConfig {
    pub fn new(n_geometry: u64, seed: u64) -> Self {
        Self {
            n_geometry,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_geometry == 0 || self.n_fading == 0 {
            return Err(Error::InvalidParam("sample counts must be positive".into()));
        }
        if !(self.r_trunc >= 10.0 && self.r_trunc.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "r_trunc must be finite and >= 10 (got {})",
                self.r_trunc
            )));
        }
        Ok(())
    }
}
