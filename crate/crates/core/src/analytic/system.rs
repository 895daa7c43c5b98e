use serde::{Deserialize, Serialize};

use super::average::{avg_se_d2d, avg_se_uplink, avg_se_uplink_overlay};
use super::exclusion::{avg_se_d2d_exclusion_lb, avg_se_uplink_exclusion};
use crate::error::{Error, Result};
use crate::model::{typical_geometry, validate_params, McEstimate, Mode, SystemParams, Viewpoint};
use crate::quad::QuadSpec;

/// Per-cell average spectral efficiencies, bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSe {
    /// One cellular uplink user per cell.
    pub uplink: f64,
    /// All D2D links of the cell together.
    pub d2d: f64,
}

/// Uplink and D2D system SE. With exclusion regions the D2D part uses the
/// lower bound and the thinned load `p K`. `k_mean = 0` is allowed and means
/// no D2D traffic at all.
pub fn system_se(p: &SystemParams, spec: &QuadSpec) -> Result<SystemSe> {
    if p.k_mean == 0.0 {
        validate_params(SystemParams { k_mean: 1.0, ..*p })?;
        return Ok(SystemSe {
            uplink: avg_se_uplink_overlay(p.eta_c, spec)?,
            d2d: 0.0,
        });
    }
    let p = validate_params(*p)?;
    if p.has_exclusion() {
        if p.mode != Mode::Underlay {
            return Err(Error::InvalidParam("exclusion regions apply to underlay only".into()));
        }
        Ok(SystemSe {
            uplink: avg_se_uplink_exclusion(&p, spec)?,
            d2d: p.k_effective() * avg_se_d2d_exclusion_lb(&p, spec)?,
        })
    } else {
        Ok(SystemSe {
            uplink: avg_se_uplink(&p, spec)?,
            d2d: p.k_mean * avg_se_d2d(&p, spec)?,
        })
    }
}

/// Largest admissible D2D load under an uplink degradation constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxLoad {
    pub k_max: f64,
    /// D2D system SE at `k_max`.
    pub d2d_system_se: f64,
    /// Uplink average SE at `k_max`.
    pub uplink: f64,
    /// Uplink average SE without D2D.
    pub uplink_baseline: f64,
}

const K_BRACKET: f64 = 1e3;
const K_TOL: f64 = 1e-3;

/// Largest `K` with `C_uplink(K) >= nu C_uplink(0)`, by bisection on `[0, 1000]`.
pub fn max_d2d_load(p: &SystemParams, nu: f64, spec: &QuadSpec) -> Result<MaxLoad> {
    if p.mode != Mode::Underlay {
        return Err(Error::InvalidParam(
            "the load constraint is meaningful for underlay only".into(),
        ));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParam(format!("nu must lie in (0, 1] (got {nu})")));
    }
    validate_params(SystemParams { k_mean: 1.0, ..*p })?;
    let baseline = avg_se_uplink_overlay(p.eta_c, spec)?;
    let target = nu * baseline;
    let at = |k: f64| system_se(&SystemParams { k_mean: k, ..*p }, spec);
    if nu == 1.0 {
        return Ok(MaxLoad {
            k_max: 0.0,
            d2d_system_se: 0.0,
            uplink: baseline,
            uplink_baseline: baseline,
        });
    }
    if at(K_BRACKET)?.uplink >= target {
        return Err(Error::Infeasible(format!(
            "uplink constraint still met at K = {K_BRACKET}; the bracket is exhausted"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, K_BRACKET);
    while hi - lo > K_TOL {
        let mid = 0.5 * (lo + hi);
        if at(mid)?.uplink >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let se = at(lo)?;
    Ok(MaxLoad {
        k_max: lo,
        d2d_system_se: se.d2d,
        uplink: se.uplink,
        uplink_baseline: baseline,
    })
}

/// Break-even contour between a D2D link and the uplink from the same user,
/// `a0 = c * a_d2d^exponent`, for the typical overlay geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub c: f64,
    pub exponent: f64,
}

impl Contour {
    /// Uplink distance at which both links have the same SE.
    pub fn a0(&self, a_d2d: f64) -> f64 {
        self.c * a_d2d.powf(self.exponent)
    }

    /// Share of uniformly placed uplink users for which the D2D link of
    /// length `a_d2d` is better, `1 - min(1, a0^2)`.
    pub fn share(&self, a_d2d: f64) -> f64 {
        1.0 - self.a0(a_d2d).powi(2).min(1.0)
    }
}

/// Solves `rho(a0) = varrho(a_d2d)` on the typical overlay geometry.
pub fn d2d_vs_uplink_contour(p: &SystemParams) -> Result<Contour> {
    if p.mode != Mode::Overlay {
        return Err(Error::InvalidParam("the contour is defined for overlay".into()));
    }
    let p = validate_params(*p)?;
    let g = typical_geometry(&p, Viewpoint::D2dReceiver)?;
    let d: f64 =
        g.d2d_interferers().iter().map(|x| x.powf(-p.eta_d)).sum::<f64>() + 2.0 * p.k_effective() / (p.eta_d - 2.0);
    Ok(Contour {
        c: ((p.eta_c - 2.0) / 2.0 * d).powf(1.0 / p.eta_c),
        exponent: p.eta_d / p.eta_c,
    })
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub analytic: f64,
    pub mc: Option<McEstimate>,
}

/// A parameter sweep with analytic values and optional simulation values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param_name: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Evaluates `f` at every value; the first failure aborts the sweep.
    pub fn run(param_name: &str, values: &[f64], mut f: impl FnMut(f64) -> Result<f64>) -> Result<Self> {
        let rows = values
            .iter()
            .map(|&v| {
                Ok(SweepRow {
                    param: v,
                    analytic: f(v)?,
                    mc: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            param_name: param_name.to_string(),
            rows,
        })
    }
}
