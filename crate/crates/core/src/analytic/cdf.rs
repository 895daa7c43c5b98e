use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::sir::link_se_inverse;
use super::{LinkSide, SE_APPROX_A, SE_APPROX_B};
use crate::error::{Error, Result};
use crate::model::{Mode, SystemParams};
use crate::quad::{integrate_finite, sum_series, QuadSpec};
use crate::specfun::{erf_fn, erfcx_fn, gamma_any, ln_gamma};

/// Which evaluation produced a D2D SIR CDF value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfMethod {
    /// Error-function closed form (pathloss exponent 4).
    Erf,
    /// Alternating power series.
    Series,
    /// Kanter's integral representation of the stable law.
    Kanter,
}

impl std::fmt::Display for CdfMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CdfMethod::Erf => "erf",
            CdfMethod::Series => "series",
            CdfMethod::Kanter => "kanter",
        })
    }
}

/// Above this value of the series argument the alternating series loses too
/// many digits to cancellation and the Kanter integral is used instead.
const SERIES_ARG_MAX: f64 = 3.0;

fn no_exclusion(p: &SystemParams, what: &str) -> Result<()> {
    if p.has_exclusion() {
        return Err(Error::Unsupported(format!(
            "{what} is derived without exclusion regions (a_ex = {})",
            p.a_ex
        )));
    }
    Ok(())
}

/// CDF of the uplink local-average SIR with underlay and `eta_c = 4`.
///
/// Evaluated through `erfcx` so that `e^{kappa^2}` never appears on its own.
pub fn cdf_rho_underlay_eta4(x: f64, p: &SystemParams) -> Result<f64> {
    if p.mode != Mode::Underlay {
        return Err(Error::InvalidParam("this CDF is for underlay".into()));
    }
    if p.eta_c != 4.0 {
        return Err(Error::Unsupported(format!(
            "the underlay uplink SIR CDF has a closed form only for eta_c = 4 (got {}); \
             use the Monte Carlo simulator for other exponents",
            p.eta_c
        )));
    }
    no_exclusion(p, "the underlay uplink SIR CDF")?;
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let kappa = (PI * p.mu).sqrt() * p.k_mean / 2.0;
    let v = if x >= 1.0 {
        1.0 - erfcx_fn(kappa) / x.sqrt()
    } else {
        let s = (1.0 - x).sqrt();
        let t = kappa / s;
        // e^{k^2} (erf k - erf t) = erfcx(t) e^{k^2 - t^2} - erfcx(k)
        let head = erfcx_fn(t) * ((kappa - t) * (kappa + t)).exp() - erfcx_fn(kappa);
        head / x.sqrt() + erf_fn(kappa * x.sqrt() / s)
    };
    Ok(v.clamp(0.0, 1.0))
}

/// CDF of the uplink local-average SIR with overlay.
pub fn cdf_rho_overlay(x: f64, p: &SystemParams) -> Result<f64> {
    if p.mode != Mode::Overlay {
        return Err(Error::InvalidParam("this CDF is for overlay".into()));
    }
    let eta = p.eta_c;
    let edge = (eta - 2.0) / 2.0;
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    if x < edge {
        return Ok(0.0);
    }
    Ok(1.0 - (edge / x).powf(2.0 / eta))
}

/// Uplink local-average SIR CDF, dispatching on the mode.
pub fn cdf_rho(x: f64, p: &SystemParams) -> Result<f64> {
    match p.mode {
        Mode::Overlay => cdf_rho_overlay(x, p),
        Mode::Underlay => cdf_rho_underlay_eta4(x, p),
    }
}

/// Argument of the D2D series, `x^{2/eta} a0^2 (K + alpha mu^{-2/eta}) Gamma(1 - 2/eta)`.
fn series_argument(x: f64, p: &SystemParams) -> f64 {
    let delta = 2.0 / p.eta_d;
    x.powf(delta) * d2d_interference_coeff(p) * gamma_any(1.0 - delta)
}

/// `a^2 (K + alpha mu^{-2/eta}) / K^{2 beta}`, the D2D interference scale shared
/// by the CDF and the average.
pub(crate) fn d2d_interference_coeff(p: &SystemParams) -> f64 {
    let delta = 2.0 / p.eta_d;
    let load = (p.k_mean + p.alpha() * p.mu.powf(-delta)) / p.k_mean.powf(2.0 * p.beta);
    p.a * p.a * load
}

fn check_x(x: f64) -> Result<Option<f64>> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("D2D SIR CDF needs x >= 0 (got {x})")));
    }
    if x == 0.0 {
        return Ok(Some(0.0));
    }
    if x.is_infinite() {
        return Ok(Some(1.0));
    }
    Ok(None)
}

/// D2D local-average SIR CDF from the power series in `x^{2/eta}`.
pub fn cdf_varrho_series(x: f64, p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    no_exclusion(p, "the D2D SIR CDF")?;
    if let Some(v) = check_x(x)? {
        return Ok(v);
    }
    let delta = 2.0 / p.eta_d;
    let arg = series_argument(x, p);
    let ln_arg = arg.ln();
    let largest = std::cell::Cell::new(0.0f64);
    let (sum, _) = sum_series(
        |k| {
            let kf = k as f64;
            let mag = (kf * ln_arg + ln_gamma(delta * kf) - ln_gamma(kf + 1.0)).exp();
            largest.set(largest.get().max(mag));
            mag * (kf * PI * (1.0 - delta)).sin()
        },
        spec,
    )
    .map_err(|e| match e {
        Error::SeriesNoConvergence { terms, partial, .. } => Error::SeriesNoConvergence {
            terms,
            partial,
            argument: arg,
        },
        other => other,
    })?;
    // Rounding in the largest term bounds the attainable accuracy.
    if largest.get() * 64.0 * f64::EPSILON > 1e-9 {
        return Err(Error::Domain(format!(
            "D2D SIR series argument {arg} is too large: cancellation would lose accuracy"
        )));
    }
    Ok((sum / PI).clamp(0.0, 1.0))
}

/// D2D local-average SIR CDF in closed form, `eta_d = 4` only.
pub fn cdf_varrho_erf(x: f64, p: &SystemParams) -> Result<f64> {
    no_exclusion(p, "the D2D SIR CDF")?;
    if p.eta_d != 4.0 {
        return Err(Error::Unsupported(format!(
            "the erf form needs eta_d = 4 (got {})",
            p.eta_d
        )));
    }
    if let Some(v) = check_x(x)? {
        return Ok(v);
    }
    let load = (p.k_mean + p.alpha() / p.mu.sqrt()) / p.k_mean.powf(2.0 * p.beta);
    Ok(erf_fn((PI * x).sqrt() * p.a * p.a / 2.0 * load))
}

/// D2D local-average SIR CDF through Kanter's representation of the
/// positive stable interference: `1 - (1/pi) int_0^pi exp(-A(u) s) du`.
pub fn cdf_varrho_kanter(x: f64, p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    no_exclusion(p, "the D2D SIR CDF")?;
    if let Some(v) = check_x(x)? {
        return Ok(v);
    }
    let delta = 2.0 / p.eta_d;
    let s = series_argument(x, p).powf(1.0 / (1.0 - delta));
    let kernel = |u: f64| {
        let num = (delta * u).sin().powf(delta) * ((1.0 - delta) * u).sin().powf(1.0 - delta);
        let a = (num / u.sin()).powf(1.0 / (1.0 - delta));
        (-a * s).exp()
    };
    let (v, _) = integrate_finite(kernel, 0.0, PI, spec).map_err(|e| e.context("D2D SIR CDF (Kanter)"))?;
    Ok((1.0 - v / PI).clamp(0.0, 1.0))
}

/// D2D local-average SIR CDF together with the method used.
pub fn cdf_varrho_with_method(x: f64, p: &SystemParams, spec: &QuadSpec) -> Result<(f64, CdfMethod)> {
    if p.eta_d == 4.0 {
        return Ok((cdf_varrho_erf(x, p)?, CdfMethod::Erf));
    }
    if x > 0.0 && series_argument(x, p) > SERIES_ARG_MAX {
        return Ok((cdf_varrho_kanter(x, p, spec)?, CdfMethod::Kanter));
    }
    Ok((cdf_varrho_series(x, p, spec)?, CdfMethod::Series))
}

/// D2D local-average SIR CDF.
pub fn cdf_varrho(x: f64, p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    cdf_varrho_with_method(x, p, spec).map(|(v, _)| v)
}

fn side_cdf(x: f64, p: &SystemParams, side: LinkSide, spec: &QuadSpec) -> Result<f64> {
    match side {
        LinkSide::CellularUplink => cdf_rho(x, p),
        LinkSide::D2d => cdf_varrho(x, p, spec),
    }
}

/// Approximate link-SE CDF from `C(rho) ~ 1.4 ln(1 + 0.82 rho)`.
pub fn cdf_link_se_approx(nu: f64, p: &SystemParams, side: LinkSide, spec: &QuadSpec) -> Result<f64> {
    if nu.is_nan() {
        return Err(Error::Domain("nu is NaN".into()));
    }
    if nu <= 0.0 {
        return Ok(0.0);
    }
    let x = (nu / SE_APPROX_A).exp_m1() / SE_APPROX_B;
    side_cdf(x, p, side, spec)
}

/// Link-SE CDF by exact inversion of the link SE formula.
pub fn cdf_link_se_exact(nu: f64, p: &SystemParams, side: LinkSide, spec: &QuadSpec) -> Result<f64> {
    if nu.is_nan() {
        return Err(Error::Domain("nu is NaN".into()));
    }
    if nu <= 0.0 {
        return Ok(0.0);
    }
    side_cdf(link_se_inverse(nu)?, p, side, spec)
}
