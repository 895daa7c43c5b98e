use super::average::unit_breaks;
use crate::error::{Error, Result};
use crate::model::{Mode, SystemParams};
use crate::quad::{integrate_breaks, integrate_semi_infinite, Endpoint, QuadSpec};
use crate::specfun::exp_int_en;
use crate::LOG2_E;

fn underlay_only(p: &SystemParams, what: &str) -> Result<()> {
    if p.mode != Mode::Underlay {
        return Err(Error::InvalidParam(format!("{what} applies to underlay only")));
    }
    Ok(())
}

/// Uplink SE averaged over all geometries with D2D transmitters barred from
/// discs of radius `a_ex` around every base station.
///
/// All exponent pieces are summed before exponentiation, and the
/// `E_nu(x / a_ex^eta)` term underflows cleanly to zero for small `a_ex`.
pub fn avg_se_uplink_exclusion(p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    underlay_only(p, "the exclusion-region uplink average")?;
    if !(p.a_ex > 0.0 && p.a_ex < 1.0) {
        return Err(Error::InvalidParam(format!("a_ex must lie in (0, 1) (got {})", p.a_ex)));
    }
    let eta = p.eta_c;
    let nu = (2.0 + eta) / eta;
    let k = p.k_mean;
    let pk = p.thinning() * k;
    let own = 2.0 * (p.mu * pk + 1.0) / (eta - 2.0);
    let aex2 = p.a_ex * p.a_ex;
    let aex_eta = p.a_ex.powf(eta);
    let inner_spec = spec.scaled(0.1);
    let failed = std::cell::Cell::new(None);

    let exponent = |g: f64, a: f64| -> f64 {
        let s = g * p.mu * a.powf(eta);
        let near = exp_int_en(nu, s / aex_eta);
        let far = exp_int_en(nu, s);
        match (near, far) {
            (Ok(near), Ok(far)) => -pk - g * a.powf(eta) * own - 2.0 * k / eta * (aex2 * near - far),
            (Err(e), _) | (_, Err(e)) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer = |g: f64| -> f64 {
        let width = (g * own).powf(-1.0 / eta);
        match integrate_breaks(|a: f64| a * exponent(g, a).exp(), &unit_breaks(width), &inner_spec) {
            Ok((v, _)) => v / (1.0 + g),
            Err(e) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    };
    let res = integrate_semi_infinite(outer, 0.0, Endpoint::Regular, spec);
    if let Some(e) = failed.take() {
        return Err(e.context("exclusion uplink average (inner)"));
    }
    let (v, _) = res.map_err(|e| e.context("exclusion uplink average"))?;
    Ok(2.0 * LOG2_E * v)
}

/// Lower bound on the D2D SE averaged over all geometries with exclusion
/// regions, obtained by filling the exclusion voids near the receiver.
pub fn avg_se_d2d_exclusion_lb(p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    underlay_only(p, "the exclusion-region D2D bound")?;
    if !(p.a_ex >= 0.0 && p.a_ex < 1.0) {
        return Err(Error::InvalidParam(format!("a_ex must lie in [0, 1) (got {})", p.a_ex)));
    }
    let eta = p.eta_d;
    let nu = (2.0 + eta) / eta;
    let k = p.k_mean;
    let a0_eta = p.d2d_link_distance().powf(eta);
    let own = a0_eta * 2.0 * (p.thinning() * k + 1.0 / p.mu) / (eta - 2.0);
    let failed = std::cell::Cell::new(None);
    let f = |g: f64| -> f64 {
        let x = g * a0_eta;
        match (exp_int_en(nu, x), exp_int_en(nu, x / p.mu)) {
            (Ok(d), Ok(c)) => {
                let e = -(k + 1.0) - g * own + 2.0 / eta * (k * d + c);
                e.exp() / (1.0 + g)
            }
            (Err(e), _) | (_, Err(e)) => {
                failed.set(Some(e));
                f64::NAN
            }
        }
    };
    let res = integrate_semi_infinite(f, 0.0, Endpoint::Regular, spec);
    if let Some(e) = failed.take() {
        return Err(e.context("exclusion D2D bound"));
    }
    let (v, _) = res.map_err(|e| e.context("exclusion D2D bound"))?;
    Ok(LOG2_E * v)
}
