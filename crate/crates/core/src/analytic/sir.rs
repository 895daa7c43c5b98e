use crate::error::{Error, Result};
use crate::model::{GeometrySnapshot, SystemParams, Viewpoint};
use crate::specfun::exp_e1_scaled;
use crate::LOG2_E;

fn power_sum(dists: &[f64], eta: f64) -> f64 {
    dists.iter().map(|d| d.powf(-eta)).sum()
}

/// Local-average SIR at the uplink base station, with the out-of-circle
/// interference replaced by its spatial mean (thinned when exclusion is on).
pub fn local_avg_sir_uplink(g: &GeometrySnapshot, p: &SystemParams) -> Result<f64> {
    if g.viewpoint() != Viewpoint::UplinkBs {
        return Err(Error::WrongViewpoint { expected: "uplink_bs" });
    }
    let eta = p.eta_c;
    let am = p.alpha() * p.mu;
    let denom = am * power_sum(g.d2d_interferers(), eta) + 2.0 * (am * p.k_effective() + 1.0) / (eta - 2.0);
    Ok(g.a0().powf(-eta) / denom)
}

/// Local-average SIR at a D2D receiver. The snapshot's link length must be `a / K^beta`.
pub fn local_avg_sir_d2d(g: &GeometrySnapshot, p: &SystemParams) -> Result<f64> {
    if g.viewpoint() != Viewpoint::D2dReceiver {
        return Err(Error::WrongViewpoint {
            expected: "d2d_receiver",
        });
    }
    let a0 = p.d2d_link_distance();
    if (g.a0() - a0).abs() > 1e-12 * a0 {
        return Err(Error::InvalidParam(format!(
            "snapshot link length {} differs from a/K^beta = {a0}",
            g.a0()
        )));
    }
    let eta = p.eta_d;
    let am = p.alpha() / p.mu;
    let denom = power_sum(g.d2d_interferers(), eta)
        + am * power_sum(g.cell_interferers(), eta)
        + 2.0 * (p.k_effective() + am) / (eta - 2.0);
    Ok(a0.powf(-eta) / denom)
}

/// CDF of the instantaneous SIR given its local average (unit-mean Rayleigh fading).
pub fn cdf_inst_sir(gamma: f64, local_avg: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !(local_avg > 0.0) {
        return Err(Error::Domain(format!(
            "instantaneous SIR CDF needs gamma >= 0 and a positive local average (got {gamma}, {local_avg})"
        )));
    }
    Ok(-(-gamma / local_avg).exp_m1())
}

/// Ergodic spectral efficiency in bits/s/Hz of a Rayleigh link with local-average SIR `rho`.
pub fn link_se(local_avg: f64) -> Result<f64> {
    if !(local_avg > 0.0) {
        return Err(Error::Domain(format!(
            "link SE needs a positive local-average SIR (got {local_avg})"
        )));
    }
    if local_avg.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(exp_e1_scaled(1.0 / local_avg)? * LOG2_E)
}

/// The local-average SIR whose link SE equals `se` (bits/s/Hz).
pub fn link_se_inverse(se: f64) -> Result<f64> {
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::Domain(format!(
            "link SE inverse needs a positive finite value (got {se})"
        )));
    }
    // link_se is increasing in ln(rho); bracket then bisect in the log domain.
    let f = |lr: f64| link_se(lr.exp()).map(|v| v - se);
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while f(lo)? > 0.0 {
        lo *= 2.0;
        if lo < -700.0 {
            return Ok(lo.exp());
        }
    }
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 700.0 {
            return Err(Error::Domain(format!("link SE {se} is beyond any finite SIR")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
