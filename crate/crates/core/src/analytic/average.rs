use std::f64::consts::{LN_2, PI};

use super::cdf::d2d_interference_coeff;
use crate::error::{Error, Result};
use crate::model::{Mode, SystemParams};
use crate::quad::{integrate_breaks, integrate_finite, integrate_semi_infinite, Endpoint, QuadSpec};
use crate::specfun::{erfcx_fn, exp_e1_scaled, gamma_any, trig_int_ci, trig_int_si};
use crate::LOG2_E;

fn no_exclusion(p: &SystemParams) -> Result<()> {
    if p.has_exclusion() {
        return Err(Error::InvalidParam(format!(
            "a_ex = {} > 0; use the exclusion-region averages",
            p.a_ex
        )));
    }
    Ok(())
}

/// Break points on `[0, 1]` around a feature of width `width` at the origin.
pub(crate) fn unit_breaks(width: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    for w in [width, 8.0 * width] {
        if w < 1.0 && w > *pts.last().unwrap() {
            pts.push(w);
        }
    }
    pts.push(1.0);
    pts
}

/// Overlay uplink average SE, `log2(e) int_0^1 e^x E_1(x) 2a da` with `x = 2a^eta/(eta-2)`.
pub fn avg_se_uplink_overlay(eta_c: f64, spec: &QuadSpec) -> Result<f64> {
    if !(eta_c > 2.0) {
        return Err(Error::InvalidParam(format!("eta_c must exceed 2 (got {eta_c})")));
    }
    let scale = 2.0 / (eta_c - 2.0);
    let (v, _) = integrate_finite(
        |a: f64| 2.0 * a * exp_e1_scaled(scale * a.powf(eta_c)).unwrap_or(0.0),
        0.0,
        1.0,
        spec,
    )
    .map_err(|e| e.context("overlay uplink average"))?;
    Ok(v * LOG2_E)
}

/// Uplink average SE as the double integral over the SIR threshold and the
/// user distance, for a full-plane D2D field of power ratio `mu >= 0` and
/// mean `k_mean >= 0` per cell. `mu = 0` or `k_mean = 0` gives overlay.
pub fn avg_se_uplink_2d(eta_c: f64, mu: f64, k_mean: f64, spec: &QuadSpec) -> Result<f64> {
    if !(eta_c > 2.0) || !(mu >= 0.0) || !(k_mean >= 0.0) {
        return Err(Error::InvalidParam(format!(
            "need eta_c > 2, mu >= 0, K >= 0 (got {eta_c}, {mu}, {k_mean})"
        )));
    }
    let delta = 2.0 / eta_c;
    let own = 2.0 / (eta_c - 2.0);
    let field = k_mean * gamma_any(1.0 - delta);
    let inner_spec = spec.scaled(0.1);
    let outer = |g: f64| -> f64 {
        let w = (g * mu).powf(delta) * field;
        let width = (g * own).powf(-1.0 / eta_c).min(w.powf(-0.5));
        let inner = integrate_breaks(
            |a: f64| a * (-g * own * a.powf(eta_c) - w * a * a).exp(),
            &unit_breaks(width),
            &inner_spec,
        );
        match inner {
            Ok((v, _)) => v / (1.0 + g),
            Err(_) => f64::NAN,
        }
    };
    let (v, _) = integrate_semi_infinite(outer, 0.0, Endpoint::Regular, spec)
        .map_err(|e| e.context("uplink average double integral"))?;
    Ok(2.0 * LOG2_E * v)
}

/// Underlay uplink average SE for `eta_c = 4` as a single integral with an
/// inverse-square-root endpoint.
pub fn avg_se_uplink_eta4(mu: f64, k_mean: f64, spec: &QuadSpec) -> Result<f64> {
    let kappa = (PI * mu).sqrt() * k_mean / 2.0;
    let ek = erfcx_fn(kappa);
    // e^{k^2} [erf(sqrt(g) + k) - erf(k)] = erfcx(k) - erfcx(sqrt(g) + k) e^{-g - 2 k sqrt(g)}
    let f = |g: f64| {
        let s = g.sqrt();
        let diff = ek - erfcx_fn(s + kappa) * (-s * (s + 2.0 * kappa)).exp();
        diff / (s * (1.0 + g))
    };
    let (v, _) = integrate_semi_infinite(f, 0.0, Endpoint::SqrtSingular, spec)
        .map_err(|e| e.context("underlay uplink average (eta = 4)"))?;
    Ok(PI.sqrt() / (2.0 * LN_2) * v)
}

/// Cellular uplink SE averaged over all geometries (no exclusion regions).
pub fn avg_se_uplink(p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    no_exclusion(p)?;
    match p.mode {
        Mode::Overlay => avg_se_uplink_overlay(p.eta_c, spec),
        Mode::Underlay if p.eta_c == 4.0 => avg_se_uplink_eta4(p.mu, p.k_mean, spec),
        Mode::Underlay => avg_se_uplink_2d(p.eta_c, p.mu, p.k_mean, spec),
    }
}

/// D2D average SE by quadrature over the SIR threshold, any `eta_d`.
pub fn avg_se_d2d_quadrature(p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    no_exclusion(p)?;
    let delta = 2.0 / p.eta_d;
    let scale = d2d_interference_coeff(p) * gamma_any(1.0 - delta);
    let (v, _) = integrate_semi_infinite(
        |g: f64| (-g.powf(delta) * scale).exp() / (1.0 + g),
        0.0,
        Endpoint::Regular,
        spec,
    )
    .map_err(|e| e.context("D2D average"))?;
    Ok(LOG2_E * v)
}

/// D2D average SE in closed form through the sine and cosine integrals, `eta_d = 4`.
pub fn avg_se_d2d_closed_form(p: &SystemParams) -> Result<f64> {
    no_exclusion(p)?;
    if p.eta_d != 4.0 {
        return Err(Error::Unsupported(format!(
            "the sine/cosine-integral form needs eta_d = 4 (got {})",
            p.eta_d
        )));
    }
    let y = PI.sqrt() * d2d_interference_coeff(p);
    let v = 2.0 * (y.sin() * trig_int_si(y)? - y.cos() * trig_int_ci(y)?) * LOG2_E;
    Ok(v.max(0.0))
}

/// D2D link SE averaged over all geometries (no exclusion regions).
pub fn avg_se_d2d(p: &SystemParams, spec: &QuadSpec) -> Result<f64> {
    if p.eta_d == 4.0 {
        avg_se_d2d_closed_form(p)
    } else {
        avg_se_d2d_quadrature(p, spec)
    }
}

/// Overlay D2D average SE when `beta = 1/2`, which does not depend on `K`.
pub fn avg_se_d2d_corollary1(a: f64, eta_d: f64, spec: &QuadSpec) -> Result<f64> {
    let p = SystemParams {
        mode: Mode::Overlay,
        k_mean: 1.0,
        beta: 0.5,
        a,
        eta_d,
        a_ex: 0.0,
        ..SystemParams::default()
    };
    avg_se_d2d(&crate::model::validate_params(p)?, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec() -> QuadSpec {
        QuadSpec::default()
    }

    #[test]
    fn overlay_uplink_values() {
        for &(eta, want) in &[(3.5, 2.266_715_594_8), (4.0, 2.834_324_206_8), (4.5, 3.374_705_024_9)] {
            assert_abs_diff_eq!(avg_se_uplink_overlay(eta, &spec()).unwrap(), want, epsilon = 1e-8);
            assert_abs_diff_eq!(avg_se_uplink_2d(eta, 0.0, 10.0, &spec()).unwrap(), want, epsilon = 1e-8);
        }
    }

    #[test]
    fn underlay_uplink_values() {
        let p = SystemParams {
            mode: Mode::Underlay,
            eta_c: 4.0,
            ..SystemParams::default()
        };
        let v = avg_se_uplink(&p, &spec()).unwrap();
        assert_abs_diff_eq!(v, 0.689_481_413_4, epsilon = 1e-8);
        assert_abs_diff_eq!(avg_se_uplink_2d(4.0, 0.1, 10.0, &spec()).unwrap(), v, epsilon = 1e-8);
        assert_abs_diff_eq!(
            avg_se_uplink_eta4(0.1, 1.0, &spec()).unwrap(),
            2.237_525_386_1,
            epsilon = 1e-8
        );
        let p = SystemParams { eta_c: 3.5, ..p };
        assert_abs_diff_eq!(avg_se_uplink(&p, &spec()).unwrap(), 0.642_474_343_9, epsilon = 1e-8);
        // K -> 0 recovers overlay.
        let tiny = avg_se_uplink(&SystemParams { k_mean: 1e-12, ..p }, &spec()).unwrap();
        assert_abs_diff_eq!(tiny, 2.266_715_594_8, epsilon = 1e-7);
    }

    #[test]
    fn d2d_values() {
        let p = SystemParams {
            eta_d: 4.0,
            ..SystemParams::default()
        };
        assert_abs_diff_eq!(avg_se_d2d(&p, &spec()).unwrap(), 4.006_147_797_3, epsilon = 1e-8);
        assert_abs_diff_eq!(
            avg_se_d2d_quadrature(&p, &spec()).unwrap(),
            4.006_147_797_3,
            epsilon = 1e-8
        );
        for k in [1.0, 10.0, 100.0] {
            let q = SystemParams {
                beta: 0.5,
                k_mean: k,
                ..p
            };
            assert_abs_diff_eq!(avg_se_d2d(&q, &spec()).unwrap(), 10.048_807_695_2, epsilon = 1e-8);
        }
        assert_eq!(
            avg_se_d2d_corollary1(0.1, 4.0, &spec()).unwrap(),
            avg_se_d2d(
                &SystemParams {
                    beta: 0.5,
                    k_mean: 100.0,
                    ..p
                },
                &spec()
            )
            .unwrap()
        );
        let far = SystemParams { a: 1e3, ..p };
        assert!(avg_se_d2d(&far, &spec()).unwrap() < 1e-9);
        assert!(avg_se_d2d_quadrature(&SystemParams { a: 50.0, ..p }, &spec()).unwrap() < 1e-6);
    }

    #[test]
    fn rejects_exclusion() {
        let p = SystemParams {
            a_ex: 0.2,
            mode: Mode::Underlay,
            ..SystemParams::default()
        };
        assert!(avg_se_uplink(&p, &spec()).is_err());
        assert!(avg_se_d2d(&p, &spec()).is_err());
    }
}
