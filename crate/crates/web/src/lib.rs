//! Browser bindings: SIR / spectral efficiency CDFs, average spectral
//! efficiencies and the D2D-vs-uplink contour. Parameters arrive as a plain
//! object with the fields of [`SystemParams`].

use d2d_core::analytic::{
    avg_se_d2d, avg_se_d2d_exclusion_lb, avg_se_uplink, avg_se_uplink_exclusion, cdf_link_se_exact, cdf_rho,
    cdf_varrho, d2d_vs_uplink_contour, system_se, LinkSide,
};
use d2d_core::quad::QuadSpec;
use d2d_core::{validate_params, SystemParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Averages {
    pub uplink: f64,
    pub d2d: f64,
    pub d2d_system: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourCurve {
    pub c: f64,
    pub exponent: f64,
    pub a0: Vec<f64>,
    pub share: Vec<f64>,
}

/// CDF values of `quantity` (`rho`, `varrho`, `uplink-se` or `d2d-se`) at `xs`.
pub fn cdf_values(p: &SystemParams, quantity: &str, xs: &[f64]) -> Result<Vec<f64>, String> {
    let spec = QuadSpec::default();
    let eval = |x: f64| match quantity {
        "rho" => cdf_rho(x, p),
        "varrho" => cdf_varrho(x, p, &spec),
        "uplink-se" => cdf_link_se_exact(x, p, LinkSide::CellularUplink, &spec),
        "d2d-se" => cdf_link_se_exact(x, p, LinkSide::D2d, &spec),
        other => Err(d2d_core::Error::InvalidParam(format!("unknown quantity {other:?}"))),
    };
    xs.iter().map(|&x| eval(x).map_err(|e| e.to_string())).collect()
}

/// Uplink and D2D averages, with the exclusion-region forms when `a_ex > 0`.
pub fn average_values(p: &SystemParams) -> Result<Averages, String> {
    let spec = QuadSpec::default();
    let go = || -> d2d_core::Result<Averages> {
        let p = validate_params(*p)?;
        let (uplink, d2d) = if p.has_exclusion() {
            (avg_se_uplink_exclusion(&p, &spec)?, avg_se_d2d_exclusion_lb(&p, &spec)?)
        } else {
            (avg_se_uplink(&p, &spec)?, avg_se_d2d(&p, &spec)?)
        };
        Ok(Averages {
            uplink,
            d2d,
            d2d_system: system_se(&p, &spec)?.d2d,
        })
    };
    go().map_err(|e| e.to_string())
}

/// Break-even uplink distance and D2D share for each link length in `a_d2d`.
pub fn contour_values(p: &SystemParams, a_d2d: &[f64]) -> Result<ContourCurve, String> {
    let c = d2d_vs_uplink_contour(p).map_err(|e| e.to_string())?;
    Ok(ContourCurve {
        c: c.c,
        exponent: c.exponent,
        a0: a_d2d.iter().map(|&a| c.a0(a)).collect(),
        share: a_d2d.iter().map(|&a| c.share(a)).collect(),
    })
}

fn params(js: JsValue) -> Result<SystemParams, JsError> {
    serde_wasm_bindgen::from_value(js).map_err(|e| JsError::new(&format!("bad parameters: {e}")))
}

fn to_js<T: Serialize>(v: &T) -> Result<JsValue, JsError> {
    serde_wasm_bindgen::to_value(v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = cdf)]
pub fn cdf_js(params_js: JsValue, quantity: &str, xs: Vec<f64>) -> Result<Vec<f64>, JsError> {
    cdf_values(&params(params_js)?, quantity, &xs).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = averages)]
pub fn averages_js(params_js: JsValue) -> Result<JsValue, JsError> {
    to_js(&average_values(&params(params_js)?).map_err(|e| JsError::new(&e))?)
}

#[wasm_bindgen(js_name = contour)]
pub fn contour_js(params_js: JsValue, a_d2d: Vec<f64>) -> Result<JsValue, JsError> {
    to_js(&contour_values(&params(params_js)?, &a_d2d).map_err(|e| JsError::new(&e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use d2d_core::Mode;

    #[test]
    fn cdf_values_follow_the_core() {
        let p = SystemParams {
            eta_c: 4.0,
            ..SystemParams::default()
        };
        let v = cdf_values(&p, "rho", &[1.0, 4.0]).unwrap();
        assert_eq!(v, vec![0.0, 0.5]);
        let se = cdf_values(&p, "d2d-se", &[0.0, 5.0, 50.0]).unwrap();
        assert!(se[0] == 0.0 && se[1] > 0.0 && se[2] > 0.999);
        assert!(cdf_values(&p, "nope", &[1.0]).is_err());
    }

    #[test]
    fn averages_and_contour() {
        let avg = average_values(&SystemParams {
            eta_d: 4.0,
            ..SystemParams::default()
        })
        .unwrap();
        assert!((avg.d2d_system - 10.0 * avg.d2d).abs() < 1e-9);
        let excl = SystemParams {
            mode: Mode::Underlay,
            a: 0.12,
            a_ex: 0.25,
            ..SystemParams::default()
        };
        assert!(average_values(&excl).unwrap().uplink > 0.9);
        assert!(average_values(&SystemParams {
            eta_c: 1.5,
            ..SystemParams::default()
        })
        .is_err());
        let c = contour_values(&SystemParams::default(), &[0.05, 0.15]).unwrap();
        assert!(c.share[0] >= 0.98 && (c.share[1] - 0.80).abs() < 0.02);
        assert!(contour_values(&SystemParams::default().with_mode(Mode::Underlay), &[0.1]).is_err());
    }
}
