//! Adaptive Gauss-Kronrod quadrature and compensated series summation.
//!
//! Integrals are refined by repeatedly bisecting the subinterval with the
//! largest error estimate (21-point Kronrod rule with its embedded 10-point
//! Gauss rule) until the summed estimate drops below
//! `max(abs_tol, rel_tol * |value|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and work limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Term cap for [`sum_series`].
    pub max_terms: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
            max_terms: 500,
        }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParam("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 100 {
            return Err(Error::InvalidParam(format!(
                "max_subdivisions must be at least 100 (got {})",
                self.max_subdivisions
            )));
        }
        Ok(())
    }

    /// Same limits with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }
}

/// Behaviour of the integrand at the finite lower limit of a semi-infinite integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endpoint {
    #[default]
    Regular,
    /// Integrand behaves like `1/sqrt(x - lo)`; handled by `x = lo + t^2`.
    SqrtSingular,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// One 21-point Kronrod panel: `(value, error estimate)`.
fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// `int_lo^hi f(x) dx` with adaptive bisection. Returns `(value, err_est)`.
///
/// Endpoints are never evaluated, so integrable endpoint singularities are
/// allowed. If the tolerance is not met within `max_subdivisions` bisections
/// the error carries the best estimate reached.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadSpec) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite()) || !(lo < hi) {
        return Err(Error::InvalidParam(format!(
            "integration limits must be finite with lo < hi (got {lo}, {hi})"
        )));
    }
    let (value, err) = kronrod21(&f, lo, hi);
    let mut heap = BinaryHeap::with_capacity(64);
    heap.push(Panel {
        a: lo,
        b: hi,
        value,
        err,
    });
    let mut total = value;
    let mut total_err = err;
    let mut subdivisions = 0;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::QuadNoConvergence {
                what: "integrand produced a non-finite value".into(),
                estimate: total,
                err_est: total_err,
                subdivisions,
            });
        }
        if total_err <= tol {
            return Ok((total, total_err));
        }
        if subdivisions >= spec.max_subdivisions {
            break;
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // Worst panel cannot be split any further in floating point.
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod21(&f, worst.a, mid);
        let (v2, e2) = kronrod21(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
        subdivisions += 1;
        if subdivisions % 64 == 0 {
            // Re-sum to shed accumulated rounding in the running totals.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    let total_err_full: f64 = heap.iter().map(|p| p.err).sum::<f64>().max(total_err);
    Err(Error::QuadNoConvergence {
        what: "adaptive quadrature".into(),
        estimate: total,
        err_est: total_err_full,
        subdivisions,
    })
}

/// Sum of [`integrate_finite`] over consecutive panels between `points`,
/// which must be increasing. Useful when the integrand has a narrow feature
/// at a known location.
pub fn integrate_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], spec: &QuadSpec) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InvalidParam("need at least two break points".into()));
    }
    let mut total = (0.0, 0.0);
    for w in points.windows(2) {
        let (v, e) = integrate_finite(&f, w[0], w[1], spec)?;
        total.0 += v;
        total.1 += e;
    }
    Ok(total)
}

/// `int_lo^inf f(x) dx`, mapped onto `(0, 1]` by `x = lo + (1 - t)/t`
/// (after `x = lo + s^2` when the lower endpoint is flagged singular).
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    endpoint: Endpoint,
    spec: &QuadSpec,
) -> Result<(f64, f64)> {
    if !lo.is_finite() {
        return Err(Error::InvalidParam(format!("lower limit must be finite (got {lo})")));
    }
    match endpoint {
        Endpoint::Regular => integrate_finite(
            |t: f64| {
                let s = (1.0 - t) / t;
                f(lo + s) / (t * t)
            },
            0.0,
            1.0,
            spec,
        ),
        Endpoint::SqrtSingular => integrate_finite(
            |t: f64| {
                let s = (1.0 - t) / t;
                2.0 * s * f(lo + s * s) / (t * t)
            },
            0.0,
            1.0,
            spec,
        ),
    }
}

/// Sums `term(1) + term(2) + ...` with Neumaier compensation, stopping after
/// three consecutive terms below `abs_tol`. Returns `(value, terms_used)`.
pub fn sum_series<F: Fn(usize) -> f64>(term: F, spec: &QuadSpec) -> Result<(f64, usize)> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut small = 0;
    for k in 1..=spec.max_terms {
        let t = term(k);
        if !t.is_finite() {
            return Err(Error::SeriesNoConvergence {
                terms: k,
                partial: sum + comp,
                argument: t,
            });
        }
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
        if t.abs() < spec.abs_tol {
            small += 1;
            if small == 3 {
                return Ok((sum + comp, k));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::SeriesNoConvergence {
        terms: spec.max_terms,
        partial: sum + comp,
        argument: f64::NAN,
    })
}
