use std::f64::consts::PI;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::hex::HexLattice;
use crate::error::{Error, Result};

/// `r^{-eta}` evaluated from `s = r^2`, with a square-root fast path when
/// `2 eta` is an integer (covers 3, 3.5, 4, 4.5, ...).
#[derive(Debug, Clone, Copy)]
pub(crate) struct PathLoss {
    half_eta: f64,
    whole: i32,
    frac: u8,
    fast: bool,
}

impl PathLoss {
    pub(crate) fn new(eta: f64) -> Self {
        let q = 2.0 * eta;
        let fast = (q - q.round()).abs() < 1e-12 && q > 0.0 && q <= 64.0;
        let qi = q.round() as i32;
        Self {
            half_eta: 0.5 * eta,
            whole: qi / 4,
            frac: (qi % 4) as u8,
            fast,
        }
    }

    #[inline]
    pub(crate) fn of_sq(&self, s: f64) -> f64 {
        if !self.fast {
            return s.powf(-self.half_eta);
        }
        let mut v = s.powi(self.whole);
        match self.frac {
            1 => v *= s.sqrt().sqrt(),
            2 => v *= s.sqrt(),
            3 => {
                let r = s.sqrt();
                v *= r * r.sqrt();
            }
            _ => {}
        }
        1.0 / v
    }
}

/// Mean power `int r^{-eta}` of a PPP with `lam_pi` points per unit of `r^2`
/// beyond radius `r`.
pub(crate) fn campbell_tail(lam_pi: f64, r: f64, eta: f64) -> f64 {
    lam_pi * 2.0 * r.powf(2.0 - eta) / (eta - 2.0)
}

/// Poisson variate with mean `m >= 0`.
#[inline]
fn poisson<R: Rng + ?Sized>(rng: &mut R, m: f64) -> u64 {
    if m <= 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(m).expect("finite positive mean").sample(rng);
    n as u64
}

/// Calls `visit(s)` for every point of a PPP with `lam_pi` points per unit of
/// `s = r^2` on `s_in < s <= s_out`, in no particular order.
#[inline]
pub(crate) fn for_each_sq<R: Rng + ?Sized>(
    rng: &mut R,
    lam_pi: f64,
    s_in: f64,
    s_out: f64,
    mut visit: impl FnMut(&mut R, f64),
) {
    let width = s_out - s_in;
    for _ in 0..poisson(rng, lam_pi * width) {
        let u: f64 = rng.sample(Open01);
        visit(rng, s_in + width * u);
    }
}

/// Power sum of a PPP on the annulus `s_in < r^2 <= s_out` around the origin.
#[inline]
pub(crate) fn ppp_power<R: Rng + ?Sized>(rng: &mut R, lam_pi: f64, s_in: f64, s_out: f64, pl: &PathLoss) -> f64 {
    let mut sum = 0.0;
    for_each_sq(rng, lam_pi, s_in, s_out, |_, s| sum += pl.of_sq(s));
    sum
}

/// Power sum at `center` of a PPP on the annulus `s_in < r^2 <= s_out`
/// around that point, keeping only points outside every exclusion disc of
/// `lattice`. Points are drawn uniformly in the bounding square.
pub(crate) fn ppp_power_thinned<R: Rng + ?Sized>(
    rng: &mut R,
    lam_pi: f64,
    s_in: f64,
    s_out: f64,
    pl: &PathLoss,
    lattice: &HexLattice,
    (cx, cy): (f64, f64),
) -> f64 {
    let r = s_out.sqrt();
    let mut sum = 0.0;
    for _ in 0..poisson(rng, lam_pi / PI * 4.0 * s_out) {
        let x = r * (2.0 * rng.random::<f64>() - 1.0);
        let y = r * (2.0 * rng.random::<f64>() - 1.0);
        let s = x * x + y * y;
        if s > s_in && s <= s_out && lattice.keeps(cx + x, cy + y) {
            sum += pl.of_sq(s);
        }
    }
    sum
}

/// Distances of a PPP with `density` points per unit area on the annulus
/// `r_in < r <= r_out`, sorted. The count is Poisson with mean
/// `density pi (r_out^2 - r_in^2)` and the radii follow the area measure.
pub fn sample_ppp_annulus<R: Rng + ?Sized>(density: f64, r_in: f64, r_out: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::InvalidParam(format!("density must be positive (got {density})")));
    }
    if !(r_in >= 0.0 && r_in < r_out && r_out.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "need 0 <= r_in < r_out < inf (got {r_in}, {r_out})"
        )));
    }
    let mut out = Vec::new();
    for_each_sq(rng, density * PI, r_in * r_in, r_out * r_out, |_, s| out.push(s.sqrt()));
    out.sort_by(f64::total_cmp);
    Ok(out)
}
