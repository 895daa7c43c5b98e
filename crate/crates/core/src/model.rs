//! System parameters, interferer geometries and the result containers shared
//! by the analytic and simulation sides.
//!
//! Every length is normalized by the cell radius `R`, so the cell is the unit
//! disc and the cellular user density is `1/pi` per unit area.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

/// How D2D traffic shares spectrum with the cellular uplink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// D2D reuses the uplink band; the two kinds of link interfere.
    Underlay,
    /// D2D runs on dedicated spectrum.
    Overlay,
}

impl Mode {
    /// The binary coupling factor: 1 for underlay, 0 for overlay.
    pub fn alpha(self) -> f64 {
        match self {
            Mode::Underlay => 1.0,
            Mode::Overlay => 0.0,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Underlay => "underlay",
            Mode::Overlay => "overlay",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "underlay" => Ok(Mode::Underlay),
            "overlay" => Ok(Mode::Overlay),
            other => Err(Error::InvalidParam(format!(
                "unknown mode {other:?} (expected underlay or overlay)"
            ))),
        }
    }
}

/// Scalar model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub mode: Mode,
    /// D2D to cellular transmit power ratio.
    pub mu: f64,
    /// Mean number of active D2D links per cell (Poisson mean).
    pub k_mean: f64,
    /// Exponent of the density-dependent D2D link length `a / K^beta`.
    pub beta: f64,
    /// Normalized D2D reference distance.
    pub a: f64,
    /// Cellular pathloss exponent.
    pub eta_c: f64,
    /// User-to-user pathloss exponent.
    pub eta_d: f64,
    /// Normalized exclusion radius around each base station; 0 disables it.
    pub a_ex: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            mode: Mode::Overlay,
            mu: 0.1,
            k_mean: 10.0,
            beta: 0.0,
            a: 0.1,
            eta_c: 3.5,
            eta_d: 4.5,
            a_ex: 0.0,
        }
    }
}

impl SystemParams {
    pub fn alpha(&self) -> f64 {
        self.mode.alpha()
    }

    /// Normalized intended D2D link length `a / K^beta`.
    pub fn d2d_link_distance(&self) -> f64 {
        self.a / self.k_mean.powf(self.beta)
    }

    /// Fraction of the plane left open to D2D transmitters by the exclusion discs.
    pub fn thinning(&self) -> f64 {
        1.0 - self.a_ex * self.a_ex
    }

    pub fn has_exclusion(&self) -> bool {
        self.a_ex > 0.0
    }

    /// Mean D2D count per cell seen outside the averaging circle.
    pub fn k_effective(&self) -> f64 {
        self.thinning() * self.k_mean
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k_mean = k;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Stable short hash over every field, bit-exact in the floats.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.mode.to_string().as_bytes());
        for v in [
            self.mu,
            self.k_mean,
            self.beta,
            self.a,
            self.eta_c,
            self.eta_d,
            self.a_ex,
        ] {
            h.update(v.to_bits().to_le_bytes());
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Checks every [`SystemParams`] invariant and returns the parameters unchanged.
pub fn validate_params(p: SystemParams) -> Result<SystemParams> {
    fn bad(msg: impl Into<String>) -> Result<SystemParams> {
        Err(Error::InvalidParam(msg.into()))
    }
    if !(p.eta_c > 2.0) {
        return bad(format!("eta_c must exceed 2 (got {})", p.eta_c));
    }
    if !(p.eta_d > 2.0) {
        return bad(format!("eta_d must exceed 2 (got {})", p.eta_d));
    }
    if !(p.mu > 0.0) || !p.mu.is_finite() {
        return bad(format!("mu must be positive (got {})", p.mu));
    }
    if !(p.k_mean > 0.0) || !p.k_mean.is_finite() {
        return bad(format!("k_mean must be positive (got {})", p.k_mean));
    }
    if !(p.a > 0.0) || !p.a.is_finite() {
        return bad(format!("a must be positive (got {})", p.a));
    }
    if !(p.beta >= 0.0) || !p.beta.is_finite() {
        return bad(format!("beta must be nonnegative (got {})", p.beta));
    }
    if !(p.a_ex >= 0.0) {
        return bad(format!("exclusion radius must be >= 0 (got {})", p.a_ex));
    }
    if !(p.a_ex < 1.0) {
        return bad(format!("exclusion radius must be < 1 (got {})", p.a_ex));
    }
    let a0 = p.d2d_link_distance();
    if !(a0 > 0.0 && a0.is_finite()) {
        return bad(format!("d2d link length a/K^beta = {a0} is not finite and positive"));
    }
    Ok(p)
}

/// Which receiver sits at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Viewpoint {
    UplinkBs,
    D2dReceiver,
}

/// One realization of normalized interferer distances around a receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySnapshot {
    viewpoint: Viewpoint,
    a0: f64,
    d2d_interferers: Vec<f64>,
    cell_interferers: Vec<f64>,
}

impl GeometrySnapshot {
    /// Builds a snapshot, sorting both interferer lists.
    pub fn new(
        viewpoint: Viewpoint,
        a0: f64,
        mut d2d_interferers: Vec<f64>,
        mut cell_interferers: Vec<f64>,
    ) -> Result<Self> {
        if !(a0 > 0.0 && a0.is_finite()) {
            return Err(Error::InvalidParam(format!("a0 must be positive (got {a0})")));
        }
        if viewpoint == Viewpoint::UplinkBs {
            if a0 > 1.0 {
                return Err(Error::InvalidParam(format!(
                    "uplink user must lie inside the cell (a0 = {a0} > 1)"
                )));
            }
            if !cell_interferers.is_empty() {
                return Err(Error::InvalidParam(
                    "the uplink cell holds no other cellular interferers".into(),
                ));
            }
        }
        if d2d_interferers
            .iter()
            .chain(cell_interferers.iter())
            .any(|&d| !(d > 0.0 && d.is_finite()))
        {
            return Err(Error::InvalidParam("interferer distances must be positive".into()));
        }
        d2d_interferers.sort_by(f64::total_cmp);
        cell_interferers.sort_by(f64::total_cmp);
        Ok(Self {
            viewpoint,
            a0,
            d2d_interferers,
            cell_interferers,
        })
    }

    pub fn viewpoint(&self) -> Viewpoint {
        self.viewpoint
    }

    /// Normalized intended-link distance.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn d2d_interferers(&self) -> &[f64] {
        &self.d2d_interferers
    }

    pub fn cell_interferers(&self) -> &[f64] {
        &self.cell_interferers
    }

    /// Same interferers, different intended-link distance.
    pub fn with_a0(self, a0: f64) -> Result<Self> {
        Self::new(self.viewpoint, a0, self.d2d_interferers, self.cell_interferers)
    }
}

/// Expected normalized distance to the `j`-th nearest point of a PPP with
/// `k_mean` points per cell: `Gamma(j + 1/2) / (Gamma(j) sqrt(K))`.
pub fn mean_neighbor_distance(j: u32, k_mean: f64) -> f64 {
    assert!(j >= 1, "neighbor index starts at 1");
    let j = f64::from(j);
    (ln_gamma(j + 0.5) - ln_gamma(j)).exp() / k_mean.sqrt()
}

/// Deterministic "typical" geometry: `round(K)` D2D interferers pinned at
/// their mean neighbor distances.
///
/// With exclusion, interferers at or inside `a_ex` are dropped. At the D2D
/// receiver one cellular interferer (the in-circle mean count) is pinned at
/// its mean nearest distance. The uplink user is placed at the mean of the
/// uniform-in-disc distance, 2/3; use [`GeometrySnapshot::with_a0`] to move it.
pub fn typical_geometry(p: &SystemParams, viewpoint: Viewpoint) -> Result<GeometrySnapshot> {
    let count = (p.k_mean + 0.5).floor();
    if !(count >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "typical geometry needs at least one interferer (K = {})",
            p.k_mean
        )));
    }
    let d2d: Vec<f64> = (1..=count as u32)
        .map(|j| mean_neighbor_distance(j, p.k_mean))
        .filter(|&d| d > p.a_ex)
        .collect();
    match viewpoint {
        Viewpoint::UplinkBs => GeometrySnapshot::new(viewpoint, 2.0 / 3.0, d2d, Vec::new()),
        Viewpoint::D2dReceiver => GeometrySnapshot::new(
            viewpoint,
            p.d2d_link_distance(),
            d2d,
            vec![mean_neighbor_distance(1, 1.0)],
        ),
    }
}

/// What a [`DistributionCurve`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    LocalAvgSir,
    InstSir,
    SpectralEff,
}

/// A sampled CDF on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurve {
    grid: Vec<(f64, f64)>,
    kind: CurveKind,
    params_digest: String,
}

impl DistributionCurve {
    pub fn new(grid: Vec<(f64, f64)>, kind: CurveKind, params_digest: String) -> Result<Self> {
        for w in grid.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParam("curve abscissae must strictly increase".into()));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidParam("CDF values must not decrease".into()));
            }
        }
        if grid.iter().any(|&(_, f)| !(0.0..=1.0).contains(&f)) {
            return Err(Error::InvalidParam("CDF values must lie in [0, 1]".into()));
        }
        Ok(Self {
            grid,
            kind,
            params_digest,
        })
    }

    /// Empirical CDF of `samples` (sorted in place). Ties collapse to the
    /// highest rank so the abscissae stay strictly increasing.
    pub fn empirical(samples: &mut [f64], kind: CurveKind, params_digest: String) -> Result<Self> {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let mut grid: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
        for (i, &x) in samples.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match grid.last_mut() {
                Some(last) if last.0 == x => last.1 = f,
                _ => grid.push((x, f)),
            }
        }
        Self::new(grid, kind, params_digest)
    }

    pub fn grid(&self) -> &[(f64, f64)] {
        &self.grid
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn params_digest(&self) -> &str {
        &self.params_digest
    }

    /// Step-function evaluation (right-continuous).
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self.grid.partition_point(|&(gx, _)| gx <= x);
        if idx == 0 {
            0.0
        } else {
            self.grid[idx - 1].1
        }
    }

    /// Kolmogorov-Smirnov distance between this empirical step function and a
    /// continuous reference CDF.
    pub fn ks_distance(&self, reference: impl Fn(f64) -> f64) -> f64 {
        let mut prev = 0.0;
        let mut ks: f64 = 0.0;
        for &(x, f) in &self.grid {
            let r = reference(x);
            ks = ks.max((r - prev).abs()).max((r - f).abs());
            prev = f;
        }
        ks
    }
}

/// Monte Carlo scalar estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn paper_defaults() -> SystemParams {
        SystemParams {
            mode: Mode::Underlay,
            mu: 0.1,
            k_mean: 10.0,
            beta: 0.0,
            a: 0.12,
            eta_c: 3.5,
            eta_d: 4.5,
            a_ex: 0.0,
        }
    }

    #[test]
    fn accepts_paper_defaults() {
        let p = paper_defaults();
        assert_eq!(validate_params(p), Ok(p));
    }

    #[test]
    fn rejects_bad_parameters() {
        let err = validate_params(SystemParams {
            eta_c: 2.0,
            ..paper_defaults()
        })
        .unwrap_err();
        assert!(err.to_string().contains("eta_c must exceed 2"), "{err}");
        let err = validate_params(SystemParams {
            eta_d: 1.5,
            ..paper_defaults()
        })
        .unwrap_err();
        assert!(err.to_string().contains("eta_d must exceed 2"));
        let err = validate_params(SystemParams {
            a_ex: 1.0,
            ..paper_defaults()
        })
        .unwrap_err();
        assert!(err.to_string().contains("exclusion radius must be < 1"), "{err}");
        assert!(validate_params(SystemParams {
            a_ex: -0.1,
            ..paper_defaults()
        })
        .is_err());
        assert!(validate_params(SystemParams {
            mu: 0.0,
            ..paper_defaults()
        })
        .is_err());
        assert!(validate_params(SystemParams {
            k_mean: -1.0,
            ..paper_defaults()
        })
        .is_err());
        assert!(validate_params(SystemParams {
            a: 0.0,
            ..paper_defaults()
        })
        .is_err());
        assert!(validate_params(SystemParams {
            mu: f64::NAN,
            ..paper_defaults()
        })
        .is_err());
    }

    #[test]
    fn neighbor_distances() {
        // Frozen from an arbitrary-precision gamma evaluation.
        assert_abs_diff_eq!(mean_neighbor_distance(1, 10.0), 0.280_249_560_819_896, epsilon = 1e-12);
        assert_abs_diff_eq!(mean_neighbor_distance(1, 1.0), 0.886_226_925_452_758, epsilon = 1e-12);
        assert_abs_diff_eq!(mean_neighbor_distance(10, 10.0), 0.987_582_928_826_156, epsilon = 1e-12);
    }

    #[test]
    fn typical_geometry_counts() {
        let p = paper_defaults();
        let g = typical_geometry(&p, Viewpoint::UplinkBs).unwrap();
        assert_eq!(g.d2d_interferers().len(), 10);
        assert_abs_diff_eq!(g.d2d_interferers()[0], 0.280_249_560_819_896, epsilon = 1e-12);
        assert!(g.cell_interferers().is_empty());

        let g = typical_geometry(&SystemParams { a_ex: 0.3, ..p }, Viewpoint::UplinkBs).unwrap();
        assert_eq!(g.d2d_interferers().len(), 9);
        assert_abs_diff_eq!(g.d2d_interferers()[0], 0.420_374_341_229_845, epsilon = 1e-12);

        let g = typical_geometry(&SystemParams { k_mean: 1.0, ..p }, Viewpoint::UplinkBs).unwrap();
        assert_eq!(g.d2d_interferers(), &[mean_neighbor_distance(1, 1.0)]);

        // Round half up.
        let g = typical_geometry(&SystemParams { k_mean: 2.5, ..p }, Viewpoint::UplinkBs).unwrap();
        assert_eq!(g.d2d_interferers().len(), 3);
        assert!(typical_geometry(&SystemParams { k_mean: 0.4, ..p }, Viewpoint::UplinkBs).is_err());
    }

    #[test]
    fn d2d_typical_uses_link_length() {
        let p = SystemParams {
            beta: 0.5,
            ..paper_defaults()
        };
        let g = typical_geometry(&p, Viewpoint::D2dReceiver).unwrap();
        assert_abs_diff_eq!(g.a0(), 0.12 / 10f64.sqrt(), epsilon = 1e-15);
        assert_eq!(g.cell_interferers().len(), 1);
    }

    #[test]
    fn snapshot_rejects_unsorted_garbage() {
        assert!(GeometrySnapshot::new(Viewpoint::UplinkBs, 1.2, vec![], vec![]).is_err());
        assert!(GeometrySnapshot::new(Viewpoint::UplinkBs, 0.5, vec![0.0], vec![]).is_err());
        assert!(GeometrySnapshot::new(Viewpoint::UplinkBs, 0.5, vec![], vec![0.3]).is_err());
        let g = GeometrySnapshot::new(Viewpoint::D2dReceiver, 0.5, vec![0.9, 0.2], vec![3.0, 1.0]).unwrap();
        assert_eq!(g.d2d_interferers(), &[0.2, 0.9]);
        assert_eq!(g.cell_interferers(), &[1.0, 3.0]);
    }

    #[test]
    fn digest_tracks_every_field() {
        let p = paper_defaults();
        assert_eq!(p.digest(), p.digest());
        assert_ne!(p.digest(), SystemParams { a_ex: 1e-9, ..p }.digest());
        assert_ne!(p.digest(), p.with_mode(Mode::Overlay).digest());
        assert_eq!(p.digest().len(), 16);
    }

    #[test]
    fn curve_invariants() {
        assert!(DistributionCurve::new(vec![(1.0, 0.2), (1.0, 0.3)], CurveKind::InstSir, String::new()).is_err());
        assert!(DistributionCurve::new(vec![(1.0, 0.4), (2.0, 0.3)], CurveKind::InstSir, String::new()).is_err());
        assert!(DistributionCurve::new(vec![(1.0, 1.2)], CurveKind::InstSir, String::new()).is_err());
        let mut s = vec![3.0, 1.0, 2.0, 2.0];
        let c = DistributionCurve::empirical(&mut s, CurveKind::LocalAvgSir, String::new()).unwrap();
        assert_eq!(c.grid(), &[(1.0, 0.25), (2.0, 0.75), (3.0, 1.0)]);
        assert_eq!(c.eval(0.5), 0.0);
        assert_eq!(c.eval(2.5), 0.75);
        // Uniform reference on [0, 4]: largest gap is just below x = 2.
        let ks = c.ks_distance(|x| (x / 4.0).clamp(0.0, 1.0));
        assert_abs_diff_eq!(ks, 0.25, epsilon = 1e-15);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn neighbor_distance_scaling(j in 1u32..60, k in 0.01f64..1e4) {
                let scaled = mean_neighbor_distance(j, k) * k.sqrt();
                let unit = mean_neighbor_distance(j, 1.0);
                prop_assert!((scaled - unit).abs() <= 1e-13 * unit);
                prop_assert!(mean_neighbor_distance(j + 1, k) > mean_neighbor_distance(j, k));
            }

            #[test]
            fn typical_geometry_is_valid(k in 0.5f64..200.0, a_ex in 0.0f64..0.99, up in any::<bool>()) {
                let p = SystemParams { k_mean: k, a_ex, ..SystemParams::default() };
                let vp = if up { Viewpoint::UplinkBs } else { Viewpoint::D2dReceiver };
                let g = typical_geometry(&p, vp).unwrap();
                prop_assert!(g.d2d_interferers().windows(2).all(|w| w[0] <= w[1]));
                prop_assert!(g.d2d_interferers().iter().all(|&d| d > a_ex));
            }
        }
    }
}
