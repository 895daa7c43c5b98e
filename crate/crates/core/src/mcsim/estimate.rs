use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use super::hex::HexLattice;
use super::ppp::{campbell_tail, for_each_sq, ppp_power, ppp_power_thinned, PathLoss};
use super::{SimConfig, CHUNK_SIZE};
use crate::analytic::{link_se, local_avg_sir_d2d, local_avg_sir_uplink, LinkSide};
use crate::error::{Error, Result};
use crate::model::{
    typical_geometry, validate_params, CurveKind, DistributionCurve, GeometrySnapshot, McEstimate, Mode, SystemParams,
    Viewpoint,
};

type ChunkRng = Xoshiro256PlusPlus;

/// Generator for chunk `chunk`: a fast generator seeded from ChaCha8 stream `chunk` of `seed`.
fn chunk_rng(seed: u64, chunk: u64) -> ChunkRng {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    seeder.set_stream(chunk);
    ChunkRng::from_rng(&mut seeder)
}

/// Runs `f(rng, len)` on every chunk of `n` items and returns the chunk results in order.
fn run_chunks<T, F>(seed: u64, n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChunkRng, u64) -> Result<T> + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|c| f(&mut chunk_rng(seed, c), CHUNK_SIZE.min(n - c * CHUNK_SIZE)))
        .collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }
}

/// Precomputed constants for one parameter set.
struct Sampler {
    p: SystemParams,
    pl_c: PathLoss,
    pl_d: PathLoss,
    s_t: f64,
    r_t: f64,
    tail: bool,
    lattice: HexLattice,
}

impl Sampler {
    fn new(p: &SystemParams, cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let p = validate_params(*p)?;
        Ok(Self {
            pl_c: PathLoss::new(p.eta_c),
            pl_d: PathLoss::new(p.eta_d),
            s_t: cfg.r_trunc * cfg.r_trunc,
            r_t: cfg.r_trunc,
            tail: cfg.tail_correction,
            lattice: HexLattice::new(p.a_ex),
            p,
        })
    }

    /// Mean power beyond the truncation radius of a field with `lam_pi` points per unit `r^2`.
    fn tail(&self, lam_pi: f64, eta: f64) -> f64 {
        if self.tail {
            campbell_tail(lam_pi, self.r_t, eta)
        } else {
            0.0
        }
    }

    fn uniform_a0_sq<R: Rng>(rng: &mut R) -> f64 {
        1.0 - rng.random::<f64>()
    }

    /// Uplink, no exclusion: user uniform in the cell, D2D field over the
    /// whole plane, other-cell uplink interference at its mean.
    fn uplink_full<R: Rng>(&self, rng: &mut R) -> f64 {
        let p = &self.p;
        let u = Self::uniform_a0_sq(rng);
        let own = 2.0 / (p.eta_c - 2.0);
        let am = p.alpha() * p.mu;
        let d2d = if am > 0.0 {
            ppp_power(rng, p.k_mean, 0.0, self.s_t, &self.pl_c) + self.tail(p.k_mean, p.eta_c)
        } else {
            0.0
        };
        self.pl_c.of_sq(u) / (am * d2d + own)
    }

    /// D2D receiver, no exclusion: D2D and (underlay) cellular fields over the whole plane.
    fn d2d_full<R: Rng>(&self, rng: &mut R) -> f64 {
        let p = &self.p;
        let a0 = p.d2d_link_distance();
        let d2d = ppp_power(rng, p.k_mean, 0.0, self.s_t, &self.pl_d) + self.tail(p.k_mean, p.eta_d);
        let cell = if p.alpha() > 0.0 {
            (ppp_power(rng, 1.0, 0.0, self.s_t, &self.pl_d) + self.tail(1.0, p.eta_d)) / p.mu
        } else {
            0.0
        };
        self.pl_d.of_sq(a0 * a0) / (d2d + cell)
    }

    /// Uplink with exclusion: D2D field thinned by the hexagonal exclusion
    /// layout, cellular interferers a PPP outside the cell.
    fn uplink_exclusion<R: Rng>(&self, rng: &mut R) -> f64 {
        let p = &self.p;
        let u = Self::uniform_a0_sq(rng);
        let d2d = ppp_power_thinned(rng, p.k_mean, 0.0, self.s_t, &self.pl_c, &self.lattice, (0.0, 0.0))
            + self.tail(p.k_effective(), p.eta_c);
        let cell = ppp_power(rng, 1.0, 1.0, self.s_t, &self.pl_c) + self.tail(1.0, p.eta_c);
        self.pl_c.of_sq(u) / (p.alpha() * p.mu * d2d + cell)
    }

    /// D2D link with exclusion: transmitter uniform outside the exclusion
    /// discs, receiver at distance `a0` in a random direction, thinned D2D
    /// field and full-plane cellular field around the receiver.
    fn d2d_exclusion<R: Rng>(&self, rng: &mut R) -> f64 {
        let p = &self.p;
        let a0 = p.d2d_link_distance();
        let (tx, ty) = loop {
            let (x, y) = self.lattice.cell_point(rng.random(), rng.random());
            if self.lattice.keeps(x, y) {
                break (x, y);
            }
        };
        let (sin, cos) = (std::f64::consts::TAU * rng.random::<f64>()).sin_cos();
        let rx = (tx + a0 * cos, ty + a0 * sin);
        let d2d = ppp_power_thinned(rng, p.k_mean, 0.0, self.s_t, &self.pl_d, &self.lattice, rx)
            + self.tail(p.k_effective(), p.eta_d);
        let cell = if p.alpha() > 0.0 {
            (ppp_power(rng, 1.0, 0.0, self.s_t, &self.pl_d) + self.tail(1.0, p.eta_d)) / p.mu
        } else {
            0.0
        };
        self.pl_d.of_sq(a0 * a0) / (d2d + cell)
    }

    /// Uplink at fixed `a0` with pinned in-cell D2D interferers and realized
    /// out-of-cell fields (thinned D2D, cellular PPP).
    fn uplink_pinned<R: Rng>(&self, rng: &mut R, signal: f64, pinned: f64) -> f64 {
        let p = &self.p;
        let am = p.alpha() * p.mu;
        let d2d = if am > 0.0 {
            pinned
                + ppp_power_thinned(rng, p.k_mean, 1.0, self.s_t, &self.pl_c, &self.lattice, (0.0, 0.0))
                + self.tail(p.k_effective(), p.eta_c)
        } else {
            0.0
        };
        let cell = ppp_power(rng, 1.0, 1.0, self.s_t, &self.pl_c) + self.tail(1.0, p.eta_c);
        signal / (am * d2d + cell)
    }
}

fn no_exclusion(p: &SystemParams, what: &str) -> Result<()> {
    if p.has_exclusion() {
        return Err(Error::Unsupported(format!(
            "{what} uses the full-plane model without exclusion regions (a_ex = {})",
            p.a_ex
        )));
    }
    Ok(())
}

/// One full-plane geometry with interferer lists out to `cfg.r_trunc`.
///
/// The uplink snapshot carries the D2D field only (other-cell uplink
/// interference enters through its mean); the D2D snapshot carries both
/// fields, the cellular one only with underlay. Overlay uplink snapshots have
/// no interferers. Consumes the generator exactly like the estimators, so a
/// snapshot and [`full_plane_sir`] reproduce their samples.
pub fn realize_geometry<R: Rng>(
    p: &SystemParams,
    viewpoint: Viewpoint,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<GeometrySnapshot> {
    no_exclusion(p, "realize_geometry")?;
    let s = Sampler::new(p, cfg)?;
    let p = &s.p;
    let collect = |rng: &mut R, lam_pi: f64| {
        let mut v = Vec::new();
        for_each_sq(rng, lam_pi, 0.0, s.s_t, |_, x| v.push(x.sqrt()));
        v
    };
    match viewpoint {
        Viewpoint::UplinkBs => {
            let a0 = Sampler::uniform_a0_sq(rng).sqrt();
            let d2d = if p.alpha() * p.mu > 0.0 {
                collect(rng, p.k_mean)
            } else {
                vec![]
            };
            GeometrySnapshot::new(viewpoint, a0, d2d, vec![])
        }
        Viewpoint::D2dReceiver => {
            let d2d = collect(rng, p.k_mean);
            let cell = if p.alpha() > 0.0 { collect(rng, 1.0) } else { vec![] };
            GeometrySnapshot::new(viewpoint, p.d2d_link_distance(), d2d, cell)
        }
    }
}

/// Local-average SIR of a full-plane snapshot, adding the mean power beyond
/// `cfg.r_trunc` when tail correction is on.
pub fn full_plane_sir(g: &GeometrySnapshot, p: &SystemParams, cfg: &SimConfig) -> Result<f64> {
    no_exclusion(p, "full_plane_sir")?;
    let s = Sampler::new(p, cfg)?;
    let p = &s.p;
    let sum = |d: &[f64], eta: f64| d.iter().map(|r| r.powf(-eta)).sum::<f64>();
    match g.viewpoint() {
        Viewpoint::UplinkBs => {
            let am = p.alpha() * p.mu;
            let d2d = if am > 0.0 {
                sum(g.d2d_interferers(), p.eta_c) + s.tail(p.k_mean, p.eta_c)
            } else {
                0.0
            };
            Ok(g.a0().powf(-p.eta_c) / (am * d2d + 2.0 / (p.eta_c - 2.0)))
        }
        Viewpoint::D2dReceiver => {
            let d2d = sum(g.d2d_interferers(), p.eta_d) + s.tail(p.k_mean, p.eta_d);
            let cell = if p.alpha() > 0.0 {
                (sum(g.cell_interferers(), p.eta_d) + s.tail(1.0, p.eta_d)) / p.mu
            } else {
                0.0
            };
            Ok(g.a0().powf(-p.eta_d) / (d2d + cell))
        }
    }
}

fn check_cdf_size(cfg: &SimConfig) -> Result<()> {
    if cfg.n_geometry < 1000 {
        return Err(Error::InvalidParam(format!(
            "empirical CDFs need at least 1000 geometries (got {})",
            cfg.n_geometry
        )));
    }
    Ok(())
}

/// Empirical CDF of the local-average SIR over full-plane geometries.
pub fn empirical_cdf_local_avg_sir(
    p: &SystemParams,
    viewpoint: Viewpoint,
    cfg: &SimConfig,
) -> Result<DistributionCurve> {
    no_exclusion(p, "empirical_cdf_local_avg_sir")?;
    check_cdf_size(cfg)?;
    let s = Sampler::new(p, cfg)?;
    let chunks = run_chunks(cfg.seed, cfg.n_geometry, |rng, len| {
        Ok((0..len)
            .map(|_| match viewpoint {
                Viewpoint::UplinkBs => s.uplink_full(rng),
                Viewpoint::D2dReceiver => s.d2d_full(rng),
            })
            .collect::<Vec<f64>>())
    })?;
    let mut samples = chunks.concat();
    DistributionCurve::empirical(&mut samples, CurveKind::LocalAvgSir, s.p.digest())
}

/// How the local-average SIR behind an instantaneous-SIR CDF is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum InstSirSetup {
    /// A fixed geometry evaluated with the in-circle model.
    Fixed(GeometrySnapshot),
    /// Uplink at link length `a0`: typical in-cell D2D interferers (those
    /// inside the exclusion disc removed), realized out-of-cell D2D field
    /// thinned by the hexagonal exclusion layout, and a realized
    /// out-of-cell cellular PPP.
    TypicalExclusion { a0: f64 },
}

/// Empirical CDF of the instantaneous SIR `rho |H|^2` with unit-mean
/// exponential fading power, `cfg.n_fading` draws per geometry.
pub fn empirical_cdf_inst_sir(p: &SystemParams, setup: &InstSirSetup, cfg: &SimConfig) -> Result<DistributionCurve> {
    check_cdf_size(cfg)?;
    let s = Sampler::new(p, cfg)?;
    let p = &s.p;
    let fading = cfg.n_fading as usize;
    let chunks = match setup {
        InstSirSetup::Fixed(g) => {
            let rho = match g.viewpoint() {
                Viewpoint::UplinkBs => local_avg_sir_uplink(g, p)?,
                Viewpoint::D2dReceiver => local_avg_sir_d2d(g, p)?,
            };
            run_chunks(cfg.seed, cfg.n_geometry, |rng, len| {
                Ok((0..len as usize * fading)
                    .map(|_| {
                        let h: f64 = Exp1.sample(rng);
                        rho * h
                    })
                    .collect::<Vec<f64>>())
            })?
        }
        InstSirSetup::TypicalExclusion { a0 } => {
            if !(*a0 > 0.0 && *a0 <= 1.0) {
                return Err(Error::InvalidParam(format!("a0 must lie in (0, 1] (got {a0})")));
            }
            let g = typical_geometry(p, Viewpoint::UplinkBs)?;
            let pinned: f64 = g.d2d_interferers().iter().map(|r| r.powf(-p.eta_c)).sum();
            let signal = a0.powf(-p.eta_c);
            run_chunks(cfg.seed, cfg.n_geometry, |rng, len| {
                let mut out = Vec::with_capacity(len as usize * fading);
                for _ in 0..len {
                    let rho = s.uplink_pinned(rng, signal, pinned);
                    for _ in 0..fading {
                        let h: f64 = Exp1.sample(rng);
                        out.push(rho * h);
                    }
                }
                Ok(out)
            })?
        }
    };
    let mut samples = chunks.concat();
    DistributionCurve::empirical(&mut samples, CurveKind::InstSir, p.digest())
}

/// Average link spectral efficiency over random geometries, fading averaged
/// in closed form per geometry. With `a_ex > 0` the exclusion layout is used
/// (underlay only).
pub fn mc_avg_se(p: &SystemParams, side: LinkSide, cfg: &SimConfig) -> Result<McEstimate> {
    let s = Sampler::new(p, cfg)?;
    if s.p.has_exclusion() && s.p.mode != Mode::Underlay {
        return Err(Error::InvalidParam("exclusion regions apply to underlay only".into()));
    }
    let draw = |rng: &mut ChunkRng| match (side, s.p.has_exclusion()) {
        (LinkSide::CellularUplink, false) => s.uplink_full(rng),
        (LinkSide::CellularUplink, true) => s.uplink_exclusion(rng),
        (LinkSide::D2d, false) => s.d2d_full(rng),
        (LinkSide::D2d, true) => s.d2d_exclusion(rng),
    };
    let chunks = run_chunks(cfg.seed, cfg.n_geometry, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(link_se(draw(rng))?);
        }
        Ok(m)
    })?;
    let m = chunks.into_iter().fold(Moments::default(), Moments::merge);
    let var = if m.n > 1 { m.m2 / (m.n - 1) as f64 } else { 0.0 };
    Ok(McEstimate {
        mean: m.mean,
        std_error: (var / m.n as f64).sqrt(),
        n_samples: m.n,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{cdf_inst_sir, cdf_rho};
    use crate::model::mean_neighbor_distance;

    fn underlay() -> SystemParams {
        SystemParams {
            mode: Mode::Underlay,
            eta_c: 4.0,
            ..SystemParams::default()
        }
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Moments::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Moments::default();
        let mut b = Moments::default();
        xs[..300].iter().for_each(|&x| a.push(x));
        xs[300..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert_eq!(m.n, all.n);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 / all.m2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snapshot_reproduces_fast_path() {
        let cfg = SimConfig::new(10, 5);
        for (p, vp) in [
            (underlay(), Viewpoint::UplinkBs),
            (underlay(), Viewpoint::D2dReceiver),
            (SystemParams::default(), Viewpoint::D2dReceiver),
        ] {
            let s = Sampler::new(&p, &cfg).unwrap();
            let mut r1 = ChaCha8Rng::seed_from_u64(11);
            let mut r2 = r1.clone();
            for _ in 0..20 {
                let g = realize_geometry(&p, vp, &cfg, &mut r1).unwrap();
                let slow = full_plane_sir(&g, &p, &cfg).unwrap();
                let fast = match vp {
                    Viewpoint::UplinkBs => s.uplink_full(&mut r2),
                    Viewpoint::D2dReceiver => s.d2d_full(&mut r2),
                };
                assert!((slow / fast - 1.0).abs() < 1e-12, "{slow} {fast}");
            }
        }
    }

    #[test]
    fn uplink_a0_is_area_uniform() {
        let cfg = SimConfig::new(10, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = SystemParams::default();
        let mut a0: Vec<f64> = (0..20_000)
            .map(|_| realize_geometry(&p, Viewpoint::UplinkBs, &cfg, &mut rng).unwrap().a0())
            .collect();
        let c = DistributionCurve::empirical(&mut a0, CurveKind::LocalAvgSir, String::new()).unwrap();
        assert!(c.ks_distance(|a| (a * a).min(1.0)) < 0.015);
        let g = realize_geometry(&p, Viewpoint::D2dReceiver, &cfg, &mut rng).unwrap();
        assert_eq!(g.a0(), p.d2d_link_distance());
        assert!(g.cell_interferers().is_empty());
    }

    #[test]
    fn nearest_d2d_distance_mean() {
        let cfg = SimConfig::new(10, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 20_000;
        let mean = (0..n)
            .map(|_| {
                realize_geometry(&underlay(), Viewpoint::UplinkBs, &cfg, &mut rng)
                    .unwrap()
                    .d2d_interferers()[0]
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - mean_neighbor_distance(1, 10.0)).abs() < 0.005, "{mean}");
    }

    #[test]
    fn deterministic_and_rejects_bad_input() {
        let cfg = SimConfig::new(3000, 17);
        let a = mc_avg_se(&underlay(), LinkSide::CellularUplink, &cfg).unwrap();
        let b = mc_avg_se(&underlay(), LinkSide::CellularUplink, &cfg).unwrap();
        assert_eq!(a, b);
        let c = mc_avg_se(&underlay(), LinkSide::CellularUplink, &SimConfig { seed: 18, ..cfg }).unwrap();
        assert_ne!(a.mean, c.mean);
        assert!(mc_avg_se(&underlay(), LinkSide::D2d, &SimConfig { r_trunc: 5.0, ..cfg }).is_err());
        let ov_ex = SystemParams {
            a_ex: 0.2,
            ..SystemParams::default()
        };
        assert!(mc_avg_se(&ov_ex, LinkSide::D2d, &cfg).is_err());
        assert!(empirical_cdf_local_avg_sir(&underlay(), Viewpoint::UplinkBs, &SimConfig::new(10, 1)).is_err());
    }

    #[test]
    fn fixed_rho_fading() {
        let g = GeometrySnapshot::new(Viewpoint::UplinkBs, 1.0, vec![], vec![]).unwrap();
        let p = SystemParams {
            eta_c: 4.0,
            ..SystemParams::default()
        };
        let cfg = SimConfig::new(50_000, 3);
        let c = empirical_cdf_inst_sir(&p, &InstSirSetup::Fixed(g), &cfg).unwrap();
        assert!(c.ks_distance(|x| cdf_inst_sir(x, 1.0).unwrap()) < 0.01);
    }

    #[test]
    fn overlay_uplink_cdf_small() {
        let p = SystemParams {
            eta_c: 4.0,
            ..SystemParams::default()
        };
        let c = empirical_cdf_local_avg_sir(&p, Viewpoint::UplinkBs, &SimConfig::new(20_000, 9)).unwrap();
        assert!(c.ks_distance(|x| cdf_rho(x, &p).unwrap()) < 0.015);
    }
}
