//! Curve sets of the published figures, with parameters fixed per figure.

use std::path::Path;

use anyhow::{Context, Result};
use clap::Args;
use d2d_core::analytic::{
    avg_se_d2d, avg_se_d2d_exclusion_lb, avg_se_uplink, cdf_inst_sir, cdf_link_se_approx, cdf_link_se_exact,
    local_avg_sir_uplink, max_d2d_load, system_se, LinkSide,
};
use d2d_core::mcsim::{empirical_cdf_inst_sir, empirical_cdf_local_avg_sir, mc_avg_se, InstSirSetup, SimConfig};
use d2d_core::quad::QuadSpec;
use d2d_core::{typical_geometry, Mode, SystemParams, Viewpoint};

use crate::output::Output;
use crate::table::{fmt_num, Table};
use crate::{McArgs, Numerical, Usage};

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig4, fig5, fig7, fig8, fig9, fig10 or fig11.
    id: String,
    #[command(flatten)]
    mc: McArgs,
    /// Fading draws per geometry for the instantaneous-SIR simulation.
    #[arg(long, default_value_t = 1)]
    fading: u32,
}

struct Ctx<'a> {
    sink: Output,
    spec: QuadSpec,
    mc: Option<SimConfig>,
    id: &'a str,
}

impl Ctx<'_> {
    fn params(&mut self, p: &SystemParams) {
        self.sink.describe(p.digest());
    }

    fn write(&mut self, label: &str, table: &Table) -> Result<()> {
        self.sink.write_csv(&format!("{}_{label}", self.id), table)
    }
}

fn lin(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn log(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", ")
}

pub fn run(args: &FigureArgs, out: &Path) -> Result<()> {
    let id = args.id.as_str();
    let build: fn(&mut Ctx) -> Result<()> = match id {
        "fig4" => fig4,
        "fig5" => fig5,
        "fig7" => fig7,
        "fig8" => fig8,
        "fig9" => fig9,
        "fig10" => fig10,
        "fig11" => fig11,
        "fig6" => return Err(Usage("fig6 is the contour example; use cmd_contour (d2d contour)".into()).into()),
        other => {
            return Err(Usage(format!(
                "unknown figure {other:?} (fig4, fig5, fig7, fig8, fig9, fig10, fig11)"
            ))
            .into())
        }
    };
    let mc = if args.mc.mc {
        let cfg = SimConfig {
            n_fading: args.fading,
            ..args.mc.config()
        };
        cfg.validate().map_err(|e| Usage(e.to_string()))?;
        Some(cfg)
    } else {
        None
    };
    let mut sink = Output::new(out, args.mc.seed)?;
    sink.describe(format!(
        "{id} mc={} samples={} fading={}",
        args.mc.mc, args.mc.samples, args.fading
    ));
    if let Some(cfg) = &mc {
        sink.note(format!(
            "mc geometries = {}, fading draws = {}",
            cfg.n_geometry, cfg.n_fading
        ));
    }
    let mut ctx = Ctx {
        sink,
        spec: QuadSpec::default(),
        mc,
        id,
    };
    // Any failure while building a figure is reported as numerical.
    build(&mut ctx).map_err(|e| Numerical(format!("{id}: {e:#}")))?;
    ctx.sink.finish(id).context("writing the manifest")?;
    Ok(())
}

/// Link-SE CDFs for K = 10: underlay and overlay, exact and approximate.
fn fig4(ctx: &mut Ctx) -> Result<()> {
    let base = SystemParams {
        k_mean: 10.0,
        a: 0.1,
        eta_c: 4.0,
        eta_d: 4.5,
        ..SystemParams::default()
    };
    let sets = [
        (
            "underlay",
            SystemParams {
                mode: Mode::Underlay,
                beta: 0.25,
                mu: 0.1,
                ..base
            },
        ),
        (
            "overlay",
            SystemParams {
                mode: Mode::Overlay,
                beta: 0.5,
                ..base
            },
        ),
    ];
    ctx.sink
        .note("K = 10, a = 0.1, eta_c = 4, eta_d = 4.5; underlay beta = 0.25 and mu = 0.1; overlay beta = 0.5");
    let grid = lin(0.0, 16.0, 161);
    for (mode, p) in sets {
        ctx.params(&p);
        for (side, side_name, viewpoint) in [
            (LinkSide::CellularUplink, "uplink", Viewpoint::UplinkBs),
            (LinkSide::D2d, "d2d", Viewpoint::D2dReceiver),
        ] {
            let mut exact = Table::new(&["x", "cdf"]);
            let mut approx = Table::new(&["x", "cdf"]);
            for &nu in &grid {
                exact.push(vec![nu, cdf_link_se_exact(nu, &p, side, &ctx.spec)?]);
                approx.push(vec![nu, cdf_link_se_approx(nu, &p, side, &ctx.spec)?]);
            }
            ctx.write(&format!("{side_name}_{mode}_exact"), &exact)?;
            ctx.write(&format!("{side_name}_{mode}_approx"), &approx)?;
            if let Some(cfg) = &ctx.mc {
                let curve = empirical_cdf_local_avg_sir(&p, viewpoint, cfg)?;
                let mut sim = Table::new(&["x", "cdf"]);
                for &nu in &grid {
                    let f = if nu <= 0.0 {
                        0.0
                    } else {
                        curve.eval(d2d_core::analytic::link_se_inverse(nu)?)
                    };
                    sim.push(vec![nu, f]);
                }
                ctx.write(&format!("{side_name}_{mode}_mc"), &sim)?;
            }
        }
    }
    Ok(())
}

/// Average SEs of uplink and D2D link against the pathloss exponents, overlay.
fn fig5(ctx: &mut Ctx) -> Result<()> {
    let base = SystemParams {
        mode: Mode::Overlay,
        k_mean: 10.0,
        a: 0.1,
        beta: 0.0,
        ..SystemParams::default()
    };
    ctx.sink
        .note("overlay, K = 10, a = 0.1; beta = 0 (not stated with the figure)");
    let etas = lin(3.0, 5.0, 9);
    ctx.sink.note(format!("exponents: {}", list(&etas)));
    let curves: [(&str, &str, LinkSide); 2] = [
        ("uplink", "eta_c", LinkSide::CellularUplink),
        ("d2d", "eta_d", LinkSide::D2d),
    ];
    for (label, col, side) in curves {
        let mut header = vec![col, "analytic"];
        if ctx.mc.is_some() {
            header.extend(["mc_mean", "mc_stderr"]);
        }
        let mut t = Table::new(&header);
        for &eta in &etas {
            let p = match side {
                LinkSide::CellularUplink => SystemParams { eta_c: eta, ..base },
                LinkSide::D2d => SystemParams { eta_d: eta, ..base },
            };
            ctx.params(&p);
            let a = match side {
                LinkSide::CellularUplink => avg_se_uplink(&p, &ctx.spec)?,
                LinkSide::D2d => avg_se_d2d(&p, &ctx.spec)?,
            };
            let mut row = vec![eta, a];
            if let Some(cfg) = &ctx.mc {
                let m = mc_avg_se(&p, side, cfg)?;
                row.extend([m.mean, m.std_error]);
            }
            t.push(row);
        }
        ctx.write(label, &t)?;
    }
    Ok(())
}

/// Link-SE CDFs in overlay for several beta and K.
fn fig7(ctx: &mut Ctx) -> Result<()> {
    let base = SystemParams {
        mode: Mode::Overlay,
        a: 0.1,
        ..SystemParams::default()
    };
    let betas = [0.25, 0.5, 0.75];
    let ks = [10.0, 100.0];
    ctx.sink.note(format!(
        "overlay, a = 0.1, eta_c = {}, eta_d = {}; beta in {{{}}}, K in {{{}}}",
        fmt_num(base.eta_c),
        fmt_num(base.eta_d),
        list(&betas),
        list(&ks)
    ));
    if ctx.mc.is_some() {
        ctx.sink.note("this figure has no simulation curves; --mc is ignored");
    }
    let grid = lin(0.0, 16.0, 161);
    let mut up = Table::new(&["x", "cdf"]);
    for &nu in &grid {
        up.push(vec![
            nu,
            cdf_link_se_exact(nu, &base, LinkSide::CellularUplink, &ctx.spec)?,
        ]);
    }
    ctx.params(&base);
    ctx.write("uplink", &up)?;
    for beta in betas {
        for k in ks {
            let p = SystemParams {
                beta,
                k_mean: k,
                ..base
            };
            ctx.params(&p);
            let mut t = Table::new(&["x", "cdf"]);
            for &nu in &grid {
                t.push(vec![nu, cdf_link_se_exact(nu, &p, LinkSide::D2d, &ctx.spec)?]);
            }
            ctx.write(&format!("d2d_beta{}_k{}", fmt_num(beta), fmt_num(k)), &t)?;
        }
    }
    Ok(())
}

/// Per-cell system SE against K in overlay.
fn fig8(ctx: &mut Ctx) -> Result<()> {
    let base = SystemParams {
        mode: Mode::Overlay,
        a: 0.1,
        ..SystemParams::default()
    };
    let betas = [0.0, 0.1, 0.5, 1.0];
    let ks = log(1.0, 1000.0, 61);
    ctx.sink.note(format!(
        "overlay, a = 0.1, eta_c = {}, eta_d = {}; beta in {{{}}}; K from 1 to 1000",
        fmt_num(base.eta_c),
        fmt_num(base.eta_d),
        list(&betas)
    ));
    if ctx.mc.is_some() {
        ctx.sink.note("this figure has no simulation curves; --mc is ignored");
    }
    let mut up = Table::new(&["k", "uplink"]);
    for &k in &ks {
        up.push(vec![k, avg_se_uplink(&base.with_k(k), &ctx.spec)?]);
    }
    ctx.write("uplink", &up)?;
    for beta in betas {
        let mut t = Table::new(&["k", "d2d_system_se"]);
        for &k in &ks {
            let p = SystemParams {
                beta,
                k_mean: k,
                ..base
            };
            ctx.params(&p);
            t.push(vec![k, system_se(&p, &ctx.spec)?.d2d]);
        }
        ctx.write(&format!("beta{}", fmt_num(beta)), &t)?;
    }
    Ok(())
}

fn underlay_012() -> SystemParams {
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

/// D2D system SE with exclusion regions: lower bound and simulation.
fn fig9(ctx: &mut Ctx) -> Result<()> {
    let base = underlay_012();
    let exclusions = [0.0, 0.25, 0.5];
    let ks = lin(1.0, 30.0, 30);
    let mc_ks = [5.0, 10.0, 20.0, 30.0];
    ctx.sink.note(format!(
        "underlay, a = 0.12, beta = 0, mu = 0.1, eta_c = 3.5, eta_d = 4.5; a_ex in {{{}}}",
        list(&exclusions)
    ));
    ctx.sink
        .note("bound tightness accepted within 25% of the simulated mean");
    for a_ex in exclusions {
        let mut t = Table::new(&["k", "pk", "d2d_system_se_bound"]);
        for &k in &ks {
            let p = SystemParams {
                a_ex,
                k_mean: k,
                ..base
            };
            ctx.params(&p);
            let lb = if a_ex > 0.0 {
                avg_se_d2d_exclusion_lb(&p, &ctx.spec)?
            } else {
                avg_se_d2d(&p, &ctx.spec)?
            };
            t.push(vec![k, p.k_effective(), p.k_effective() * lb]);
        }
        ctx.write(&format!("aex{}_bound", fmt_num(a_ex)), &t)?;
        if let Some(cfg) = &ctx.mc {
            let mut t = Table::new(&["k", "pk", "mc_mean", "mc_stderr"]);
            for k in mc_ks {
                let p = SystemParams {
                    a_ex,
                    k_mean: k,
                    ..base
                };
                let m = mc_avg_se(&p, LinkSide::D2d, cfg)?;
                let load = p.k_effective();
                t.push(vec![k, load, load * m.mean, load * m.std_error]);
            }
            ctx.write(&format!("aex{}_mc", fmt_num(a_ex)), &t)?;
        }
    }
    Ok(())
}

/// Achievable D2D system SE under a 20% uplink degradation limit.
fn fig10(ctx: &mut Ctx) -> Result<()> {
    let base = underlay_012();
    let nu = 0.8;
    let mus = [0.01, 0.1];
    let exclusions = [0.0, 0.25, 0.5];
    ctx.sink.note(format!(
        "underlay, nu = 0.8, a = 0.12, beta = 0, eta_c = 3.5, eta_d = 4.5; mu in {{{}}}, a_ex in {{{}}}",
        list(&mus),
        list(&exclusions)
    ));
    if ctx.mc.is_some() {
        ctx.sink.note("this figure has no simulation curves; --mc is ignored");
    }
    let mut summary = Table::new(&["mu", "a_ex", "k_max", "pk_max", "d2d_system_se"]);
    for mu in mus {
        for a_ex in exclusions {
            let p = SystemParams { mu, a_ex, ..base };
            ctx.params(&p);
            let m = max_d2d_load(&p, nu, &ctx.spec)?;
            summary.push(vec![mu, a_ex, m.k_max, p.thinning() * m.k_max, m.d2d_system_se]);
            let mut t = Table::new(&["pk", "d2d_system_se"]);
            for i in 1..=30 {
                let q = p.with_k(m.k_max * i as f64 / 30.0);
                t.push(vec![q.k_effective(), system_se(&q, &ctx.spec)?.d2d]);
            }
            ctx.write(&format!("mu{}_aex{}", fmt_num(mu), fmt_num(a_ex)), &t)?;
        }
    }
    ctx.write("max_load", &summary)?;
    Ok(())
}

/// Instantaneous uplink SIR CDF at a0 = 0.6 with exclusion regions.
fn fig11(ctx: &mut Ctx) -> Result<()> {
    let base = underlay_012();
    let a0 = 0.6;
    let exclusions = [0.0, 0.2, 0.4];
    ctx.sink.note(format!(
        "underlay, a0 = 0.6, eta_c = 3.5, K = 10, mu = 0.1; a_ex in {{{}}}; hexagonal lattice with a base station at the origin",
        list(&exclusions)
    ));
    let grid = log(1e-3, 1e3, 121);
    for a_ex in exclusions {
        let p = SystemParams { a_ex, ..base };
        ctx.params(&p);
        let g = typical_geometry(&p, Viewpoint::UplinkBs)?.with_a0(a0)?;
        let rho = local_avg_sir_uplink(&g, &p)?;
        ctx.sink.note(format!(
            "a_ex = {}: local-average SIR = {}",
            fmt_num(a_ex),
            fmt_num(rho)
        ));
        let mut t = Table::new(&["x", "cdf"]);
        for &x in &grid {
            t.push(vec![x, cdf_inst_sir(x, rho)?]);
        }
        ctx.write(&format!("aex{}_analytic", fmt_num(a_ex)), &t)?;
        if let Some(cfg) = &ctx.mc {
            let curve = empirical_cdf_inst_sir(&p, &InstSirSetup::TypicalExclusion { a0 }, cfg)?;
            let mut t = Table::new(&["x", "cdf"]);
            for &x in &grid {
                t.push(vec![x, curve.eval(x)]);
            }
            ctx.write(&format!("aex{}_mc", fmt_num(a_ex)), &t)?;
        }
    }
    Ok(())
}
