use std::path::Path;

use anyhow::Result;
use clap::{Args, ValueEnum};
use d2d_core::analytic::{
    avg_se_d2d, avg_se_d2d_exclusion_lb, avg_se_uplink, avg_se_uplink_exclusion, max_d2d_load, system_se, LinkSide,
};
use d2d_core::mcsim::mc_avg_se;
use d2d_core::quad::QuadSpec;
use d2d_core::SystemParams;

use crate::grid::{Range, Scale};
use crate::output::Output;
use crate::table::{fmt_num, Table};
use crate::{expand, McArgs, ModelArgs, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Uplink,
    D2d,
    /// Per-cell totals: the uplink average and the D2D average times the load.
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Param {
    K,
    Mu,
    Beta,
    A,
    EtaC,
    EtaD,
    AEx,
}

impl Param {
    fn name(self) -> &'static str {
        match self {
            Param::K => "k",
            Param::Mu => "mu",
            Param::Beta => "beta",
            Param::A => "a",
            Param::EtaC => "eta-c",
            Param::EtaD => "eta-d",
            Param::AEx => "a-ex",
        }
    }

    fn set(self, p: SystemParams, v: f64) -> SystemParams {
        let mut p = p;
        match self {
            Param::K => p.k_mean = v,
            Param::Mu => p.mu = v,
            Param::Beta => p.beta = v,
            Param::A => p.a = v,
            Param::EtaC => p.eta_c = v,
            Param::EtaD => p.eta_d = v,
            Param::AEx => p.a_ex = v,
        }
        p
    }
}

#[derive(Debug, Args)]
pub struct AvgSeArgs {
    #[arg(long, value_enum)]
    side: Side,
    #[command(flatten)]
    model: ModelArgs,
    /// Sweep one parameter over `lo:hi:n`, e.g. `--sweep k 1:100:3`.
    #[arg(long, num_args = 2, value_names = ["PARAM", "RANGE"])]
    sweep: Option<Vec<String>>,
    #[arg(long = "sweep-scale", value_enum, default_value = "lin")]
    sweep_scale: Scale,
    /// Uplink degradation limit: solve for the largest load with the uplink
    /// average at least `nu` times its value without D2D (underlay, system side).
    #[arg(long)]
    nu: Option<f64>,
    #[command(flatten)]
    mc: McArgs,
}

fn parse_sweep(args: &AvgSeArgs) -> Result<(Param, Vec<f64>), Usage> {
    let Some(sweep) = &args.sweep else {
        return Ok((Param::K, vec![args.model.k]));
    };
    let param = Param::from_str(&sweep[0], true).map_err(|_| {
        Usage(format!(
            "unknown sweep parameter {:?} (k, mu, beta, a, eta-c, eta-d, a-ex)",
            sweep[0]
        ))
    })?;
    let range: Range = sweep[1].parse().map_err(|e| Usage(format!("--sweep range: {e}")))?;
    Ok((param, expand(&range, args.sweep_scale)?))
}

fn uplink_avg(p: &SystemParams, spec: &QuadSpec) -> d2d_core::Result<f64> {
    if p.has_exclusion() {
        avg_se_uplink_exclusion(p, spec)
    } else {
        avg_se_uplink(p, spec)
    }
}

fn d2d_avg(p: &SystemParams, spec: &QuadSpec) -> d2d_core::Result<f64> {
    if p.has_exclusion() {
        avg_se_d2d_exclusion_lb(p, spec)
    } else {
        avg_se_d2d(p, spec)
    }
}

pub fn run(args: &AvgSeArgs, out: &Path) -> Result<()> {
    let (param, values) = parse_sweep(args)?;
    let base = args.model.params(param == Param::Mu)?;
    if args.nu.is_some() && args.side != Side::System {
        return Err(Usage("--nu needs --side system".into()).into());
    }
    if args.nu.is_some() && args.mc.mc {
        return Err(Usage("--nu and --mc cannot be combined".into()).into());
    }
    if args.mc.mc {
        args.mc.config().validate()?;
    }
    let spec = QuadSpec::default();
    let cfg = args.mc.config();
    let mut sink = Output::new(out, args.mc.seed)?;
    sink.describe(base.digest());
    sink.describe(format!(
        "{:?} {param:?} {values:?} {:?} {} {}",
        args.side, args.nu, args.mc.mc, args.mc.samples
    ));
    sink.note(format!("param={}", param.name()));
    if base.has_exclusion() && args.side != Side::Uplink {
        sink.note("D2D averages with exclusion regions are analytic lower bounds");
    }

    let mut header = vec!["param"];
    match (args.side, args.nu) {
        (Side::System, Some(_)) => header.extend(["k_max", "pk_max", "d2d_system_se", "uplink", "uplink_baseline"]),
        (Side::System, None) => header.extend(["uplink", "d2d"]),
        _ => header.push("analytic"),
    }
    if args.mc.mc {
        match args.side {
            Side::System => header.extend(["mc_uplink_mean", "mc_uplink_stderr", "mc_d2d_mean", "mc_d2d_stderr"]),
            _ => header.extend(["mc_mean", "mc_stderr"]),
        }
        sink.note(format!("mc geometries per row = {}", args.mc.samples));
    }
    let mut table = Table::new(&header);

    for &v in &values {
        let p = param.set(base, v);
        let mut row = vec![v];
        match (args.side, args.nu) {
            (Side::Uplink, _) => row.push(uplink_avg(&p, &spec)?),
            (Side::D2d, _) => row.push(d2d_avg(&p, &spec)?),
            (Side::System, None) => {
                let s = system_se(&p, &spec)?;
                row.extend([s.uplink, s.d2d]);
            }
            (Side::System, Some(nu)) => {
                let m = max_d2d_load(&p, nu, &spec)?;
                let pk = p.thinning() * m.k_max;
                row.extend([m.k_max, pk, m.d2d_system_se, m.uplink, m.uplink_baseline]);
                sink.note(format!("nu={}", fmt_num(nu)));
            }
        }
        if args.mc.mc {
            let est = |side| mc_avg_se(&p, side, &cfg);
            match args.side {
                Side::Uplink => {
                    let m = est(LinkSide::CellularUplink)?;
                    row.extend([m.mean, m.std_error]);
                }
                Side::D2d => {
                    let m = est(LinkSide::D2d)?;
                    row.extend([m.mean, m.std_error]);
                }
                Side::System => {
                    if p.k_mean == 0.0 {
                        return Err(Usage("--mc needs K > 0".into()).into());
                    }
                    let u = est(LinkSide::CellularUplink)?;
                    let d = est(LinkSide::D2d)?;
                    let load = p.k_effective();
                    row.extend([u.mean, u.std_error, load * d.mean, load * d.std_error]);
                }
            }
        }
        table.push(row);
    }
    let name = format!(
        "avg_se_{}",
        args.side.to_possible_value().expect("named variant").get_name()
    );
    sink.write_csv(&name, &table)?;
    sink.finish(&name)?;
    Ok(())
}
