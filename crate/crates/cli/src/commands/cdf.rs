use std::path::Path;

use anyhow::Result;
use clap::{Args, ValueEnum};
use d2d_core::analytic::{
    cdf_inst_sir, cdf_link_se_approx, cdf_link_se_exact, cdf_rho, cdf_varrho_with_method, local_avg_sir_d2d,
    local_avg_sir_uplink, LinkSide,
};
use d2d_core::quad::QuadSpec;
use d2d_core::{typical_geometry, Viewpoint};

use crate::grid::{Range, Scale};
use crate::output::Output;
use crate::table::{fmt_num, Table};
use crate::{expand, ModelArgs, Usage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Uplink local-average SIR.
    Rho,
    /// D2D local-average SIR.
    Varrho,
    /// Instantaneous SIR on the typical geometry of `--link`.
    InstSir,
    /// Link spectral efficiency of `--link`, bits/s/Hz.
    LinkSe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Link {
    Uplink,
    D2d,
}

#[derive(Debug, Args)]
pub struct CdfArgs {
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[command(flatten)]
    model: ModelArgs,
    /// Evaluation grid `lo:hi:n`.
    #[arg(long, default_value = "0.01:100:41")]
    grid: Range,
    #[arg(long = "grid-scale", value_enum, default_value = "log")]
    grid_scale: Scale,
    /// Link for inst-sir and link-se.
    #[arg(long, value_enum, default_value = "uplink")]
    link: Link,
    /// Uplink user distance for inst-sir on the uplink (default: the mean, 2/3).
    #[arg(long)]
    a0: Option<f64>,
    /// Use the logarithmic approximation for link-se.
    #[arg(long)]
    approx: bool,
}

pub fn run(args: &CdfArgs, out: &Path) -> Result<()> {
    let p = args.model.params(false)?;
    let xs = expand(&args.grid, args.grid_scale)?;
    let spec = QuadSpec::default();
    if args.a0.is_some() && !(args.quantity == Quantity::InstSir && args.link == Link::Uplink) {
        return Err(Usage("--a0 applies to --quantity inst-sir with --link uplink".into()).into());
    }
    if args.approx && args.quantity != Quantity::LinkSe {
        return Err(Usage("--approx applies to --quantity link-se".into()).into());
    }
    let mut sink = Output::new(out, 0)?;
    sink.describe(p.digest());
    sink.describe(format!(
        "{:?} {:?} {:?} {:?} {:?} {}",
        args.quantity, args.grid, args.grid_scale, args.link, args.a0, args.approx
    ));
    let side = match args.link {
        Link::Uplink => LinkSide::CellularUplink,
        Link::D2d => LinkSide::D2d,
    };

    let local_avg = if args.quantity == Quantity::InstSir {
        let rho = match args.link {
            Link::Uplink => {
                let mut g = typical_geometry(&p, Viewpoint::UplinkBs)?;
                if let Some(a0) = args.a0 {
                    g = g.with_a0(a0)?;
                }
                local_avg_sir_uplink(&g, &p)?
            }
            Link::D2d => local_avg_sir_d2d(&typical_geometry(&p, Viewpoint::D2dReceiver)?, &p)?,
        };
        sink.note(format!("local-average SIR of the typical geometry = {}", fmt_num(rho)));
        rho
    } else {
        f64::NAN
    };

    let mut table = Table::new(&["x", "cdf"]);
    for &x in &xs {
        let f = match args.quantity {
            Quantity::Rho => cdf_rho(x, &p)?,
            Quantity::Varrho => {
                let (f, method) = cdf_varrho_with_method(x, &p, &spec)?;
                sink.note(format!("method={method}"));
                f
            }
            Quantity::InstSir => cdf_inst_sir(x, local_avg)?,
            Quantity::LinkSe if args.approx => cdf_link_se_approx(x, &p, side, &spec)?,
            Quantity::LinkSe => cdf_link_se_exact(x, &p, side, &spec)?,
        };
        table.push(vec![x, f]);
    }
    let name = format!(
        "cdf_{}",
        args.quantity.to_possible_value().expect("named variant").get_name()
    );
    sink.write_csv(&name, &table)?;
    sink.finish(&name)?;
    Ok(())
}
