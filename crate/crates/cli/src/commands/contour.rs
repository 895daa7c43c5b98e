use std::path::Path;

use anyhow::Result;
use clap::Args;
use d2d_core::analytic::d2d_vs_uplink_contour;

use crate::grid::{Range, Scale};
use crate::output::Output;
use crate::table::{fmt_num, Table};
use crate::{expand, ModelArgs};

#[derive(Debug, Args)]
pub struct ContourArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// D2D link lengths `lo:hi:n`.
    #[arg(long, default_value = "0.01:0.5:50")]
    grid: Range,
    #[arg(long = "grid-scale", value_enum, default_value = "lin")]
    grid_scale: Scale,
}

pub fn run(args: &ContourArgs, out: &Path) -> Result<()> {
    let p = args.model.params(false)?;
    let xs = expand(&args.grid, args.grid_scale)?;
    let contour = d2d_vs_uplink_contour(&p)?;
    let mut sink = Output::new(out, 0)?;
    sink.describe(p.digest());
    sink.describe(format!("{:?} {:?}", args.grid, args.grid_scale));
    sink.note(format!(
        "a0 = c a_d2d^e with c = {} and e = {}",
        fmt_num(contour.c),
        fmt_num(contour.exponent)
    ));
    sink.note(
        "warning: a published value of 0.512 for c contradicts the 80% D2D share at a_d2d = 0.15; \
         the derived constant is used",
    );
    let mut table = Table::new(&["a_d2d", "a0_contour", "share"]);
    for &a in &xs {
        table.push(vec![a, contour.a0(a), contour.share(a)]);
    }
    sink.write_csv("contour", &table)?;
    sink.finish("contour")?;
    Ok(())
}
