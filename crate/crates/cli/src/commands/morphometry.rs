//! `craterlab morphometry`: one CSV row of shape statistics per rim record.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use craterlab::io::load_dem;
use craterlab::morphometry::{
    compute_morphometry, morphometry_csv_header, write_morphometry_csv, CraterMorphometry,
};
use craterlab::rim::RimPolygon;

use crate::{resolve_format, DemFormatArg};

#[derive(Args)]
pub struct MorphometryArgs {
    #[arg(long)]
    pub dem: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: DemFormatArg,
    /// Newline-delimited rim JSON stream.
    #[arg(long)]
    pub rims: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: MorphometryArgs) -> Result<()> {
    let dem = load_dem(&args.dem, resolve_format(&args.dem, args.format))?;
    let text = std::fs::read_to_string(&args.rims)
        .with_context(|| format!("reading rims {}", args.rims.display()))?;

    let mut rims: Vec<RimPolygon> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match RimPolygon::from_json(line) {
            Ok(rim) => rims.push(rim),
            Err(e) => bail!("{}:{}: {e}", args.rims.display(), lineno + 1),
        }
    }

    let mut out = super::open_output(args.out.as_deref())?;
    if rims.is_empty() {
        writeln!(out, "{}", morphometry_csv_header())?;
        out.flush()?;
        return Ok(());
    }

    let mut rows: Vec<(&RimPolygon, CraterMorphometry)> = Vec::new();
    let mut failed = 0usize;
    for rim in &rims {
        match compute_morphometry(&dem, rim) {
            Ok(m) => rows.push((rim, m)),
            Err(e) => {
                eprintln!("morphometry: crater {} skipped: {e}", rim.crater.id);
                failed += 1;
            }
        }
    }
    let borrowed: Vec<(&RimPolygon, &CraterMorphometry)> =
        rows.iter().map(|(r, m)| (*r, m)).collect();
    write_morphometry_csv(&mut out, &borrowed)?;
    out.flush()?;
    eprintln!("morphometry: {} rows written, {failed} skipped", rows.len());
    Ok(())
}
