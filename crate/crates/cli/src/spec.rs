use clap::{Args, Subcommand};
use origami::sample;
use origami::scalar::C64;
use origami::spectral::{build_d, lax_report, spectral_curve, DiagonalData, LinearData};
use serde_json::json;

use crate::params::{c_json, config, load_json, parse_value_str, to_c64};
use crate::{Ctx, Fail};

#[derive(Subcommand)]
pub enum SpecCmd {
    /// Rational Lax operator: poles, residue ranks and curve-point residuals.
    Lax(LaxArgs),
    /// det D̂(z,x) against R(x,z) for one set of node samples.
    Curve(CurveArgs),
}

#[derive(Args)]
pub struct LaxArgs {
    /// JSON {z_hat, b} with complex entries as [re, im]; drawn from the seed when absent.
    #[arg(long)]
    data: Option<String>,
    /// Number of gauge nodes minus one, for drawn data.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Spectral points at which curve points are sampled.
    #[arg(long, default_value_t = 3)]
    samples: usize,
}

#[derive(Args)]
pub struct CurveArgs {
    /// JSON {z_hat, y_prime}; drawn from the seed when absent.
    #[arg(long)]
    data: Option<String>,
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value = "[0.7,0.4]")]
    z: String,
}

fn lax(ctx: &Ctx, a: LaxArgs) -> Result<(), Fail> {
    let mut g = sample::rng(ctx.g.seed);
    let data: LinearData = match &a.data {
        Some(s) => serde_json::from_value(load_json(s)?).map_err(|e| config(format!("bad --data: {e}")))?,
        None => LinearData::random(&mut g, ctx.n(3)?, a.r),
    };
    data.validate()?;
    if ctx.dry_run("spec lax", serde_json::to_value(&data).expect("serializable"))? {
        return Ok(());
    }
    let zs: Vec<C64> = (0..a.samples).map(|_| sample::complex_annulus(&mut g, 2.0, 3.0)).collect();
    let rep = lax_report(&data, &zs)?;
    let rank_ok = rep.residue_ranks.iter().all(|&r| r == 1) && rep.rank_ratios.iter().all(|&r| r <= 1e-10);
    let curve_ok = rep.curve_check_residuals.iter().all(|&r| r <= 1e-8);
    let mut out = serde_json::to_value(&rep).expect("serializable");
    out["sample_z"] = json!(zs.iter().map(c_json).collect::<Vec<_>>());
    out["pass"] = json!(rank_ok && curve_ok);
    ctx.emit(&out)?;
    if !(rank_ok && curve_ok) {
        return Err(Fail::Check("residue rank or curve residual out of tolerance".into()));
    }
    Ok(())
}

fn curve(ctx: &Ctx, a: CurveArgs) -> Result<(), Fail> {
    let z = to_c64(&parse_value_str(&a.z)?)?;
    let data: DiagonalData<C64> = match &a.data {
        Some(s) => {
            let d: DiagonalData<C64> =
                serde_json::from_value(load_json(s)?).map_err(|e| config(format!("bad --data: {e}")))?;
            DiagonalData::new(d.z_hat, d.y_prime)?
        }
        None => {
            let mut g = sample::rng(ctx.g.seed);
            let n = ctx.n(3)?;
            let mut draw = |k: usize| (0..k).map(|_| (0..n).map(|_| sample::complex_annulus(&mut g, 0.5, 1.5)).collect()).collect();
            let z_hat = draw(a.r + 1);
            let y = draw(a.r + 2);
            DiagonalData::new(z_hat, y)?
        }
    };
    if ctx.dry_run("spec curve", serde_json::to_value(&data).expect("serializable"))? {
        return Ok(());
    }
    let det = build_d(&z, &data)?.det();
    let r = spectral_curve(&z, &data.y_dets(), &data.node_dets())?;
    let residual = (det - r).norm() / r.norm().max(1.0);
    let pass = residual <= 1e-9;
    ctx.emit(&json!({ "z": c_json(&z), "det_d": c_json(&det), "curve": c_json(&r), "residual": residual, "pass": pass }))?;
    if !pass {
        return Err(Fail::Check(format!("det D̂ − R residual {residual:e}")));
    }
    Ok(())
}

pub fn run(ctx: &Ctx, c: SpecCmd) -> Result<(), Fail> {
    match c {
        SpecCmd::Lax(a) => lax(ctx, a),
        SpecCmd::Curve(a) => curve(ctx, a),
    }
}
