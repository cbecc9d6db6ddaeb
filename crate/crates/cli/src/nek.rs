use clap::{Args, Subcommand};
use origami::nekrasov::{
    defect_density, n1_product_series, plancherel_limit_check, prepotential, z_inst, Coloring, ParamSet,
};
use origami::partitions::{MultiPartition, Partition};
use origami::scalar::{Scalar, Q, C64};
use origami::series::QSeries;
use serde_json::{json, Value};

use crate::params::{c_json, config, list, load_json, parse_value_str, q_json, to_c64, to_q, RawParams};
use crate::{Ctx, Fail};

#[derive(Subcommand)]
pub enum NekCmd {
    /// Instanton partition function Z^inst as a 𝔮-series.
    Z(ZArgs),
    /// F = ε₁ε₂ log Z^inst as a 𝔮-series.
    Prepotential(OrderArgs),
    /// Scaled Â₀ measure against the Plancherel weight along ε₃ = 10², 10³, 10⁴.
    Plancherel(PlancherelArgs),
    /// Surface-defect density for a target multipartition.
    Defect(DefectArgs),
}

#[derive(Args)]
pub struct OrderArgs {
    #[arg(long, default_value_t = 2)]
    order: usize,
}

#[derive(Args)]
pub struct ZArgs {
    #[command(flatten)]
    o: OrderArgs,
    /// N = 1: compare against the product formula; exit 1 on mismatch.
    #[arg(long)]
    check_product: bool,
}

#[derive(Args)]
pub struct PlancherelArgs {
    /// Comma-separated parts.
    #[arg(long, default_value = "2,1")]
    partition: String,
    #[arg(long, default_value = "1")]
    hbar: String,
    #[arg(long = "lambda", default_value = "1")]
    big_lambda: String,
}

#[derive(Args)]
pub struct DefectArgs {
    /// Target multipartition as JSON, e.g. [[1],[]].
    #[arg(long)]
    target: String,
    /// Coloring c(α) as a JSON array; identity by default.
    #[arg(long)]
    coloring: Option<String>,
    /// Fugacities 𝔮_ω as a JSON array; all 1/3 by default.
    #[arg(long)]
    fugacities: Option<String>,
    #[arg(long, default_value_t = 4)]
    bound: usize,
}

fn raw_params(ctx: &Ctx) -> Result<RawParams, Fail> {
    match ctx.params_json()? {
        Some(v) => RawParams::from_value(v),
        None => Ok(RawParams::random(ctx.n(2)?, ctx.g.seed)),
    }
}

fn check_n(ctx: &Ctx, raw: &RawParams) -> Result<(), Fail> {
    if let Some(n) = ctx.g.n {
        if n != raw.a.len() {
            return Err(config(format!("--N {n} but the parameter file has {} moduli", raw.a.len())));
        }
    }
    Ok(())
}

fn exact_coeffs(s: &QSeries<Q>) -> Vec<Value> {
    s.coeffs().iter().map(q_json).collect()
}

fn float_coeffs(s: &QSeries<C64>) -> Vec<Value> {
    s.coeffs().iter().map(c_json).collect()
}

fn series_close(a: &QSeries<C64>, b: &QSeries<C64>) -> bool {
    a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).norm() <= 1e-10 * (1.0 + y.norm()))
}

fn z_cmd(ctx: &Ctx, a: ZArgs) -> Result<(), Fail> {
    let raw = raw_params(ctx)?;
    check_n(ctx, &raw)?;
    let exact = ctx.exact_h()?;
    if a.check_product && raw.a.len() != 1 {
        return Err(config("--check-product applies to N = 1 only"));
    }
    let head = json!({ "params": raw.echo(), "mode": ctx.mode_label(), "theory": ctx.g.theory.label(), "order": a.o.order });
    if exact {
        let p = raw.exact()?;
        if ctx.dry_run("nek z", head.clone())? {
            return Ok(());
        }
        let z = z_inst(&p, a.o.order)?;
        let mut out = head;
        out["coefficients"] = json!(exact_coeffs(&z));
        let mut ok = true;
        if a.check_product {
            ok = z == n1_product_series(&p.eps, a.o.order)?;
            out["product_check"] = json!(ok);
        }
        ctx.emit(&out)?;
        if !ok {
            return Err(Fail::Check("series differs from the product formula".into()));
        }
    } else {
        let p = raw.float(ctx.g.theory)?;
        if ctx.dry_run("nek z", head.clone())? {
            return Ok(());
        }
        let z = z_inst(&p, a.o.order)?;
        let mut out = head;
        out["coefficients"] = json!(float_coeffs(&z));
        let mut ok = true;
        if a.check_product {
            if ctx.g.theory != crate::params::Theory::D4 {
                return Err(config("the product formula is stated for --theory 4d"));
            }
            ok = series_close(&z, &n1_product_series(&p.eps, a.o.order)?);
            out["product_check"] = json!(ok);
        }
        ctx.emit(&out)?;
        if !ok {
            return Err(Fail::Check("series differs from the product formula".into()));
        }
    }
    Ok(())
}

fn prepotential_cmd(ctx: &Ctx, a: OrderArgs) -> Result<(), Fail> {
    let raw = raw_params(ctx)?;
    check_n(ctx, &raw)?;
    let mut out = json!({ "params": raw.echo(), "mode": ctx.mode_label(), "order": a.order });
    if ctx.exact_h()? {
        let p = raw.exact()?;
        if ctx.dry_run("nek prepotential", out.clone())? {
            return Ok(());
        }
        out["coefficients"] = json!(exact_coeffs(&prepotential(&p, a.order)?));
    } else {
        let p = raw.float(ctx.g.theory)?;
        if ctx.dry_run("nek prepotential", out.clone())? {
            return Ok(());
        }
        out["coefficients"] = json!(float_coeffs(&prepotential(&p, a.order)?));
    }
    ctx.emit(&out)
}

fn parse_partition(s: &str) -> Result<Partition, Fail> {
    let parts: Vec<usize> = if s.trim().is_empty() {
        Vec::new()
    } else {
        s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| config(format!("bad partition {s}")))).collect::<Result<_, _>>()?
    };
    Ok(Partition::new(parts)?)
}

fn plancherel_cmd(ctx: &Ctx, a: PlancherelArgs) -> Result<(), Fail> {
    let lam = parse_partition(&a.partition)?;
    let hbar = parse_value_str(&a.hbar)?;
    let bl = parse_value_str(&a.big_lambda)?;
    let cfg = json!({ "partition": lam.parts(), "hbar": hbar, "lambda": bl, "scales": [100, 1000, 10000] });
    if ctx.dry_run("nek plancherel", cfg.clone())? {
        return Ok(());
    }
    let errs = if ctx.exact_h()? {
        let s: Vec<Q> = [100, 1000, 10000].iter().map(|&v| Q::from_integer(v.into())).collect();
        plancherel_limit_check(&lam, &s, &to_q(&bl)?, &to_q(&hbar)?)?
    } else {
        let s: Vec<C64> = [1e2, 1e3, 1e4].iter().map(|&v| C64::new(v, 0.0)).collect();
        plancherel_limit_check(&lam, &s, &to_c64(&bl)?, &to_c64(&hbar)?)?
    };
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    ctx.emit(&json!({ "config": cfg, "mode": ctx.mode_label(), "relative_errors": errs, "strictly_decreasing": decreasing }))?;
    if !decreasing {
        return Err(Fail::Check("relative error does not decrease along the scales".into()));
    }
    Ok(())
}

fn defect_in<S: Scalar>(
    target: &MultiPartition,
    c: &Coloring,
    fug: &[S],
    p: &ParamSet<S>,
    bound: usize,
) -> Result<S, Fail> {
    if target.n_colors() != p.n() {
        return Err(config(format!("target has {} colors, parameters have {}", target.n_colors(), p.n())));
    }
    Ok(defect_density(target, c, fug, p, bound)?)
}

fn defect_cmd(ctx: &Ctx, a: DefectArgs) -> Result<(), Fail> {
    let raw = raw_params(ctx)?;
    check_n(ctx, &raw)?;
    let n = raw.a.len();
    let tv = load_json(&a.target)?;
    let parts: Vec<Vec<usize>> = serde_json::from_value(tv).map_err(|e| config(format!("bad --target: {e}")))?;
    let target = MultiPartition::from_parts(parts)?;
    let coloring = match &a.coloring {
        Some(s) => {
            let v: Vec<usize> = serde_json::from_value(load_json(s)?).map_err(|e| config(format!("bad --coloring: {e}")))?;
            Coloring::new(v)?
        }
        None => Coloring::identity(n),
    };
    let fug = match &a.fugacities {
        Some(s) => load_json(s)?,
        None => json!(vec!["1/3"; n]),
    };
    let cfg = json!({ "params": raw.echo(), "target": target.entries().iter().map(|p| p.parts().to_vec()).collect::<Vec<_>>(),
                      "fugacities": fug, "bound": a.bound, "mode": ctx.mode_label() });
    if fug.as_array().map(|v| v.len()) != Some(n) {
        return Err(config("need one fugacity per color"));
    }
    let value = if ctx.exact_h()? {
        let p = raw.exact()?;
        let f = list(&fug, to_q)?;
        if ctx.dry_run("nek defect", cfg.clone())? {
            return Ok(());
        }
        q_json(&defect_in(&target, &coloring, &f, &p, a.bound)?)
    } else {
        let p = raw.float(ctx.g.theory)?;
        let f = list(&fug, to_c64)?;
        if ctx.dry_run("nek defect", cfg.clone())? {
            return Ok(());
        }
        c_json(&defect_in(&target, &coloring, &f, &p, a.bound)?)
    };
    ctx.emit(&json!({ "config": cfg, "density": value }))
}

pub fn run(ctx: &Ctx, c: NekCmd) -> Result<(), Fail> {
    match c {
        NekCmd::Z(a) => z_cmd(ctx, a),
        NekCmd::Prepotential(a) => prepotential_cmd(ctx, a),
        NekCmd::Plancherel(a) => plancherel_cmd(ctx, a),
        NekCmd::Defect(a) => defect_cmd(ctx, a),
    }
}
