use clap::{Args, Subcommand, ValueEnum};
use origami::qqchar::{expectation, pole_residue_check, pole_residue_check_float, y_residue_check, QqObs, QqWeight};
use serde_json::json;

use crate::params::{c_json, config, parse_value_str, q_json, to_c64, to_q, RawParams};
use crate::{Ctx, Fail};

#[derive(Subcommand)]
pub enum QqCmd {
    /// Residues of ⟨𝔛(x)⟩ at every candidate pole and the degree-N fit.
    Check(CheckArgs),
    /// ⟨𝔛(x)⟩ at one point as a 𝔮-series.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Measure,
    Displayed,
}

impl From<WeightArg> for QqWeight {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::Measure => QqWeight::Measure,
            WeightArg::Displayed => QqWeight::Displayed,
        }
    }
}

#[derive(Args)]
pub struct Common {
    #[arg(long, default_value_t = 2)]
    order: usize,
    /// Inner truncation of the λ sum; tied to --order by default.
    #[arg(long)]
    k_inner: Option<usize>,
    #[arg(long, value_enum, default_value = "measure")]
    weight: WeightArg,
}

#[derive(Args)]
pub struct CheckArgs {
    #[command(flatten)]
    c: Common,
    /// Check ⟨Y(x)⟩ instead, which is expected to have poles.
    #[arg(long)]
    control: bool,
    /// Float mode: largest accepted residue.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    c: Common,
    #[arg(long)]
    x: String,
}

fn raw(ctx: &Ctx) -> Result<RawParams, Fail> {
    let r = match ctx.params_json()? {
        Some(v) => RawParams::from_value(v)?,
        None => RawParams::random(ctx.n(2)?, ctx.g.seed),
    };
    if let Some(n) = ctx.g.n {
        if n != r.a.len() {
            return Err(config(format!("--N {n} but the parameter file has {} moduli", r.a.len())));
        }
    }
    Ok(r)
}

fn check(ctx: &Ctx, a: CheckArgs) -> Result<(), Fail> {
    let raw = raw(ctx)?;
    let exact = ctx.exact_h()?;
    let cfg = json!({ "params": raw.echo(), "order": a.c.order, "k_inner": a.c.k_inner, "weight": QqWeight::from(a.c.weight),
                      "mode": ctx.mode_label(), "control": a.control });
    let report = if exact {
        let p = raw.exact()?;
        if ctx.dry_run("qq check", cfg.clone())? {
            return Ok(());
        }
        if a.control {
            y_residue_check(&p, a.c.order)?
        } else {
            pole_residue_check(&p, a.c.order, a.c.k_inner, a.c.weight.into())?
        }
    } else {
        if a.control {
            return Err(config("--control runs in exact mode"));
        }
        let p = raw.float(ctx.g.theory)?;
        if ctx.dry_run("qq check", cfg.clone())? {
            return Ok(());
        }
        pole_residue_check_float(&p, a.c.order, a.c.k_inner, a.c.weight.into())?
    };
    let holomorphic = match report.exact_zero {
        Some(z) => z && report.polynomial_fit_residual == 0.0 && report.leading_coefficient_ok,
        None => report.max_residue <= a.tol && report.polynomial_fit_residual <= 1e-8,
    };
    let mut out = serde_json::to_value(&report).expect("serializable");
    out["config"] = cfg;
    out["holomorphic"] = json!(holomorphic);
    ctx.emit(&out)?;
    // The control is expected to fail holomorphy; only a pole-free control is reported as an error.
    match (a.control, holomorphic) {
        (false, false) => Err(Fail::Check(format!("max residue {:e}", report.max_residue))),
        (true, true) => Err(Fail::Check("negative control shows no poles".into())),
        _ => Ok(()),
    }
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Result<(), Fail> {
    let raw = raw(ctx)?;
    let xv = parse_value_str(&a.x)?;
    let obs = QqObs { k_inner: a.c.k_inner, weight: a.c.weight.into() };
    let mut out = json!({ "params": raw.echo(), "x": xv, "order": a.c.order, "mode": ctx.mode_label() });
    if ctx.exact_h()? {
        let p = raw.exact()?;
        let x = to_q(&xv)?;
        if ctx.dry_run("qq eval", out.clone())? {
            return Ok(());
        }
        let s = expectation(&obs, &p, a.c.order, &x)?;
        out["coefficients"] = json!(s.coeffs().iter().map(q_json).collect::<Vec<_>>());
    } else {
        let p = raw.float(ctx.g.theory)?;
        let x = to_c64(&xv)?;
        if ctx.dry_run("qq eval", out.clone())? {
            return Ok(());
        }
        let s = expectation(&obs, &p, a.c.order, &x)?;
        out["coefficients"] = json!(s.coeffs().iter().map(c_json).collect::<Vec<_>>());
    }
    ctx.emit(&out)
}

pub fn run(ctx: &Ctx, c: QqCmd) -> Result<(), Fail> {
    match c {
        QqCmd::Check(a) => check(ctx, a),
        QqCmd::Eval(a) => eval(ctx, a),
    }
}
