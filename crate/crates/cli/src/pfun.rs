use clap::{Args, Subcommand};
use origami::scalar::C64;
use origami::specfun::{jacobi_theta_odd, theta, EllipticCurve, TheoryKind};
use serde_json::json;

use crate::params::{c_json, config, parse_value_str, to_c64, Theory};
use crate::{Ctx, Fail};

#[derive(Subcommand)]
pub enum PfunCmd {
    /// θ(x) of the chosen theory, or the odd Jacobi θ₁(x|τ) with --tau.
    Theta(ThetaArgs),
    /// Weierstrass ℘ and ℘′ with the curve invariants.
    Wp(WpArgs),
}

#[derive(Args)]
pub struct ThetaArgs {
    #[arg(long)]
    x: String,
    /// 6d nome 𝔭.
    #[arg(long, default_value = "0.1")]
    nome: String,
    #[arg(long)]
    tau: Option<String>,
}

#[derive(Args)]
pub struct WpArgs {
    #[arg(long)]
    z: String,
    #[arg(long, default_value = "[0,1]")]
    tau: String,
}

fn tau_of(s: &str) -> Result<C64, Fail> {
    let t = to_c64(&parse_value_str(s)?)?;
    if t.im <= 0.0 {
        return Err(config("τ must have positive imaginary part"));
    }
    Ok(t)
}

fn theta_cmd(ctx: &Ctx, a: ThetaArgs) -> Result<(), Fail> {
    let x = to_c64(&parse_value_str(&a.x)?)?;
    if ctx.dry_run("pfun theta", json!({ "x": c_json(&x) }))? {
        return Ok(());
    }
    if let Some(t) = &a.tau {
        let tau = tau_of(t)?;
        return ctx.emit(&json!({ "x": c_json(&x), "tau": c_json(&tau), "theta1": c_json(&jacobi_theta_odd(x, tau)?) }));
    }
    let kind = match ctx.g.theory {
        Theory::D4 => TheoryKind::H,
        Theory::D5 => TheoryKind::K,
        Theory::D6 => TheoryKind::ell(to_c64(&parse_value_str(&a.nome)?)?)?,
    };
    ctx.emit(&json!({ "x": c_json(&x), "theory": kind.label(), "theta": c_json(&theta(&x, &kind)?) }))
}

fn wp_cmd(ctx: &Ctx, a: WpArgs) -> Result<(), Fail> {
    let z = to_c64(&parse_value_str(&a.z)?)?;
    let tau = tau_of(&a.tau)?;
    if ctx.dry_run("pfun wp", json!({ "z": c_json(&z), "tau": c_json(&tau) }))? {
        return Ok(());
    }
    let c = EllipticCurve::new(tau)?;
    let (p, dp) = (c.wp(z)?, c.wp_prime(z)?);
    let residual = (dp * dp - (p * p * p * 4.0 - c.g2 * p - c.g3)).norm() / (1.0 + (dp * dp).norm());
    ctx.emit(&json!({
        "z": c_json(&z), "tau": c_json(&tau), "wp": c_json(&p), "wp_prime": c_json(&dp),
        "g2": c_json(&c.g2), "g3": c_json(&c.g3), "e": c.e.iter().map(c_json).collect::<Vec<_>>(),
        "curve_residual": residual,
    }))
}

pub fn run(ctx: &Ctx, c: PfunCmd) -> Result<(), Fail> {
    match c {
        PfunCmd::Theta(a) => theta_cmd(ctx, a),
        PfunCmd::Wp(a) => wp_cmd(ctx, a),
    }
}
