use clap::{Args, Subcommand, ValueEnum};
use origami::cmdyn::{
    energy, hamiltonians, integrate, lax_residual, moment_map_matrix, rational_lax, CmKind, IntegrateOptions, PhasePoint,
    Scheme,
};
use origami::linalg::sort_complex;
use origami::sample;
use origami::scalar::{Q, C64};
use rand::Rng;
use serde_json::{json, Value};

use crate::params::{c_json, config, field, list, parse_value_str, q_json, to_c64, to_q};
use crate::{Ctx, Fail, Format};

#[derive(Subcommand)]
pub enum CmCmd {
    /// Integrate a trajectory; CSV rows (t, x, p, H) plus a conservation report.
    Simulate(SimArgs),
    /// Conserved quantities of one state.
    Conserved(StateArgs),
    /// Max relative L̇ − [A, L] residual over random states.
    LaxCheck(LaxCheckArgs),
    /// Gauge-fixed moment-map solution, verified exactly.
    MomentMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Rational,
    Trig,
    Elliptic,
}

#[derive(Args, Clone)]
pub struct StateArgs {
    #[arg(long, value_enum, default_value = "rational")]
    kind: Kind,
    /// Modular parameter for the elliptic kind, as [re, im].
    #[arg(long, default_value = "[0,1]")]
    tau: String,
    /// Coupling used for randomly drawn states.
    #[arg(long, default_value = "1")]
    nu: String,
    /// Number of H_k = Tr Lᵏ/k to report.
    #[arg(long, default_value_t = 3)]
    k_max: usize,
}

#[derive(Args)]
pub struct SimArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long = "t", default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, value_enum, default_value = "rk4")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 1)]
    record_every: usize,
    #[arg(long, default_value_t = 1e-8)]
    eps_sep: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Rk4,
    Leapfrog,
}

#[derive(Args)]
pub struct LaxCheckArgs {
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn kind(args: &StateArgs) -> Result<CmKind, Fail> {
    Ok(match args.kind {
        Kind::Rational => CmKind::Rational,
        Kind::Trig => CmKind::Trig,
        Kind::Elliptic => {
            let tau = to_c64(&parse_value_str(&args.tau)?)?;
            if tau.im <= 0.0 {
                return Err(config("τ must have positive imaginary part"));
            }
            CmKind::Elliptic { tau }
        }
    })
}

/// State from `--params {x, p, nu}` or drawn from the seed.
fn state(ctx: &Ctx, args: &StateArgs) -> Result<PhasePoint, Fail> {
    if let Some(v) = ctx.params_json()? {
        let x = list(field(&v, "x")?, to_c64)?;
        let p = list(field(&v, "p")?, to_c64)?;
        let nu = to_c64(field(&v, "nu")?)?;
        return Ok(PhasePoint::new(x, p, nu)?);
    }
    let n = ctx.n(3)?;
    let nu = to_c64(&parse_value_str(&args.nu)?)?;
    let mut g = sample::rng(ctx.g.seed);
    let x: Vec<f64> = match args.kind {
        Kind::Rational => sample::separated_reals(&mut g, n, 1.0, 1.0),
        _ => (0..n).map(|i| (i as f64 + 0.2 + 0.6 * g.gen::<f64>()) / n as f64).collect(),
    };
    let p: Vec<f64> = (0..n).map(|_| g.gen_range(-0.5..0.5)).collect();
    Ok(PhasePoint::new(x.iter().map(|&v| C64::new(v, 0.0)).collect(), p.iter().map(|&v| C64::new(v, 0.0)).collect(), nu)?)
}

fn state_json(s: &PhasePoint) -> Value {
    json!({
        "x": s.x.iter().map(c_json).collect::<Vec<_>>(),
        "p": s.p.iter().map(c_json).collect::<Vec<_>>(),
        "nu": c_json(&s.nu),
    })
}

/// Rational kind: H_1..H_k; other kinds: the energy.
fn invariants(s: &PhasePoint, kind: &CmKind, k_max: usize) -> Result<Vec<C64>, Fail> {
    Ok(match kind {
        CmKind::Rational => hamiltonians(s, k_max)?,
        _ => vec![energy(s, kind)?],
    })
}

fn rel_drift(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn spectrum(s: &PhasePoint) -> Result<Vec<C64>, Fail> {
    let mut e = rational_lax(&s.x, &s.p, &s.nu)?.0.eigenvalues();
    sort_complex(&mut e);
    Ok(e)
}

fn simulate(ctx: &Ctx, a: SimArgs) -> Result<(), Fail> {
    let kind = kind(&a.state)?;
    let s0 = state(ctx, &a.state)?;
    if a.state.k_max == 0 {
        return Err(config("--k-max must be at least 1"));
    }
    let cfg = json!({ "state": state_json(&s0), "t": a.t_end, "dt": a.dt, "kind": format!("{:?}", a.state.kind) });
    if ctx.dry_run("cm simulate", cfg)? {
        return Ok(());
    }
    let opts = IntegrateOptions {
        scheme: match a.scheme {
            SchemeArg::Rk4 => Scheme::Rk4,
            SchemeArg::Leapfrog => Scheme::Leapfrog,
        },
        eps_sep: a.eps_sep,
        record_every: a.record_every,
    };
    let traj = integrate(&s0, &kind, a.t_end, a.dt, &opts)?;
    let h0 = invariants(&s0, &kind, a.state.k_max)?;
    let e0 = if kind == CmKind::Rational { Some(spectrum(&s0)?) } else { None };
    let names: Vec<String> = match kind {
        CmKind::Rational => (1..=h0.len()).map(|k| format!("H{k}")).collect(),
        _ => vec!["E".into()],
    };
    let mut drift = vec![0.0f64; h0.len()];
    let mut spec_drift = 0.0f64;
    let mut rows = Vec::with_capacity(traj.len());
    for (t, s) in &traj {
        let h = invariants(s, &kind, a.state.k_max)?;
        for k in 0..h.len() {
            drift[k] = drift[k].max(rel_drift(h[k], h0[k]));
        }
        if let Some(e0) = &e0 {
            for (x, y) in spectrum(s)?.iter().zip(e0) {
                spec_drift = spec_drift.max((x - y).norm() / y.norm().max(1.0));
            }
        }
        rows.push((*t, s.clone(), h));
    }
    let report = json!({
        "steps": traj.len() - 1,
        "max_relative_drift": names.iter().zip(&drift).map(|(n, d)| (n.clone(), json!(d))).collect::<serde_json::Map<_, _>>(),
        "max_spectrum_drift": e0.as_ref().map(|_| spec_drift),
    });
    if ctx.g.format == Some(Format::Json) {
        let last = &traj.last().expect("initial state").1;
        return ctx.emit(&json!({ "report": report, "final_state": state_json(last) }));
    }
    let mut w = csv::Writer::from_writer(ctx.writer()?);
    let n = s0.n();
    let mut header = vec!["t".to_string()];
    for v in ["x", "p"] {
        for i in 1..=n {
            header.push(format!("{v}{i}_re"));
            header.push(format!("{v}{i}_im"));
        }
    }
    for name in &names {
        header.push(format!("{name}_re"));
        header.push(format!("{name}_im"));
    }
    let io = |e: csv::Error| config(format!("CSV write failed: {e}"));
    w.write_record(&header).map_err(io)?;
    for (t, s, h) in rows {
        let mut rec = vec![t.to_string()];
        for v in s.x.iter().chain(&s.p).chain(&h) {
            rec.push(v.re.to_string());
            rec.push(v.im.to_string());
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| config(format!("write failed: {e}")))?;
    eprintln!("conservation: {report}");
    Ok(())
}

fn conserved(ctx: &Ctx, a: StateArgs) -> Result<(), Fail> {
    let kind = kind(&a)?;
    let s = state(ctx, &a)?;
    if ctx.dry_run("cm conserved", state_json(&s))? {
        return Ok(());
    }
    let h = hamiltonians(&s, a.k_max.max(1))?;
    ctx.emit(&json!({
        "state": state_json(&s),
        "hamiltonians": h.iter().map(c_json).collect::<Vec<_>>(),
        "energy": c_json(&energy(&s, &kind)?),
    }))
}

fn lax_check(ctx: &Ctx, a: LaxCheckArgs) -> Result<(), Fail> {
    let n = ctx.n(3)?;
    if ctx.dry_run("cm lax-check", json!({ "N": n, "samples": a.samples, "seed": ctx.g.seed }))? {
        return Ok(());
    }
    let mut g = sample::rng(ctx.g.seed);
    let mut worst = 0.0f64;
    for _ in 0..a.samples {
        let x: Vec<C64> = sample::separated_reals(&mut g, n, 0.5, 2.0)
            .into_iter()
            .map(|v| C64::new(v, 0.0) + sample::complex(&mut g, 0.2))
            .collect();
        let p: Vec<C64> = (0..n).map(|_| sample::complex(&mut g, 1.0)).collect();
        let s = PhasePoint::new(x, p, sample::complex_annulus(&mut g, 0.3, 2.0))?;
        worst = worst.max(lax_residual(&s)?);
    }
    let pass = worst <= a.tol;
    ctx.emit(&json!({ "N": n, "samples": a.samples, "max_residual": worst, "tolerance": a.tol, "pass": pass }))?;
    if !pass {
        return Err(Fail::Check(format!("Lax residual {worst:e} exceeds {:e}", a.tol)));
    }
    Ok(())
}

fn moment_map(ctx: &Ctx) -> Result<(), Fail> {
    let (x, p, nu): (Vec<Q>, Vec<Q>, Q) = match ctx.params_json()? {
        Some(v) => (list(field(&v, "x")?, to_q)?, list(field(&v, "p")?, to_q)?, to_q(field(&v, "nu")?)?),
        None => {
            let n = ctx.n(3)?;
            let mut g = sample::rng(ctx.g.seed);
            let x = (0..n).map(|i| sample::rational(&mut g, 9, 7) + Q::from_integer((3 * i as i64).into())).collect();
            let p = (0..n).map(|_| sample::rational(&mut g, 9, 7)).collect();
            let nu = sample::rational_nonzero(&mut g, 9, 5);
            let nu = if nu < Q::from_integer(0.into()) { -nu } else { nu };
            (x, p, nu)
        }
    };
    let cfg = json!({ "x": x.iter().map(q_json).collect::<Vec<_>>(), "p": p.iter().map(q_json).collect::<Vec<_>>(), "nu": q_json(&nu) });
    if ctx.dry_run("cm moment-map", cfg.clone())? {
        return Ok(());
    }
    let m = moment_map_matrix(&x, &p, &nu)?;
    let n = x.len();
    let pm: Vec<Vec<Value>> =
        (0..n).map(|i| (0..n).map(|j| json!([q_json(&m.p_matrix[(i, j)].re), q_json(&m.p_matrix[(i, j)].im)])).collect()).collect();
    let zero = m.mu.is_zero();
    ctx.emit(&json!({ "input": cfg, "P": pm, "z": m.z, "mu_zero": zero }))?;
    if !zero {
        return Err(Fail::Check("moment map does not vanish".into()));
    }
    Ok(())
}

pub fn run(ctx: &Ctx, c: CmCmd) -> Result<(), Fail> {
    match c {
        CmCmd::Simulate(a) => simulate(ctx, a),
        CmCmd::Conserved(a) => conserved(ctx, a),
        CmCmd::LaxCheck(a) => lax_check(ctx, a),
        CmCmd::MomentMap => moment_map(ctx),
    }
}
