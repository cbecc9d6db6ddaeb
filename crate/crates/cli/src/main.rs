//! `origami`: command-line front end for CM dynamics, Nekrasov measures,
//! qq-character checks, spectral curves and special functions.
//!
//! Exit codes: 0 success, 1 failed check, 2 configuration error,
//! 3 resonant parameters or pole, 4 numerical failure.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

mod cm;
mod nek;
mod params;
mod pfun;
mod qq;
mod spec;

use params::Theory;

#[derive(Parser)]
#[command(name = "origami", version, about = "Calogero–Moser dynamics, Nekrasov measures, qq-characters and spectral curves")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Number of colors / particles.
    #[arg(long = "N", global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "4d")]
    pub theory: Theory,
    /// Parameter JSON, inline or a file path.
    #[arg(long, global = true)]
    pub params: Option<String>,
    /// Exact rational arithmetic (H kind only); same as `--mode exact`.
    #[arg(long, global = true)]
    pub exact: bool,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Validate the configuration and stop.
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// Worker threads; NEK_THREADS overrides.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every randomly drawn input.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float64,
    Extended,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Calogero–Moser dynamics.
    #[command(subcommand)]
    Cm(cm::CmCmd),
    /// Nekrasov partition functions and measures.
    #[command(subcommand)]
    Nek(nek::NekCmd),
    /// qq-character evaluation and holomorphy checks.
    #[command(subcommand)]
    Qq(qq::QqCmd),
    /// Spectral curve and Lax operator checks.
    #[command(subcommand)]
    Spec(spec::SpecCmd),
    /// Special functions.
    #[command(subcommand)]
    Pfun(pfun::PfunCmd),
}

#[derive(Debug)]
pub enum Fail {
    Config(String),
    Core(origami::Error),
    Check(String),
}

impl From<origami::Error> for Fail {
    fn from(e: origami::Error) -> Self {
        Fail::Core(e)
    }
}

impl Fail {
    fn code(&self) -> u8 {
        use origami::Error as E;
        match self {
            Fail::Check(_) => 1,
            Fail::Config(_) => 2,
            Fail::Core(E::InvalidInput(_) | E::Unsupported(_)) => 2,
            Fail::Core(E::Resonance { .. } | E::Pole(_)) => 3,
            Fail::Core(E::Numerical(_) | E::Singular(_) | E::EmptyFiber { .. }) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Fail::Config(m) => format!("configuration error: {m}"),
            Fail::Core(e) => e.to_string(),
            Fail::Check(m) => format!("check failed: {m}"),
        }
    }
}

/// Shared run context: global flags plus output plumbing.
pub struct Ctx {
    pub g: Global,
}

impl Ctx {
    pub fn n(&self, default: usize) -> Result<usize, Fail> {
        let n = self.g.n.unwrap_or(default);
        if n == 0 {
            return Err(Fail::Config("--N must be at least 1".into()));
        }
        Ok(n)
    }

    pub fn exact(&self) -> Result<bool, Fail> {
        match self.g.mode {
            Some(Mode::Extended) => {
                Err(Fail::Config("extended-precision mode is not available; use --exact or float64".into()))
            }
            Some(Mode::Exact) => Ok(true),
            Some(Mode::Float64) if self.g.exact => Err(Fail::Config("--exact conflicts with --mode float64".into())),
            _ => Ok(self.g.exact),
        }
    }

    /// Exact mode only for the 4d (H) kind.
    pub fn exact_h(&self) -> Result<bool, Fail> {
        let e = self.exact()?;
        if e && self.g.theory != Theory::D4 {
            return Err(Fail::Config("exact-rational mode is only available for --theory 4d".into()));
        }
        Ok(e)
    }

    pub fn mode_label(&self) -> &'static str {
        if self.g.exact || self.g.mode == Some(Mode::Exact) {
            "exact"
        } else {
            "float64"
        }
    }

    pub fn params_json(&self) -> Result<Option<Value>, Fail> {
        self.g.params.as_deref().map(params::load_json).transpose()
    }

    pub fn writer(&self) -> Result<Box<dyn Write>, Fail> {
        Ok(match &self.g.out {
            Some(p) => Box::new(std::io::BufWriter::new(
                std::fs::File::create(p).map_err(|e| Fail::Config(format!("cannot write {}: {e}", p.display())))?,
            )),
            None => Box::new(std::io::stdout().lock()),
        })
    }

    pub fn emit(&self, v: &Value) -> Result<(), Fail> {
        let mut w = self.writer()?;
        let text = serde_json::to_string_pretty(v).expect("serializable");
        writeln!(w, "{text}").and_then(|_| w.flush()).map_err(|e| Fail::Config(format!("write failed: {e}")))
    }

    /// Print a dry-run acknowledgement; returns true when the caller should stop.
    pub fn dry_run(&self, what: &str, config: Value) -> Result<bool, Fail> {
        if self.g.dry_run {
            self.emit(&serde_json::json!({ "dry_run": true, "command": what, "config": config }))?;
            return Ok(true);
        }
        Ok(false)
    }
}

fn threads(g: &Global) -> Result<Option<usize>, Fail> {
    match std::env::var("NEK_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map(Some).map_err(|_| Fail::Config(format!("NEK_THREADS={v} is not a count"))),
        Err(_) => Ok(g.threads),
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    if let Some(t) = threads(&cli.global)? {
        if t == 0 {
            return Err(Fail::Config("thread count must be at least 1".into()));
        }
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let ctx = Ctx { g: cli.global };
    ctx.exact()?;
    match cli.cmd {
        Cmd::Cm(c) => cm::run(&ctx, c),
        Cmd::Nek(c) => nek::run(&ctx, c),
        Cmd::Qq(c) => qq::run(&ctx, c),
        Cmd::Spec(c) => spec::run(&ctx, c),
        Cmd::Pfun(c) => pfun::run(&ctx, c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("origami: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
