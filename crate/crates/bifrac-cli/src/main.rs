//! `bifrac`: tabulates kernels, A-functions, U matrices, moments and figure
//! curves as CSV, and runs the invariant suites as a JSON report.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 invalid input or
//! degenerate angle, 3 numerical non-convergence.

mod config;
mod error;
mod output;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bifrac::bifrac_op::build_bifrac;
use bifrac::frft::kernel_eval;
use bifrac::quasiprob::{a_function, figure_curves, interpolating_moments, Figure, RowStatus};
use clap::{Parser, Subcommand};

use config::RunConfig;
use error::{CliError, CliResult};
use output::Table;

#[derive(Parser, Debug)]
#[command(name = "bifrac", version, about = "Bifractional phase-space engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    fock_dim: Option<usize>,
    /// Symmetric window half-width L, giving [−L, L] on both axes.
    #[arg(long, global = true)]
    window: Option<String>,
    /// Samples per window axis.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Radians; accepts multiples of pi such as `pi/4`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta1: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta2: Option<String>,
    /// Suite for `verify`: frft, groupoid, coherent, quasiprob, moyal, berezin or all.
    #[arg(long, global = true)]
    suite: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Kernel Δ(x,y;θ) at θ = theta1 over the window: x,y,re,im.
    Kernel,
    /// A-function of the configured state: alpha,beta,re,im.
    Afunction,
    /// Uncertainty product against θ₂ for the p = 1/2 cat.
    Fig2,
    /// Uncertainty product against the cat weight p.
    Fig3,
    /// Runs invariant suites and writes a JSON report.
    Verify,
    /// Matrix of U(alpha,beta;θ₁,θ₂): m,n,re,im.
    Ufrac,
    /// Moments and spreads of |A|² for the configured state.
    Moments,
}

fn resolve(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.fock_dim {
        cfg.fock_dim = n;
    }
    if let Some(l) = &cli.window {
        let l = config::parse_real(l)?;
        cfg.x_min = -l;
        cfg.x_max = l;
    }
    if let Some(m) = cli.points {
        cfg.n_points = m;
    }
    if let Some(t) = &cli.theta1 {
        cfg.theta1 = config::parse_real(t)?;
    }
    if let Some(t) = &cli.theta2 {
        cfg.theta2 = config::parse_real(t)?;
    }
    if let Some(p) = &cli.out {
        cfg.out = Some(p.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_kernel(cfg: &RunConfig) -> CliResult<()> {
    let w = cfg.window()?;
    // Fails before any output for angles in the delta limit.
    kernel_eval(0.0, 0.0, cfg.theta1)?;
    let mut t = Table::create(cfg, &["x", "y", "re", "im"])?;
    for x in w.points() {
        for y in w.points() {
            let k = kernel_eval(x, y, cfg.theta1)?;
            t.row(&[x, y, k.re, k.im])?;
        }
    }
    t.finish()
}

fn cmd_afunction(cfg: &RunConfig) -> CliResult<()> {
    let a = a_function(&cfg.density()?, &cfg.angles()?, cfg.window()?)?;
    let g = &a.grid;
    let mut t = Table::create(cfg, &["alpha", "beta", "re", "im"])?;
    for i in 0..g.alpha.len() {
        for j in 0..g.beta.len() {
            let v = g.get(i, j);
            t.row(&[g.alpha.point(i), g.beta.point(j), v.re, v.im])?;
        }
    }
    t.finish()
}

fn cmd_fig(cfg: &RunConfig, which: Figure) -> CliResult<()> {
    let rows = figure_curves(which, cfg.resolution, cfg.space()?, cfg.window()?)?;
    let x = if which == Figure::Fig2 { "theta2" } else { "p" };
    let mut t = Table::create(cfg, &[x, "delta_alpha", "delta_beta", "product", "masked"])?;
    for r in rows {
        let masked = if r.status == RowStatus::Ok { 0.0 } else { 1.0 };
        t.row(&[r.x, r.delta_alpha, r.delta_beta, r.product, masked])?;
    }
    t.finish()
}

fn cmd_ufrac(cfg: &RunConfig) -> CliResult<()> {
    let u = build_bifrac(cfg.alpha, cfg.beta, &cfg.angles()?, cfg.space()?)?;
    let n = cfg.fock_dim;
    let mut t = Table::create(cfg, &["m", "n", "re", "im"])?;
    for m in 0..n {
        for k in 0..n {
            let v = u.matrix.get(m, k);
            t.row(&[m as f64, k as f64, v.re, v.im])?;
        }
    }
    t.finish()
}

fn cmd_moments(cfg: &RunConfig) -> CliResult<()> {
    let a = a_function(&cfg.density()?, &cfg.angles()?, cfg.window()?)?;
    let m = interpolating_moments(&a, cfg.moment_norm)?;
    let mut t = Table::create(cfg, &["norm", "mean_alpha", "mean_beta", "delta_alpha", "delta_beta"])?;
    t.row(&[m.norm, m.mean_alpha, m.mean_beta, m.delta_alpha, m.delta_beta])?;
    t.finish()
}

fn cmd_verify(cfg: &RunConfig, suite: &str) -> CliResult<()> {
    let report = verify::run(suite, cfg)?;
    let mut out = output::sink(cfg.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    match report.invariants.iter().filter(|i| !i.passed).count() {
        0 => Ok(()),
        n => Err(CliError::Failed(n)),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = resolve(cli)?;
    match cli.cmd {
        Cmd::Kernel => cmd_kernel(&cfg),
        Cmd::Afunction => cmd_afunction(&cfg),
        Cmd::Fig2 => cmd_fig(&cfg, Figure::Fig2),
        Cmd::Fig3 => cmd_fig(&cfg, Figure::Fig3),
        Cmd::Verify => cmd_verify(&cfg, cli.suite.as_deref().unwrap_or("all")),
        Cmd::Ufrac => cmd_ufrac(&cfg),
        Cmd::Moments => cmd_moments(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bifrac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
