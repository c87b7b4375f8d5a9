//! `modmax` — runs the numerical experiments and writes a report directory
//! (report.json, CSV tables, SVG plots, JSON artifacts) per run.
//!
//! Exit status: 0 when every assertion passed, 1 when any failed, 2 on
//! configuration or runtime errors.

mod config;
mod error;
mod experiments;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use config::*;
use error::Result;
use report::RunInfo;

#[derive(Parser)]
#[command(
    name = "modmax",
    version,
    about = "Numerical experiments for discretized modulated singular integrals"
)]
struct Cli {
    /// TOML config with `experiment = "<id>"` and a [params] table.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides the config's `out`; default "out").
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Override the experiment's random seed, where it has one.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Worker count. Runs are evaluated sequentially in this build; the
    /// sweeps are order-independent, so the flag only records intent.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complete exponential sums vanish when the leading coefficient shares a factor with q.
    GaussVanishing,
    /// |S_R|/R decays along a dyadic radius sweep for a quadratic phase.
    WeylDecay,
    /// The single-arc multiplier approximation constant is stable across scales.
    MultiplierApprox,
    /// The multiplier error term decays log-linearly in the scale.
    ErrorDecay,
    /// Lattice arc kernels match the modulated continuum integral.
    KernelIdentity,
    /// Arc multipliers factor exactly through the sharp cutoff multiplier.
    Factorization,
    /// Empirical operator norm growth across doublings, with fixed-seed determinism.
    CarlesonNorm,
    /// TT* exceptional-set cardinality scan with Dirichlet certificates.
    TtstarScan,
    /// The variable-parabola transform agrees with its partial-Fourier form.
    ParabolaFourier,
    /// Chaining majorants dominate seeded random sequences.
    RademacherMenshov,
}

impl Command {
    fn id(&self) -> &'static str {
        match self {
            Command::GaussVanishing => "gauss-vanishing",
            Command::WeylDecay => "weyl-decay",
            Command::MultiplierApprox => "multiplier-approx",
            Command::ErrorDecay => "error-decay",
            Command::KernelIdentity => "kernel-identity",
            Command::Factorization => "factorization",
            Command::CarlesonNorm => "carleson-norm",
            Command::TtstarScan => "ttstar-scan",
            Command::ParabolaFourier => "parabola-fourier",
            Command::RademacherMenshov => "rademacher-menshov",
        }
    }
}

/// Loads params (config file or defaults), applies the seed override, runs,
/// and writes everything; returns whether all assertions passed.
fn execute<P>(
    cli: &Cli,
    id: &'static str,
    override_seed: impl FnOnce(&mut P, u64),
    run: impl FnOnce(&P) -> Result<report::Outcome>,
) -> Result<bool>
where
    P: DeserializeOwned + Default + Serialize,
{
    let (mut params, cfg_out) = match &cli.config {
        Some(path) => config::load::<P>(path, id)?,
        None => (P::default(), None),
    };
    if let Some(seed) = cli.seed {
        override_seed(&mut params, seed);
    }
    let started = Instant::now();
    let outcome = run(&params)?;
    let info = RunInfo {
        experiment: id,
        config_echo: serde_json::to_value(&params).expect("config echo"),
        seed_override: cli.seed,
        threads: cli.threads,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    report::write_all(&report::out_dir(cli.out.clone(), cfg_out), &info, &outcome)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    if cli.threads == 0 {
        return Err(error::Error::InvalidParameter {
            what: "threads",
            details: "must be at least 1".into(),
        });
    }
    let id = cli.command.id();
    match cli.command {
        Command::GaussVanishing => {
            execute::<GaussVanishingParams>(cli, id, |_, _| {}, |p| experiments::gauss_vanishing(p))
        }
        Command::WeylDecay => {
            execute::<WeylDecayParams>(cli, id, |_, _| {}, |p| experiments::weyl_decay(p))
        }
        Command::MultiplierApprox => execute::<MultiplierApproxParams>(cli, id, |_, _| {}, |p| {
            experiments::multiplier_approx(p)
        }),
        Command::ErrorDecay => {
            execute::<ErrorDecayParams>(cli, id, |_, _| {}, |p| experiments::error_decay(p))
        }
        Command::KernelIdentity => execute::<KernelIdentityParams>(cli, id, |_, _| {}, |p| {
            experiments::kernel_identity(p)
        }),
        Command::Factorization => execute::<FactorizationParams>(
            cli,
            id,
            |p, s| p.seed = s,
            |p| experiments::factorization(p),
        ),
        Command::CarlesonNorm => execute::<CarlesonNormParams>(
            cli,
            id,
            |p, s| p.seed = s,
            |p| experiments::carleson_norm(p),
        ),
        Command::TtstarScan => {
            execute::<TtstarScanParams>(cli, id, |_, _| {}, |p| experiments::ttstar_scan(p))
        }
        Command::ParabolaFourier => execute::<ParabolaFourierParams>(
            cli,
            id,
            |p, s| p.seed = s,
            |p| experiments::parabola_fourier(p),
        ),
        Command::RademacherMenshov => execute::<RademacherMenshovParams>(
            cli,
            id,
            |p, s| p.seed = s,
            |p| experiments::rademacher_menshov(p),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
