use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sngqc::config::{DeviceKind, ExperimentConfig};
use sngqc::device::TransmonParams;
use sngqc::experiment::{self, fmt_num};
use sngqc::gates::gate_fidelity_two;
use sngqc::pulses::Scheme;

#[derive(Parser)]
#[command(
    name = "sngqc",
    version,
    about = "Pulse-level simulations of short-path nonadiabatic geometric gates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; falls back to the config's `output`, then stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Integration step in picoseconds.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Scheme override; restricts sweeps to this scheme.
    #[arg(long, global = true)]
    scheme: Option<Scheme>,
    /// Worker threads.
    #[arg(long, global = true)]
    parallel: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Populations and state fidelity against time.
    Dynamics,
    /// Gate fidelity against a uniform decoherence rate.
    SweepKappa,
    /// Gate fidelity against Rabi or detuning control errors.
    SweepError,
    /// Two-qubit gate fidelity, leakage and duration per scheme.
    TwoQubit,
    /// Cyclic-evolution and parallel-transport checks on random gates.
    Verify {
        #[arg(long, default_value_t = 50)]
        gates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Time samples for the transport integrand.
        #[arg(long, default_value_t = 400)]
        samples: usize,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let path = common
        .config
        .as_deref()
        .context("--config is required for this command")?;
    let mut cfg =
        ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(ps) = common.dt {
        if !(ps.is_finite() && ps > 0.0) {
            bail!("--dt must be a positive number of picoseconds");
        }
        cfg.dt = ps * 1e-12;
    }
    if let Some(s) = common.scheme {
        cfg.gate = cfg.gate.with_scheme(s);
        cfg.schemes = vec![s];
    }
    Ok(cfg)
}

fn emit(common: &Common, cfg_out: Option<&Path>, text: &str) -> Result<()> {
    match common.out.as_deref().or(cfg_out) {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .context("writing stdout"),
    }
}

fn metadata(cfg: &ExperimentConfig) {
    let drag = if cfg.drag {
        "on for every scheme"
    } else {
        "off"
    };
    eprintln!(
        "# drag: {drag}; leakage level: {}; dt: {} ps",
        if cfg.leakage { "on" } else { "off" },
        cfg.dt * 1e12
    );
}

fn two_qubit(cfg: &ExperimentConfig) -> Result<String> {
    if cfg.device != DeviceKind::Coupled {
        bail!("two-qubit needs device = coupled");
    }
    let cp = cfg.coupled.context("missing coupled-pair parameters")?;
    let mut out = String::from("scheme,zeta_hz,gate_fidelity,state_fidelity,leakage,duration_s\n");
    for &scheme in &cfg.schemes {
        let cp = if scheme == Scheme::Sngqc {
            cp
        } else {
            cp.with_zeta(cfg.ngqc_zeta)?
        };
        let spec = sngqc::device::CphaseSpec {
            scheme,
            ..cfg.cphase
        };
        let r = gate_fidelity_two(&cp, &cfg.transmon, &spec, cfg.n_states, cfg.dt)?;
        out.push_str(&format!(
            "{scheme},{},{},{},{},{}\n",
            fmt_num(cp.zeta / sngqc::TWO_PI),
            fmt_num(r.gate_fidelity),
            fmt_num(r.state_fidelity),
            fmt_num(r.leakage),
            fmt_num(r.duration)
        ));
    }
    Ok(out)
}

fn verify(common: &Common, gates: usize, seed: u64, samples: usize) -> Result<String> {
    let tp = match &common.config {
        Some(_) => load(common)?.transmon,
        None => TransmonParams::default(),
    };
    let s = experiment::verify_random_gates(gates, seed, tp.omega_max, tp.delta, samples)?;
    Ok(format!(
        "gates,{}\nmax_cyclic_deviation,{}\nmax_phase_error,{}\nmax_transport,{}\nmax_gate_error,{}\n\
         min_corrupted_cyclic,{}\nmin_corrupted_transport,{}\n",
        s.gates,
        fmt_num(s.max_cyclic_deviation),
        fmt_num(s.max_phase_error),
        fmt_num(s.max_transport),
        fmt_num(s.max_gate_error),
        fmt_num(s.min_corrupted_cyclic),
        fmt_num(s.min_corrupted_transport),
    ))
}

fn run(cli: Cli) -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let common = &cli.common;
    if let Some(n) = common.parallel {
        if n == 0 {
            bail!("--parallel must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    if let Command::Verify {
        gates,
        seed,
        samples,
    } = cli.command
    {
        return emit(common, None, &verify(common, gates, seed, samples)?);
    }
    let cfg = load(common)?;
    metadata(&cfg);
    let text = match cli.command {
        Command::Dynamics => experiment::run_state_dynamics(&cfg)?.to_csv(),
        Command::SweepKappa => experiment::run_decoherence_sweep(&cfg)?.to_csv(),
        Command::SweepError => experiment::run_error_sweep(&cfg)?.to_csv(),
        Command::TwoQubit => two_qubit(&cfg)?,
        Command::Verify { .. } => unreachable!(),
    };
    emit(common, cfg.output.as_deref(), &text)
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
