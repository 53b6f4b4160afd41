//! `raman`: scenario runner writing purity sweeps, Q-function grids,
//! protocol reports and characteristic times as CSV or JSON.
//!
//! Exit status: 0 success, 1 a protocol check failed, 2 usage or config
//! error, 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::RunFlags;
use crate::config::Config;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "raman", version, about = "Two-mode Raman cavity QED scenario runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Purity (or approximation fidelity) against gt, as CSV.
    PuritySweep,
    /// Reduced Q functions of the two field branches, as long-format CSV.
    Qfunc,
    /// Run a protocol and write its JSON report.
    Protocol {
        /// phase-gate, cnot, epr, ghz or cat
        name: String,
    },
    /// Disentanglement and revival times, as JSON.
    Times,
}

/// Flags mirroring config keys. Each one overrides the config file.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// key = value file; flags given alongside it win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Arbitrary override, repeatable: --set sweep.steps=100
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Family of both modes (coherent or squeezed)
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true)]
    family1: Option<String>,
    #[arg(long, global = true)]
    family2: Option<String>,
    #[arg(long, global = true)]
    nbar1: Option<String>,
    #[arg(long, visible_alias = "nbar2", global = true)]
    mbar2: Option<String>,
    /// Squeezing of both modes
    #[arg(long, global = true)]
    r: Option<String>,
    #[arg(long, global = true)]
    r1: Option<String>,
    #[arg(long, global = true)]
    r2: Option<String>,
    /// Initial atomic level (a or b)
    #[arg(long, global = true)]
    atom: Option<String>,

    #[arg(long, global = true)]
    gt_max: Option<String>,
    #[arg(long, global = true)]
    steps: Option<String>,
    /// atomic, mode or approx
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Record disentanglement times inside the sweep range in the header
    #[arg(long, global = true)]
    markers: bool,

    /// Half-width of the square Q window, or auto
    #[arg(long, global = true)]
    q_window: Option<String>,
    #[arg(long, global = true)]
    q_resolution: Option<String>,
    /// both (t = 0 and gt0) or initial
    #[arg(long, global = true)]
    q_times: Option<String>,
    /// Disentanglement index used by qfunc and cat
    #[arg(long, global = true)]
    j: Option<String>,
    #[arg(long, global = true)]
    leak_tol: Option<String>,

    #[arg(long, global = true)]
    n_prime: Option<String>,
    /// EPR measurement outcome (a or b)
    #[arg(long, global = true)]
    outcome: Option<String>,
    /// GHZ sign (+ or -)
    #[arg(long, global = true, allow_hyphen_values = true)]
    sign: Option<String>,
    /// Which GHZ atom is prepared in a superposition (0 or 1)
    #[arg(long, global = true)]
    order: Option<String>,

    #[arg(long, global = true)]
    kappa: Option<String>,
    #[arg(long, global = true)]
    j_max: Option<String>,
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    l: Option<String>,
    /// Number of revival times to list
    #[arg(long, global = true)]
    revivals: Option<String>,

    /// Output path, - for stdout
    #[arg(long, short, global = true)]
    out: Option<String>,
    /// Overwrite an existing output file
    #[arg(long, global = true)]
    force: bool,
    /// Include wall time in the output (breaks byte-identical reruns)
    #[arg(long, global = true)]
    timing: bool,
}

impl Overrides {
    fn apply(&self, cfg: &mut Config) -> Result<(), CliError> {
        if let Some(path) = &self.config {
            cfg.merge_file(path)?;
        }
        let pairs: [(&[&str], &Option<String>); 25] = [
            (&["state1.family", "state2.family"], &self.family),
            (&["state1.family"], &self.family1),
            (&["state2.family"], &self.family2),
            (&["state1.nbar"], &self.nbar1),
            (&["state2.nbar"], &self.mbar2),
            (&["state1.r", "state2.r"], &self.r),
            (&["state1.r"], &self.r1),
            (&["state2.r"], &self.r2),
            (&["atom.init"], &self.atom),
            (&["sweep.gt_max"], &self.gt_max),
            (&["sweep.steps"], &self.steps),
            (&["sweep.kind"], &self.kind),
            (&["q.window"], &self.q_window),
            (&["q.resolution"], &self.q_resolution),
            (&["q.times"], &self.q_times),
            (&["disentanglement.j"], &self.j),
            (&["cutoff.leak_tol"], &self.leak_tol),
            (&["cnot.n_prime"], &self.n_prime),
            (&["epr.outcome"], &self.outcome),
            (&["ghz.sign"], &self.sign),
            (&["ghz.order"], &self.order),
            (&["times.kappa"], &self.kappa),
            (&["times.j_max"], &self.j_max),
            (&["times.k"], &self.k),
            (&["times.l"], &self.l),
        ];
        for (keys, value) in pairs {
            if let Some(v) = value {
                for key in keys {
                    cfg.set(key, v)?;
                }
            }
        }
        if let Some(v) = &self.revivals {
            cfg.set("times.revivals", v)?;
        }
        if let Some(v) = &self.out {
            cfg.set("out.path", v)?;
        }
        if self.markers {
            cfg.set("sweep.markers", "true")?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = Config::default();
    cli.overrides.apply(&mut cfg)?;
    let flags = RunFlags {
        force: cli.overrides.force,
        timing: cli.overrides.timing,
    };
    match &cli.command {
        Command::PuritySweep => commands::purity_sweep(&cfg, flags),
        Command::Qfunc => commands::qfunc(&cfg, flags),
        Command::Protocol { name } => commands::protocol(name, &cfg, flags),
        Command::Times => commands::times(&cfg, flags),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("raman: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
