use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use magicbias::config::{ExperimentConfig, NamedSet, WORKERS_ENV};
use magicbias::figures::write_figures;
use magicbias::gadget::{Gadget, NoisyFlags};
use magicbias::sweep::{run_sweep, single, SweepOptions};
use magicbias::tomography::Mode;
use magicbias::verify::{oracle_agreements, ptm_round_trip, suite};
use magicbias::{Error, Result};

#[derive(Parser)]
#[command(
    name = "magicbias",
    version,
    about = "Exhaustive fault enumeration for logical tomography of T-gate injection in the Steane code"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every grid point of a config file, resuming from existing output.
    Sweep {
        config: PathBuf,
        /// Overrides `output` from the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Run even when the cost estimate exceeds `max_seconds`.
        #[arg(long)]
        force: bool,
        #[arg(long)]
        quiet: bool,
    },
    /// Enumerate and reconstruct one point; prints the sidecar JSON record.
    Single {
        /// Preset (Z, X, Y, M) or comma-separated generators such as Z1Z2,X1.
        #[arg(long, default_value = "Z")]
        set: String,
        /// Number, `inf` or `depol`.
        #[arg(long)]
        eta: String,
        #[arg(long, default_value_t = 5e-3)]
        p: f64,
        /// Noisy components: letters S, M, I, E or `none`.
        #[arg(long, default_value = "SMIE")]
        flags: String,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, value_enum, default_value = "adaptive")]
        mode: CliMode,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Order-1 fault tolerance, code self-consistency and oracle checks.
    Verify,
    /// Plot-ready data files (infidelity, bias sweeps, ablations) from a results CSV.
    Figures {
        csv: PathBuf,
        #[arg(long, default_value = "figures")]
        out_dir: PathBuf,
        /// Operating point of the bias sweeps.
        #[arg(long, default_value_t = 5e-3)]
        p: f64,
    },
    /// Truncated enumeration against exact dense channels.
    OracleCheck {
        #[arg(long, default_value_t = 0.02)]
        p: f64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CliMode {
    Adaptive,
    NonAdaptive,
}

fn workers(cli: usize) -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}: not a count: {v:?}"))),
        Err(_) => Ok(cli),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep {
            config,
            output,
            force,
            quiet,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let mut plan = cfg.plan()?;
            if let Some(o) = output {
                plan.output = o;
            }
            let s = run_sweep(&plan, &SweepOptions { force, quiet })?;
            eprintln!(
                "{} rows written, {} already present, {} enumerations -> {}",
                s.written,
                s.skipped,
                s.enumerations,
                plan.output.display()
            );
            Ok(true)
        }
        Command::Single {
            set,
            eta,
            p,
            flags,
            order,
            mode,
            workers: w,
        } => {
            let set = NamedSet::parse_arg(&set, "--set")?;
            let eta = match eta.as_str() {
                "inf" => f64::INFINITY,
                "depol" => set.set.depolarizing_eta(),
                x => x
                    .parse()
                    .map_err(|_| Error::Config(format!("--eta: not a number: {x:?}")))?,
            };
            let mode = match mode {
                CliMode::Adaptive => Mode::Adaptive,
                CliMode::NonAdaptive => Mode::NonAdaptive,
            };
            let flags = NoisyFlags::parse_key(&flags)?;
            let (row, rec) = single(flags, &set, eta, p, order, mode, workers(w)?)?;
            eprintln!(
                "r_proc {:.4e}  eta_ZL {:.4}  eta_XL {:.4}  accept {:.4}  leak {:.3e}  ({:.1} s)",
                row.r_proc, row.eta_zl, row.eta_xl, row.accept_rate, row.leak_rate, row.runtime
            );
            println!(
                "{}",
                serde_json::to_string_pretty(&rec).map_err(|e| Error::Io(e.to_string()))?
            );
            Ok(true)
        }
        Command::Verify => {
            let g = Gadget::new(NoisyFlags::ALL)?;
            let checks = suite(&g)?;
            for c in &checks {
                println!("{c}");
            }
            Ok(checks.iter().all(|c| c.pass))
        }
        Command::Figures { csv, out_dir, p } => {
            let files = write_figures(&csv, &out_dir, p)?;
            for f in &files {
                println!("{}", f.display());
            }
            if files.is_empty() {
                eprintln!("no rows matched any figure");
            }
            Ok(true)
        }
        Command::OracleCheck { p } => {
            let mut ok = true;
            for a in oracle_agreements(p)? {
                ok &= a.ok();
                println!(
                    "{} {} order {}: deviation {:.3e}, bound {:.3e}",
                    if a.ok() { "PASS" } else { "FAIL" },
                    a.label,
                    a.order,
                    a.deviation,
                    a.bound
                );
            }
            let rt = ptm_round_trip(100, 7)?;
            println!("{rt}");
            Ok(ok && rt.pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
