use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use pagiant_cli::spec::{read_json, ExperimentSpec, SweepSpec};
use pagiant_cli::verify::{run_verify, Level, VerifyOptions};
use pagiant_cli::{simulate, sweep, theory_cmd};

#[derive(Parser)]
#[command(name = "pagiant", version, about = "Preferential attachment random graph laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated processes from an experiment spec.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the seed in the spec.
        #[arg(long, env = "PAGIANT_SEED")]
        seed: Option<u64>,
        /// Worker threads (all cores by default).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Read checkpoints as multiples of m_c.
        #[arg(long)]
        checkpoints_rel: bool,
    },
    /// Print theory predictions as JSON.
    Theory {
        /// Positive real, `inf`, or a negative integer <= -3.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        n: Option<f64>,
        /// k-core orders, comma separated.
        #[arg(long, value_delimiter = ',')]
        k: Vec<u32>,
    },
    /// Sweep eps or t and write a CSV next to the theory curve.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, env = "PAGIANT_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the built-in self-checks.
    Verify {
        /// Add scaled statistical checks.
        #[arg(long)]
        full: bool,
        /// Shift every giant fraction seen by the theory checks.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        perturb_rho: f64,
        #[arg(long, env = "PAGIANT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Simulate {
            spec,
            seed,
            jobs,
            out,
            checkpoints_rel,
        } => {
            let mut s: ExperimentSpec = read_json(&spec)?;
            s.checkpoints_rel |= checkpoints_rel;
            let seed = seed.unwrap_or(s.seed);
            let summary = simulate::simulate(&s, seed, jobs, &out)?;
            eprintln!(
                "{} replicates: {} completed, {} exhausted, {} failed; outputs in {}",
                summary.replicates,
                summary.completed,
                summary.exhausted.len(),
                summary.failed.len(),
                out.display()
            );
            Ok(summary.failed.is_empty())
        }
        Command::Theory { alpha, eps, m, n, k } => {
            let p = theory_cmd::theory_json(&alpha, eps, m, n, &k)?;
            println!("{}", serde_json::to_string_pretty(&p)?);
            Ok(true)
        }
        Command::Sweep { spec, seed, jobs, out } => {
            let s: SweepSpec = read_json(&spec)?;
            let seed = seed.unwrap_or(s.seed);
            let rows = sweep::run_sweep(&s, seed, jobs)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let path = out.join(&s.output);
            fs::write(&path, sweep::sweep_csv(&s, &rows)).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("{} grid points written to {}", rows.len(), path.display());
            Ok(true)
        }
        Command::Verify {
            full,
            perturb_rho,
            seed,
            jobs,
            json,
        } => {
            let report = run_verify(&VerifyOptions {
                level: if full { Level::Full } else { Level::Quick },
                perturb_rho,
                seed,
                jobs,
            });
            println!("{report}");
            if let Some(path) = json {
                fs::write(&path, serde_json::to_vec_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
