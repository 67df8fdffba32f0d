use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use meanfield_lab::config::{parse_config, RunConfig};
use meanfield_lab::identities::{check_identities, parse_size, DEFAULT_SIZES};
use meanfield_lab::output::{self, emit_outputs, Summary};
use meanfield_lab::scenario::run_scenario;
use meanfield_lab::sweep::{fit_runs, Verdict};
use meanfield_lab::{LabError, Result};

/// Mean-field and Bogoliubov dynamics of lattice bosons: exact N-body runs
/// against the Hartree and fluctuation approximations.
#[derive(Parser, Debug)]
#[command(name = "meanfield", version)]
struct Cli {
    /// Print the default configuration as JSON and exit.
    #[arg(long)]
    print_defaults: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the scenario for every configured N.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every N and fit log-log convergence rates.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the exact operator identities on random data.
    CheckIdentities {
        /// Seeds 0..S are used when not given explicitly.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds starting at --seed.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        /// Comma-separated NxM pairs.
        #[arg(long, value_delimiter = ',', value_parser = parse_size)]
        sizes: Vec<(usize, usize)>,
        /// Write identities.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, out: Option<PathBuf>) -> Result<RunConfig> {
    let mut cfg = parse_config(path)?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    Ok(cfg)
}

fn print_summary(s: &Summary) {
    for r in &s.runs {
        let l = &r.last;
        println!(
            "N={:<3} t={:.3}  l2_full={}  trace={}  energy_trace={}  chi_sq={}  k_max={}",
            r.particles,
            l.t,
            output::format_e12(l.l2_full),
            output::format_e12(l.trace_dist),
            output::format_e12(l.energy_trace_dist),
            output::format_e12(l.chi_l2_sq),
            r.stats.k_max
        );
    }
    for c in &s.checks {
        let tag = if c.pass { "ok  " } else { "FAIL" };
        println!("{tag} {:<22} {:.3e} (< {:.0e})", c.name, c.value, c.bound);
    }
    for r in &s.rates {
        let tag = match r.verdict {
            Verdict::Pass => "ok  ",
            Verdict::Fail => "FAIL",
            Verdict::Degenerate => "degn",
            Verdict::Report => "    ",
        };
        let slope = r.slope.map_or("-".into(), |x| format!("{x:+.3}"));
        let window = r
            .window
            .map_or(String::new(), |[a, b]| format!(" in [{a:+.2}, {b:+.2}]"));
        println!(
            "{tag} slope {:<18} {slope} (expected {:+.1}{window})",
            r.observable, r.expected_exponent
        );
    }
}

fn execute(cfg: &RunConfig, fit: bool) -> Result<bool> {
    let runs = match run_scenario(cfg) {
        Ok(r) => r,
        Err(a) => {
            // flush what finished before reporting the failure
            output::emit_partial(cfg, &a)?;
            eprintln!(
                "partial results for {} run(s) written to {}",
                a.finished.len(),
                cfg.output.dir.display()
            );
            return Err(a.error);
        }
    };
    let rates = if fit { fit_runs(&runs)? } else { Vec::new() };
    let summary = Summary::new(cfg, &runs, rates);
    emit_outputs(cfg, &output::rows(&runs), &summary)?;
    print_summary(&summary);
    println!("outputs in {}", cfg.output.dir.display());
    Ok(summary.pass)
}

fn dispatch(cli: Cli) -> Result<bool> {
    if cli.print_defaults {
        println!("{}", RunConfig::default().to_json());
        return Ok(true);
    }
    match cli.command {
        None => Err(LabError::Setup("no command given; try --help".into())),
        Some(Command::Run { config, out }) => execute(&load(&config, out)?, false),
        Some(Command::Sweep { config, out }) => {
            let cfg = load(&config, out)?;
            let n = cfg.particle_list().len();
            if n < 3 {
                return Err(LabError::TooFewPoints(n));
            }
            execute(&cfg, true)
        }
        Some(Command::CheckIdentities {
            seed,
            seeds,
            sizes,
            out,
        }) => {
            let sizes = if sizes.is_empty() {
                DEFAULT_SIZES.to_vec()
            } else {
                sizes
            };
            let list: Vec<u64> = (seed..seed + seeds.max(1)).collect();
            let checks = check_identities(&list, &sizes)?;
            for c in &checks {
                let tag = if c.pass { "ok  " } else { "FAIL" };
                println!(
                    "{tag} {:<24} worst {:.3e} (tol {:.0e}, {} cases)",
                    c.name, c.worst, c.tolerance, c.cases
                );
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;
                let path = dir.join("identities.json");
                let text = serde_json::to_string_pretty(&checks)? + "\n";
                std::fs::write(&path, text).map_err(|e| LabError::io(&path, e))?;
            }
            Ok(checks.iter().all(|c| c.pass))
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
