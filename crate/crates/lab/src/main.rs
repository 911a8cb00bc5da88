use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use doa_lab::config::{parse_config, OutputConfig};
use doa_lab::output::write_outputs;
use doa_lab::scenarios::{
    builtin, builtin_scenarios, resolution_sweep, run_scenario, snr_sweep, Scenario,
};
use doa_lab::{LabError, Result};

#[derive(Parser)]
#[command(
    name = "doa-lab",
    version,
    about = "Direction-of-arrival scenarios with MUSIC and ESPRIT"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List builtin scenarios and where their parameters come from.
    List,
    /// Run a scenario and write report.json / estimates.csv.
    Run {
        #[command(flatten)]
        source: ScenarioSource,
        /// Output directory (default: config `output.out_dir`, else `out`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Also write spectrum_<trial>.csv for MUSIC.
        #[arg(long)]
        dump_spectrum: bool,
    },
    /// Sweep SNR or two-source separation and print a CSV table.
    Sweep {
        #[command(subcommand)]
        kind: SweepKind,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ScenarioSource {
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum SweepKind {
    Snr {
        #[command(flatten)]
        source: ScenarioSource,
        /// SNR points in dB; `none` is noiseless.
        #[arg(long, value_delimiter = ',', default_value = "none,20,10,0")]
        points: Vec<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    Resolution {
        #[command(flatten)]
        source: ScenarioSource,
        /// Separations in degrees, strictly descending.
        #[arg(long, value_delimiter = ',', default_value = "10,5,2,1,0.5,0.2,0.1")]
        separations: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

fn load(source: &ScenarioSource) -> Result<(Scenario, OutputConfig)> {
    match (&source.builtin, &source.config) {
        (Some(name), _) => Ok((builtin(name)?, OutputConfig::default())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|source| LabError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)
        }
        (None, None) => unreachable!("clap enforces one source"),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::List => {
            for b in builtin_scenarios() {
                println!("{:<18} {}", b.name, b.provenance);
            }
        }
        Command::Run {
            source,
            out,
            seed,
            trials,
            dump_spectrum,
        } => {
            let (mut scenario, mut controls) = load(&source)?;
            if let Some(seed) = seed {
                scenario.base_seed = seed;
            }
            if let Some(trials) = trials {
                scenario.trials = trials;
            }
            controls.dump_spectrum |= dump_spectrum;
            let dir = out
                .or_else(|| controls.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            let report = run_scenario(&scenario)?;
            write_outputs(&report, &dir, &controls)?;
            for s in &report.summaries {
                println!(
                    "{}: rmse_deg={} detection_rate={} resolution_failures={} failures={}",
                    s.algorithm.as_str(),
                    opt(s.rmse_deg),
                    s.detection_rate,
                    s.resolution_failures,
                    s.failures
                );
            }
            eprintln!(
                "{} trials in {:.3?}, output in {}",
                scenario.trials,
                report.runtime,
                dir.display()
            );
        }
        Command::Sweep { kind } => match kind {
            SweepKind::Snr {
                source,
                points,
                trials,
            } => {
                let (scenario, _) = load(&source)?;
                let points = points
                    .iter()
                    .map(|p| match p.trim() {
                        "none" => Ok(None),
                        s => s.parse::<f64>().map(Some).map_err(|_| {
                            LabError::config("points", format!("`{s}` is not a number or `none`"))
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                println!("snr_db,algorithm,rmse_deg,detection_rate,resolution_failures");
                for row in snr_sweep(&scenario, &points, trials)? {
                    for s in &row.summaries {
                        println!(
                            "{},{},{},{},{}",
                            row.snr_db.map_or("none".to_string(), |v| v.to_string()),
                            s.algorithm.as_str(),
                            opt(s.rmse_deg),
                            s.detection_rate,
                            s.resolution_failures
                        );
                    }
                }
            }
            SweepKind::Resolution {
                source,
                separations,
                trials,
            } => {
                let (scenario, _) = load(&source)?;
                println!("separation_deg,algorithm,probability,resolution_failures");
                for row in resolution_sweep(&scenario, &separations, trials)? {
                    for ((alg, p), (_, rf)) in row.probability.iter().zip(&row.resolution_failures)
                    {
                        println!("{},{},{},{}", row.separation_deg, alg, p, rf);
                    }
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
