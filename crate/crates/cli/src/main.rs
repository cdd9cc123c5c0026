//! Batch runner for the sharp moment-body inequalities: reads a JSON
//! scenario config, evaluates each scenario, and writes one report JSON
//! per scenario plus a summary CSV and optional sweep CSVs.
//!
//! Exit codes: 0 when every scenario evaluates with ratio within the
//! bound and saturation expectations hold, 2 for configuration errors
//! (unreadable or invalid config), 3 for numerical failures.

// Negated float comparisons such as `!(x > 0.0)` are deliberate: unlike
// `x <= 0.0`, they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod inputs;
mod runner;

use affineq::inequalities::IneqReport;
use clap::{Args, Parser, Subcommand};
use config::Config;
use runner::{emit_plot_data, gate, run_scenario, run_sweep, summary_csv, Overrides};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "affineq",
    version,
    about = "Evaluates sharp moment-body inequalities from scenario configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs every scenario in a config and writes reports.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config with a top-level "scenarios" array.
    config: PathBuf,
    /// Output directory for reports and CSVs.
    #[arg(long, env = "AFFINEQ_OUT", default_value = "reports")]
    out: PathBuf,
    /// Replaces every scenario seed.
    #[arg(long, env = "AFFINEQ_SEED")]
    seed: Option<u64>,
    /// Replaces every scenario grid resolution.
    #[arg(long, env = "AFFINEQ_RESOLUTION")]
    resolution: Option<usize>,
    /// Replaces every scenario saturation tolerance.
    #[arg(long, env = "AFFINEQ_TOL")]
    tol: Option<f64>,
    /// Also prints every report as pretty JSON to stdout.
    #[arg(long, env = "AFFINEQ_VERBOSE")]
    verbose: bool,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(&args),
    }
}

/// File stem for a scenario label: path-safe, deterministic.
fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '-' })
        .collect()
}

fn write_file(path: &Path, contents: &str, failures: &mut Vec<String>) {
    if let Err(e) = std::fs::write(path, contents) {
        let msg = format!("cannot write {path:?}: {e}");
        eprintln!("{msg}");
        failures.push(msg);
    }
}

fn run(args: &RunArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read config {:?}: {e}", args.config);
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let parsed: Config = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config {:?} does not parse: {e}", args.config);
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(errors) = parsed.validate() {
        for e in &errors {
            eprintln!("{e}");
        }
        eprintln!("{} configuration error(s)", errors.len());
        return ExitCode::from(EXIT_CONFIG);
    }

    let mut failures: Vec<String> = Vec::new();
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        eprintln!("cannot create output directory {:?}: {e}", args.out);
        return ExitCode::from(EXIT_NUMERIC);
    }
    let ov = Overrides { seed: args.seed, resolution: args.resolution, tol: args.tol };

    let mut rows: Vec<(String, IneqReport)> = Vec::new();
    for (i, sc) in parsed.scenarios.iter().enumerate() {
        let label = sc.label(i);
        match run_scenario(sc, i, &ov) {
            Ok(report) => {
                if let Some(problem) = gate(sc, i, &ov, &report) {
                    eprintln!("{problem}");
                    failures.push(problem);
                }
                match report.ratio {
                    Some(r) => println!("{label}: ratio {r:.6} saturated {}", report.saturated),
                    None => println!("{label}: degenerate"),
                }
                if args.verbose {
                    let pretty =
                        serde_json::to_string_pretty(&report).expect("report serializes");
                    println!("{pretty}");
                }
                let path = args.out.join(format!("{}.json", file_stem(&label)));
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                write_file(&path, &json, &mut failures);
                rows.push((label, report));
            }
            Err(e) => {
                eprintln!("{e}");
                failures.push(e.to_string());
            }
        }
    }

    write_file(&args.out.join("summary.csv"), &summary_csv(&rows), &mut failures);

    for sweep in &parsed.sweeps {
        match run_sweep(sweep, &ov) {
            Ok(points) => {
                let path = args.out.join(format!("sweep-{}.csv", file_stem(&sweep.name)));
                write_file(&path, &emit_plot_data(&points), &mut failures);
            }
            Err(e) => {
                eprintln!("{e}");
                failures.push(e.to_string());
            }
        }
    }

    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("{} scenario failure(s)", failures.len());
        ExitCode::from(EXIT_NUMERIC)
    }
}
