//! `filtra`: run scene files and the acceptance suite.

mod scene;
mod tasks;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use filtra::selftest;

const EXIT_INVALID: u8 = 1;
const EXIT_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "filtra", version, about = "Exact toric norm calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the tasks of a scene file, writing one JSON file per task.
    Run {
        scene: PathBuf,
        /// Also write CSV tables next to spectral-measure and Monge-Ampère results.
        #[arg(long)]
        csv: bool,
        /// Seed for randomized steps; scene tasks are deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Mass tolerance for the transport solver.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Selftest {
        #[arg(long, default_value_t = selftest::Config::default().seed)]
        seed: u64,
        /// Only run criteria whose group, name or number matches.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match cli.command {
        Command::Run { scene, csv, seed: _, tol } => run(&scene, &tasks::RunOptions { tolerance: tol, csv }),
        Command::Selftest { seed, filter, tol } => self_test(selftest::Config { seed, filter, tolerance: tol }),
    }
}

fn run(path: &Path, opts: &tasks::RunOptions) -> ExitCode {
    if opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(EXIT_INVALID);
    }
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let scene = match scene::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let base = path.parent().unwrap_or(Path::new("."));
    let mut failed = false;
    for task in &scene.tasks {
        match tasks::run_task(&scene, task, opts) {
            Ok(out) => {
                let target = base.join(&task.output);
                let doc = serde_json::json!({ "task": task.name, "op": task.op_name, "result": out.json });
                let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
                text.push('\n');
                if let Err(e) = write_atomic(&target, &text) {
                    eprintln!("error: task {:?}: cannot write {}: {e}", task.name, target.display());
                    failed = true;
                    continue;
                }
                if let Some(csv) = out.csv {
                    let csv_path = target.with_extension("csv");
                    if let Err(e) = write_atomic(&csv_path, &csv) {
                        eprintln!("error: task {:?}: cannot write {}: {e}", task.name, csv_path.display());
                        failed = true;
                        continue;
                    }
                }
                eprintln!("task {:?}: ok -> {}", task.name, target.display());
            }
            Err(e) => {
                eprintln!("error: task {:?} ({}): {e}", task.name, task.op_name);
                failed = true;
            }
        }
    }
    if failed {
        ExitCode::from(EXIT_FAILURE)
    } else {
        ExitCode::SUCCESS
    }
}

/// Writes through a temporary sibling file and renames it into place.
fn write_atomic(target: &Path, contents: &str) -> std::io::Result<()> {
    let dir = target.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = target.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, target)
}

fn self_test(config: selftest::Config) -> ExitCode {
    if !selftest::CRITERIA.iter().any(|c| c.matches(config.filter.as_deref())) {
        eprintln!("error: no criterion matches {:?}", config.filter.unwrap_or_default());
        return ExitCode::from(EXIT_INVALID);
    }
    let outcomes = selftest::run(&config);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed (seed {})", outcomes.len(), config.seed);
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
