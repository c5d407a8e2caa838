use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use limitgen::game::adversary::Interactive;
use limitgen::game::{write_csv, GameTrace};
use limitgen::generators::GENERATOR_NAMES;
use limitgen::scenario::{Scenario, ADVERSARIES, FAMILIES, PROMPT_STRATEGIES};
use limitgen::suite::{self, all_passed, Check};

#[derive(Parser)]
#[command(
    name = "limitgen",
    version,
    about = "Language generation in the limit: games, generators and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one or more scenario files and write their traces.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        /// Output directory; one subdirectory per scenario when several are given.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Iteration ceiling for limit-style generators, id ceiling for closure.
        #[arg(long)]
        ceiling: Option<u64>,
        /// Read the adversary's elements from stdin, one per line.
        #[arg(long)]
        interactive_adversary: bool,
    },
    /// Run a batch of checks and print one line per check.
    Suite {
        name: SuiteName,
        /// Random collections in the invariant sweep.
        #[arg(long, default_value_t = suite::ACCEPTANCE_INSTANCES)]
        instances: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// List built-in collection families, generators, adversaries and prompt strategies.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Invariants,
    Acceptance,
    Impossibility,
}

fn write_outputs(dir: &Path, trace: &GameTrace) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut csv = BufWriter::new(File::create(dir.join("trace.csv"))?);
    write_csv(trace, &mut csv)?;
    csv.flush()?;
    fs::write(
        dir.join("trace.json"),
        serde_json::to_string_pretty(trace)? + "\n",
    )?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&trace.run_summary())? + "\n",
    )?;
    Ok(())
}

struct Overrides {
    steps: Option<usize>,
    seed: Option<u64>,
    ceiling: Option<u64>,
    interactive: bool,
}

fn run_one(path: &Path, dir: &Path, o: &Overrides) -> Result<GameTrace> {
    let (mut scenario, base) =
        Scenario::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(s) = o.steps {
        scenario.steps = s;
    }
    if let Some(s) = o.seed {
        scenario.seed = s;
    }
    if o.ceiling.is_some() {
        scenario.ceiling = o.ceiling;
    }
    let mut prepared = scenario
        .build(Some(&base))
        .with_context(|| format!("building {}", path.display()))?;
    if o.interactive {
        eprintln!(
            "adversary for {}: enter one element per line",
            prepared
                .knowledge
                .target()
                .describe(prepared.knowledge.collection().as_ref())
        );
        prepared.adversary = Box::new(Interactive::new(
            prepared.knowledge.clone(),
            Box::new(BufReader::new(io::stdin())),
            Box::new(io::stderr()),
        ));
    }
    let trace = prepared
        .run()
        .with_context(|| format!("running {}", path.display()))?;
    write_outputs(dir, &trace)?;
    Ok(trace)
}

fn cmd_run(scenarios: &[PathBuf], out: &Path, o: Overrides) -> Result<()> {
    if o.interactive && scenarios.len() > 1 {
        bail!("--interactive-adversary takes a single scenario");
    }
    let dirs: Vec<PathBuf> = if scenarios.len() == 1 {
        vec![out.to_path_buf()]
    } else {
        scenarios
            .iter()
            .map(|p| out.join(p.file_stem().unwrap_or_default()))
            .collect()
    };
    let results: Vec<Result<GameTrace>> = scenarios
        .par_iter()
        .zip(dirs.par_iter())
        .map(|(p, d)| run_one(p, d, &o))
        .collect();
    let mut failed = false;
    for ((path, dir), r) in scenarios.iter().zip(&dirs).zip(results) {
        match r {
            Ok(trace) => {
                let s = trace.run_summary();
                let t_hat = s.t_hat.map_or("not reached".to_string(), |t| t.to_string());
                println!(
                    "{}: {} steps, {} valid, t̂ {t_hat}, {} membership queries -> {}",
                    s.scenario,
                    s.steps_run,
                    s.valid_steps,
                    s.membership_queries,
                    dir.display()
                );
                if let Some(reason) = &s.aborted {
                    println!("  adversary stopped: {reason}");
                }
            }
            Err(e) => {
                failed = true;
                eprintln!("{}: {e:#}", path.display());
            }
        }
    }
    if failed {
        bail!("some scenarios failed");
    }
    Ok(())
}

fn print_checks(checks: &[Check]) -> bool {
    for c in checks {
        println!("{c}");
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("{passed} of {} checks passed", checks.len());
    all_passed(checks)
}

fn cmd_suite(name: SuiteName, instances: usize, seed: u64) -> Result<bool> {
    Ok(match name {
        SuiteName::Invariants => print_checks(&suite::invariants(instances, seed)),
        SuiteName::Acceptance => {
            let checks: Vec<Check> = suite::ACCEPTANCE.par_iter().map(|f| f()).collect();
            print_checks(&checks)
        }
        SuiteName::Impossibility => {
            let report = suite::impossibility()?;
            print!("{report}");
            true
        }
    })
}

fn cmd_list() {
    let sections: [(&str, &[&str]); 4] = [
        ("families", FAMILIES),
        ("generators", GENERATOR_NAMES),
        ("adversaries", ADVERSARIES),
        ("prompts", PROMPT_STRATEGIES),
    ];
    for (title, names) in sections {
        println!("{title}:");
        for n in names {
            println!("  {n}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            scenarios,
            out,
            steps,
            seed,
            ceiling,
            interactive_adversary,
        } => cmd_run(
            &scenarios,
            &out,
            Overrides {
                steps,
                seed,
                ceiling,
                interactive: interactive_adversary,
            },
        )
        .map(|()| true),
        Command::Suite {
            name,
            instances,
            seed,
        } => cmd_suite(name, instances, seed),
        Command::List => {
            cmd_list();
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
