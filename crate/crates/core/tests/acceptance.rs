//! One line per acceptance criterion; exits nonzero if any line fails.

use std::process::ExitCode;
use std::time::Instant;

use limitgen::suite::ACCEPTANCE;

fn main() -> ExitCode {
    let started = Instant::now();
    let mut failed = Vec::new();
    for (n, check) in ACCEPTANCE.iter().enumerate() {
        let t = Instant::now();
        let c = check();
        println!("[{}] {c}  ({:.1}s)", n + 1, t.elapsed().as_secs_f64());
        if !c.passed {
            failed.push(format!("{}: {}", n + 1, c.name));
        }
    }
    println!(
        "acceptance: {} of {} passed in {:.1}s",
        ACCEPTANCE.len() - failed.len(),
        ACCEPTANCE.len(),
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
