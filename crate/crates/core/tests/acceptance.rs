//! Runs every acceptance criterion at its stated tolerance and prints one
//! line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;

use filtra::selftest::{run, Config, CRITERIA};

fn main() -> ExitCode {
    let outcomes = run(&Config::default());
    println!();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed", CRITERIA.len());
    if outcomes.len() == CRITERIA.len() && passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
