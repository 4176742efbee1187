//! Acceptance suite: one PASS/FAIL line per criterion, with its sub-checks.
//! Runs without the libtest harness so every line reaches the output.

use std::process::ExitCode;

use kanon::acceptance;

fn main() -> ExitCode {
    let (five, runs) = acceptance::criterion_5();
    let six = acceptance::criterion_6(&runs);
    let reports = [
        acceptance::criterion_1(),
        acceptance::criterion_2(),
        acceptance::criterion_3(),
        acceptance::criterion_4(),
        five,
        six,
        acceptance::criterion_7(),
        acceptance::criterion_8(),
        acceptance::criterion_9(),
    ];
    for r in &reports {
        println!("{r}");
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.id.to_string()).collect();
    println!("\nacceptance: {}/{} criteria passed", reports.len() - failed.len(), reports.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
