//! Runs every acceptance criterion and prints one line each. Exits non-zero
//! if any criterion fails.

use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use pat_acceptance::criteria;

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (number, name, check) in criteria::all() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == number.to_string()) {
            continue;
        }
        ran += 1;
        let started = Instant::now();
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {number} ({name}) [{secs:.2}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {number} ({name}) [{secs:.2}s]: {detail}");
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
