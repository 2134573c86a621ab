use std::process::ExitCode;

use graphvis_acceptance::{criteria, evaluate};

fn main() -> ExitCode {
    // `cargo test -- <filter>` runs only the matching criteria.
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in criteria() {
        if !filters.is_empty() && !filters.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        let report = evaluate(&c);
        println!("{}", report.line());
        ran += 1;
        failed += usize::from(!report.passed);
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
