//! One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.

use dpquiver::acceptance::{report_line, run_all, DEFAULT_SEED};

fn main() {
    let results = run_all(DEFAULT_SEED);
    for c in &results {
        println!("{}", report_line(c));
    }
    let failed = results.iter().filter(|c| !c.pass).count();
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
