//! Single pass over the content criteria with timing. The full suite runs
//! everything three times to pin determinism; this is the fast loop for
//! iterating on one criterion.

use std::time::Instant;

use conevol::acceptance;
use conevol::tol::Tolerances;

fn main() {
    let start = Instant::now();
    let report = acceptance::run_once(&Tolerances::DEFAULT);
    for c in &report.criteria {
        println!(
            "criterion {:>2}: {}  {}",
            c.index,
            if c.passed { "PASS" } else { "FAIL" },
            c.name
        );
        if !c.passed {
            println!("{}", acceptance::row_json(c).to_pretty_string());
        }
    }
    println!("elapsed: {:.1}s", start.elapsed().as_secs_f64());
}
