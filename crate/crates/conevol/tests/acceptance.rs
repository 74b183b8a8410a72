//! Full acceptance sweep. One printed line per criterion; the test fails
//! if any criterion fails, with the rendered report in the panic message.

use conevol::acceptance;
use conevol::tol::Tolerances;

#[test]
fn acceptance_criteria() {
    let report = acceptance::run_all(&Tolerances::DEFAULT);
    for c in &report.criteria {
        println!(
            "criterion {:>2}: {}  {}",
            c.index,
            if c.passed { "PASS" } else { "FAIL" },
            c.name
        );
    }
    if !report.all_passed {
        let detail = acceptance::report_json(&report).to_pretty_string();
        panic!("acceptance failed:\n{}", detail);
    }
}
