//! End-to-end acceptance: every numbered criterion of the built-in
//! suite must pass, each within its wall-clock budget.
//!
//! Run with `--nocapture` to see the per-criterion lines even on
//! success.

use matlag::selftest;

#[test]
fn acceptance_criteria() {
    let results = selftest::run_all(selftest::DEFAULT_SEED).unwrap();
    assert_eq!(results.len(), selftest::COUNT);
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} [{status}] {}: {} ({} ms)",
            r.id, r.name, r.detail, r.millis
        );
    }
    assert!(
        selftest::all_passed(&results),
        "\n{}",
        selftest::format_table(&results)
    );
}
