//! Acceptance gate: runs every criterion and prints one pass/fail line each.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use norm1_cli::selftest::{run, Level};

#[test]
fn acceptance() {
    let results = run(Level::Full);
    assert_eq!(results.len(), 8, "all eight criteria must run");
    let mut failed = Vec::new();
    for r in &results {
        println!("{}", r.line());
        if !r.pass {
            failed.push(r.name.clone());
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
