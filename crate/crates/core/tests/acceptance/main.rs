//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any of them fails.

#[path = "../common/mod.rs"]
mod common;

mod agreement;
mod bounds;
mod census;
mod classification;
mod embedding;
mod negation;
mod stratifier;
mod transfer;

use std::io::Write;
use std::time::{Duration, Instant};

/// Writes a line straight to stderr, past the test harness's capture.
pub fn report(line: &str) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

/// One criterion: its label, runtime limit and body. The body returns a
/// short summary or a failure description.
type Criterion = (&'static str, Duration, fn() -> Result<String, String>);

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("1 bound recursion", Duration::from_secs(1), bounds::run),
        ("2 level-1 census", Duration::from_secs(5), census::run),
        ("3 classification oracle", Duration::from_secs(120), classification::run),
        ("4 embedding suite", Duration::from_secs(60), embedding::run),
        ("5 exists-forall transfer", Duration::from_secs(120), transfer::run),
        ("6 abstract/concrete agreement", Duration::from_secs(600), agreement::run),
        ("7 stratifier oracle", Duration::from_secs(30), stratifier::run),
        ("8 negation coherence", Duration::from_secs(300), negation::run),
    ];
    let mut failed = Vec::new();
    for (name, limit, body) in criteria {
        let start = Instant::now();
        let result = body();
        let took = start.elapsed();
        let result = match result {
            Ok(s) if took > limit => Err(format!("{s}; took {took:.1?}, limit {limit:?}")),
            r => r,
        };
        match &result {
            Ok(s) => report(&format!("PASS criterion {name} ({took:.1?}): {s}")),
            Err(e) => {
                report(&format!("FAIL criterion {name} ({took:.1?}): {e}"));
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
