// SPDX-License-Identifier: Apache-2.0

//! Runner for acceptance criteria: each criterion prints one PASS or FAIL line.

use std::time::{Duration, Instant};

/// Outcome of one criterion: a short summary on success, the reason on failure.
pub type Outcome = Result<String, String>;

pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub time_limit: Option<Duration>,
    pub check: fn() -> Outcome,
}

/// Runs every criterion in order and returns the number of failures.
pub fn run(criteria: &[Criterion]) -> usize {
    let mut failed = 0;
    for c in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.time_limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:.2?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(summary) => println!("PASS criterion {:>2}: {} ({summary}; {elapsed:.2?})", c.id, c.title),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {} ({reason}; {elapsed:.2?})", c.id, c.title);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    failed
}
