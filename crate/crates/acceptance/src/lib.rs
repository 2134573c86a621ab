//! Acceptance criteria for the engine and the service. Each criterion runs
//! against a wall-clock budget and reports one line.

use std::time::{Duration, Instant};

pub mod model;
pub mod service;

pub struct Criterion {
    pub name: &'static str,
    pub budget: Duration,
    /// Returns a short summary on success.
    pub run: fn() -> Result<String, String>,
}

pub fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion { name: "oracle-equivalence", budget: secs(60), run: model::oracle_equivalence },
        Criterion { name: "incremental-correctness", budget: secs(120), run: model::incremental_correctness },
        Criterion { name: "centrality", budget: secs(60), run: model::centrality },
        Criterion { name: "parser-round-trips", budget: secs(60), run: model::parser_round_trips },
        Criterion { name: "generator-statistics", budget: secs(300), run: model::generator_statistics },
        Criterion { name: "partition-properties", budget: secs(60), run: model::partition_properties },
        Criterion { name: "service-contract", budget: secs(60), run: service::contract },
    ]
}

pub struct Report {
    pub name: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    pub detail: String,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Runs one criterion. A panic or an overrun budget is a failure.
pub fn evaluate(c: &Criterion) -> Report {
    let start = Instant::now();
    let result = std::panic::catch_unwind(c.run).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) if elapsed <= c.budget => (true, d),
        Ok(d) => (false, format!("{d}; over the {} s budget", c.budget.as_secs())),
        Err(e) => (false, e),
    };
    Report { name: c.name, passed, elapsed, detail }
}
