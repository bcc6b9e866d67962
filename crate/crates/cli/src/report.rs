use std::collections::BTreeMap;

use ogl_core::solver::IterationRecord;
use ogl_core::GroupStructure;
use serde::Serialize;

/// Machine-readable record of one command invocation.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub options: serde_json::Value,
    pub timings_ms: BTreeMap<String, f64>,
    pub telemetry: Telemetry,
    pub solution: SolutionSummary,
    pub version: &'static str,
}

/// Per-iteration arrays, all of equal length.
#[derive(Debug, Default, Serialize)]
pub struct Telemetry {
    pub objective: Vec<f64>,
    pub l: Vec<f64>,
    pub inner_iterations: Vec<usize>,
    pub zero_group_fraction: Vec<f64>,
    pub gap: Vec<f64>,
}

impl Telemetry {
    pub fn from_records(records: &[IterationRecord]) -> Self {
        let mut t = Self::default();
        for r in records {
            t.objective.push(r.objective);
            t.l.push(r.l);
            t.inner_iterations.push(r.inner_iterations_total);
            t.zero_group_fraction.push(r.zero_group_fraction);
            t.gap.push(r.gap);
        }
        t
    }
}

#[derive(Debug, Serialize)]
pub struct SolutionSummary {
    pub nonzeros: usize,
    /// Names when the group file has them, indices otherwise.
    pub nonzero_groups: Vec<String>,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SolutionSummary {
    pub fn new(
        x: &[f64],
        gs: &GroupStructure,
        objective: f64,
        converged: bool,
        iterations: usize,
    ) -> Self {
        let nonzero_groups = (0..gs.len())
            .filter(|&i| gs.group(i).iter().any(|&j| x[j] != 0.0))
            .map(|i| match gs.names() {
                Some(names) => names[i].clone(),
                None => i.to_string(),
            })
            .collect();
        Self {
            nonzeros: x.iter().filter(|v| **v != 0.0).count(),
            nonzero_groups,
            objective,
            converged,
            iterations,
        }
    }
}

pub struct Stopwatch {
    start: std::time::Instant,
    pub phases: BTreeMap<String, f64>,
}

impl Stopwatch {
    pub fn start() -> Self {
        Self {
            start: std::time::Instant::now(),
            phases: BTreeMap::new(),
        }
    }

    /// Records the time since the previous lap under `phase`.
    pub fn lap(&mut self, phase: &str) {
        let now = std::time::Instant::now();
        let ms = (now - self.start).as_secs_f64() * 1e3;
        self.phases.insert(phase.to_string(), ms);
        self.start = now;
    }
}
