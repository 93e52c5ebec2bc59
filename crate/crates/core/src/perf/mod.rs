//! Runtime-based performance assessment.
//!
//! Run logs become [`RuntimeRecord`]s against a [`TargetSet`]; unsolved
//! records can be filled by simulated restarts, and records are summarized
//! per dimension as ECDF curves and runtime averages.

mod aggregate;
mod ecdf;
mod restarts;

pub use aggregate::{
    aggregate_suite, averages, group_records, stats_csv, AggregateStats, GroupKey, GroupSummary,
    Grouping, STATS_CSV_HEADER, STATS_CSV_SCHEMA,
};
pub use ecdf::{auto_budget_grid, ecdf, BudgetGrid, EcdfCurve, GRID_POINTS_PER_DECADE};
pub use restarts::{fill_with_simulated_restarts, restart_stream, simulated_restarts};

use crate::error::{Error, Result};
use crate::observer::RunLog;
use crate::suite::{ProblemDescriptor, FINAL_TARGET_OFFSET};

/// Strictly decreasing positive target offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    offsets: Vec<f64>,
}

impl TargetSet {
    pub fn new(offsets: Vec<f64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::InvalidTargets("no targets".into()));
        }
        if offsets.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            return Err(Error::InvalidTargets(
                "targets must be positive and finite".into(),
            ));
        }
        if offsets.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidTargets(
                "targets must be strictly decreasing".into(),
            ));
        }
        Ok(Self { offsets })
    }

    /// 51 targets `10^(2 - k/5)`, k = 0..=50: five per decade from 1e2 down
    /// to the final target 1e-8.
    pub fn standard() -> Self {
        let offsets = (0..=50i32)
            .map(|k| {
                let fifths = 10 - k;
                if fifths % 5 == 0 {
                    // Exact decimal for whole decades, e.g. 1e-8.
                    format!("1e{}", fifths / 5)
                        .parse()
                        .expect("decimal literal")
                } else {
                    10f64.powf(f64::from(fifths) / 5.0)
                }
            })
            .collect();
        let set = Self::new(offsets).expect("standard targets are valid");
        debug_assert_eq!(set.offsets.last().copied(), Some(FINAL_TARGET_OFFSET));
        set
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

impl Default for TargetSet {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Evaluations until the target was first reached.
    Success { runtime: u64 },
    /// Target never reached; the run used `budget_used` evaluations.
    Failure { budget_used: u64 },
}

impl Outcome {
    pub fn runtime(self) -> Option<u64> {
        match self {
            Outcome::Success { runtime } => Some(runtime),
            Outcome::Failure { .. } => None,
        }
    }

    pub fn is_success(self) -> bool {
        matches!(self, Outcome::Success { .. })
    }

    /// Runtime on success, consumed budget on failure.
    pub fn evaluations(self) -> u64 {
        match self {
            Outcome::Success { runtime } => runtime,
            Outcome::Failure { budget_used } => budget_used,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimeRecord {
    pub descriptor: ProblemDescriptor,
    pub target_offset: f64,
    pub outcome: Outcome,
    /// Success produced by simulated restarts rather than observed.
    pub simulated: bool,
}

impl RuntimeRecord {
    pub fn observed(descriptor: ProblemDescriptor, target_offset: f64, outcome: Outcome) -> Self {
        Self {
            descriptor,
            target_offset,
            outcome,
            simulated: false,
        }
    }
}

/// First-hitting runtimes of every log for every target, log-major in target
/// order.
pub fn extract_runtimes(logs: &[RunLog], targets: &TargetSet) -> Vec<RuntimeRecord> {
    let mut records = Vec::with_capacity(logs.len() * targets.len());
    for log in logs {
        for &target in targets.offsets() {
            // Offsets strictly decrease along the events.
            let hit = log.events.partition_point(|e| e.best_offset > target);
            let outcome = match log.events.get(hit) {
                Some(event) => Outcome::Success {
                    runtime: event.evaluations,
                },
                None => Outcome::Failure {
                    budget_used: log.budget_used,
                },
            };
            records.push(RuntimeRecord::observed(log.descriptor, target, outcome));
        }
    }
    records
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub fn descriptor(function_id: u32, dimension: usize, instance_id: u32) -> ProblemDescriptor {
        ProblemDescriptor {
            function_id,
            dimension,
            instance_id,
            suite_index: 0,
        }
    }

    pub fn success(dimension: usize, runtime: u64) -> RuntimeRecord {
        RuntimeRecord::observed(
            descriptor(1, dimension, 1),
            1.0,
            Outcome::Success { runtime },
        )
    }

    pub fn failure(dimension: usize, budget_used: u64) -> RuntimeRecord {
        RuntimeRecord::observed(
            descriptor(1, dimension, 1),
            1.0,
            Outcome::Failure { budget_used },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::descriptor;
    use super::*;
    use crate::observer::Event;
    use proptest::prelude::*;

    fn example_log() -> RunLog {
        RunLog {
            descriptor: descriptor(1, 2, 1),
            events: vec![
                Event {
                    evaluations: 1,
                    best_offset: 5.0,
                },
                Event {
                    evaluations: 10,
                    best_offset: 0.9,
                },
                Event {
                    evaluations: 40,
                    best_offset: 1e-3,
                },
            ],
            budget_used: 60,
        }
    }

    /// Brute-force oracle: first event (in order) at or below the target.
    fn scan(log: &RunLog, target: f64) -> Outcome {
        for e in &log.events {
            if e.best_offset <= target {
                return Outcome::Success {
                    runtime: e.evaluations,
                };
            }
        }
        Outcome::Failure {
            budget_used: log.budget_used,
        }
    }

    #[test]
    fn standard_targets() {
        let t = TargetSet::standard();
        assert_eq!(t.len(), 51);
        assert_eq!(t.offsets()[0], 100.0);
        assert_eq!(t.offsets()[5], 10.0);
        assert_eq!(t.offsets()[50], 1e-8);
        assert_eq!(t.offsets()[50], FINAL_TARGET_OFFSET);
        assert!((t.offsets()[1] - 10f64.powf(1.8)).abs() < 1e-12);
    }

    #[test]
    fn target_validation() {
        assert!(TargetSet::new(vec![]).is_err());
        assert!(TargetSet::new(vec![1.0, 1.0]).is_err());
        assert!(TargetSet::new(vec![1.0, 2.0]).is_err());
        assert!(TargetSet::new(vec![1.0, 0.0]).is_err());
        assert!(TargetSet::new(vec![10.0, 1.0]).is_ok());
    }

    #[test]
    fn extraction_examples() {
        let log = example_log();
        let targets = TargetSet::new(vec![10.0, 1.0, 1e-2]).unwrap();
        let records = extract_runtimes(std::slice::from_ref(&log), &targets);
        let runtimes: Vec<Option<u64>> = records.iter().map(|r| r.outcome.runtime()).collect();
        assert_eq!(runtimes, vec![Some(1), Some(10), Some(40)]);
        for r in &records {
            assert_eq!(r.outcome, scan(&log, r.target_offset));
        }
    }

    #[test]
    fn empty_log_fails_with_budget() {
        let log = RunLog {
            descriptor: descriptor(1, 2, 1),
            events: vec![],
            budget_used: 500,
        };
        let records = extract_runtimes(&[log], &TargetSet::standard());
        assert!(records
            .iter()
            .all(|r| r.outcome == Outcome::Failure { budget_used: 500 }));
    }

    #[test]
    fn exact_target_counts_as_reached() {
        let log = RunLog {
            descriptor: descriptor(1, 2, 1),
            events: vec![Event {
                evaluations: 3,
                best_offset: 1.0,
            }],
            budget_used: 3,
        };
        let records = extract_runtimes(&[log], &TargetSet::new(vec![1.0]).unwrap());
        assert_eq!(records[0].outcome, Outcome::Success { runtime: 3 });
    }

    prop_compose! {
        fn monotone_log()(steps in prop::collection::vec((1u64..50, 0.01f64..0.99), 0..30),
                          start in -3.0f64..3.0, tail in 0u64..100) -> RunLog {
            let mut evals = 0;
            let mut offset = 10f64.powf(start);
            let mut events = Vec::new();
            for (gap, shrink) in steps {
                evals += gap;
                offset *= shrink;
                events.push(Event { evaluations: evals, best_offset: offset });
            }
            RunLog { descriptor: descriptor(1, 2, 1), events, budget_used: evals + tail }
        }
    }

    proptest! {
        #[test]
        fn extraction_matches_scan(log in monotone_log()) {
            let targets = TargetSet::standard();
            let records = extract_runtimes(std::slice::from_ref(&log), &targets);
            prop_assert_eq!(records.len(), 51);
            let mut previous = 0;
            for r in &records {
                prop_assert_eq!(r.outcome, scan(&log, r.target_offset));
                if let Some(rt) = r.outcome.runtime() {
                    prop_assert!(rt >= previous);
                    prop_assert!(rt <= log.budget_used);
                    previous = rt;
                }
            }
        }
    }
}
