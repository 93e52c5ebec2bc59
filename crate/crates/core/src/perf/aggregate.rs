//! Per-dimension pooling of runtime records and summary statistics.

use std::collections::BTreeMap;
use std::fmt;

use crate::cfmt::format_g;
use crate::error::Result;
use crate::suite::raw_function;

use super::ecdf::{ecdf, BudgetGrid, EcdfCurve};
use super::RuntimeRecord;

/// Averages over one pool of records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub record_count: usize,
    pub success_count: usize,
    /// Mean runtime of the successes; `None` without successes.
    pub arithmetic_mean: Option<f64>,
    /// `exp(mean(ln runtime))` of the successes; `None` without successes.
    pub geometric_mean: Option<f64>,
    /// Total evaluations of all records over the number of successes;
    /// `+inf` without successes.
    pub expected_runtime: f64,
}

pub fn averages(records: &[RuntimeRecord]) -> AggregateStats {
    let runtimes: Vec<f64> = records
        .iter()
        .filter_map(|r| r.outcome.runtime())
        .map(|rt| rt as f64)
        .collect();
    let total_evaluations: f64 = records.iter().map(|r| r.outcome.evaluations() as f64).sum();
    let successes = runtimes.len();
    let (arithmetic_mean, geometric_mean, expected_runtime) = if successes == 0 {
        (None, None, f64::INFINITY)
    } else {
        let count = successes as f64;
        let arithmetic = runtimes.iter().sum::<f64>() / count;
        // Base-10 logs keep powers of ten exact.
        let log_mean = runtimes.iter().map(|rt| rt.log10()).sum::<f64>() / count;
        let geometric = 10f64.powf(log_mean).min(arithmetic);
        (Some(arithmetic), Some(geometric), total_evaluations / count)
    };
    AggregateStats {
        record_count: records.len(),
        success_count: successes,
        arithmetic_mean,
        geometric_mean,
        expected_runtime,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grouping {
    Function,
    Subgroup,
    Suite,
}

impl Grouping {
    pub const ALL: [Grouping; 3] = [Grouping::Function, Grouping::Subgroup, Grouping::Suite];

    pub fn label(self) -> &'static str {
        match self {
            Grouping::Function => "function",
            Grouping::Subgroup => "subgroup",
            Grouping::Suite => "suite",
        }
    }
}

impl fmt::Display for Grouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Group identity; ordered by grouping, dimension, then group ordinal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub grouping: Grouping,
    pub dimension: usize,
    pub ordinal: u32,
    pub label: String,
}

const UNKNOWN_SUBGROUP_ORDINAL: u32 = 99;

fn group_of(grouping: Grouping, function_id: u32) -> (u32, String) {
    match grouping {
        Grouping::Function => (function_id, format!("f{function_id}")),
        Grouping::Subgroup => match raw_function(function_id) {
            Some(f) => (f.subgroup as u32, f.subgroup.label().to_string()),
            None => (UNKNOWN_SUBGROUP_ORDINAL, "unknown".to_string()),
        },
        Grouping::Suite => (0, "all".to_string()),
    }
}

/// Pools records by group and dimension. Dimensions are never pooled.
pub fn group_records(
    records: &[RuntimeRecord],
    grouping: Grouping,
) -> BTreeMap<GroupKey, Vec<RuntimeRecord>> {
    let mut groups: BTreeMap<GroupKey, Vec<RuntimeRecord>> = BTreeMap::new();
    for r in records {
        let (ordinal, label) = group_of(grouping, r.descriptor.function_id);
        let key = GroupKey {
            grouping,
            dimension: r.descriptor.dimension,
            ordinal,
            label,
        };
        groups.entry(key).or_default().push(*r);
    }
    groups
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub key: GroupKey,
    pub curve: EcdfCurve,
    pub stats: AggregateStats,
}

/// ECDF (auto grid) and averages for every (group, dimension) pool.
pub fn aggregate_suite(records: &[RuntimeRecord], grouping: Grouping) -> Result<Vec<GroupSummary>> {
    group_records(records, grouping)
        .into_iter()
        .map(|(key, pool)| {
            Ok(GroupSummary {
                curve: ecdf(&pool, &BudgetGrid::Auto)?,
                stats: averages(&pool),
                key,
            })
        })
        .collect()
}

pub const STATS_CSV_SCHEMA: u32 = 1;
pub const STATS_CSV_HEADER: &str = "schema_version,grouping,group,dimension,record_count,\
success_count,arithmetic_mean_runtime,geometric_mean_runtime,expected_runtime";

/// One row per (group, dimension); floats `%.6g`, undefined means `nan`.
pub fn stats_csv<'a>(rows: impl IntoIterator<Item = (&'a GroupKey, &'a AggregateStats)>) -> String {
    let mut out = String::from(STATS_CSV_HEADER);
    out.push('\n');
    for (key, stats) in rows {
        out.push_str(&format!(
            "{STATS_CSV_SCHEMA},{},{},{},{},{},{},{},{}\n",
            key.grouping,
            key.label,
            key.dimension,
            stats.record_count,
            stats.success_count,
            format_g(stats.arithmetic_mean.unwrap_or(f64::NAN), 6),
            format_g(stats.geometric_mean.unwrap_or(f64::NAN), 6),
            format_g(stats.expected_runtime, 6),
        ));
    }
    out
}
