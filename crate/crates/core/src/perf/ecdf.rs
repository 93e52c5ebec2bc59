//! Empirical runtime distributions (data profiles) on an
//! evaluations-per-dimension axis.

use crate::error::{Error, Result};

use super::RuntimeRecord;

pub const GRID_POINTS_PER_DECADE: i32 = 20;

/// Proportion of records solved within each budget.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfCurve {
    budgets: Vec<f64>,
    proportions: Vec<f64>,
}

impl EcdfCurve {
    pub fn new(budgets: Vec<f64>, proportions: Vec<f64>) -> Result<Self> {
        if budgets.is_empty() {
            return Err(Error::InvalidCurve("no points".into()));
        }
        if budgets.len() != proportions.len() {
            return Err(Error::InvalidCurve(format!(
                "{} budgets but {} proportions",
                budgets.len(),
                proportions.len()
            )));
        }
        if budgets.iter().any(|&b| !(b.is_finite() && b > 0.0)) {
            return Err(Error::InvalidCurve(
                "budgets must be positive and finite".into(),
            ));
        }
        if budgets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurve("budgets must be increasing".into()));
        }
        if proportions.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidCurve("proportions must lie in [0, 1]".into()));
        }
        if proportions.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidCurve(
                "proportions must be non-decreasing".into(),
            ));
        }
        Ok(Self {
            budgets,
            proportions,
        })
    }

    pub fn budgets(&self) -> &[f64] {
        &self.budgets
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    pub fn final_proportion(&self) -> f64 {
        *self.proportions.last().expect("curves are non-empty")
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.budgets
            .iter()
            .copied()
            .zip(self.proportions.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BudgetGrid {
    /// Log-spaced, [`GRID_POINTS_PER_DECADE`] per decade, covering the
    /// observed successful runtimes per dimension.
    Auto,
    Explicit(Vec<f64>),
}

/// Log grid `10^(k/20)` from below `min` to at least `max`.
pub fn auto_budget_grid(min: f64, max: f64) -> Vec<f64> {
    let per = f64::from(GRID_POINTS_PER_DECADE);
    let lo = (min.log10() * per).floor() as i32;
    let hi = ((max.log10() * per).ceil() as i32).max(lo);
    let mut grid: Vec<f64> = (lo..=hi).map(|k| 10f64.powf(f64::from(k) / per)).collect();
    // Guard the ends against round-off in log10/powf.
    if let Some(first) = grid.first_mut() {
        *first = first.min(min);
    }
    if let Some(last) = grid.last_mut() {
        *last = last.max(max);
    }
    grid.dedup();
    grid
}

/// ECDF of `records`, which must all share one dimension.
pub fn ecdf(records: &[RuntimeRecord], grid: &BudgetGrid) -> Result<EcdfCurve> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let dimension = first.descriptor.dimension;
    if let Some(other) = records.iter().find(|r| r.descriptor.dimension != dimension) {
        return Err(Error::MixedDimensions(
            dimension,
            other.descriptor.dimension,
        ));
    }
    let n = dimension as f64;
    let mut solved: Vec<f64> = records
        .iter()
        .filter_map(|r| r.outcome.runtime())
        .map(|rt| rt as f64 / n)
        .collect();
    solved.sort_by(f64::total_cmp);

    let budgets = match grid {
        BudgetGrid::Explicit(b) => b.clone(),
        BudgetGrid::Auto => {
            let positive = |v: &f64| *v > 0.0;
            let spread: Vec<f64> = if solved.iter().any(positive) {
                solved.iter().copied().filter(positive).collect()
            } else {
                records
                    .iter()
                    .map(|r| r.outcome.evaluations() as f64 / n)
                    .filter(positive)
                    .collect()
            };
            match (
                spread.iter().copied().reduce(f64::min),
                spread.iter().copied().reduce(f64::max),
            ) {
                (Some(lo), Some(hi)) => auto_budget_grid(lo, hi),
                _ => vec![1.0],
            }
        }
    };
    let total = records.len() as f64;
    let proportions = budgets
        .iter()
        .map(|&b| solved.partition_point(|&rt| rt <= b) as f64 / total)
        .collect();
    EcdfCurve::new(budgets, proportions)
}
