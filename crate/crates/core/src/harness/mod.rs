//! Budget-free experiment loop with independent restarts.
//!
//! For every problem of a suite the optimizer is started from the initial
//! solution and then restarted from random points until either the final
//! target is hit or `dimension * budget_multiplier` evaluations are spent.

mod optimizers;

pub use optimizers::{builtin_optimizers, optimizer, NelderMead, RandomSearch};

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::observer::{Observer, ObserverConfig};
use crate::rng::SplitMix64;
use crate::suite::{Objective, ProblemDescriptor, Suite, SuiteFilter};

/// A black-box minimizer.
pub trait Optimizer: Send + Sync {
    fn name(&self) -> &str;

    /// Minimizes `objective` starting from `start`. The objective refuses
    /// evaluations beyond `max_evaluations` with [`Error::BudgetExhausted`];
    /// returning that error counts as normal termination.
    fn minimize(
        &self,
        objective: &mut dyn Objective,
        start: &[f64],
        max_evaluations: u64,
        rng: &mut SplitMix64,
    ) -> Result<()>;
}

/// Caps the evaluations one optimizer run may spend.
pub struct Allowance<'a> {
    inner: &'a mut dyn Objective,
    limit: u64,
}

impl<'a> Allowance<'a> {
    /// Allows `max_evaluations` more evaluations of `inner`.
    pub fn new(inner: &'a mut dyn Objective, max_evaluations: u64) -> Self {
        let limit = inner.evaluations().saturating_add(max_evaluations);
        Self { inner, limit }
    }

    pub fn remaining(&self) -> u64 {
        self.limit.saturating_sub(self.inner.evaluations())
    }
}

impl Objective for Allowance<'_> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn lower_bounds(&self) -> &[f64] {
        self.inner.lower_bounds()
    }

    fn upper_bounds(&self) -> &[f64] {
        self.inner.upper_bounds()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        if self.inner.evaluations() >= self.limit {
            return Err(Error::BudgetExhausted(self.limit));
        }
        self.inner.evaluate(x)
    }

    fn evaluations(&self) -> u64 {
        self.inner.evaluations()
    }

    fn final_target_hit(&self) -> bool {
        self.inner.final_target_hit()
    }

    fn descriptor(&self) -> Option<ProblemDescriptor> {
        self.inner.descriptor()
    }
}

/// A plain function as an [`Objective`], for running optimizers outside a
/// suite. The stopping offset is measured against `f_opt`.
pub struct FunctionObjective<F> {
    function: F,
    lower: Vec<f64>,
    upper: Vec<f64>,
    f_opt: f64,
    target_offset: f64,
    evaluations: u64,
    best: f64,
}

impl<F: FnMut(&[f64]) -> f64> FunctionObjective<F> {
    pub fn new(function: F, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len(), "bound vectors differ in length");
        Self {
            function,
            lower,
            upper,
            f_opt: 0.0,
            target_offset: f64::NEG_INFINITY,
            evaluations: 0,
            best: f64::INFINITY,
        }
    }

    /// Makes `final_target_hit` report `best - f_opt <= target_offset`.
    pub fn with_target(mut self, f_opt: f64, target_offset: f64) -> Self {
        self.f_opt = f_opt;
        self.target_offset = target_offset;
        self
    }

    pub fn best(&self) -> f64 {
        self.best
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FunctionObjective<F> {
    fn dimension(&self) -> usize {
        self.lower.len()
    }

    fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        if x.len() != self.lower.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lower.len(),
                found: x.len(),
            });
        }
        let value = (self.function)(x);
        self.evaluations += 1;
        self.best = self.best.min(value);
        Ok(value)
    }

    fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn final_target_hit(&self) -> bool {
        self.best - self.f_opt <= self.target_offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite_name: String,
    pub filter: SuiteFilter,
    pub optimizer: String,
    /// Evaluations per problem = floor(dimension * budget_multiplier).
    pub budget_multiplier: f64,
    pub master_seed: u64,
    pub observer: ObserverConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.budget_multiplier.is_finite() || self.budget_multiplier < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "budget multiplier must be a finite number >= 1, got {}",
                self.budget_multiplier
            )));
        }
        Ok(())
    }

    pub fn problem_budget(&self, dimension: usize) -> u64 {
        (dimension as f64 * self.budget_multiplier).floor() as u64
    }
}

/// Restart point `lower + (u1 + u2) * (upper - lower) / 2` with independent
/// uniform vectors u1, u2; triangular on each coordinate, support the box.
pub fn restart_point(lower: &[f64], upper: &[f64], rng: &mut SplitMix64) -> Vec<f64> {
    let u1: Vec<f64> = lower.iter().map(|_| rng.next_f64()).collect();
    let u2: Vec<f64> = lower.iter().map(|_| rng.next_f64()).collect();
    lower
        .iter()
        .zip(upper)
        .zip(u1.iter().zip(&u2))
        .map(|((lo, hi), (a, b))| lo + (a + b) * (hi - lo) / 2.0)
        .collect()
}

/// Per-problem generator. Keyed by the index in the unfiltered suite, so
/// neither problem order nor the selected subset changes a problem's stream.
pub fn problem_rng(master_seed: u64, suite_index: usize) -> SplitMix64 {
    SplitMix64::substream(master_seed, suite_index as u64)
}

fn run_once(
    optimizer: &dyn Optimizer,
    objective: &mut dyn Objective,
    start: &[f64],
    allowance: u64,
    rng: &mut SplitMix64,
) -> Result<()> {
    let mut capped = Allowance::new(objective, allowance);
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
        optimizer.minimize(&mut capped, start, allowance, rng)
    }));
    match outcome {
        Ok(Ok(())) | Ok(Err(Error::BudgetExhausted(_))) => Ok(()),
        Ok(Err(e)) => Err(Error::Optimizer(e.to_string())),
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            Err(Error::Optimizer(format!("panicked: {message}")))
        }
    }
}

/// Runs the registered optimizer named in `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<PathBuf> {
    let optimizer = optimizer(&config.optimizer)?;
    run_experiment_with(config, optimizer.as_ref())
}

/// Runs `optimizer` on every problem of the configured suite and returns the
/// result folder. Optimizer failures are recorded as `error` metadata and
/// the sweep moves on to the next problem.
pub fn run_experiment_with(
    config: &ExperimentConfig,
    optimizer: &dyn Optimizer,
) -> Result<PathBuf> {
    config.validate()?;
    let suite = Suite::create(&config.suite_name, &config.filter)?;
    let full = Suite::create(&config.suite_name, &SuiteFilter::default())?;
    let observer = Observer::new(&config.observer, suite.spec())?;
    observer.append_metadata("optimizer", optimizer.name())?;
    observer.append_metadata("budget_multiplier", &config.budget_multiplier.to_string())?;
    observer.append_metadata("master_seed", &config.master_seed.to_string())?;

    for problem in suite.problems() {
        let descriptor = problem.descriptor();
        let budget = config.problem_budget(descriptor.dimension);
        let seed_index = full.spec().triple_to_index(
            descriptor.dimension,
            descriptor.function_id,
            descriptor.instance_id,
        )?;
        let mut rng = problem_rng(config.master_seed, seed_index);
        let mut start = problem.initial_solution().to_vec();
        let mut observed = observer.observe(problem)?;

        while !observed.final_target_hit() && observed.evaluations() < budget {
            let before = observed.evaluations();
            let allowance = budget - before;
            if let Err(e) = run_once(optimizer, &mut observed, &start, allowance, &mut rng) {
                observer.append_metadata("error", &format!("{descriptor}: {e}"))?;
                break;
            }
            if observed.evaluations() == before {
                observer.append_metadata(
                    "error",
                    &format!("{descriptor}: optimizer returned without evaluating"),
                )?;
                break;
            }
            let (lower, upper) = (observed.lower_bounds(), observed.upper_bounds());
            start = restart_point(lower, upper, &mut rng);
        }
        observed.finalize()?;
    }
    Ok(observer.folder().to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observer::parse_logs;
    use crate::suite::{make_transform, raw_function, BBOB_LITE};

    fn config(
        dir: &std::path::Path,
        optimizer: &str,
        multiplier: f64,
        filter: SuiteFilter,
    ) -> ExperimentConfig {
        ExperimentConfig {
            suite_name: BBOB_LITE.into(),
            filter,
            optimizer: optimizer.into(),
            budget_multiplier: multiplier,
            master_seed: 1,
            observer: ObserverConfig::new(dir.join("exp"), optimizer),
        }
    }

    fn dims(d: Vec<usize>) -> SuiteFilter {
        SuiteFilter {
            dimensions: Some(d),
            ..Default::default()
        }
    }

    #[test]
    fn budget_is_floor_of_product() {
        let dir = tempfile::tempdir().unwrap();
        let c = config(dir.path(), "random-search", 10.0, SuiteFilter::default());
        assert_eq!(c.problem_budget(5), 50);
        let c = config(dir.path(), "random-search", 2.5, SuiteFilter::default());
        assert_eq!(c.problem_budget(3), 7);
        let bad = config(dir.path(), "random-search", 0.5, SuiteFilter::default());
        assert!(matches!(run_experiment(&bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn budget_ceiling_holds() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["random-search", "nelder-mead"] {
            let c = config(&dir.path().join(name), name, 7.0, dims(vec![2, 3]));
            let folder = run_experiment(&c).unwrap();
            let data = parse_logs(&folder).unwrap();
            assert_eq!(data.logs.len(), 80);
            for log in &data.logs {
                assert!(log.budget_used <= c.problem_budget(log.descriptor.dimension));
            }
        }
    }

    /// Evaluates the known optimum of the problem it is given.
    struct Oracle {
        calls: std::sync::atomic::AtomicUsize,
    }

    impl Optimizer for Oracle {
        fn name(&self) -> &str {
            "oracle"
        }

        fn minimize(
            &self,
            objective: &mut dyn Objective,
            _: &[f64],
            _: u64,
            _: &mut SplitMix64,
        ) -> Result<()> {
            self.calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            let d = objective.descriptor().expect("suite problem");
            let f = raw_function(d.function_id).unwrap();
            let t = make_transform(BBOB_LITE, f, d.dimension, d.instance_id);
            objective.evaluate(t.shift())?;
            Ok(())
        }
    }

    #[test]
    fn oracle_needs_exactly_one_run() {
        let dir = tempfile::tempdir().unwrap();
        let oracle = Oracle {
            calls: Default::default(),
        };
        let c = config(dir.path(), "oracle", 100.0, dims(vec![2]));
        let folder = run_experiment_with(&c, &oracle).unwrap();
        assert_eq!(oracle.calls.into_inner(), 40);
        for log in parse_logs(&folder).unwrap().logs {
            assert_eq!(log.budget_used, 1);
            assert_eq!(log.events.len(), 1);
            assert_eq!(log.events[0].best_offset, 0.0);
        }
    }

    struct Faulty;

    impl Optimizer for Faulty {
        fn name(&self) -> &str {
            "faulty"
        }

        fn minimize(
            &self,
            objective: &mut dyn Objective,
            start: &[f64],
            _: u64,
            _: &mut SplitMix64,
        ) -> Result<()> {
            let d = objective.descriptor().unwrap();
            objective.evaluate(start)?;
            match d.function_id {
                2 => Err(Error::Optimizer("diverged".into())),
                3 => panic!("bad pairing"),
                _ => Ok(()),
            }
        }
    }

    #[test]
    fn optimizer_failures_are_recorded_and_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let filter = SuiteFilter {
            dimensions: Some(vec![2]),
            instance_ids: Some(vec![1]),
            ..Default::default()
        };
        let c = config(dir.path(), "faulty", 10.0, filter);
        let folder = run_experiment_with(&c, &Faulty).unwrap();
        let data = parse_logs(&folder).unwrap();
        assert_eq!(data.logs.len(), 8);
        let errors = &data.metadata["error"];
        assert_eq!(errors.len(), 2);
        assert!(errors[0].contains("diverged"));
        assert!(errors[1].contains("bad pairing"));
        // Failing problems stop after their first run; others use the budget.
        for log in &data.logs {
            let expected = if matches!(log.descriptor.function_id, 2 | 3) {
                1
            } else {
                20
            };
            assert_eq!(log.budget_used, expected, "{}", log.descriptor);
        }
    }

    #[test]
    fn restart_points_stay_in_box() {
        let mut rng = SplitMix64::new(5);
        let lower = [-5.0, -1.0, 0.0];
        let upper = [5.0, 1.0, 10.0];
        for _ in 0..10_000 {
            let x = restart_point(&lower, &upper, &mut rng);
            for k in 0..3 {
                assert!(x[k] >= lower[k] && x[k] <= upper[k]);
            }
        }
    }

    #[test]
    fn allowance_blocks_extra_evaluations() {
        let mut f = FunctionObjective::new(|x: &[f64]| x[0], vec![0.0], vec![1.0]);
        let mut capped = Allowance::new(&mut f, 2);
        capped.evaluate(&[0.5]).unwrap();
        capped.evaluate(&[0.5]).unwrap();
        assert_eq!(capped.remaining(), 0);
        assert!(matches!(
            capped.evaluate(&[0.5]),
            Err(Error::BudgetExhausted(2))
        ));
        assert_eq!(f.evaluations(), 2);
    }
}
