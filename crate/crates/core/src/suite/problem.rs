use std::fmt;

use crate::error::{Error, Result};

use super::functions::RawFunction;
use super::transform::{make_transform, InstanceTransform, BOX_HALF_WIDTH};

/// Most difficult target offset; a problem counts as solved below it.
pub const FINAL_TARGET_OFFSET: f64 = 1e-8;

/// The triple (n, i, j) plus its position in the owning suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProblemDescriptor {
    pub function_id: u32,
    pub dimension: usize,
    pub instance_id: u32,
    pub suite_index: usize,
}

impl fmt::Display for ProblemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f{} n={} j={} (#{})",
            self.function_id, self.dimension, self.instance_id, self.suite_index
        )
    }
}

/// The surface an optimizer sees: bounds, a counted evaluate, and the
/// stopping signal. The instance transform is not reachable from here.
pub trait Objective {
    fn dimension(&self) -> usize;
    fn lower_bounds(&self) -> &[f64];
    fn upper_bounds(&self) -> &[f64];
    fn evaluate(&mut self, x: &[f64]) -> Result<f64>;
    fn evaluations(&self) -> u64;
    fn final_target_hit(&self) -> bool;

    fn descriptor(&self) -> Option<ProblemDescriptor> {
        None
    }
}

/// One instanced test problem with its evaluation state.
///
/// `evaluate` returns `f_opt + raw(R (x - x_opt) + raw_opt)`. The tracked
/// offset is the raw value itself, which equals `f(x) - f_opt` without the
/// cancellation error of the subtraction.
#[derive(Debug, Clone)]
pub struct Problem {
    descriptor: ProblemDescriptor,
    function: &'static RawFunction,
    transform: InstanceTransform,
    lower_bounds: Vec<f64>,
    upper_bounds: Vec<f64>,
    initial_solution: Vec<f64>,
    evaluations: u64,
    best_observed_offset: f64,
    final_target_offset: f64,
    scratch: Vec<f64>,
}

impl Problem {
    pub(crate) fn new(
        suite_name: &str,
        function: &'static RawFunction,
        descriptor: ProblemDescriptor,
    ) -> Self {
        let n = descriptor.dimension;
        let transform = make_transform(suite_name, function, n, descriptor.instance_id);
        Self {
            descriptor,
            function,
            transform,
            lower_bounds: vec![-BOX_HALF_WIDTH; n],
            upper_bounds: vec![BOX_HALF_WIDTH; n],
            initial_solution: vec![0.0; n],
            evaluations: 0,
            best_observed_offset: f64::INFINITY,
            final_target_offset: FINAL_TARGET_OFFSET,
            scratch: vec![0.0; n],
        }
    }

    pub fn descriptor(&self) -> ProblemDescriptor {
        self.descriptor
    }

    pub fn function(&self) -> &'static RawFunction {
        self.function
    }

    pub fn dimension(&self) -> usize {
        self.descriptor.dimension
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower_bounds
    }

    pub fn upper_bounds(&self) -> &[f64] {
        &self.upper_bounds
    }

    pub fn initial_solution(&self) -> &[f64] {
        &self.initial_solution
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Smallest `f(x) - f_opt` seen so far; `+inf` before any evaluation.
    pub fn best_observed_offset(&self) -> f64 {
        self.best_observed_offset
    }

    pub fn final_target_offset(&self) -> f64 {
        self.final_target_offset
    }

    pub fn final_target_hit(&self) -> bool {
        self.best_observed_offset <= self.final_target_offset
    }

    /// Instance parameters, for verification and analysis. Optimizers work
    /// through [`Objective`] and never see this.
    pub fn transform(&self) -> &InstanceTransform {
        &self.transform
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluate_with_offset(x).map(|(f, _)| f)
    }

    /// Evaluates `x` and returns `(f(x), f(x) - f_opt)`.
    pub fn evaluate_with_offset(&mut self, x: &[f64]) -> Result<(f64, f64)> {
        let n = self.dimension();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        if let Some((position, &value)) = x.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteInput { position, value });
        }
        self.transform
            .apply(x, self.function.optimum.coordinate(), &mut self.scratch);
        let offset = self.function.eval(&self.scratch);
        self.evaluations += 1;
        if offset < self.best_observed_offset {
            self.best_observed_offset = offset;
        }
        Ok((self.transform.f_offset() + offset, offset))
    }
}

impl Objective for Problem {
    fn dimension(&self) -> usize {
        Problem::dimension(self)
    }

    fn lower_bounds(&self) -> &[f64] {
        Problem::lower_bounds(self)
    }

    fn upper_bounds(&self) -> &[f64] {
        Problem::upper_bounds(self)
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        Problem::evaluate(self, x)
    }

    fn evaluations(&self) -> u64 {
        Problem::evaluations(self)
    }

    fn final_target_hit(&self) -> bool {
        Problem::final_target_hit(self)
    }

    fn descriptor(&self) -> Option<ProblemDescriptor> {
        Some(self.descriptor)
    }
}
