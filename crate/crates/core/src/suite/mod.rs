//! Test functions, instances, problems and suites.
//!
//! A suite is the product of function ids, dimensions and instance ids.
//! Problems are enumerated dimension-major, then by function, then by
//! instance, and `suite_index` is the position in that order.

mod functions;
mod problem;
mod transform;

pub use functions::{
    raw_function, raw_function_registry, Placement, RawFunction, RawOptimum, Subgroup,
};
pub use problem::{Objective, Problem, ProblemDescriptor, FINAL_TARGET_OFFSET};
pub use transform::{
    instance_seed, make_transform, InstanceTransform, BOX_HALF_WIDTH, SHIFT_HALF_WIDTH,
};

use crate::error::{Error, Result};

pub const BBOB_LITE: &str = "bbob-lite";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSpec {
    name: String,
    function_ids: Vec<u32>,
    dimensions: Vec<usize>,
    instance_ids: Vec<u32>,
}

fn check_axis<T: Copy + PartialOrd + Into<u64>>(what: &str, values: &[T], min: u64) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSuiteSpec(format!("{what} list is empty")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSuiteSpec(format!(
            "{what} list must be strictly increasing"
        )));
    }
    if values[0].into() < min {
        return Err(Error::InvalidSuiteSpec(format!(
            "{what} values must be >= {min}"
        )));
    }
    Ok(())
}

impl SuiteSpec {
    pub fn new(
        name: impl Into<String>,
        function_ids: Vec<u32>,
        dimensions: Vec<usize>,
        instance_ids: Vec<u32>,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSuiteSpec(format!("bad suite name `{name}`")));
        }
        check_axis("function id", &function_ids, 1)?;
        let dims64: Vec<u64> = dimensions.iter().map(|&d| d as u64).collect();
        check_axis("dimension", &dims64, 2)?;
        check_axis("instance id", &instance_ids, 1)?;
        Ok(Self {
            name,
            function_ids,
            dimensions,
            instance_ids,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn function_ids(&self) -> &[u32] {
        &self.function_ids
    }

    pub fn dimensions(&self) -> &[usize] {
        &self.dimensions
    }

    pub fn instance_ids(&self) -> &[u32] {
        &self.instance_ids
    }

    pub fn problem_count(&self) -> usize {
        self.function_ids.len() * self.dimensions.len() * self.instance_ids.len()
    }

    pub fn index_to_triple(&self, suite_index: usize) -> Result<ProblemDescriptor> {
        let len = self.problem_count();
        if suite_index >= len {
            return Err(Error::IndexOutOfRange {
                index: suite_index,
                len,
            });
        }
        let n_inst = self.instance_ids.len();
        let n_func = self.function_ids.len();
        let instance_pos = suite_index % n_inst;
        let function_pos = (suite_index / n_inst) % n_func;
        let dimension_pos = suite_index / (n_inst * n_func);
        Ok(ProblemDescriptor {
            function_id: self.function_ids[function_pos],
            dimension: self.dimensions[dimension_pos],
            instance_id: self.instance_ids[instance_pos],
            suite_index,
        })
    }

    pub fn triple_to_index(
        &self,
        dimension: usize,
        function_id: u32,
        instance_id: u32,
    ) -> Result<usize> {
        let missing = |kind, value| Error::NotInSuite {
            suite: self.name.clone(),
            kind,
            value,
        };
        let dimension_pos = self
            .dimensions
            .binary_search(&dimension)
            .map_err(|_| missing("dimension", dimension as u64))?;
        let function_pos = self
            .function_ids
            .binary_search(&function_id)
            .map_err(|_| missing("function", u64::from(function_id)))?;
        let instance_pos = self
            .instance_ids
            .binary_search(&instance_id)
            .map_err(|_| missing("instance", u64::from(instance_id)))?;
        Ok(
            (dimension_pos * self.function_ids.len() + function_pos) * self.instance_ids.len()
                + instance_pos,
        )
    }
}

/// Optional restrictions of a registered suite.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteFilter {
    pub function_ids: Option<Vec<u32>>,
    pub dimensions: Option<Vec<usize>>,
    pub instance_ids: Option<Vec<u32>>,
}

impl SuiteFilter {
    pub fn is_empty(&self) -> bool {
        self.function_ids.is_none() && self.dimensions.is_none() && self.instance_ids.is_none()
    }
}

fn restrict<T: Copy + Ord + Into<u64>>(
    suite: &str,
    kind: &'static str,
    defaults: &[T],
    filter: Option<&Vec<T>>,
) -> Result<Vec<T>> {
    let Some(wanted) = filter else {
        return Ok(defaults.to_vec());
    };
    let mut wanted = wanted.clone();
    wanted.sort_unstable();
    wanted.dedup();
    if wanted.is_empty() {
        return Err(Error::EmptyFilter);
    }
    if let Some(&bad) = wanted.iter().find(|v| !defaults.contains(v)) {
        return Err(Error::NotInSuite {
            suite: suite.to_string(),
            kind,
            value: bad.into(),
        });
    }
    Ok(wanted)
}

/// Specifications of all registered suites.
pub fn registered_suites() -> Vec<SuiteSpec> {
    vec![SuiteSpec::new(
        BBOB_LITE,
        (1..=8).collect(),
        vec![2, 3, 5, 10],
        (1..=5).collect(),
    )
    .expect("built-in suite is valid")]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suite {
    spec: SuiteSpec,
}

impl Suite {
    /// Looks up a registered suite and applies `filter`.
    pub fn create(name: &str, filter: &SuiteFilter) -> Result<Self> {
        let defaults = registered_suites()
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
        let dims64: Vec<u64> = defaults.dimensions.iter().map(|&d| d as u64).collect();
        let dim_filter: Option<Vec<u64>> = filter
            .dimensions
            .as_ref()
            .map(|d| d.iter().map(|&v| v as u64).collect());
        let dimensions = restrict(name, "dimension", &dims64, dim_filter.as_ref())?
            .into_iter()
            .map(|d| d as usize)
            .collect();
        let spec = SuiteSpec::new(
            name,
            restrict(
                name,
                "function",
                &defaults.function_ids,
                filter.function_ids.as_ref(),
            )?,
            dimensions,
            restrict(
                name,
                "instance",
                &defaults.instance_ids,
                filter.instance_ids.as_ref(),
            )?,
        )?;
        Self::from_spec(spec)
    }

    /// Builds a suite from an explicit specification. Every function id must
    /// be in the raw-function registry.
    pub fn from_spec(spec: SuiteSpec) -> Result<Self> {
        if let Some(&bad) = spec
            .function_ids
            .iter()
            .find(|&&i| raw_function(i).is_none())
        {
            return Err(Error::UnknownFunction(bad));
        }
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &SuiteSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn len(&self) -> usize {
        self.spec.problem_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn problem(&self, suite_index: usize) -> Result<Problem> {
        let descriptor = self.spec.index_to_triple(suite_index)?;
        let function = raw_function(descriptor.function_id)
            .ok_or(Error::UnknownFunction(descriptor.function_id))?;
        Ok(Problem::new(&self.spec.name, function, descriptor))
    }

    pub fn problems(&self) -> impl Iterator<Item = Problem> + '_ {
        (0..self.len()).map(|idx| self.problem(idx).expect("index within suite"))
    }
}
