//! Raw scalable test functions.
//!
//! Each function has minimum value 0 at its raw optimum and is defined for
//! every dimension n >= 2.

use std::f64::consts::PI;
use std::fmt;

/// Coarse difficulty class used for grouped aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subgroup {
    Separable,
    Moderate,
    IllConditioned,
    MultiModal,
}

impl Subgroup {
    pub fn label(self) -> &'static str {
        match self {
            Subgroup::Separable => "separable",
            Subgroup::Moderate => "moderate",
            Subgroup::IllConditioned => "ill-conditioned",
            Subgroup::MultiModal => "multi-modal",
        }
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Location of the raw minimum in the function's own coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RawOptimum {
    Origin,
    AllOnes,
}

impl RawOptimum {
    pub fn coordinate(self) -> f64 {
        match self {
            RawOptimum::Origin => 0.0,
            RawOptimum::AllOnes => 1.0,
        }
    }
}

/// How the optimum location of an instance is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Optimum strictly inside the box.
    Interior,
    /// Optimum on a vertex of the box.
    Vertex,
}

#[derive(Clone, Copy)]
pub struct RawFunction {
    pub id: u32,
    pub name: &'static str,
    pub subgroup: Subgroup,
    pub rotated: bool,
    pub optimum: RawOptimum,
    pub placement: Placement,
    formula: fn(&[f64]) -> f64,
}

impl RawFunction {
    pub fn eval(&self, z: &[f64]) -> f64 {
        (self.formula)(z)
    }

    /// The raw optimum point for dimension `n`.
    pub fn optimum_point(&self, n: usize) -> Vec<f64> {
        vec![self.optimum.coordinate(); n]
    }
}

impl fmt::Debug for RawFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RawFunction")
            .field("id", &self.id)
            .field("name", &self.name)
            .field("subgroup", &self.subgroup)
            .field("rotated", &self.rotated)
            .finish()
    }
}

static REGISTRY: [RawFunction; 8] = [
    RawFunction {
        id: 1,
        name: "sphere",
        subgroup: Subgroup::Separable,
        rotated: false,
        optimum: RawOptimum::Origin,
        placement: Placement::Interior,
        formula: sphere,
    },
    RawFunction {
        id: 2,
        name: "ellipsoid",
        subgroup: Subgroup::Separable,
        rotated: false,
        optimum: RawOptimum::Origin,
        placement: Placement::Interior,
        formula: ellipsoid,
    },
    RawFunction {
        id: 3,
        name: "rastrigin",
        subgroup: Subgroup::MultiModal,
        rotated: true,
        optimum: RawOptimum::Origin,
        placement: Placement::Interior,
        formula: rastrigin,
    },
    RawFunction {
        id: 4,
        name: "linear-slope",
        subgroup: Subgroup::Separable,
        rotated: false,
        optimum: RawOptimum::Origin,
        placement: Placement::Vertex,
        formula: linear_slope,
    },
    RawFunction {
        id: 5,
        name: "rosenbrock",
        subgroup: Subgroup::Moderate,
        rotated: true,
        optimum: RawOptimum::AllOnes,
        placement: Placement::Interior,
        formula: rosenbrock,
    },
    RawFunction {
        id: 6,
        name: "discus",
        subgroup: Subgroup::IllConditioned,
        rotated: true,
        optimum: RawOptimum::Origin,
        placement: Placement::Interior,
        formula: discus,
    },
    RawFunction {
        id: 7,
        name: "bent-cigar",
        subgroup: Subgroup::IllConditioned,
        rotated: true,
        optimum: RawOptimum::Origin,
        placement: Placement::Interior,
        formula: bent_cigar,
    },
    RawFunction {
        id: 8,
        name: "schaffers-f7",
        subgroup: Subgroup::MultiModal,
        rotated: true,
        optimum: RawOptimum::Origin,
        placement: Placement::Interior,
        formula: schaffers_f7,
    },
];

/// The built-in raw functions, ids 1 to 8.
pub fn raw_function_registry() -> &'static [RawFunction] {
    &REGISTRY
}

pub fn raw_function(id: u32) -> Option<&'static RawFunction> {
    REGISTRY.iter().find(|f| f.id == id)
}

/// Axis weight `10^(exponent * k / (n - 1))` for coordinate `k` (0-based).
fn axis_scale(exponent: f64, k: usize, n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    10f64.powf(exponent * k as f64 / (n - 1) as f64)
}

pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

/// Separable ellipsoid with condition number 10^6.
pub fn ellipsoid(z: &[f64]) -> f64 {
    let n = z.len();
    z.iter()
        .enumerate()
        .map(|(k, v)| axis_scale(6.0, k, n) * v * v)
        .sum()
}

pub fn rastrigin(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let cos_sum: f64 = z.iter().map(|v| (2.0 * PI * v).cos()).sum();
    10.0 * (n - cos_sum) + sphere(z)
}

/// Weighted L1 distance to the optimum. Inside the box, with the optimum on
/// a vertex, this is a linear function increasing away from that vertex.
pub fn linear_slope(z: &[f64]) -> f64 {
    let n = z.len();
    z.iter()
        .enumerate()
        .map(|(k, v)| axis_scale(1.0, k, n) * v.abs())
        .sum()
}

pub fn rosenbrock(z: &[f64]) -> f64 {
    z.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn discus(z: &[f64]) -> f64 {
    match z.split_first() {
        Some((first, rest)) => 1e6 * first * first + sphere(rest),
        None => 0.0,
    }
}

pub fn bent_cigar(z: &[f64]) -> f64 {
    match z.split_first() {
        Some((first, rest)) => first * first + 1e6 * sphere(rest),
        None => 0.0,
    }
}

pub fn schaffers_f7(z: &[f64]) -> f64 {
    if z.len() < 2 {
        return 0.0;
    }
    let pairs = (z.len() - 1) as f64;
    let total: f64 = z
        .windows(2)
        .map(|w| {
            let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
            let root = s.sqrt();
            root + root * (50.0 * s.powf(0.2)).sin().powi(2)
        })
        .sum();
    (total / pairs).powi(2)
}
