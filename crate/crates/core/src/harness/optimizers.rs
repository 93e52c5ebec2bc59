//! Baseline optimizers.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::suite::Objective;

use super::Optimizer;

pub fn builtin_optimizers() -> Vec<Box<dyn Optimizer>> {
    vec![Box::new(RandomSearch), Box::new(NelderMead::default())]
}

pub fn optimizer(name: &str) -> Result<Box<dyn Optimizer>> {
    builtin_optimizers()
        .into_iter()
        .find(|o| o.name() == name)
        .ok_or_else(|| Error::UnknownOptimizer(name.to_string()))
}

/// Uniform sampling in the bound box. Ignores the start point.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomSearch;

impl Optimizer for RandomSearch {
    fn name(&self) -> &str {
        "random-search"
    }

    fn minimize(
        &self,
        objective: &mut dyn Objective,
        _start: &[f64],
        max_evaluations: u64,
        rng: &mut SplitMix64,
    ) -> Result<()> {
        let lower = objective.lower_bounds().to_vec();
        let upper = objective.upper_bounds().to_vec();
        let mut x = vec![0.0; lower.len()];
        for _ in 0..max_evaluations {
            if objective.final_target_hit() {
                break;
            }
            for ((xi, lo), hi) in x.iter_mut().zip(&lower).zip(&upper) {
                *xi = rng.uniform(*lo, *hi);
            }
            objective.evaluate(&x)?;
        }
        Ok(())
    }
}

/// Downhill simplex.
///
/// The initial simplex is the start point plus one vertex per coordinate,
/// offset by `initial_step` times the box width. The run ends when the
/// allowance is spent, the final target is hit, or the simplex has
/// collapsed to a single point.
#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.05,
        }
    }
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

impl Optimizer for NelderMead {
    fn name(&self) -> &str {
        "nelder-mead"
    }

    fn minimize(
        &self,
        objective: &mut dyn Objective,
        start: &[f64],
        _max_evaluations: u64,
        _rng: &mut SplitMix64,
    ) -> Result<()> {
        let n = objective.dimension();
        if start.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: start.len(),
            });
        }
        let widths: Vec<f64> = objective
            .upper_bounds()
            .iter()
            .zip(objective.lower_bounds())
            .map(|(hi, lo)| hi - lo)
            .collect();

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        simplex.push(start.to_vec());
        for k in 0..n {
            let mut vertex = start.to_vec();
            vertex[k] += self.initial_step * widths[k];
            simplex.push(vertex);
        }
        let mut values = Vec::with_capacity(n + 1);
        for vertex in &simplex {
            values.push(objective.evaluate(vertex)?);
        }

        loop {
            if objective.final_target_hit() {
                return Ok(());
            }
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&k| simplex[k].clone()).collect();
            values = order.iter().map(|&k| values[k]).collect();

            if simplex.iter().all(|v| v == &simplex[0]) {
                return Ok(());
            }

            let mut centroid = vec![0.0; n];
            for vertex in &simplex[..n] {
                centroid.iter_mut().zip(vertex).for_each(|(c, v)| *c += v);
            }
            centroid.iter_mut().for_each(|c| *c /= n as f64);

            let worst = simplex[n].clone();
            let f_best = values[0];
            let f_second = values[n - 1];
            let f_worst = values[n];

            let reflected = affine(&centroid, &worst, -self.reflection);
            let f_reflected = objective.evaluate(&reflected)?;

            if f_reflected < f_best {
                let expanded = affine(&centroid, &reflected, self.expansion);
                let f_expanded = objective.evaluate(&expanded)?;
                if f_expanded < f_reflected {
                    simplex[n] = expanded;
                    values[n] = f_expanded;
                } else {
                    simplex[n] = reflected;
                    values[n] = f_reflected;
                }
                continue;
            }
            if f_reflected < f_second {
                simplex[n] = reflected;
                values[n] = f_reflected;
                continue;
            }

            let accepted = if f_reflected < f_worst {
                let outside = affine(&centroid, &reflected, self.contraction);
                let f_outside = objective.evaluate(&outside)?;
                (f_outside <= f_reflected).then_some((outside, f_outside))
            } else {
                let inside = affine(&centroid, &worst, self.contraction);
                let f_inside = objective.evaluate(&inside)?;
                (f_inside < f_worst).then_some((inside, f_inside))
            };
            match accepted {
                Some((point, value)) => {
                    simplex[n] = point;
                    values[n] = value;
                }
                None => {
                    let best = simplex[0].clone();
                    for k in 1..=n {
                        simplex[k] = affine(&best, &simplex[k], self.shrink);
                        values[k] = objective.evaluate(&simplex[k])?;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Allowance, FunctionObjective};
    use crate::suite::raw_function;

    #[test]
    fn registry_lookup() {
        assert_eq!(optimizer("random-search").unwrap().name(), "random-search");
        assert_eq!(optimizer("nelder-mead").unwrap().name(), "nelder-mead");
        assert!(matches!(
            optimizer("bogus"),
            Err(Error::UnknownOptimizer(_))
        ));
    }

    fn run_nm_on_raw_sphere(evals: u64) -> f64 {
        let sphere = raw_function(1).unwrap();
        let mut f = FunctionObjective::new(|x: &[f64]| sphere.eval(x), vec![-5.0; 2], vec![5.0; 2]);
        let mut capped = Allowance::new(&mut f, evals);
        let mut rng = SplitMix64::new(0);
        match NelderMead::default().minimize(&mut capped, &[1.0, 1.0], evals, &mut rng) {
            Ok(()) | Err(Error::BudgetExhausted(_)) => {}
            Err(e) => panic!("{e}"),
        }
        assert!(f.evaluations() <= evals);
        f.best()
    }

    #[test]
    fn nelder_mead_solves_sphere() {
        let best = run_nm_on_raw_sphere(500);
        assert!(best < 1e-6, "best {best}");
    }

    #[test]
    fn nelder_mead_solves_rosenbrock() {
        let rosen = raw_function(5).unwrap();
        let mut f = FunctionObjective::new(|x: &[f64]| rosen.eval(x), vec![-5.0; 2], vec![5.0; 2]);
        let mut capped = Allowance::new(&mut f, 2000);
        let _ = NelderMead::default().minimize(
            &mut capped,
            &[-1.2, 1.0],
            2000,
            &mut SplitMix64::new(0),
        );
        assert!(f.best() < 1e-8, "best {}", f.best());
    }

    #[test]
    fn stops_at_final_target() {
        let sphere = raw_function(1).unwrap();
        let mut f = FunctionObjective::new(|x: &[f64]| sphere.eval(x), vec![-5.0; 2], vec![5.0; 2])
            .with_target(0.0, 1e-8);
        let mut capped = Allowance::new(&mut f, 100_000);
        NelderMead::default()
            .minimize(&mut capped, &[1.0, 1.0], 100_000, &mut SplitMix64::new(0))
            .unwrap();
        assert!(f.final_target_hit());
        assert!(f.evaluations() < 1000);
    }

    #[test]
    fn random_search_samples_inside_bounds() {
        let mut seen = Vec::new();
        let mut f = FunctionObjective::new(
            |x: &[f64]| {
                seen.push(x.to_vec());
                0.0
            },
            vec![-1.0, 2.0],
            vec![1.0, 3.0],
        );
        RandomSearch
            .minimize(&mut f, &[0.0, 0.0], 200, &mut SplitMix64::new(4))
            .unwrap();
        assert_eq!(f.evaluations(), 200);
        drop(f);
        assert!(seen
            .iter()
            .all(|x| (-1.0..1.0).contains(&x[0]) && (2.0..3.0).contains(&x[1])));
    }
}
