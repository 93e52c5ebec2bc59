//! Seeded instance transformations: optimum shift, orthogonal rotation and
//! f-value offset.

use crate::rng::{fnv1a64, SplitMix64};

use super::functions::{Placement, RawFunction};

/// Half-width of the bound box `[-5, 5]^n`.
pub const BOX_HALF_WIDTH: f64 = 5.0;
/// Interior optima are drawn from `[-4, 4]^n`.
pub const SHIFT_HALF_WIDTH: f64 = 4.0;
/// f-value offsets are drawn from `[-100, 100]`.
pub const OFFSET_HALF_WIDTH: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceTransform {
    shift: Vec<f64>,
    /// Row-major n x n.
    rotation: Vec<f64>,
    f_offset: f64,
}

/// Seed of the PRNG stream for problem (i, n, j) of suite `suite_name`.
pub fn instance_seed(
    suite_name: &str,
    function_id: u32,
    dimension: usize,
    instance_id: u32,
) -> u64 {
    let base = 1_000_003u64
        .wrapping_mul(u64::from(function_id))
        .wrapping_add(10_007u64.wrapping_mul(dimension as u64))
        .wrapping_add(u64::from(instance_id));
    fnv1a64(suite_name.as_bytes()) ^ base
}

/// Builds the transformation of instance `instance_id` of `function` in
/// dimension `dimension`.
///
/// Stream layout: n shift draws, one offset draw, then (rotated functions
/// only) n*n Gaussians in row-major order, two per Box-Muller pair.
pub fn make_transform(
    suite_name: &str,
    function: &RawFunction,
    dimension: usize,
    instance_id: u32,
) -> InstanceTransform {
    let n = dimension;
    let mut rng = SplitMix64::new(instance_seed(suite_name, function.id, n, instance_id));

    let shift: Vec<f64> = (0..n)
        .map(|_| {
            let u = rng.next_f64();
            match function.placement {
                Placement::Interior => -SHIFT_HALF_WIDTH + 2.0 * SHIFT_HALF_WIDTH * u,
                Placement::Vertex if u < 0.5 => -BOX_HALF_WIDTH,
                Placement::Vertex => BOX_HALF_WIDTH,
            }
        })
        .collect();

    let raw_offset = -OFFSET_HALF_WIDTH + 2.0 * OFFSET_HALF_WIDTH * rng.next_f64();
    let f_offset = (raw_offset * 100.0).round() / 100.0;

    let rotation = if function.rotated {
        random_orthogonal(n, &mut rng)
    } else {
        identity(n)
    };

    InstanceTransform {
        shift,
        rotation,
        f_offset,
    }
}

impl InstanceTransform {
    pub fn dimension(&self) -> usize {
        self.shift.len()
    }

    /// The optimum location x_opt.
    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    /// Row-major rotation matrix.
    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    /// The optimal f-value f_opt.
    pub fn f_offset(&self) -> f64 {
        self.f_offset
    }

    /// Writes `R (x - x_opt) + origin` into `out`.
    pub fn apply(&self, x: &[f64], origin: f64, out: &mut [f64]) {
        let n = self.dimension();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for (row, slot) in self.rotation.chunks_exact(n).zip(out.iter_mut()) {
            let mut acc = 0.0;
            for ((r, xi), si) in row.iter().zip(x).zip(&self.shift) {
                acc += r * (xi - si);
            }
            *slot = acc + origin;
        }
    }

    /// Largest entry of |R^T R - I|.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dimension();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = (0..n)
                    .map(|k| self.rotation[k * n + a] * self.rotation[k * n + b])
                    .sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - expected).abs());
            }
        }
        worst
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        m[k * n + k] = 1.0;
    }
    m
}

/// Gram-Schmidt orthonormalization of a Gaussian matrix, row by row.
/// Each row is orthogonalized twice against its predecessors, which keeps
/// the defect at round-off level for the dimensions used here.
fn random_orthogonal(n: usize, rng: &mut SplitMix64) -> Vec<f64> {
    let mut gaussians = Vec::with_capacity(n * n + 1);
    while gaussians.len() < n * n {
        let (a, b) = rng.gaussian_pair();
        gaussians.push(a);
        gaussians.push(b);
    }
    gaussians.truncate(n * n);

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for raw_row in gaussians.chunks_exact(n) {
        let mut v = raw_row.to_vec();
        loop {
            for _ in 0..2 {
                for q in &rows {
                    let proj: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
                }
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|a| *a /= norm);
                break;
            }
            // Numerically dependent row: replace it with fresh draws.
            v = (0..n).map(|_| rng.gaussian_pair().0).collect();
        }
        rows.push(v);
    }
    rows.concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::functions::{raw_function, raw_function_registry};

    /// Determinant by Gaussian elimination with partial pivoting.
    fn determinant(m: &[f64], n: usize) -> f64 {
        let mut a = m.to_vec();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].abs().total_cmp(&a[y * n + col].abs()))
                .unwrap();
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }

    #[test]
    fn rotations_are_orthogonal() {
        for f in raw_function_registry() {
            for n in [2, 3, 5, 10, 20, 40] {
                for j in 1..=3 {
                    let t = make_transform("bbob-lite", f, n, j);
                    assert!(t.orthogonality_defect() < 1e-9, "{} n={n} j={j}", f.name);
                    let det = determinant(t.rotation(), n);
                    assert!((det.abs() - 1.0).abs() < 1e-6, "det {det}");
                }
            }
        }
    }

    #[test]
    fn regeneration_is_bit_identical() {
        let f = raw_function(1).unwrap();
        assert_eq!(
            make_transform("bbob-lite", f, 3, 2),
            make_transform("bbob-lite", f, 3, 2)
        );
        let r = raw_function(3).unwrap();
        assert_eq!(
            make_transform("bbob-lite", r, 10, 4),
            make_transform("bbob-lite", r, 10, 4)
        );
    }

    #[test]
    fn golden_shifts_sphere_three_dimensional() {
        // Computed by an independent splitmix64 script from the seed
        // fnv1a64("bbob-lite") ^ (1000003*i + 10007*n + j).
        let f = raw_function(1).unwrap();
        let t2 = make_transform("bbob-lite", f, 3, 2);
        let t3 = make_transform("bbob-lite", f, 3, 3);
        assert_eq!(t2.shift(), GOLDEN_J2);
        assert_eq!(t3.shift(), GOLDEN_J3);
        assert_eq!(t2.f_offset(), GOLDEN_OFFSET_J2);
        assert_ne!(t2.shift(), t3.shift());
    }

    const GOLDEN_J2: &[f64] = &[3.0359228915238115, -2.5119269883144737, -3.579436311629477];
    const GOLDEN_J3: &[f64] = &[-1.4601267793632857, 0.5449444914785939, 0.9519750656996617];
    const GOLDEN_OFFSET_J2: f64 = 52.5;

    #[test]
    fn shifts_inside_box_and_offsets_rounded() {
        for f in raw_function_registry() {
            for n in [2, 5, 10] {
                for j in 1..=5 {
                    let t = make_transform("bbob-lite", f, n, j);
                    for &s in t.shift() {
                        match f.placement {
                            Placement::Interior => assert!(s.abs() <= SHIFT_HALF_WIDTH),
                            Placement::Vertex => assert_eq!(s.abs(), BOX_HALF_WIDTH),
                        }
                    }
                    let off = t.f_offset();
                    assert!(off.abs() <= OFFSET_HALF_WIDTH);
                    assert_eq!(((off * 100.0).round() / 100.0), off);
                }
            }
        }
    }

    #[test]
    fn unrotated_functions_use_identity() {
        let t = make_transform("bbob-lite", raw_function(2).unwrap(), 3, 1);
        assert_eq!(t.rotation(), identity(3).as_slice());
    }

    #[test]
    fn suite_name_changes_instances() {
        let f = raw_function(1).unwrap();
        assert_ne!(
            make_transform("bbob-lite", f, 3, 1).shift(),
            make_transform("other", f, 3, 1).shift()
        );
    }
}
