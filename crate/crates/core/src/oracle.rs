//! Brute-force references for checking the collage fit.
//!
//! Nothing in here goes through the λ-space assembly or the solvers in
//! [`crate::linalg`]: `hat_projection` uses hat-function formulas, composite
//! Simpson and a tridiagonal sweep, and `dense_sampled_lsq` re-derives the
//! address recursion from the partition nodes and solves with nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fif::{CardinalBasis, EvalConfig};
use crate::fit::TargetFunction;
use crate::geometry::Partition;
use crate::quadrature::QuadConfig;

/// Classical piecewise-linear L2 projection coefficients of `f`.
///
/// Simpson subintervals per segment are `64 * panels * points` of `quad`.
pub fn hat_projection(f: &TargetFunction, p: &Partition, quad: &QuadConfig) -> Result<Vec<f64>> {
    quad.validate()?;
    let xs = p.nodes();
    let n = xs.len() - 1;
    let sub = 64 * quad.panels_per_segment * quad.points_per_panel;

    let mut diag = vec![0.0; n + 1];
    let mut off = vec![0.0; n];
    let mut load = vec![0.0; n + 1];
    for l in 0..n {
        let (x0, x1) = (xs[l], xs[l + 1]);
        let h = x1 - x0;
        diag[l] += h / 3.0;
        diag[l + 1] += h / 3.0;
        off[l] = h / 6.0;

        let rising = |x: f64| (x - x0) / h;
        let falling = |x: f64| (x1 - x) / h;
        let step = h / sub as f64;
        let mut left = 0.0;
        let mut right = 0.0;
        for i in 0..=sub {
            let x = if i == sub { x1 } else { x0 + i as f64 * step };
            let w = if i == 0 || i == sub {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let fx = f.eval(x)?;
            left += w * fx * falling(x);
            right += w * fx * rising(x);
        }
        load[l] += left * step / 3.0;
        load[l + 1] += right * step / 3.0;
    }
    thomas(&off, &diag, &off, &load)
}

/// Solves a tridiagonal system; `lower[i]` sits at `(i + 1, i)`, `upper[i]` at `(i, i + 1)`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::Singular {
            min_pivot: 0.0,
            index: 0,
            threshold: 0.0,
        });
    }
    if n > 1 {
        c[0] = upper[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i - 1] * c[i - 1];
        if denom == 0.0 {
            return Err(Error::Singular {
                min_pivot: 0.0,
                index: i,
                threshold: 0.0,
            });
        }
        if i < n - 1 {
            c[i] = upper[i] / denom;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Address points and the values of every basis function there, built by
/// direct recursion over address words.
struct AddressTable {
    xs: Vec<f64>,
    /// `values[k][i]` is `φ_k(xs[i])`.
    values: Vec<Vec<f64>>,
}

fn address_table(basis: &CardinalBasis, depth: usize) -> AddressTable {
    let p = basis.partition();
    let (a, b) = (p.a(), p.b());
    let nodes = p.nodes();
    let n = nodes.len() - 1;
    let s = basis.scale().as_slice();
    let lambdas = basis.lambda_vectors();
    let dim = n + 1;

    // Level 0: nodes with φ_k(x_j) = δ_kj.
    let mut xs: Vec<f64> = nodes.to_vec();
    let mut values: Vec<Vec<f64>> = (0..dim)
        .map(|k| (0..dim).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..depth {
        let mut next_x = Vec::new();
        let mut next_v: Vec<Vec<f64>> = vec![Vec::new(); dim];
        for l in 0..n {
            let (lo, hi) = (nodes[l], nodes[l + 1]);
            for (i, &t) in xs.iter().enumerate() {
                // x_{l+1} comes from the next segment's left end.
                if t == b && l + 1 < n {
                    continue;
                }
                let frac = (t - a) / (b - a);
                let x = if t == a {
                    lo
                } else if t == b {
                    hi
                } else {
                    lo + frac * (hi - lo)
                };
                next_x.push(x);
                for k in 0..dim {
                    let lam = &lambdas[k][l];
                    next_v[k].push(s[l] * values[k][i] + lam.c0 + lam.c1 * t);
                }
            }
        }
        xs = next_x;
        values = next_v;
    }
    AddressTable { xs, values }
}

/// Trapezoid weights for sorted abscissae.
fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; xs.len()];
    for i in 0..xs.len() - 1 {
        let h = xs[i + 1] - xs[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    w
}

/// Discrete least-squares coefficients of `f` against the sampled basis.
///
/// The basis is sampled on the smallest address grid with at least
/// `grid_size` points (limited by `eval.max_points`); the residual is
/// weighted by trapezoid weights so the discrete problem tracks the
/// continuous L2 projection.
pub fn dense_sampled_lsq(
    f: &TargetFunction,
    basis: &CardinalBasis,
    grid_size: usize,
    eval: &EvalConfig,
) -> Result<Vec<f64>> {
    let dim = basis.len();
    if grid_size < 10 * dim {
        return Err(Error::InvalidConfig(format!(
            "grid size {grid_size} is below 10 * (N + 1) = {}",
            10 * dim
        )));
    }
    let n = (dim - 1) as u128;
    let mut depth = 0;
    let mut size = n + 1;
    while size < grid_size as u128 {
        depth += 1;
        size = n * (size - 1) + 1;
    }
    if size > eval.max_points as u128 {
        return Err(Error::PointCapExceeded {
            depth,
            requested: size,
            cap: eval.max_points,
        });
    }
    let table = address_table(basis, depth);
    let weights = trapezoid_weights(&table.xs);
    let m = table.xs.len();

    let design = DMatrix::from_fn(m, dim, |i, k| weights[i].sqrt() * table.values[k][i]);
    let mut rhs = DVector::zeros(m);
    for i in 0..m {
        rhs[i] = weights[i].sqrt() * f.eval(table.xs[i])?;
    }
    let normal = design.transpose() * &design;
    let projected = design.transpose() * rhs;
    let chol = normal.cholesky().ok_or(Error::Singular {
        min_pivot: 0.0,
        index: 0,
        threshold: 0.0,
    })?;
    Ok(chol.solve(&projected).iter().copied().collect())
}

/// Trapezoid-rule `||f - Σ α_k φ_k||_{L2}` on the address grid of `depth`,
/// using the oracle's own recursion.
pub fn sampled_l2_error(
    f: &TargetFunction,
    basis: &CardinalBasis,
    alpha: &[f64],
    depth: usize,
) -> Result<f64> {
    let table = address_table(basis, depth);
    let weights = trapezoid_weights(&table.xs);
    let mut total = 0.0;
    for (i, &x) in table.xs.iter().enumerate() {
        let approx: f64 = alpha.iter().zip(&table.values).map(|(a, v)| a * v[i]).sum();
        let e = f.eval(x)? - approx;
        total += weights[i] * e * e;
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fif::cardinal_basis;
    use crate::geometry::ScaleVector;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn unit(n: usize) -> Partition {
        Partition::uniform(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn projection_of_a_hat_is_a_unit_vector() {
        let p = Partition::from_nodes(vec![0.0, 0.25, 0.6, 1.0]).unwrap();
        let hat = TargetFunction::new("hat1", |x: f64| {
            if x <= 0.25 {
                x / 0.25
            } else if x <= 0.6 {
                (0.6 - x) / 0.35
            } else {
                0.0
            }
        });
        let alpha = hat_projection(&hat, &p, &QuadConfig::default()).unwrap();
        for (k, a) in alpha.iter().enumerate() {
            assert!(
                (a - if k == 1 { 1.0 } else { 0.0 }).abs() < 1e-12,
                "{alpha:?}"
            );
        }
    }

    #[test]
    fn projection_of_identity_is_the_nodes() {
        let p = Partition::from_nodes(vec![-1.0, 0.2, 0.5, 2.0]).unwrap();
        let alpha =
            hat_projection(&TargetFunction::new("x", |x| x), &p, &QuadConfig::default()).unwrap();
        for (a, x) in alpha.iter().zip(p.nodes()) {
            assert!((a - x).abs() < 1e-12);
        }
    }

    #[test]
    fn thomas_matches_dense_mass_matrix() {
        // Mass matrix for N = 2 on [0, 1] applied to (1, 2, 3).
        let diag = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0];
        let off = [1.0 / 12.0, 1.0 / 12.0];
        let rhs = [
            1.0 / 6.0 + 2.0 / 12.0,
            1.0 / 12.0 + 2.0 / 3.0 + 3.0 / 12.0,
            2.0 / 12.0 + 3.0 / 6.0,
        ];
        let x = thomas(&off, &diag, &off, &rhs).unwrap();
        for (got, want) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn sampled_lsq_recovers_span_members() {
        let mut rng = StdRng::seed_from_u64(2);
        let p = unit(3);
        let s = ScaleVector::new(vec![0.4, -0.6, 0.3]).unwrap();
        let basis = cardinal_basis(&p, &s).unwrap();
        let alpha0: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
        // Target: the exact fixed point, looked up on its own address grid.
        let samples = basis
            .span_function(&alpha0)
            .unwrap()
            .sample(6, 1 << 20)
            .unwrap();
        let target = TargetFunction::new("span", move |x: f64| {
            let i = samples
                .partition_point(|&(t, _)| t < x)
                .min(samples.len() - 1);
            let j = i.saturating_sub(1);
            if (samples[i].0 - x).abs() <= (x - samples[j].0).abs() {
                samples[i].1
            } else {
                samples[j].1
            }
        });
        let alpha = dense_sampled_lsq(&target, &basis, 1000, &EvalConfig::default()).unwrap();
        for (a, b) in alpha.iter().zip(&alpha0) {
            assert!((a - b).abs() < 1e-8, "{alpha:?} vs {alpha0:?}");
        }

        let ones = dense_sampled_lsq(
            &TargetFunction::new("1", |_| 1.0),
            &basis,
            200,
            &EvalConfig::default(),
        )
        .unwrap();
        for a in ones {
            assert!((a - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_lsq_matches_hat_projection_at_zero_scale() {
        let p = unit(4);
        let basis = cardinal_basis(&p, &ScaleVector::zeros(4)).unwrap();
        let f = TargetFunction::new("x^2", |x| x * x);
        let lsq = dense_sampled_lsq(&f, &basis, 4000, &EvalConfig::default()).unwrap();
        let hat = hat_projection(&f, &p, &QuadConfig::default()).unwrap();
        for (a, b) in lsq.iter().zip(&hat) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_coarse_grids() {
        let basis = cardinal_basis(&unit(4), &ScaleVector::zeros(4)).unwrap();
        let f = TargetFunction::new("x", |x| x);
        assert!(dense_sampled_lsq(&f, &basis, 49, &EvalConfig::default()).is_err());
    }
}
