//! Collage-optimal approximation in the span of a cardinal basis.
//!
//! For a target `f` the collage operator `T = B_{Σ α_k λ^(k)}` has residual
//!
//! ```text
//! φ(α) = ||f - T f||² = Σ_l a_l ∫_a^b [s_l f(x) + Σ_k α_k λ_l^(k)(x) - f(u_l(x))]² dx
//! ```
//!
//! which is quadratic in `α`. Its stationarity system is `A α = β` with
//!
//! ```text
//! A_kj = Σ_l a_l (λ_l^(k), λ_l^(j))
//! β_k  = Σ_l a_l [(λ_l^(k), f o u_l) - s_l (f, λ_l^(k))]
//! ```
//!
//! `A` only involves affine products and is assembled exactly; all quadrature
//! error sits in `β` and `φ`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fif::{address_grid_size, CardinalBasis, EvalConfig, FractalFunction, LambdaVector};
use crate::geometry::{Partition, ScaleVector};
use crate::linalg::{lu_solve, Cholesky, Matrix};
use crate::quadrature::{affine_pair_integral, QuadConfig, QuadGrid};

/// Slack allowed between the measured error and the collage bound before a
/// fit is flagged.
pub const CERTIFICATE_SLACK: f64 = 1e-8;

/// A real function on `[a, b]` to be approximated.
#[derive(Clone)]
pub struct TargetFunction {
    label: String,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Option<(f64, f64)>,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl TargetFunction {
    pub fn new<F>(label: impl Into<String>, func: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            func: Arc::new(func),
            domain: None,
        }
    }

    /// Restricts evaluation to `[lo, hi]`.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if let Some((lo, hi)) = self.domain {
            if !(lo <= x && x <= hi) {
                return Err(Error::TargetEvaluation {
                    label: self.label.clone(),
                    x,
                    reason: format!("outside the sampled range [{lo}, {hi}]"),
                });
            }
        }
        let y = (self.func)(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::TargetEvaluation {
                label: self.label.clone(),
                x,
                reason: format!("non-finite value {y}"),
            })
        }
    }

    /// `gamma * f`.
    pub fn scaled(&self, gamma: f64) -> Self {
        let inner = Arc::clone(&self.func);
        Self {
            label: format!("{gamma}*{}", self.label),
            func: Arc::new(move |x| gamma * inner(x)),
            domain: self.domain,
        }
    }
}

/// The normal equations `A α = β`.
#[derive(Debug, Clone)]
pub struct CollageSystem {
    pub a: Matrix,
    pub beta: Vec<f64>,
}

impl CollageSystem {
    pub fn assemble(basis: &CardinalBasis, f: &TargetFunction, quad: &QuadConfig) -> Result<Self> {
        Ok(Self {
            a: gram_matrix(basis),
            beta: rhs_vector(basis, f, quad)?,
        })
    }

    /// `||A α - β||_∞`.
    pub fn residual_inf(&self, alpha: &[f64]) -> f64 {
        self.a
            .mul_vec(alpha)
            .iter()
            .zip(&self.beta)
            .fold(0.0, |m, (ax, b)| m.max((ax - b).abs()))
    }
}

/// `A_kj = Σ_l a_l ∫_a^b λ_l^(k) λ_l^(j)`, exact to rounding.
pub fn gram_matrix(basis: &CardinalBasis) -> Matrix {
    let p = basis.partition();
    let (a, b) = (p.a(), p.b());
    let slopes = basis.maps().slopes();
    let lambdas = basis.lambda_vectors();
    let dim = basis.len();
    let rows: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|k| {
            (k..dim)
                .map(|j| {
                    slopes
                        .iter()
                        .enumerate()
                        .map(|(l, al)| {
                            al * affine_pair_integral(&lambdas[k][l], &lambdas[j][l], a, b)
                                .expect("partition guarantees a < b")
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    let mut gram = Matrix::zeros(dim);
    for (k, row) in rows.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            gram.set(k, k + offset, v);
            gram.set(k + offset, k, v);
        }
    }
    gram
}

/// Target values at the quadrature nodes: `f(x_q)` and `f(u_l(x_q))` per segment.
struct TargetSamples {
    grid: QuadGrid,
    direct: Vec<f64>,
    mapped: Vec<Vec<f64>>,
}

impl TargetSamples {
    fn new(basis: &CardinalBasis, f: &TargetFunction, quad: &QuadConfig) -> Result<Self> {
        let p = basis.partition();
        let grid = QuadGrid::new(p.a(), p.b(), quad)?;
        let direct = grid
            .points()
            .iter()
            .map(|&(x, _)| f.eval(x))
            .collect::<Result<Vec<_>>>()?;
        let mapped = (0..p.segments())
            .into_par_iter()
            .map(|l| {
                let map = basis.maps()[l];
                grid.points()
                    .iter()
                    .map(|&(x, _)| f.eval(map.apply(x)))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::InSegment {
                        segment: l,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            direct,
            mapped,
        })
    }

    fn rhs(&self, basis: &CardinalBasis) -> Vec<f64> {
        let slopes = basis.maps().slopes();
        let s = basis.scale();
        basis
            .lambda_vectors()
            .par_iter()
            .map(|lam| {
                let mut beta = 0.0;
                for (l, al) in slopes.iter().enumerate() {
                    let poly = &lam[l];
                    let mut against_mapped = 0.0;
                    let mut against_direct = 0.0;
                    for (q, &(x, w)) in self.grid.points().iter().enumerate() {
                        let px = w * poly.eval(x);
                        against_mapped += px * self.mapped[l][q];
                        against_direct += px * self.direct[q];
                    }
                    beta += al * (against_mapped - s[l] * against_direct);
                }
                beta
            })
            .collect()
    }

    fn objective(&self, basis: &CardinalBasis, combined: &LambdaVector) -> f64 {
        let slopes = basis.maps().slopes();
        let s = basis.scale();
        let per_segment: Vec<f64> = (0..slopes.len())
            .into_par_iter()
            .map(|l| {
                let poly = &combined[l];
                let mut total = 0.0;
                for (q, &(x, w)) in self.grid.points().iter().enumerate() {
                    let r = s[l].mul_add(self.direct[q], poly.eval(x)) - self.mapped[l][q];
                    total += w * r * r;
                }
                slopes[l] * total
            })
            .collect();
        per_segment.iter().sum()
    }
}

/// `β_k = Σ_l a_l [∫ f(u_l(x)) λ_l^(k)(x) dx - s_l ∫ f(x) λ_l^(k)(x) dx]`.
pub fn rhs_vector(
    basis: &CardinalBasis,
    f: &TargetFunction,
    quad: &QuadConfig,
) -> Result<Vec<f64>> {
    Ok(TargetSamples::new(basis, f, quad)?.rhs(basis))
}

/// The collage objective `φ(α) = ||f - T_α f||²_{L2}` by quadrature.
pub fn objective(
    alpha: &[f64],
    basis: &CardinalBasis,
    f: &TargetFunction,
    quad: &QuadConfig,
) -> Result<f64> {
    let combined = basis.combine(alpha)?;
    Ok(TargetSamples::new(basis, f, quad)?.objective(basis, &combined))
}

/// Solves `A α = β` by Cholesky, falling back to pivoted elimination.
pub fn solve_normal_equations(sys: &CollageSystem) -> Result<Vec<f64>> {
    let n = sys.a.dim();
    if sys.beta.len() != n {
        return Err(Error::LengthMismatch {
            what: "right-hand side",
            expected: n,
            found: sys.beta.len(),
        });
    }
    let asym = sys.a.max_asymmetry();
    if asym > 1e-13 * sys.a.max_abs() {
        return Err(Error::InvalidConfig(format!(
            "normal-equation matrix is not symmetric (deviation {asym:e})"
        )));
    }
    match Cholesky::new(&sys.a) {
        Ok(chol) => Ok(chol.solve(&sys.beta)),
        Err(Error::Singular { .. }) => {
            log::debug!("Cholesky factorization failed; retrying with partial pivoting");
            lu_solve(&sys.a, &sys.beta)
        }
        Err(e) => Err(e),
    }
}

/// One row of the sampled output: abscissa, target value, approximant value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplePoint {
    pub x: f64,
    pub target: f64,
    pub approx: f64,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub alpha: Vec<f64>,
    /// `||f - T* f||_{L2}`.
    pub collage_residual: f64,
    /// `c = max_l |s_l|`.
    pub contraction: f64,
    /// `collage_residual / (1 - c)`.
    pub collage_bound: f64,
    /// `||f - f*||_{L2}` on the address grid, trapezoid rule.
    pub measured_l2_error: f64,
    pub max_node_jump: f64,
    /// `φ(α*)`.
    pub objective: f64,
    /// Address depth actually used for the measured error.
    pub depth: usize,
    pub lambda: LambdaVector,
    pub samples: Vec<SamplePoint>,
}

impl FitResult {
    pub fn certificate_holds(&self) -> bool {
        self.measured_l2_error <= self.collage_bound + CERTIFICATE_SLACK
    }
}

/// Largest depth `<= cfg.depth` whose address grid fits under `cfg.max_points`.
pub fn measurement_depth(segments: usize, cfg: &EvalConfig) -> usize {
    (0..=cfg.depth)
        .rev()
        .find(|&d| address_grid_size(segments, d) <= cfg.max_points as u128)
        .unwrap_or(0)
}

/// Collage-optimal approximation of `f` in the span of the cardinal basis on
/// `(p, s)`.
pub fn fit(
    f: &TargetFunction,
    p: &Partition,
    s: &ScaleVector,
    quad: &QuadConfig,
    eval: &EvalConfig,
) -> Result<FitResult> {
    let basis = CardinalBasis::new(p, s)?;
    fit_basis(f, &basis, quad, eval)
}

pub fn fit_basis(
    f: &TargetFunction,
    basis: &CardinalBasis,
    quad: &QuadConfig,
    eval: &EvalConfig,
) -> Result<FitResult> {
    quad.validate()?;
    eval.validate()?;
    let samples = TargetSamples::new(basis, f, quad)?;
    let system = CollageSystem {
        a: gram_matrix(basis),
        beta: samples.rhs(basis),
    };
    let alpha = solve_normal_equations(&system)?;
    let lambda = basis.combine(&alpha)?;
    let objective = samples.objective(basis, &lambda).max(0.0);
    let collage_residual = objective.sqrt();
    let contraction = basis.scale().contraction();
    let collage_bound = collage_residual / (1.0 - contraction);

    let approx = FractalFunction::new(
        basis.partition().clone(),
        basis.scale().clone(),
        lambda.clone(),
    )?;
    let depth = measurement_depth(basis.partition().segments(), eval);
    if depth < eval.depth {
        log::info!(
            "measuring error at depth {depth} instead of {} to stay under {} points",
            eval.depth,
            eval.max_points
        );
    }
    let points = approx
        .sample(depth, eval.max_points)?
        .into_iter()
        .map(|(x, v)| {
            Ok(SamplePoint {
                x,
                target: f.eval(x)?,
                approx: v,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let measured_l2_error = trapezoid_l2(&points);

    let result = FitResult {
        alpha,
        collage_residual,
        contraction,
        collage_bound,
        measured_l2_error,
        max_node_jump: approx.max_node_jump(),
        objective,
        depth,
        lambda,
        samples: points,
    };
    if !result.certificate_holds() {
        log::warn!(
            "measured L2 error {:e} exceeds the collage bound {:e}; check the assembly",
            result.measured_l2_error,
            result.collage_bound
        );
    }
    Ok(result)
}

/// `sqrt(∫ (target - approx)²)` by the trapezoid rule on the sample abscissae.
pub fn trapezoid_l2(points: &[SamplePoint]) -> f64 {
    points
        .windows(2)
        .map(|w| {
            let e0 = w[0].target - w[0].approx;
            let e1 = w[1].target - w[1].approx;
            0.5 * (w[1].x - w[0].x) * (e0 * e0 + e1 * e1)
        })
        .sum::<f64>()
        .sqrt()
}
