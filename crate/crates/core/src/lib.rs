//! Continuous fractal interpolation bases and collage-optimal L2 approximation.
//!
//! Given a partition `a = x_0 < ... < x_N = b` and vertical scaling factors
//! `|s_l| < 1`, the cardinal fractal interpolation functions `φ_0, ..., φ_N`
//! (with `φ_k(x_j) = δ_kj`) span an `(N + 1)`-dimensional space of continuous
//! fractal functions. Each `φ_k` is the fixed point of a collage operator
//! parameterised by affine polynomials `λ^(k)`, and because `λ -> f_λ` is
//! linear, every member `Σ α_k φ_k` of the span corresponds to the single
//! λ-vector `Σ α_k λ^(k)`.
//!
//! [`fit::fit`] picks `α` to minimise the collage residual `||f - T f||_{L2}`,
//! a quadratic whose normal equations are assembled from the λ coefficients
//! alone. The collage theorem then bounds the true error by
//! `residual / (1 - max |s_l|)`.
//!
//! ```
//! use fractal_approx::{fit, EvalConfig, Partition, QuadConfig, ScaleVector, TargetFunction};
//!
//! let p = Partition::uniform(0.0, 1.0, 4).unwrap();
//! let s = ScaleVector::constant(4, 0.3).unwrap();
//! let f = TargetFunction::new("x", |x| x);
//! let r = fit(&f, &p, &s, &QuadConfig::default(), &EvalConfig::with_depth(3)).unwrap();
//! assert!((r.alpha[2] - 0.5).abs() < 1e-12);
//! assert!(r.collage_residual < 1e-10);
//! ```

pub mod cli;
pub mod error;
pub mod fif;
pub mod fit;
mod gauss_legendre;
pub mod geometry;
pub mod linalg;
pub mod oracle;
pub mod quadrature;

pub use error::{Error, Result};
pub use fif::{
    apply_collage, cardinal_basis, combine, continuity_residuals, evaluate, lambda_for_data,
    node_values, sample_fixed_point, AffinePolynomial, CardinalBasis, EvalConfig, Evaluation,
    FractalFunction, LambdaVector,
};
pub use fit::{
    fit, gram_matrix, objective, rhs_vector, solve_normal_equations, CollageSystem, FitResult,
    SamplePoint, TargetFunction,
};
pub use geometry::{AffineMap, AffineMapSet, NodeSpec, Partition, ScaleVector};
pub use quadrature::{affine_pair_integral, integrate_against, QuadConfig};
