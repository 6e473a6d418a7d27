//! Fractal functions defined by affine λ-vectors.
//!
//! For a fixed partition and scale vector `s`, each λ-vector
//! `(λ_0, ..., λ_{N-1})` of affine polynomials determines the collage operator
//!
//! ```text
//! (B g)(x) = s_l * g(u_l^{-1}(x)) + λ_l(u_l^{-1}(x)),   x in [x_l, x_{l+1})
//! ```
//!
//! whose unique fixed point `f_λ` is the fractal function. The map `λ -> f_λ`
//! is linear, so a combination of basis λ-vectors describes the same
//! combination of fixed points. Nothing here stores sampled fixed points: values
//! are produced on demand from the λ coefficients, either exactly on the
//! address grid (forward recursion from the node values) or at arbitrary `x`
//! with an explicit truncation bound (backward recursion).

use std::ops::{Add, Index, Mul, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AffineMapSet, Partition, ScaleVector};

/// `p(x) = c0 + c1 * x`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AffinePolynomial {
    pub c0: f64,
    pub c1: f64,
}

impl AffinePolynomial {
    pub const ZERO: Self = Self { c0: 0.0, c1: 0.0 };

    pub fn new(c0: f64, c1: f64) -> Self {
        Self { c0, c1 }
    }

    pub fn constant(c: f64) -> Self {
        Self { c0: c, c1: 0.0 }
    }

    /// The affine polynomial taking `va` at `a` and `vb` at `b`.
    pub fn through(a: f64, va: f64, b: f64, vb: f64) -> Self {
        let c1 = (vb - va) / (b - a);
        Self {
            c0: va - c1 * a,
            c1,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.c1.mul_add(x, self.c0)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            c0: k * self.c0,
            c1: k * self.c1,
        }
    }

    /// Sup norm over `[a, b]`; attained at an endpoint.
    pub fn sup_norm(&self, a: f64, b: f64) -> f64 {
        self.eval(a).abs().max(self.eval(b).abs())
    }

    pub fn is_finite(&self) -> bool {
        self.c0.is_finite() && self.c1.is_finite()
    }
}

impl Add for AffinePolynomial {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            c0: self.c0 + rhs.c0,
            c1: self.c1 + rhs.c1,
        }
    }
}

impl Sub for AffinePolynomial {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self {
            c0: self.c0 - rhs.c0,
            c1: self.c1 - rhs.c1,
        }
    }
}

impl Mul<AffinePolynomial> for f64 {
    type Output = AffinePolynomial;

    fn mul(self, rhs: AffinePolynomial) -> AffinePolynomial {
        rhs.scale(self)
    }
}

/// One affine polynomial per segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaVector(Vec<AffinePolynomial>);

impl LambdaVector {
    pub fn new(lambdas: Vec<AffinePolynomial>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::InvalidConfig("λ-vector is empty".into()));
        }
        if lambdas.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("λ-vector coefficients"));
        }
        Ok(Self(lambdas))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![AffinePolynomial::ZERO; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[AffinePolynomial] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &AffinePolynomial> {
        self.0.iter()
    }

    /// `self + k * other`, componentwise.
    pub fn add_scaled(&self, k: f64, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(p, q)| *p + q.scale(k))
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.iter().map(|p| p.scale(k)).collect())
    }

    pub(crate) fn check_len(&self, p: &Partition) -> Result<()> {
        if self.len() != p.segments() {
            return Err(Error::LengthMismatch {
                what: "λ-vector",
                expected: p.segments(),
                found: self.len(),
            });
        }
        Ok(())
    }
}

impl Index<usize> for LambdaVector {
    type Output = AffinePolynomial;

    fn index(&self, l: usize) -> &AffinePolynomial {
        &self.0[l]
    }
}

/// Controls for evaluating fixed points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Address-recursion depth.
    pub depth: usize,
    /// Points per segment for uniform-grid evaluation.
    pub dense_grid: usize,
    /// Upper limit on the size of an address-grid sample.
    pub max_points: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            depth: 6,
            dense_grid: 32,
            max_points: 1 << 22,
        }
    }
}

impl EvalConfig {
    pub fn with_depth(depth: usize) -> Self {
        Self {
            depth,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::InvalidConfig("evaluation depth must be >= 1".into()));
        }
        if self.dense_grid < 2 {
            return Err(Error::InvalidConfig(
                "dense grid needs >= 2 points per segment".into(),
            ));
        }
        Ok(())
    }
}

/// A value of a fixed point together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub error_bound: f64,
}

/// Number of points in the depth-`d` address grid of an `n`-segment partition.
pub fn address_grid_size(segments: usize, depth: usize) -> u128 {
    let n = segments as u128;
    let mut len: u128 = n + 1;
    for _ in 0..depth {
        len = n.saturating_mul(len - 1).saturating_add(1);
    }
    len
}

/// The λ-vector whose fixed point interpolates `(x_j, y_j)`.
///
/// `λ_l` is fixed by `λ_l(a) = y_l - s_l y_0` and `λ_l(b) = y_{l+1} - s_l y_N`,
/// which also makes the fixed point continuous.
pub fn lambda_for_data(p: &Partition, s: &ScaleVector, y: &[f64]) -> Result<LambdaVector> {
    s.check_len(p)?;
    let n = p.segments();
    if y.len() != n + 1 {
        return Err(Error::LengthMismatch {
            what: "interpolation data",
            expected: n + 1,
            found: y.len(),
        });
    }
    let (a, b) = (p.a(), p.b());
    let (y_first, y_last) = (y[0], y[n]);
    let lambdas = (0..n)
        .map(|l| {
            let sl = s[l];
            AffinePolynomial::through(a, y[l] - sl * y_first, b, y[l + 1] - sl * y_last)
        })
        .collect();
    LambdaVector::new(lambdas)
}

fn check_inputs(lambda: &LambdaVector, s: &ScaleVector, p: &Partition) -> Result<()> {
    s.check_len(p)?;
    lambda.check_len(p)
}

/// Closed-form node values of `f_λ`: `f(a) = λ_0(a) / (1 - s_0)`,
/// `f(b) = λ_{N-1}(b) / (1 - s_{N-1})` and `f(x_l) = s_l f(a) + λ_l(a)`.
pub fn node_values(lambda: &LambdaVector, s: &ScaleVector, p: &Partition) -> Result<Vec<f64>> {
    check_inputs(lambda, s, p)?;
    Ok(node_values_unchecked(lambda, s, p))
}

fn node_values_unchecked(lambda: &LambdaVector, s: &ScaleVector, p: &Partition) -> Vec<f64> {
    let n = p.segments();
    let (a, b) = (p.a(), p.b());
    let fa = lambda[0].eval(a) / (1.0 - s[0]);
    let fb = lambda[n - 1].eval(b) / (1.0 - s[n - 1]);
    let mut values = Vec::with_capacity(n + 1);
    values.push(fa);
    values.extend((1..n).map(|l| s[l].mul_add(fa, lambda[l].eval(a))));
    values.push(fb);
    values
}

/// Jump of `f_λ` at each interior node `x_1, ..., x_{N-1}`.
///
/// Entry `l` is `[λ_l(b) - λ_{l+1}(a)] - [s_{l+1} f(a) - s_l f(b)]`, the
/// difference between the left and right limits at `x_{l+1}`.
pub fn continuity_residuals(
    lambda: &LambdaVector,
    s: &ScaleVector,
    p: &Partition,
) -> Result<Vec<f64>> {
    check_inputs(lambda, s, p)?;
    let n = p.segments();
    let (a, b) = (p.a(), p.b());
    let fa = lambda[0].eval(a) / (1.0 - s[0]);
    let fb = lambda[n - 1].eval(b) / (1.0 - s[n - 1]);
    Ok((0..n - 1)
        .map(|l| (lambda[l].eval(b) - lambda[l + 1].eval(a)) - (s[l + 1] * fa - s[l] * fb))
        .collect())
}

/// `(B g)(x) = s_l g(u_l^{-1}(x)) + λ_l(u_l^{-1}(x))` with `l = segment_of(x)`.
pub fn apply_collage<G>(
    lambda: &LambdaVector,
    s: &ScaleVector,
    p: &Partition,
    g: G,
    x: f64,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    check_inputs(lambda, s, p)?;
    let l = p.segment_of(x)?;
    let maps = p.affine_maps();
    let t = maps[l].inverse(x);
    Ok(s[l].mul_add(g(t), lambda[l].eval(t)))
}

/// Evaluates `f_λ(x)` by unrolling the self-referential equation `cfg.depth`
/// times and closing with the node interpolant.
pub fn evaluate(
    lambda: &LambdaVector,
    s: &ScaleVector,
    p: &Partition,
    x: f64,
    cfg: &EvalConfig,
) -> Result<Evaluation> {
    FractalFunction::new(p.clone(), s.clone(), lambda.clone())?.evaluate(x, cfg)
}

/// Exact values of `f_λ` on the depth-`depth` address grid, sorted by `x`.
pub fn sample_fixed_point(
    lambda: &LambdaVector,
    s: &ScaleVector,
    p: &Partition,
    depth: usize,
    max_points: usize,
) -> Result<Vec<(f64, f64)>> {
    FractalFunction::new(p.clone(), s.clone(), lambda.clone())?.sample(depth, max_points)
}

/// A fixed point `f_λ`, carrying what is needed to evaluate it repeatedly.
#[derive(Debug, Clone)]
pub struct FractalFunction {
    partition: Partition,
    maps: AffineMapSet,
    scale: ScaleVector,
    lambda: LambdaVector,
    nodes: Vec<f64>,
}

impl FractalFunction {
    pub fn new(partition: Partition, scale: ScaleVector, lambda: LambdaVector) -> Result<Self> {
        check_inputs(&lambda, &scale, &partition)?;
        let nodes = node_values_unchecked(&lambda, &scale, &partition);
        Ok(Self {
            maps: partition.affine_maps(),
            partition,
            scale,
            lambda,
            nodes,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn scale(&self) -> &ScaleVector {
        &self.scale
    }

    pub fn lambda(&self) -> &LambdaVector {
        &self.lambda
    }

    pub fn node_values(&self) -> &[f64] {
        &self.nodes
    }

    pub fn continuity_residuals(&self) -> Vec<f64> {
        continuity_residuals(&self.lambda, &self.scale, &self.partition)
            .expect("lengths checked at construction")
    }

    /// Largest absolute jump at an interior node.
    pub fn max_node_jump(&self) -> f64 {
        self.continuity_residuals()
            .into_iter()
            .fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn apply_collage<G: Fn(f64) -> f64>(&self, g: G, x: f64) -> Result<f64> {
        let l = self.partition.segment_of(x)?;
        let t = self.maps[l].inverse(x);
        Ok(self.scale[l].mul_add(g(t), self.lambda[l].eval(t)))
    }

    /// `M` with `sup |f - P| <= M`, where `P` is the node interpolant.
    fn closure_bound(&self) -> f64 {
        let c = self.scale.contraction();
        let (a, b) = (self.partition.a(), self.partition.b());
        let lambda_sup = self
            .lambda
            .iter()
            .fold(0.0, |m: f64, p| m.max(p.sup_norm(a, b)));
        let interp_sup = self.nodes.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        (lambda_sup + c * interp_sup + interp_sup) / (1.0 - c)
    }

    pub fn evaluate(&self, x: f64, cfg: &EvalConfig) -> Result<Evaluation> {
        cfg.validate()?;
        self.partition.check_domain(x)?;
        let mut t = x;
        let mut acc = 0.0;
        let mut weight: f64 = 1.0;
        for _ in 0..cfg.depth {
            if let Some(j) = self.partition.node_index(t) {
                return Ok(Evaluation {
                    value: weight.mul_add(self.nodes[j], acc),
                    error_bound: 0.0,
                });
            }
            if weight == 0.0 {
                break;
            }
            let l = self.partition.segment_of(t)?;
            t = self.maps[l].inverse(t);
            acc += weight * self.lambda[l].eval(t);
            weight *= self.scale[l];
        }
        if weight == 0.0 {
            return Ok(Evaluation {
                value: acc,
                error_bound: 0.0,
            });
        }
        let closure = self.partition.interpolate_nodes(&self.nodes, t);
        let c = self.scale.contraction();
        Ok(Evaluation {
            value: weight.mul_add(closure, acc),
            error_bound: c.powi(cfg.depth as i32) * self.closure_bound(),
        })
    }

    /// Evaluates on `cfg.dense_grid` equally spaced points per segment, both
    /// segment ends included and shared nodes listed once.
    pub fn evaluate_grid(&self, cfg: &EvalConfig) -> Result<Vec<(f64, Evaluation)>> {
        cfg.validate()?;
        let nodes = self.partition.nodes();
        let per = cfg.dense_grid;
        let mut out = Vec::with_capacity(self.partition.segments() * (per - 1) + 1);
        for w in nodes.windows(2) {
            let h = (w[1] - w[0]) / (per - 1) as f64;
            for i in 0..per - 1 {
                let x = if i == 0 { w[0] } else { w[0] + i as f64 * h };
                out.push((x, self.evaluate(x, cfg)?));
            }
        }
        let b = self.partition.b();
        out.push((b, self.evaluate(b, cfg)?));
        Ok(out)
    }

    /// Exact values on the address grid `u_{l_1} o ... o u_{l_d}(x_j)`.
    ///
    /// Starting from the closed-form node values, each level applies
    /// `f(u_l(t)) = s_l f(t) + λ_l(t)`. A shared endpoint `x_{l+1}` is taken
    /// from segment `l + 1` (the half-open convention), so the output is
    /// sorted and free of duplicates.
    pub fn sample(&self, depth: usize, max_points: usize) -> Result<Vec<(f64, f64)>> {
        let n = self.partition.segments();
        let requested = address_grid_size(n, depth);
        if requested > max_points as u128 {
            return Err(Error::PointCapExceeded {
                depth,
                requested,
                cap: max_points,
            });
        }
        let mut points: Vec<(f64, f64)> = self
            .partition
            .nodes()
            .iter()
            .copied()
            .zip(self.nodes.iter().copied())
            .collect();
        for _ in 0..depth {
            let interior = &points[..points.len() - 1];
            let last = points[points.len() - 1];
            let pieces: Vec<Vec<(f64, f64)>> = (0..n)
                .into_par_iter()
                .map(|l| {
                    let (map, sl, lam) = (&self.maps[l], self.scale[l], &self.lambda[l]);
                    let image = |&(t, v): &(f64, f64)| (map.apply(t), sl.mul_add(v, lam.eval(t)));
                    let mut piece: Vec<(f64, f64)> = interior.iter().map(image).collect();
                    if l == n - 1 {
                        piece.push(image(&last));
                    }
                    piece
                })
                .collect();
            let mut next = Vec::with_capacity(n * interior.len() + 1);
            for piece in pieces {
                next.extend(piece);
            }
            next.dedup_by(|later, earlier| later.0 <= earlier.0);
            points = next;
        }
        Ok(points)
    }
}

/// The cardinal basis `φ_0, ..., φ_N` with `φ_k(x_j) = δ_kj`, held as the
/// λ-vectors `λ^(k) = lambda_for_data(e_k)`.
#[derive(Debug, Clone)]
pub struct CardinalBasis {
    partition: Partition,
    maps: AffineMapSet,
    scale: ScaleVector,
    lambda_vectors: Vec<LambdaVector>,
}

pub fn cardinal_basis(p: &Partition, s: &ScaleVector) -> Result<CardinalBasis> {
    s.check_len(p)?;
    let n = p.segments();
    let mut unit = vec![0.0; n + 1];
    let lambda_vectors = (0..=n)
        .map(|k| {
            unit[k] = 1.0;
            let lam = lambda_for_data(p, s, &unit);
            unit[k] = 0.0;
            lam
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CardinalBasis {
        partition: p.clone(),
        maps: p.affine_maps(),
        scale: s.clone(),
        lambda_vectors,
    })
}

/// `Σ_k α_k λ^(k)`, the λ-vector of `Σ_k α_k φ_k`.
pub fn combine(basis: &CardinalBasis, alpha: &[f64]) -> Result<LambdaVector> {
    basis.combine(alpha)
}

impl CardinalBasis {
    pub fn new(p: &Partition, s: &ScaleVector) -> Result<Self> {
        cardinal_basis(p, s)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn maps(&self) -> &AffineMapSet {
        &self.maps
    }

    pub fn scale(&self) -> &ScaleVector {
        &self.scale
    }

    pub fn lambda_vectors(&self) -> &[LambdaVector] {
        &self.lambda_vectors
    }

    /// Dimension `N + 1`.
    pub fn len(&self) -> usize {
        self.lambda_vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_vectors.is_empty()
    }

    pub fn combine(&self, alpha: &[f64]) -> Result<LambdaVector> {
        if alpha.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "coefficient vector",
                expected: self.len(),
                found: alpha.len(),
            });
        }
        let n = self.partition.segments();
        let mut out = LambdaVector::zeros(n);
        for (k, &ak) in alpha.iter().enumerate() {
            out = out.add_scaled(ak, &self.lambda_vectors[k]);
        }
        Ok(out)
    }

    /// The fixed point `φ_k`.
    pub fn function(&self, k: usize) -> Result<FractalFunction> {
        let lam = self.lambda_vectors.get(k).ok_or(Error::LengthMismatch {
            what: "basis index",
            expected: self.len(),
            found: k,
        })?;
        FractalFunction::new(self.partition.clone(), self.scale.clone(), lam.clone())
    }

    /// The fixed point `Σ_k α_k φ_k`.
    pub fn span_function(&self, alpha: &[f64]) -> Result<FractalFunction> {
        FractalFunction::new(
            self.partition.clone(),
            self.scale.clone(),
            self.combine(alpha)?,
        )
    }
}
