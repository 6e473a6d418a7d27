//! Exact integrals of affine products and composite Gauss-Legendre rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fif::AffinePolynomial;
use crate::gauss_legendre::RULES;

pub const MAX_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub panels_per_segment: usize,
    /// Gauss-Legendre order, 1 through 12.
    pub points_per_panel: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            panels_per_segment: 16,
            points_per_panel: 5,
        }
    }
}

impl QuadConfig {
    pub fn new(panels_per_segment: usize, points_per_panel: usize) -> Result<Self> {
        let cfg = Self {
            panels_per_segment,
            points_per_panel,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels_per_segment == 0 {
            return Err(Error::InvalidConfig(
                "quadrature needs at least one panel".into(),
            ));
        }
        if !(1..=MAX_POINTS).contains(&self.points_per_panel) {
            return Err(Error::InvalidConfig(format!(
                "Gauss-Legendre order must be in 1..={MAX_POINTS}, got {}",
                self.points_per_panel
            )));
        }
        Ok(())
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// ordered by increasing node.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    if !(1..=MAX_POINTS).contains(&n) {
        return Err(Error::InvalidConfig(format!(
            "Gauss-Legendre order must be in 1..={MAX_POINTS}, got {n}"
        )));
    }
    let half = RULES[n - 1];
    let mut rule: Vec<(f64, f64)> = half
        .iter()
        .rev()
        .filter(|(x, _)| *x > 0.0)
        .map(|&(x, w)| (-x, w))
        .collect();
    rule.extend_from_slice(half);
    Ok(rule)
}

/// Composite Gauss-Legendre nodes and weights over `[a, b]`, in ascending
/// panel order. Reused whenever several integrands share an interval.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    points: Vec<(f64, f64)>,
}

impl QuadGrid {
    pub fn new(a: f64, b: f64, cfg: &QuadConfig) -> Result<Self> {
        cfg.validate()?;
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::InvalidInterval { a, b });
        }
        let rule = gauss_legendre(cfg.points_per_panel)?;
        let panels = cfg.panels_per_segment;
        let h = (b - a) / panels as f64;
        let mut points = Vec::with_capacity(panels * rule.len());
        for k in 0..panels {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == panels { b } else { lo + h };
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            points.extend(rule.iter().map(|&(x, w)| (mid + half * x, half * w)));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sum_i w_i g(x_i)`, summed in node order.
    pub fn integrate<F>(&self, mut g: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut total = 0.0;
        for &(x, w) in &self.points {
            total += w * g(x)?;
        }
        Ok(total)
    }
}

/// Exact `int_a^b p(x) q(x) dx`.
///
/// The integrand is quadratic, so Simpson's rule reproduces it to rounding.
pub fn affine_pair_integral(
    p: &AffinePolynomial,
    q: &AffinePolynomial,
    a: f64,
    b: f64,
) -> Result<f64> {
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(Error::InvalidInterval { a, b });
    }
    let m = 0.5 * (a + b);
    let pq = |x: f64| p.eval(x) * q.eval(x);
    Ok((b - a) / 6.0 * (pq(a) + 4.0 * pq(m) + pq(b)))
}

/// Composite Gauss-Legendre estimate of `int_a^b f(x) p(x) dx`.
pub fn integrate_against<F>(
    f: F,
    p: &AffinePolynomial,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    QuadGrid::new(a, b, cfg)?.integrate(|x| Ok(f(x)? * p.eval(x)))
}
