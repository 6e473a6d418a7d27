//! Interval partitions and the affine contractions `u_l` that map `[a, b]`
//! onto each segment `[x_l, x_{l+1}]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the interior nodes of a partition are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeSpec {
    /// `n` equal segments.
    Uniform(usize),
    /// Every node listed, endpoints included.
    Explicit(Vec<f64>),
}

/// A partition `a = x_0 < x_1 < ... < x_N = b` with `N >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
}

impl Partition {
    pub fn new(a: f64, b: f64, spec: NodeSpec) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("interval endpoints"));
        }
        if a >= b {
            return Err(Error::InvalidInterval { a, b });
        }
        let nodes = match spec {
            NodeSpec::Uniform(n) => {
                if n < 2 {
                    return Err(Error::TooFewSegments(n));
                }
                let h = (b - a) / n as f64;
                let mut nodes: Vec<f64> = (0..n).map(|j| a + j as f64 * h).collect();
                nodes.push(b);
                nodes
            }
            NodeSpec::Explicit(nodes) => {
                if nodes.len() < 3 {
                    return Err(Error::TooFewSegments(nodes.len().saturating_sub(1)));
                }
                if nodes.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite("partition nodes"));
                }
                let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
                if first != a || last != b {
                    return Err(Error::EndpointMismatch { a, b, first, last });
                }
                nodes
            }
        };
        for (i, w) in nodes.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::NonMonotoneNodes {
                    index: i + 1,
                    value: w[1],
                    prev_value: w[0],
                });
            }
        }
        Ok(Self { a, b, nodes })
    }

    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(a, b, NodeSpec::Uniform(n))
    }

    /// Builds a partition whose interval is spanned by the first and last node.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let (a, b) = match (nodes.first(), nodes.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::TooFewSegments(0)),
        };
        Self::new(a, b, NodeSpec::Explicit(nodes))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of segments `N`.
    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    pub(crate) fn check_domain(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x,
                a: self.a,
                b: self.b,
            })
        }
    }

    /// Segment `l` with `x_l <= x < x_{l+1}`; `x = b` belongs to the last segment.
    pub fn segment_of(&self, x: f64) -> Result<usize> {
        self.check_domain(x)?;
        let upper = self.nodes.partition_point(|&node| node <= x);
        Ok((upper - 1).min(self.segments() - 1))
    }

    /// Index `j` with `x_j == x`, if `x` is exactly a node.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        self.nodes.binary_search_by(|node| node.total_cmp(&x)).ok()
    }

    /// Evaluates the piecewise-linear interpolant of `values` (one per node) at `x`.
    pub(crate) fn interpolate_nodes(&self, values: &[f64], x: f64) -> f64 {
        let l = self
            .segment_of(x)
            .unwrap_or(if x < self.a { 0 } else { self.segments() - 1 });
        let (x0, x1) = (self.nodes[l], self.nodes[l + 1]);
        if x == x0 {
            return values[l];
        }
        if x == x1 {
            return values[l + 1];
        }
        let t = (x - x0) / (x1 - x0);
        values[l] + t * (values[l + 1] - values[l])
    }

    pub fn affine_maps(&self) -> AffineMapSet {
        AffineMapSet::new(self)
    }
}

/// One increasing contraction `u(x) = slope * x + intercept` from `[a, b]`
/// onto `[lo, hi]`.
///
/// The endpoint images are stored alongside the coefficients so that
/// `u(a) = lo` and `u(b) = hi` hold exactly in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub slope: f64,
    pub intercept: f64,
    domain: (f64, f64),
    image: (f64, f64),
}

impl AffineMap {
    pub fn apply(&self, t: f64) -> f64 {
        let (a, b) = self.domain;
        let (lo, hi) = self.image;
        if t == a {
            lo
        } else if t == b {
            hi
        } else {
            self.slope.mul_add(t, self.intercept).clamp(lo, hi)
        }
    }

    pub fn inverse(&self, x: f64) -> f64 {
        let (a, b) = self.domain;
        let (lo, hi) = self.image;
        if x == lo {
            a
        } else if x == hi {
            b
        } else {
            ((x - self.intercept) / self.slope).clamp(a, b)
        }
    }

    /// The image segment `[x_l, x_{l+1}]`.
    pub fn image(&self) -> (f64, f64) {
        self.image
    }
}

/// The maps `u_0, ..., u_{N-1}` of a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMapSet {
    maps: Vec<AffineMap>,
}

impl AffineMapSet {
    pub fn new(p: &Partition) -> Self {
        let (a, b) = (p.a, p.b);
        let width = b - a;
        let maps = p
            .nodes
            .windows(2)
            .map(|w| AffineMap {
                slope: (w[1] - w[0]) / width,
                intercept: (w[0] * b - w[1] * a) / width,
                domain: (a, b),
                image: (w[0], w[1]),
            })
            .collect();
        Self { maps }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn get(&self, l: usize) -> &AffineMap {
        &self.maps[l]
    }

    pub fn iter(&self) -> impl Iterator<Item = &AffineMap> {
        self.maps.iter()
    }

    /// The slopes `a_l`; they sum to one.
    pub fn slopes(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.slope).collect()
    }
}

impl std::ops::Index<usize> for AffineMapSet {
    type Output = AffineMap;

    fn index(&self, l: usize) -> &AffineMap {
        &self.maps[l]
    }
}

/// Vertical scaling factors `s_0, ..., s_{N-1}`, each with `|s_l| < 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleVector(Vec<f64>);

impl ScaleVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("scale vector is empty".into()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value.abs() >= 1.0 {
                return Err(Error::InvalidScale { index, value });
            }
        }
        Ok(Self(values))
    }

    /// The same factor on every one of `n` segments.
    pub fn constant(n: usize, s: f64) -> Result<Self> {
        Self::new(vec![s; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `c = max_l |s_l|`.
    pub fn contraction(&self) -> f64 {
        self.0.iter().fold(0.0, |c, s| c.max(s.abs()))
    }

    pub(crate) fn check_len(&self, p: &Partition) -> Result<()> {
        if self.len() != p.segments() {
            return Err(Error::LengthMismatch {
                what: "scale vector",
                expected: p.segments(),
                found: self.len(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for ScaleVector {
    type Output = f64;

    fn index(&self, l: usize) -> &f64 {
        &self.0[l]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_two_segments() {
        let p = Partition::uniform(0.0, 1.0, 2).unwrap();
        assert_eq!(p.nodes(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn explicit_nodes_echo() {
        let p = Partition::new(0.0, 1.0, NodeSpec::Explicit(vec![0.0, 0.3, 1.0])).unwrap();
        assert_eq!(p.nodes(), &[0.0, 0.3, 1.0]);
        assert_eq!(p.segments(), 2);
    }

    #[test]
    fn rejects_bad_partitions() {
        let err = Partition::new(0.0, 1.0, NodeSpec::Explicit(vec![0.0, 0.3, 0.2, 1.0]));
        assert!(matches!(err, Err(Error::NonMonotoneNodes { index: 2, .. })));
        assert!(matches!(
            Partition::uniform(0.0, 1.0, 1),
            Err(Error::TooFewSegments(1))
        ));
        assert!(matches!(
            Partition::uniform(1.0, 1.0, 4),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            Partition::new(0.0, 1.0, NodeSpec::Explicit(vec![0.0, 0.5, 0.9])),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn uniform_slopes() {
        for n in [2, 3, 7, 16] {
            let maps = Partition::uniform(0.0, 1.0, n).unwrap().affine_maps();
            for m in maps.iter() {
                assert!((m.slope - 1.0 / n as f64).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn explicit_map_coefficients() {
        // u_0(0) = 0, u_0(1) = 0.3 and u_1(0) = 0.3, u_1(1) = 1.
        let maps = Partition::from_nodes(vec![0.0, 0.3, 1.0])
            .unwrap()
            .affine_maps();
        assert!((maps[0].slope - 0.3).abs() < 1e-15);
        assert!(maps[0].intercept.abs() < 1e-15);
        assert!((maps[1].slope - 0.7).abs() < 1e-15);
        assert!((maps[1].intercept - 0.3).abs() < 1e-15);
    }

    #[test]
    fn endpoint_conditions_are_exact() {
        let p = Partition::new(
            -2.0,
            3.5,
            NodeSpec::Explicit(vec![-2.0, -1.1, 0.4, 2.2, 3.5]),
        )
        .unwrap();
        let maps = p.affine_maps();
        for (l, m) in maps.iter().enumerate() {
            assert_eq!(m.apply(p.a()), p.nodes()[l]);
            assert_eq!(m.apply(p.b()), p.nodes()[l + 1]);
            assert_eq!(m.inverse(p.nodes()[l]), p.a());
            assert_eq!(m.inverse(p.nodes()[l + 1]), p.b());
        }
        let total: f64 = maps.slopes().iter().map(|s| s * p.width()).sum();
        assert!((total - p.width()).abs() < 1e-14);
    }

    #[test]
    fn segment_lookup_tie_breaking() {
        let p = Partition::uniform(0.0, 1.0, 2).unwrap();
        assert_eq!(p.segment_of(0.5).unwrap(), 1);
        assert_eq!(p.segment_of(1.0).unwrap(), 1);
        assert_eq!(p.segment_of(0.49).unwrap(), 0);
        assert_eq!(p.segment_of(0.0).unwrap(), 0);
        assert!(matches!(p.segment_of(1.01), Err(Error::OutOfDomain { .. })));
        assert!(p.segment_of(-1e-9).is_err());
    }

    #[test]
    fn scale_vector_validation() {
        assert!(ScaleVector::new(vec![0.2, 1.0]).is_err());
        assert!(ScaleVector::new(vec![-0.99, 0.5]).is_ok());
        assert!(matches!(
            ScaleVector::new(vec![0.0, f64::NAN]),
            Err(Error::InvalidScale { index: 1, .. })
        ));
        let s = ScaleVector::new(vec![0.1, -0.7, 0.3]).unwrap();
        assert_eq!(s.contraction(), 0.7);
    }

    fn partition_strategy() -> impl Strategy<Value = Partition> {
        prop::collection::vec(0.5f64..1.0, 2..9).prop_map(|widths| {
            let total: f64 = widths.iter().sum();
            let mut nodes = vec![0.0];
            let mut acc = 0.0;
            for w in &widths[..widths.len() - 1] {
                acc += w / total;
                nodes.push(acc);
            }
            nodes.push(1.0);
            Partition::from_nodes(nodes).unwrap()
        })
    }

    proptest! {
        #[test]
        fn maps_land_in_their_segment(p in partition_strategy(), x in 0.0f64..0.999) {
            let maps = p.affine_maps();
            for (l, m) in maps.iter().enumerate() {
                let y = m.apply(x);
                prop_assert!(p.nodes()[l] <= y && y <= p.nodes()[l + 1]);
                prop_assert!(m.apply(x + 1e-3) > y);
                prop_assert_eq!(p.segment_of(y).unwrap(), l);
                prop_assert!((m.inverse(y) - x).abs() <= 1e-14);
            }
        }
    }
}
