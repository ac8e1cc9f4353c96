//! Finite weighted node sets standing in for measure spaces.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Default Gauss–Legendre node count, exact through degree 15.
pub const DEFAULT_QUAD_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub weight: f64,
}

/// Weighted node set with unique ids and strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<Node>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<Node>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Validation("measure has no nodes".into()));
        }
        let mut seen = HashSet::new();
        for node in &nodes {
            if !node.weight.is_finite() || node.weight <= 0.0 {
                return Err(Error::Validation(format!(
                    "weights strictly positive (node `{}` has weight {})",
                    node.id, node.weight
                )));
            }
            if !seen.insert(node.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate node id `{}`",
                    node.id
                )));
            }
        }
        Ok(DiscreteMeasure { nodes })
    }

    /// Nodes `n0, n1, …` with the given weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::new(
            weights
                .iter()
                .enumerate()
                .map(|(i, &weight)| Node {
                    id: format!("n{i}"),
                    weight,
                })
                .collect(),
        )
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// `Σ wᵢ f(i)`.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| n.weight * f(i))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A quadrature rule: the weighted measure plus the abscissa of each node.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub measure: DiscreteMeasure,
    pub points: Vec<f64>,
}

impl Quadrature {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.measure.integrate(|i| f(self.points[i]))
    }
}

/// `n`-point Gauss–Legendre rule on `iv`, nodes in ascending order.
///
/// Roots of `Pₙ` are found by Newton iteration from the usual cosine guesses.
pub fn gauss_legendre(iv: Interval, n: usize) -> Result<Quadrature> {
    let iv = Interval::new(iv.lo, iv.hi)?;
    if n == 0 {
        return Err(Error::EmptyQuadrature);
    }
    let half = 0.5 * iv.length();
    let mid = 0.5 * (iv.lo + iv.hi);
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root; mirror it for the smallest ones
        points[n - 1 - i] = mid + half * x;
        points[i] = mid - half * x;
        weights[n - 1 - i] = half * w;
        weights[i] = half * w;
    }
    let nodes = weights
        .iter()
        .enumerate()
        .map(|(i, &weight)| Node {
            id: format!("q{i}"),
            weight,
        })
        .collect();
    Ok(Quadrature {
        measure: DiscreteMeasure::new(nodes)?,
        points,
    })
}

/// `(Pₙ(x), Pₙ'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One node per partition cell `B1, B2, …`, weighted by the cell's mass.
pub fn from_partition(masses: &[f64]) -> Result<DiscreteMeasure> {
    for (index, &mass) in masses.iter().enumerate() {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::NonpositiveMass { index, mass });
        }
    }
    DiscreteMeasure::new(
        masses
            .iter()
            .enumerate()
            .map(|(i, &weight)| Node {
                id: format!("B{}", i + 1),
                weight,
            })
            .collect(),
    )
}

/// Product measure with node `(i, j)` at position `i·|m2| + j`.
pub fn product_measure(m1: &DiscreteMeasure, m2: &DiscreteMeasure) -> DiscreteMeasure {
    let nodes = m1
        .nodes
        .iter()
        .flat_map(|a| {
            m2.nodes.iter().map(move |b| Node {
                id: format!("({},{})", a.id, b.id),
                weight: a.weight * b.weight,
            })
        })
        .collect();
    DiscreteMeasure { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_point_rule_on_unit_interval() {
        let q = gauss_legendre(Interval::unit(), 2).unwrap();
        let d = 1.0 / (2.0 * 3f64.sqrt());
        assert_relative_eq!(q.points[0], 0.5 - d, epsilon = 1e-15);
        assert_relative_eq!(q.points[1], 0.5 + d, epsilon = 1e-15);
        for w in q.measure.weights() {
            assert_relative_eq!(w, 0.5, max_relative = 1e-14);
        }
    }

    #[test]
    fn exact_through_degree_three_with_two_nodes() {
        let q = gauss_legendre(Interval::unit(), 2).unwrap();
        assert_relative_eq!(q.integrate(|w| w * w), 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn cubic_integrand_with_three_nodes() {
        let q = gauss_legendre(Interval::unit(), 3).unwrap();
        assert_relative_eq!(
            q.integrate(|w| 22.0 * w * (1.0 - w * w)),
            5.5,
            max_relative = 1e-14
        );
    }

    #[test]
    fn weights_sum_to_length() {
        for n in 1..=20 {
            let q = gauss_legendre(Interval::new(-1.0, 3.0).unwrap(), n).unwrap();
            assert_relative_eq!(q.measure.total_mass(), 4.0, max_relative = 1e-13);
            assert!(q.points.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn odd_rule_has_midpoint() {
        let q = gauss_legendre(Interval::unit(), 1).unwrap();
        assert_eq!(q.points, vec![0.5]);
        assert_eq!(q.measure.weights(), vec![1.0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            Interval::new(1.0, 0.0),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            gauss_legendre(Interval { lo: 2.0, hi: 2.0 }, 3),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            gauss_legendre(Interval::unit(), 0),
            Err(Error::EmptyQuadrature)
        ));
        assert!(matches!(
            from_partition(&[1.0, 0.0]),
            Err(Error::NonpositiveMass { index: 1, .. })
        ));
    }

    #[test]
    fn partitions() {
        assert_eq!(
            from_partition(&[2.0, 2.0, 2.0]).unwrap().weights(),
            vec![2.0; 3]
        );
        assert_eq!(
            from_partition(&[3.0, 2.0, 1.5]).unwrap().weights(),
            vec![3.0, 2.0, 1.5]
        );
    }

    #[test]
    fn products() {
        let a = DiscreteMeasure::from_weights(&[1.0; 2]).unwrap();
        let b = DiscreteMeasure::from_weights(&[1.0; 3]).unwrap();
        let p = product_measure(&a, &b);
        assert_eq!(p.len(), 6);
        assert_eq!(p.nodes()[4].id, "(n1,n1)");

        let a = from_partition(&[2.0, 3.0]).unwrap();
        let b = from_partition(&[1.0, 2.0]).unwrap();
        assert_relative_eq!(product_measure(&a, &b).total_mass(), 15.0);

        let q = gauss_legendre(Interval::unit(), 2).unwrap();
        let pq = product_measure(&q.measure, &q.measure);
        let v = pq.integrate(|k| q.points[k / 2] * q.points[k % 2]);
        assert_relative_eq!(v, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let n = Node {
            id: "a".into(),
            weight: 1.0,
        };
        assert!(DiscreteMeasure::new(vec![n.clone(), n]).is_err());
        assert!(DiscreteMeasure::new(vec![]).is_err());
    }
}
