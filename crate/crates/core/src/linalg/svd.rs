use super::{vector, Operator, C64, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;

/// Thin singular value decomposition `A = U Σ V*`.
///
/// With `k = min(rows, cols)`, `u` is `rows × k`, `v` is `cols × k` and the
/// singular values are sorted in descending order. Columns of `u` that belong
/// to a zero singular value are left at zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Operator,
    pub singular_values: Vec<f64>,
    pub v: Operator,
}

impl Svd {
    /// One-sided (Hestenes) Jacobi SVD. Computed on `A*` when `A` is wide.
    pub fn compute(a: &Operator) -> Svd {
        if a.rows() >= a.cols() {
            hestenes(a)
        } else {
            let Svd {
                u,
                singular_values,
                v,
            } = hestenes(&a.adjoint());
            Svd {
                u: v,
                singular_values,
                v: u,
            }
        }
    }

    pub fn max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `rank_tol · σ_max`.
    pub fn rank(&self, rank_tol: f64) -> usize {
        let cut = rank_tol * self.max();
        self.singular_values
            .iter()
            .filter(|&&s| s > cut && s > 0.0)
            .count()
    }

    /// Orthonormal basis of the range, one column per retained singular value.
    pub fn range_basis(&self, rank_tol: f64) -> Operator {
        let r = self.rank(rank_tol);
        Operator::from_fn(self.u.rows(), r, self.u.field(), |i, j| self.u.get(i, j))
    }

    /// Orthonormal basis of the kernel. Only complete when `rows >= cols`.
    pub fn null_basis(&self, rank_tol: f64) -> Operator {
        let r = self.rank(rank_tol);
        let k = self.singular_values.len();
        Operator::from_fn(self.v.rows(), k - r, self.v.field(), |i, j| {
            self.v.get(i, r + j)
        })
    }

    /// `V Σ⁺ U*` with singular values below `rank_tol · σ_max` dropped.
    pub fn pseudo_inverse(&self, rank_tol: f64) -> Operator {
        let r = self.rank(rank_tol);
        let (m, n) = (self.u.rows(), self.v.rows());
        Operator::from_fn(n, m, self.v.field().join(self.u.field()), |i, j| {
            (0..r)
                .map(|k| self.v.get(i, k) * self.u.get(j, k).conj() / self.singular_values[k])
                .sum()
        })
    }
}

fn hestenes(a: &Operator) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let field = a.field();
    let mut w: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| vector::basis(n, j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= ORTHO_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<(f64, usize)> = w.iter().map(|col| vector::norm(col)).zip(0..n).collect();
    sigma.sort_by(|x, y| y.0.total_cmp(&x.0));
    let singular_values: Vec<f64> = sigma.iter().map(|s| s.0).collect();
    let u = Operator::from_fn(m, n, field, |i, j| {
        let (s, k) = sigma[j];
        if s > 0.0 {
            w[k][i] / s
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let v = Operator::from_fn(n, n, field, |i, j| v[sigma[j].1][i]);
    Svd {
        u,
        singular_values,
        v,
    }
}

fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*xp, *xq);
        *xp = a * c - phase.conj() * b * s;
        *xq = phase * a * s + b * c;
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &Operator) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    Svd::compute(a).max()
}

/// Moore–Penrose pseudo-inverse.
pub fn pseudo_inverse(a: &Operator, rank_tol: f64) -> Operator {
    Svd::compute(a).pseudo_inverse(rank_tol)
}

/// Inverse of a square operator, [`Error::SingularOperator`] when any
/// singular value falls below the default rank cutoff.
pub fn inverse(a: &Operator) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "inverse",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let svd = Svd::compute(a);
    if a.rows() > 0 && svd.rank(DEFAULT_RANK_TOL) < a.rows() {
        return Err(Error::SingularOperator);
    }
    Ok(svd.pseudo_inverse(DEFAULT_RANK_TOL))
}
