use super::{vector, Operator, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = V Λ V*` of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, aligned with `values`.
    pub vectors: Operator,
}

impl EigenResult {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// Largest eigenvalue magnitude, i.e. the spectral norm.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Rebuilds `V f(Λ) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Operator {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        Operator::from_fn(n, n, v.field(), |i, j| {
            (0..n)
                .map(|k| v.get(i, k) * v.get(j, k).conj() * mapped[k])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian operator.
///
/// Fails with [`Error::NotHermitian`] when `‖A − A*‖_F > tol·‖A‖_F`; otherwise
/// the Hermitian part is diagonalized. Each rotation first rotates the phase
/// of the pivot so that the `(p, q)` entry is real, then applies the classical
/// real plane rotation that annihilates it.
pub fn hermitian_eigen(a: &Operator, tol: f64) -> Result<EigenResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eigen",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let asym = a.asymmetry();
    if asym > tol {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    let n = a.rows();
    let h = a.hermitian_part();
    let mut m: Vec<C64> = h.as_slice().to_vec();
    let mut v = Operator::identity(n, a.field());
    let scale = h.frobenius_norm();

    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                // negligible pivot after the first few sweeps
                if sweep > 3
                    && app.abs() + 100.0 * mag == app.abs()
                    && aqq.abs() + 100.0 * mag == aqq.abs()
                {
                    m[p * n + q] = C64::new(0.0, 0.0);
                    m[q * n + p] = C64::new(0.0, 0.0);
                    continue;
                }
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase_conj = (apq / mag).conj();
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase_conj * (-s);
                let jqq = phase_conj * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * jpp + akq * jqp;
                    m[k * n + q] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
                    m[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                m[p * n + q] = C64::new(0.0, 0.0);
                m[q * n + p] = C64::new(0.0, 0.0);
                m[p * n + p].im = 0.0;
                m[q * n + q].im = 0.0;

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * jpp + vkq * jqp);
                    v.set(k, q, vkp * jpq + vkq * jqq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| vector::canonical_unit(&v.column(k)))
        .collect();
    let vectors = Operator::from_fn(n, n, a.field(), |i, j| columns[j][i]);
    Ok(EigenResult { values, vectors })
}
