//! Dense linear algebra on finite-dimensional real or complex Hilbert spaces.
//!
//! Every operator is stored as a row-major grid of [`C64`] entries together
//! with the scalar [`Field`] it lives over. Real operators simply carry zero
//! imaginary parts; mixing fields inside one computation is rejected where it
//! matters (system construction, tensor products).

mod eigen;
mod psd;
mod svd;

pub use eigen::{hermitian_eigen, EigenResult};
pub use psd::{is_psd, max_psd_shift, sqrt_psd, PsdVerdict, Shift};
pub use svd::{inverse, pseudo_inverse, spectral_norm, Svd};

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// Default relative tolerance for PSD and Hermitian decisions.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default relative cutoff below which singular values count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Scalar field of a Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }

    /// The smallest field containing both.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense linear map between coordinate spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<C64>,
}

impl Operator {
    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        Operator {
            rows,
            cols,
            field,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        let mut id = Self::zeros(n, n, field);
        for i in 0..n {
            id.data[i * n + i] = C64::new(1.0, 0.0);
        }
        id
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: Field,
        mut f: impl FnMut(usize, usize) -> C64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Operator {
            rows,
            cols,
            field,
            data,
        }
    }

    /// Builds a real operator from rows. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        Self::from_fn(r, c, Field::Real, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            C64::new(row[j], 0.0)
        })
    }

    /// Builds an operator from complex rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(field: Field, rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        Self::from_fn(r, c, field, |i, j| {
            let row = rows[i].as_ref();
            assert_eq!(row.len(), c, "ragged rows");
            row[j]
        })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, Field::Real, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Single column operator holding `v`.
    pub fn column_vector(v: &[C64], field: Field) -> Self {
        Self::from_fn(v.len(), 1, field, |i, _| v[i])
    }

    /// Outer product `x y*`.
    pub fn outer(x: &[C64], y: &[C64], field: Field) -> Self {
        Self::from_fn(x.len(), y.len(), field, |i, j| x[i] * y[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Same entries, relabelled field. Imaginary parts are dropped when
    /// converting to the real field.
    pub fn with_field(mut self, field: Field) -> Self {
        if field == Field::Real {
            for z in &mut self.data {
                z.im = 0.0;
            }
        }
        self.field = field;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest imaginary magnitude among the entries.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.field, |i, j| {
            self.get(j, i).conj()
        })
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian part of a non-square operator");
        Self::from_fn(self.rows, self.cols, self.field, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖A − A*‖_F / ‖A‖_F`, zero for the zero operator.
    pub fn asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut diff = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                diff += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        diff.sqrt() / norm
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.scale_complex(C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Operator {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "operator/vector size mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Operator) -> Operator {
        assert_eq!(self.cols, other.rows, "operator product size mismatch");
        let mut out = Operator::zeros(self.rows, other.cols, self.field.join(other.field));
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^n` for square operators, `n >= 0`.
    pub fn powi(&self, n: u32) -> Operator {
        assert!(self.is_square());
        let mut out = Operator::identity(self.rows, self.field);
        for _ in 0..n {
            out = out.matmul(self);
        }
        out
    }

    fn zip_with(&self, other: &Operator, f: impl Fn(C64, C64) -> C64) -> Operator {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "operator shape mismatch"
        );
        Operator {
            rows: self.rows,
            cols: self.cols,
            field: self.field.join(other.field),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// Relative distance `‖A − B‖_F / max(1, ‖A‖_F, ‖B‖_F)`.
    pub fn relative_distance(&self, other: &Operator) -> f64 {
        let scale = 1f64.max(self.frobenius_norm()).max(other.frobenius_norm());
        (self - other).frobenius_norm() / scale
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

/// Operations on coordinate vectors.
pub mod vector {
    use super::C64;

    /// `⟨x, y⟩`, linear in the first argument.
    pub fn inner(x: &[C64], y: &[C64]) -> C64 {
        assert_eq!(x.len(), y.len());
        x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm(x: &[C64]) -> f64 {
        x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn zeros(n: usize) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); n]
    }

    pub fn basis(n: usize, k: usize) -> Vec<C64> {
        let mut e = zeros(n);
        e[k] = C64::new(1.0, 0.0);
        e
    }

    pub fn from_real(values: &[f64]) -> Vec<C64> {
        values.iter().map(|&v| C64::new(v, 0.0)).collect()
    }

    pub fn scale(x: &[C64], s: C64) -> Vec<C64> {
        x.iter().map(|z| z * s).collect()
    }

    pub fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += a * xi;
        }
    }

    /// Unit vector with a deterministic phase: the first entry whose
    /// magnitude exceeds `1e-8` of the largest is made real and positive.
    pub fn canonical_unit(x: &[C64]) -> Vec<C64> {
        let n = norm(x);
        if n == 0.0 {
            return x.to_vec();
        }
        let peak = x.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let pivot = x
            .iter()
            .find(|z| z.norm() > 1e-8 * peak)
            .copied()
            .unwrap_or(C64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        x.iter().map(|z| z * phase / n).collect()
    }

    /// Largest entrywise distance between two vectors.
    pub fn max_abs_diff(x: &[C64], y: &[C64]) -> f64 {
        x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}
