//! Kronecker realization of tensor products of spaces, operators and systems.

use crate::biframe::{optimal_bounds, BiframeSystem, BoundsReport, SampledField};
use crate::error::{Error, Result};
use crate::linalg::{Operator, C64};
use crate::measure::product_measure;

/// `A ⊗ B` with entry `(i·p + k, j·q + l) = A[i][j]·B[k][l]` for `B` of shape `p × q`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (p, q) = (b.rows(), b.cols());
    Operator::from_fn(
        a.rows() * p,
        a.cols() * q,
        a.field().join(b.field()),
        |r, c| a.get(r / p, c / q) * b.get(r % p, c % q),
    )
}

/// `x ⊗ y` in the same left-major order.
pub fn kron_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter()
        .flat_map(|a| y.iter().map(move |b| a * b))
        .collect()
}

/// Two factor systems and their product on the Kronecker space.
#[derive(Debug, Clone)]
pub struct TensorSystem {
    pub left: BiframeSystem,
    pub right: BiframeSystem,
    pub combined: BiframeSystem,
}

/// Samples `F₁ᵢ ⊗ F₂ⱼ` at product node `i·|m₂| + j`, target `K₁ ⊗ K₂`.
pub fn tensor_system(s1: &BiframeSystem, s2: &BiframeSystem) -> Result<TensorSystem> {
    if s1.field() != s2.field() {
        return Err(Error::FieldMismatch);
    }
    let dim = s1.dim() * s2.dim();
    let pair = |a: &SampledField, b: &SampledField| -> Result<SampledField> {
        let samples = a
            .samples()
            .iter()
            .flat_map(|x| b.samples().iter().map(move |y| kron_vec(x, y)))
            .collect();
        SampledField::new(dim, samples)
    };
    let combined = BiframeSystem::new(
        s1.field(),
        product_measure(s1.measure(), s2.measure()),
        pair(s1.f(), s2.f())?,
        pair(s1.g(), s2.g())?,
        kron(s1.k(), s2.k()),
    )?;
    Ok(TensorSystem {
        left: s1.clone(),
        right: s2.clone(),
        combined,
    })
}

#[derive(Debug, Clone)]
pub struct FactorCheck {
    pub left: BoundsReport,
    pub right: BoundsReport,
    pub combined: BoundsReport,
    /// `lower(combined) ≥ lower(left)·lower(right)`.
    pub lower_ok: bool,
    /// `upper(combined) ≤ upper(left)·upper(right)`.
    pub upper_ok: bool,
}

impl FactorCheck {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

/// Checks that the combined optimal bounds dominate the products of the
/// factor bounds. Fails with [`Error::NotAKBiframe`] naming the first factor
/// (0 = left, 1 = right) or the combined system (no index) that is not valid.
pub fn factor_bounds_check(ts: &TensorSystem, tol: f64) -> Result<FactorCheck> {
    let combined = optimal_bounds(&ts.combined, tol)?;
    if !combined.valid {
        return Err(Error::NotAKBiframe { term: None });
    }
    let left = optimal_bounds(&ts.left, tol)?;
    if !left.valid {
        return Err(Error::NotAKBiframe { term: Some(0) });
    }
    let right = optimal_bounds(&ts.right, tol)?;
    if !right.valid {
        return Err(Error::NotAKBiframe { term: Some(1) });
    }
    let lower_prod = left.lower_or_zero() * right.lower_or_zero();
    let upper_prod = left.upper * right.upper;
    let lower_ok = combined.lower_or_zero() >= lower_prod - tol * lower_prod.max(1.0);
    let upper_ok = combined.upper <= upper_prod + tol * upper_prod.max(1.0);
    Ok(FactorCheck {
        left,
        right,
        combined,
        lower_ok,
        upper_ok,
    })
}
