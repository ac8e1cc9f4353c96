//! Quotient operators `[U/V]: Vf ↦ Uf` and the biframe tests built on them.

use crate::biframe::{frame_operator, optimal_bounds, BiframeSystem};
use crate::error::{Error, Result};
use crate::linalg::{
    is_psd, spectral_norm, sqrt_psd, vector, Operator, Svd, C64, DEFAULT_RANK_TOL,
};

/// `‖U N_V‖ ≤ CONTAINMENT_TOL·‖U‖` decides `N(V) ⊆ N(U)`.
pub const CONTAINMENT_TOL: f64 = 1e-8;
/// Decisions within this factor of a threshold count as near it.
pub const NEAR_FACTOR: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct QuotientResult {
    pub exists: bool,
    /// `sup ‖Uf‖ / ‖Vf‖` over `f ∉ N(V)`.
    pub norm: Option<f64>,
    /// Unit vector attaining `norm`.
    pub witness: Option<Vec<C64>>,
    /// Unit vector in `N(V)` that `U` does not annihilate.
    pub violation_witness: Option<Vec<C64>>,
    /// `‖U N_V‖ / ‖U‖`.
    pub containment_residual: f64,
}

/// Orthonormal kernel basis. Tall-pads `v` with zero rows so the SVD returns
/// a full set of right singular vectors.
pub fn null_space(v: &Operator, rank_tol: f64) -> Operator {
    let (m, n) = (v.rows(), v.cols());
    let padded = if m >= n {
        v.clone()
    } else {
        Operator::from_fn(n, n, v.field(), |i, j| {
            if i < m {
                v.get(i, j)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    };
    Svd::compute(&padded).null_basis(rank_tol)
}

/// Existence and norm of `[U/V]` for operators with a common domain.
pub fn quotient_norm(u: &Operator, v: &Operator, rank_tol: f64) -> Result<QuotientResult> {
    if u.cols() != v.cols() {
        return Err(Error::DimensionMismatch {
            context: "quotient_norm",
            expected: u.cols(),
            found: v.cols(),
        });
    }
    let u_norm = spectral_norm(u);
    let null = null_space(v, rank_tol);
    let (residual, violation) = if null.cols() == 0 || u_norm == 0.0 {
        (0.0, None)
    } else {
        let un = u * &null;
        let svd = Svd::compute(&un);
        let r = svd.max() / u_norm;
        let w = (svd.max() > 0.0).then(|| vector::canonical_unit(&null.apply(&svd.v.column(0))));
        (r, w)
    };
    if residual > CONTAINMENT_TOL {
        return Ok(QuotientResult {
            exists: false,
            norm: None,
            witness: None,
            violation_witness: violation,
            containment_residual: residual,
        });
    }
    let vp = Svd::compute(v).pseudo_inverse(rank_tol);
    let t = u * &vp;
    let svd = Svd::compute(&t);
    let witness = (svd.max() > 0.0).then(|| vector::canonical_unit(&vp.apply(&svd.v.column(0))));
    Ok(QuotientResult {
        exists: true,
        norm: Some(svd.max()),
        witness,
        violation_witness: None,
        containment_residual: residual,
    })
}

/// Both sides of the pencil / quotient equivalence for a single system.
#[derive(Debug, Clone)]
pub struct QuotientCheck {
    /// `Herm(S) ⪰ A·KK*` for some `A > 0`.
    pub pencil_valid: bool,
    /// `[K* / Herm(S)^{1/2}]` exists.
    pub quotient_bounded: bool,
    pub lower: Option<f64>,
    pub norm: Option<f64>,
    /// `|lower·norm² − 1|` when both are finite and positive.
    pub relation_residual: Option<f64>,
    pub agree: bool,
    /// Disagreement where one of the two rank decisions sits near its cutoff.
    pub indeterminate: bool,
}

/// Compares the pencil verdict with boundedness of `[K*/Herm(S)^{1/2}]`.
pub fn k_biframe_quotient_check(sys: &BiframeSystem, tol: f64) -> Result<QuotientCheck> {
    let h = frame_operator(sys).hermitian_part();
    let report = optimal_bounds(sys, tol)?;
    let q = quotient_against_root(&sys.k().adjoint(), &h, None, tol)?;
    Ok(assemble(
        report.valid,
        report.lower,
        &q,
        &h,
        &(sys.k() * &sys.k().adjoint()),
        tol,
    ))
}

fn quotient_against_root(
    numerator: &Operator,
    h: &Operator,
    right: Option<&Operator>,
    tol: f64,
) -> Result<QuotientResult> {
    let psd = is_psd(h, tol)?;
    if !psd.psd {
        return Err(Error::NotPsd {
            min_eigenvalue: psd.min_eigenvalue,
        });
    }
    let root = sqrt_psd(h, tol)?;
    let denom = match right {
        Some(r) => &root * r,
        None => root,
    };
    quotient_norm(numerator, &denom, DEFAULT_RANK_TOL)
}

fn assemble(
    valid: bool,
    lower: Option<f64>,
    q: &QuotientResult,
    h: &Operator,
    p: &Operator,
    tol: f64,
) -> QuotientCheck {
    let relation_residual = match (lower, q.norm) {
        (Some(a), Some(n)) if a.is_finite() && n > 0.0 => Some((a * n * n - 1.0).abs()),
        _ => None,
    };
    let agree = valid == q.exists;
    let indeterminate = !agree && near_threshold(lower, q, h, p, tol);
    QuotientCheck {
        pencil_valid: valid,
        quotient_bounded: q.exists,
        lower,
        norm: q.norm,
        relation_residual,
        agree,
        indeterminate,
    }
}

fn near_threshold(
    lower: Option<f64>,
    q: &QuotientResult,
    h: &Operator,
    p: &Operator,
    tol: f64,
) -> bool {
    let r = q.containment_residual;
    if r > CONTAINMENT_TOL / NEAR_FACTOR && r < CONTAINMENT_TOL * NEAR_FACTOR {
        return true;
    }
    let (hn, pn) = (spectral_norm(h), spectral_norm(p));
    if pn == 0.0 {
        return false;
    }
    let negligible = tol * hn.max(1.0) / pn;
    // a bounded quotient implies the lower bound 1/‖[K*/S^{1/2}]‖²
    let implied = lower.or(q.norm.filter(|&n| n > 0.0).map(|n| 1.0 / (n * n)));
    implied.is_some_and(|a| a < negligible * NEAR_FACTOR)
}

/// Verdicts of the three equivalent `TK`-biframe conditions.
#[derive(Debug, Clone)]
pub struct TkEquivalence {
    /// The mapped system `(T𝓕, T𝓖)` has valid bounds for target `TK`.
    pub mapped_valid: bool,
    /// `[(TK)* / Herm(S)^{1/2} T*]` exists.
    pub factored_quotient: bool,
    /// `[(TK)* / (T Herm(S) T*)^{1/2}]` exists.
    pub conjugated_quotient: bool,
    /// `TK = 0`, so every condition holds vacuously.
    pub degenerate: bool,
    pub agree: bool,
    pub indeterminate: bool,
}

pub fn tk_equivalences(sys: &BiframeSystem, t: &Operator, tol: f64) -> Result<TkEquivalence> {
    let h = frame_operator(sys).hermitian_part();
    let tk = t * sys.k();
    let mapped = sys.map_samples(t, tk.clone())?;
    let report = optimal_bounds(&mapped, tol)?;
    let numerator = tk.adjoint();
    let factored = quotient_against_root(&numerator, &h, Some(&t.adjoint()), tol)?;
    let th = (&(t * &h) * &t.adjoint()).hermitian_part();
    let conjugated = quotient_against_root(&numerator, &th, None, tol)?;
    let agree = report.valid == factored.exists && factored.exists == conjugated.exists;
    let tkk = &tk * &numerator;
    let indeterminate = !agree
        && (near_threshold(report.lower, &factored, &th, &tkk, tol)
            || near_threshold(report.lower, &conjugated, &th, &tkk, tol));
    Ok(TkEquivalence {
        mapped_valid: report.valid,
        factored_quotient: factored.exists,
        conjugated_quotient: conjugated.exists,
        degenerate: report.degenerate,
        agree,
        indeterminate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_ratio() {
        let q = quotient_norm(
            &Operator::identity(2, Field::Real),
            &Operator::diag_real(&[2.0, 1.0]),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert!(q.exists);
        assert_abs_diff_eq!(q.norm.unwrap(), 1.0, epsilon = 1e-14);
        assert!(vector::max_abs_diff(&q.witness.unwrap(), &vector::basis(2, 1)) < 1e-14);
    }

    #[test]
    fn equal_singular_operators() {
        let p = Operator::diag_real(&[1.0, 0.0]);
        let q = quotient_norm(&p, &p, DEFAULT_RANK_TOL).unwrap();
        assert!(q.exists);
        assert_abs_diff_eq!(q.norm.unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn kernel_escape() {
        let q = quotient_norm(
            &Operator::identity(2, Field::Real),
            &Operator::diag_real(&[1.0, 0.0]),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert!(!q.exists && q.norm.is_none());
        assert_eq!(q.violation_witness.unwrap(), vector::basis(2, 1));
    }

    #[test]
    fn zero_numerator_always_exists() {
        let z = Operator::zeros(2, 2, Field::Real);
        let q = quotient_norm(&z, &z, DEFAULT_RANK_TOL).unwrap();
        assert!(q.exists);
        assert_eq!(q.norm, Some(0.0));
    }

    #[test]
    fn wide_denominator_kernel_is_complete() {
        // V maps R³ → R¹, kernel is two-dimensional
        let v = Operator::from_real_rows(&[[1.0, 0.0, 0.0]]);
        assert_eq!(null_space(&v, DEFAULT_RANK_TOL).cols(), 2);
        let u = Operator::from_real_rows(&[[3.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        let q = quotient_norm(&u, &v, DEFAULT_RANK_TOL).unwrap();
        assert!(q.exists);
        assert_abs_diff_eq!(q.norm.unwrap(), 3.0, epsilon = 1e-14);
    }
}
