//! Constructions that turn a system into a new one with a predicted target
//! and guaranteed bounds, plus the tight and Parseval scaling checks.

use std::fmt;

use num_complex::Complex64;

use crate::biframe::{frame_operator, optimal_bounds, verify_bounds, BiframeSystem, BoundsReport};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, inverse, is_psd, max_psd_shift, spectral_norm, Field, Operator, Shift, Svd,
    C64,
};
use crate::quotient::{CONTAINMENT_TOL, NEAR_FACTOR};

/// Relative slack when comparing certified bounds with guarantees.
pub const CERTIFY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Promote,
    RestrictToRange,
    Sum,
    Product,
    ApplyOperator,
    CanonicalDual,
    Sandwich,
    InverseConjugate,
    Commuting,
    PositivePerturbation,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Promote => "promote",
            Rule::RestrictToRange => "restrict-to-range",
            Rule::Sum => "sum",
            Rule::Product => "product",
            Rule::ApplyOperator => "apply-operator",
            Rule::CanonicalDual => "canonical-dual",
            Rule::Sandwich => "sandwich",
            Rule::InverseConjugate => "inverse-conjugate",
            Rule::Commuting => "commuting",
            Rule::PositivePerturbation => "positive-perturbation",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether the lower guarantee follows from a complete argument or is only
/// the constant as printed for the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strength {
    Rigorous,
    Stated,
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub system: BiframeSystem,
    pub predicted_target: Operator,
    /// `None` when the input carried no lower bound to transfer.
    pub guaranteed_lower: Option<f64>,
    pub guaranteed_upper: f64,
    pub rule: Rule,
    pub lower_strength: Strength,
}

/// Optimal bounds of a constructed system compared with its guarantees.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub report: BoundsReport,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl Certificate {
    pub fn dominates(&self) -> bool {
        self.lower_ok && self.upper_ok
    }
}

impl ConstructionResult {
    /// Recomputes optimal bounds and checks they dominate the guarantees.
    pub fn certify(&self, tol: f64) -> Result<Certificate> {
        let report = optimal_bounds(&self.system, tol)?;
        let lower_ok = match self.guaranteed_lower {
            None => true,
            Some(g) if g.is_infinite() => report.degenerate,
            Some(g) => report.lower_or_zero() >= g - CERTIFY_SLACK * g.abs().max(1.0),
        };
        let g = self.guaranteed_upper;
        let upper_ok = report.upper <= g + CERTIFY_SLACK * g.abs().max(1.0);
        Ok(Certificate {
            report,
            lower_ok,
            upper_ok,
        })
    }
}

/// Optimal bounds of `sys` against `target`, failing when they are not valid.
fn valid_bounds(
    sys: &BiframeSystem,
    target: &Operator,
    term: Option<usize>,
    tol: f64,
) -> Result<(f64, f64)> {
    let report = optimal_bounds(&sys.with_target(target.clone())?, tol)?;
    match report.lower {
        Some(a) if report.valid => Ok((a, report.upper)),
        _ => Err(Error::NotAKBiframe { term }),
    }
}

fn identity_like(sys: &BiframeSystem) -> Operator {
    Operator::identity(sys.dim(), sys.field())
}

fn result(
    system: BiframeSystem,
    rule: Rule,
    lower: Option<f64>,
    upper: f64,
    lower_strength: Strength,
) -> ConstructionResult {
    ConstructionResult {
        predicted_target: system.k().clone(),
        system,
        guaranteed_lower: lower,
        guaranteed_upper: upper,
        rule,
        lower_strength,
    }
}

/// A biframe with bounds `(A, B)` is a `K`-biframe with bounds `(A/‖K‖², B)`.
pub fn promote_biframe(sys: &BiframeSystem, k: &Operator, tol: f64) -> Result<ConstructionResult> {
    let norm = spectral_norm(k);
    if norm == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let (a, b) =
        valid_bounds(sys, &identity_like(sys), None, tol).map_err(|_| Error::NotABiframe)?;
    let system = sys.with_target(k.clone())?;
    Ok(result(
        system,
        Rule::Promote,
        Some(a / (norm * norm)),
        b,
        Strength::Rigorous,
    ))
}

/// Restricts a `K`-biframe to `range(K)`, where it is an ordinary biframe
/// with bounds `(A/‖K†‖², B)`.
///
/// The returned system lives on coordinates of an orthonormal basis `Q` of
/// `range(K)`: its samples are `Q*Fᵢ`, `Q*Gᵢ` and its target is the identity.
pub fn restrict_to_range(
    sys: &BiframeSystem,
    rank_tol: f64,
    tol: f64,
) -> Result<ConstructionResult> {
    let (a, b) = valid_bounds(sys, sys.k(), None, tol)?;
    let svd = Svd::compute(sys.k());
    let q = svd.range_basis(rank_tol);
    let r = q.cols();
    if r == 0 {
        return Err(Error::ZeroOperator);
    }
    let pinv_norm = 1.0 / svd.singular_values[r - 1];
    let system = sys.map_samples(&q.adjoint(), Operator::identity(r, sys.field()))?;
    Ok(result(
        system,
        Rule::RestrictToRange,
        Some(a / (pinv_norm * pinv_norm)),
        b,
        Strength::Rigorous,
    ))
}

/// One term `aⱼ·Kⱼ` of a linear combination of targets.
#[derive(Debug, Clone)]
pub struct SumTerm {
    pub coeff: C64,
    pub op: Operator,
    /// Claimed `(Aⱼ, Bⱼ)` for the `Kⱼ`-biframe; optimal bounds when absent.
    pub bounds: Option<(f64, f64)>,
}

impl SumTerm {
    pub fn new(coeff: f64, op: Operator) -> Self {
        SumTerm {
            coeff: Complex64::new(coeff, 0.0),
            op,
            bounds: None,
        }
    }
}

/// Lower guarantee for a linear combination with the given coefficients and
/// per-term lower bounds. Two terms use `[max|aⱼ|²·(1/A₁ + 1/A₂)]⁻¹`, any
/// other count uses `minⱼ Aⱼ / (n·maxⱼ|aⱼ|²)`.
pub fn sum_lower_guarantee(coeffs: &[C64], lowers: &[f64]) -> f64 {
    let max_sq = coeffs.iter().fold(0.0f64, |m, a| m.max(a.norm_sqr()));
    if max_sq == 0.0 {
        return f64::INFINITY;
    }
    if coeffs.len() == 2 {
        1.0 / (max_sq * (1.0 / lowers[0] + 1.0 / lowers[1]))
    } else {
        let a = lowers.iter().copied().fold(f64::INFINITY, f64::min);
        a / (coeffs.len() as f64 * max_sq)
    }
}

/// Target `Σ aⱼKⱼ` for a system that is a `Kⱼ`-biframe for every term.
///
/// The lower guarantee is the constant printed for this construction. It is
/// not implied by the term bounds in general (the triangle inequality costs a
/// factor of two that the constant omits), so it is marked [`Strength::Stated`].
pub fn combine_sum(sys: &BiframeSystem, terms: &[SumTerm], tol: f64) -> Result<ConstructionResult> {
    if terms.is_empty() {
        return Err(Error::Validation("sum needs at least one term".into()));
    }
    let mut lowers = Vec::with_capacity(terms.len());
    let mut uppers = Vec::with_capacity(terms.len());
    let mut target = Operator::zeros(sys.dim(), sys.dim(), sys.field());
    for (j, term) in terms.iter().enumerate() {
        let (a, b) = match term.bounds {
            Some((a, b)) => {
                let v = verify_bounds(&sys.with_target(term.op.clone())?, a, b, tol)?;
                if !v.holds {
                    return Err(Error::NotAKBiframe { term: Some(j) });
                }
                (a, b)
            }
            None => valid_bounds(sys, &term.op, Some(j), tol)?,
        };
        lowers.push(a);
        uppers.push(b);
        target = &target + &term.op.scale_complex(term.coeff);
    }
    let coeffs: Vec<C64> = terms.iter().map(|t| t.coeff).collect();
    let lower = sum_lower_guarantee(&coeffs, &lowers);
    let upper = if terms.len() == 2 {
        (uppers[0] + uppers[1]) / 2.0
    } else {
        uppers.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let field = sys.field().join(if coeffs.iter().any(|a| a.im != 0.0) {
        Field::Complex
    } else {
        Field::Real
    });
    let target = target.with_field(field);
    let system = sys.with_target(target)?;
    Ok(result(
        system,
        Rule::Sum,
        Some(lower),
        upper,
        Strength::Stated,
    ))
}

/// A `K₁`-biframe with bounds `(A₁, B₁)` is a `K₁K₂`-biframe with bounds
/// `(A₁/‖K₂‖², B₁)`.
pub fn combine_product(
    sys: &BiframeSystem,
    k1: &Operator,
    k2: &Operator,
    tol: f64,
) -> Result<ConstructionResult> {
    combine_product_chain(sys, &[k1.clone(), k2.clone()], tol)
}

/// Left fold of [`combine_product`]: target `K₁K₂⋯Kₙ`, lower guarantee
/// `A₁ / ∏_{j≥2} ‖Kⱼ‖²` where `A₁` is the optimal `K₁` bound.
pub fn combine_product_chain(
    sys: &BiframeSystem,
    ops: &[Operator],
    tol: f64,
) -> Result<ConstructionResult> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::Validation("product needs at least one operator".into()))?;
    let mut scale = 1.0;
    let mut target = first.clone();
    for op in rest {
        let n = spectral_norm(op);
        if n == 0.0 {
            return Err(Error::ZeroOperator);
        }
        scale *= n * n;
        target = &target * op;
    }
    let (a, b) = valid_bounds(sys, first, Some(0), tol)?;
    let system = sys.with_target(target)?;
    Ok(result(
        system,
        Rule::Product,
        Some(a / scale),
        b,
        Strength::Rigorous,
    ))
}

/// Maps samples by `U`: the result is a `UK`-biframe with lower bound `A`
/// and upper bound `B‖U‖²`, and its frame operator is `U S U*`.
pub fn apply_operator(sys: &BiframeSystem, u: &Operator, tol: f64) -> Result<ConstructionResult> {
    let report = optimal_bounds(sys, tol)?;
    let target = u * sys.k();
    let system = sys.map_samples(u, target)?;
    let n = spectral_norm(u);
    let lower = if report.valid { report.lower } else { None };
    Ok(result(
        system,
        Rule::ApplyOperator,
        lower,
        report.upper * n * n,
        Strength::Rigorous,
    ))
}

/// Maps a biframe's samples by `K S⁻¹`: a `K`-biframe with bounds
/// `(A/‖S‖², B·‖S⁻¹‖²·‖K‖²)`.
pub fn canonical_k_dual(sys: &BiframeSystem, k: &Operator, tol: f64) -> Result<ConstructionResult> {
    let (a, b) = valid_bounds(sys, &identity_like(sys), None, tol)
        .map_err(|_| Error::SingularFrameOperator)?;
    let s = frame_operator(sys);
    let s_inv = inverse(&s).map_err(|_| Error::SingularFrameOperator)?;
    let (sn, sin, kn) = (spectral_norm(&s), spectral_norm(&s_inv), spectral_norm(k));
    let system = sys.map_samples(&(k * &s_inv), k.clone())?;
    Ok(result(
        system,
        Rule::CanonicalDual,
        Some(a / (sn * sn)),
        b * sin * sin * kn * kn,
        Strength::Rigorous,
    ))
}

/// Maps samples by `U`, target `UKU*`, bounds `(A/‖U‖², B‖U‖²)`.
pub fn sandwich(sys: &BiframeSystem, u: &Operator, tol: f64) -> Result<ConstructionResult> {
    let (a, b) = valid_bounds(sys, sys.k(), None, tol)?;
    let n = spectral_norm(u);
    let target = &(u * sys.k()) * &u.adjoint();
    let system = sys.map_samples(u, target)?;
    Ok(result(
        system,
        Rule::Sandwich,
        Some(a / (n * n)),
        b * n * n,
        Strength::Rigorous,
    ))
}

/// Given the mapped system `(U𝓕, U𝓖)`, a `K`-biframe with bounds `(A, B)`,
/// recovers `(𝓕, 𝓖)` as a `U⁻¹KU`-biframe with bounds `(A/‖U‖², B‖U⁻¹‖²)`.
pub fn inverse_conjugate(
    mapped: &BiframeSystem,
    u: &Operator,
    tol: f64,
) -> Result<ConstructionResult> {
    let u_inv = inverse(u)?;
    let (a, b) = valid_bounds(mapped, mapped.k(), None, tol)?;
    let (n, ni) = (spectral_norm(u), spectral_norm(&u_inv));
    let target = &(&u_inv * mapped.k()) * u;
    let system = mapped.map_samples(&u_inv, target)?;
    Ok(result(
        system,
        Rule::InverseConjugate,
        Some(a / (n * n)),
        b * ni * ni,
        Strength::Rigorous,
    ))
}

/// Largest `δ` with `‖U*f‖ ≥ δ‖K*f‖` for all `f`, i.e. `√` of the pencil
/// shift of `UU*` against `KK*`. Zero when no positive `δ` exists and `+∞`
/// when `K = 0`. Requires `range(U) ⊆ range(K)`.
pub fn transfer_delta_max(
    sys: &BiframeSystem,
    u: &Operator,
    rank_tol: f64,
    tol: f64,
) -> Result<f64> {
    let k = sys.k();
    if u.rows() != k.rows() {
        return Err(Error::DimensionMismatch {
            context: "transfer_delta_max",
            expected: k.rows(),
            found: u.rows(),
        });
    }
    let q = Svd::compute(k).range_basis(rank_tol);
    let projected = &q * &(&q.adjoint() * u);
    let un = spectral_norm(u);
    if un > 0.0 {
        let residual = spectral_norm(&(u - &projected)) / un;
        if residual > CONTAINMENT_TOL {
            return Err(Error::RangeNotContained { residual });
        }
    }
    let uu = (u * &u.adjoint()).hermitian_part();
    let kk = (k * &k.adjoint()).hermitian_part();
    Ok(match max_psd_shift(&uu, &kk, tol)? {
        Shift::Finite { value, .. } => value.sqrt(),
        Shift::Unbounded => f64::INFINITY,
        Shift::Infeasible { .. } => 0.0,
    })
}

/// `δ_max` next to the validity of `(U𝓕, U𝓖)` as a `K`-biframe.
#[derive(Debug, Clone)]
pub struct TransferCheck {
    pub delta_max: f64,
    pub mapped_valid: bool,
    pub mapped: BoundsReport,
    /// `δ_max > tol` and `mapped_valid` coincide.
    pub agree: bool,
    /// Disagreement where the lower bound implied by `δ_max` or the mapped
    /// lower bound sits near the validity floor.
    pub indeterminate: bool,
}

pub fn transfer_check(
    sys: &BiframeSystem,
    u: &Operator,
    rank_tol: f64,
    tol: f64,
) -> Result<TransferCheck> {
    let delta_max = transfer_delta_max(sys, u, rank_tol, tol)?;
    let mapped_sys = sys.map_samples(u, sys.k().clone())?;
    let mapped = optimal_bounds(&mapped_sys, tol)?;
    let agree = (delta_max > tol) == mapped.valid;
    let indeterminate = !agree && {
        // Herm(U S U*) ⪰ λmin(Herm S)·UU* ⪰ λmin(Herm S)·δ²·KK*, which only
        // says something when Herm(S) is definite
        let eig = hermitian_eigen(&frame_operator(sys).hermitian_part(), tol)?;
        let definite = eig.min() > tol * eig.spectral_radius().max(1.0);
        let kk = spectral_norm(sys.k()).powi(2);
        let mapped_norm = spectral_norm(&frame_operator(&mapped_sys).hermitian_part());
        let negligible = if kk > 0.0 {
            tol * mapped_norm.max(1.0) / kk
        } else {
            f64::INFINITY
        };
        let near = |a: f64| a < negligible * NEAR_FACTOR;
        let implied = eig.min() * delta_max.min(f64::MAX).powi(2);
        (definite && near(implied))
            || mapped.lower.is_some_and(near)
            || delta_max < tol * NEAR_FACTOR
    };
    Ok(TransferCheck {
        delta_max,
        mapped_valid: mapped.valid,
        mapped,
        agree,
        indeterminate,
    })
}

/// Maps samples by an invertible `T` commuting with `K`: target stays `K`,
/// bounds `(A·‖T⁻¹‖⁻², B‖T‖²)`.
pub fn commuting_construct(
    sys: &BiframeSystem,
    t: &Operator,
    tol: f64,
) -> Result<ConstructionResult> {
    let t_inv = inverse(t)?;
    let k = sys.k();
    let scale = spectral_norm(t) * spectral_norm(k);
    if scale > 0.0 {
        let residual = spectral_norm(&(&(t * k) - &(k * t))) / scale;
        if residual > tol {
            return Err(Error::DoesNotCommute { residual });
        }
    }
    let (a, b) = valid_bounds(sys, k, None, tol)?;
    let (n, ni) = (spectral_norm(t), spectral_norm(&t_inv));
    let system = sys.map_samples(t, k.clone())?;
    Ok(result(
        system,
        Rule::Commuting,
        Some(a / (ni * ni)),
        b * n * n,
        Strength::Rigorous,
    ))
}

/// Maps samples by `I + Tⁿ` for positive `T`. The frame operator becomes
/// `(I + Tⁿ) S (I + Tⁿ)*` and the lower bound `A` is carried over unchanged.
///
/// That lower guarantee relies on `(I + Tⁿ) S (I + Tⁿ)* ⪰ S`, which holds when
/// `T` commutes with `S` but can fail otherwise, so it is [`Strength::Stated`].
pub fn perturb_positive(
    sys: &BiframeSystem,
    t: &Operator,
    n: u32,
    tol: f64,
) -> Result<ConstructionResult> {
    if n == 0 {
        return Err(Error::Validation("power must be at least 1".into()));
    }
    let psd = is_psd(t, tol)?;
    if !psd.psd {
        return Err(Error::NotPsd {
            min_eigenvalue: psd.min_eigenvalue,
        });
    }
    let (a, b) = valid_bounds(sys, sys.k(), None, tol)?;
    let m = &identity_like(sys) + &t.hermitian_part().powi(n);
    let mn = spectral_norm(&m);
    let system = sys.map_samples(&m, sys.k().clone())?;
    Ok(result(
        system,
        Rule::PositivePerturbation,
        Some(a),
        b * mn * mn,
        Strength::Stated,
    ))
}

/// Prediction of the tight-scaling criterion next to a direct check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightScaling {
    /// `(A₁/A₂)·KK* = I`.
    pub predicted: bool,
    /// `Herm(S) = A₂·I`, checked directly.
    pub tight_biframe: bool,
}

impl TightScaling {
    pub fn agree(&self) -> bool {
        self.predicted == self.tight_biframe
    }
}

fn relative_residual(a: &Operator, b: &Operator) -> f64 {
    (a - b).frobenius_norm()
        / a.frobenius_norm()
            .max(b.frobenius_norm())
            .max(f64::MIN_POSITIVE)
}

/// For a tight `K`-biframe with constant `A₁`, decides whether it is a tight
/// biframe with constant `A₂` through `(A₁/A₂)·KK* = I`.
pub fn tight_scaling_check(
    sys: &BiframeSystem,
    a1: f64,
    a2: f64,
    tol: f64,
) -> Result<TightScaling> {
    if !(a1 > 0.0) || !(a2 > 0.0) {
        return Err(Error::MalformedBounds {
            lower: a1,
            upper: a2,
        });
    }
    let h = frame_operator(sys).hermitian_part();
    let kk = sys.k() * &sys.k().adjoint();
    let residual = relative_residual(&h, &kk.scale(a1));
    if residual > tol {
        return Err(Error::NotTight { residual });
    }
    let id = identity_like(sys);
    Ok(TightScaling {
        predicted: relative_residual(&kk.scale(a1 / a2), &id) <= tol,
        tight_biframe: relative_residual(&h, &id.scale(a2)) <= tol,
    })
}

/// `Herm(S) = KK* = I`.
pub fn parseval_check(sys: &BiframeSystem, tol: f64) -> bool {
    let h = frame_operator(sys).hermitian_part();
    let kk = sys.k() * &sys.k().adjoint();
    let id = identity_like(sys);
    relative_residual(&h, &id) <= tol && relative_residual(&kk, &id) <= tol
}
