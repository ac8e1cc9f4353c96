//! Biframe systems, their frame operator and bound computations.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, is_psd, max_psd_shift, spectral_norm, vector, Field, Operator, Shift, C64,
};
use crate::measure::DiscreteMeasure;

/// One vector of the space per measure node.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    dim: usize,
    samples: Vec<Vec<C64>>,
}

impl SampledField {
    pub fn new(dim: usize, samples: Vec<Vec<C64>>) -> Result<Self> {
        for s in &samples {
            if s.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "sample",
                    expected: dim,
                    found: s.len(),
                });
            }
            if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("sample"));
            }
        }
        Ok(SampledField { dim, samples })
    }

    pub fn from_real(dim: usize, samples: &[Vec<f64>]) -> Result<Self> {
        Self::new(dim, samples.iter().map(|s| vector::from_real(s)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<C64>] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &[C64] {
        &self.samples[i]
    }

    /// Applies `u` to every sample.
    pub fn map(&self, u: &Operator) -> Result<SampledField> {
        if u.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "map samples",
                expected: self.dim,
                found: u.cols(),
            });
        }
        Ok(SampledField {
            dim: u.rows(),
            samples: self.samples.iter().map(|s| u.apply(s)).collect(),
        })
    }

    fn max_imag(&self) -> f64 {
        self.samples
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0, |m, z| m.max(z.im.abs()))
    }
}

/// Coefficients `φ(wᵢ)`, one per measure node.
pub type CoefficientVector = Vec<C64>;

/// A pair of sampled fields on a common measure together with a target
/// operator `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiframeSystem {
    field: Field,
    measure: DiscreteMeasure,
    f: SampledField,
    g: SampledField,
    k: Operator,
}

impl BiframeSystem {
    pub fn new(
        field: Field,
        measure: DiscreteMeasure,
        f: SampledField,
        g: SampledField,
        k: Operator,
    ) -> Result<Self> {
        let dim = f.dim();
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "G samples",
                expected: dim,
                found: g.dim(),
            });
        }
        if !k.is_square() || k.rows() != dim {
            return Err(Error::DimensionMismatch {
                context: "target operator",
                expected: dim,
                found: k.rows(),
            });
        }
        if f.len() != measure.len() {
            return Err(Error::DimensionMismatch {
                context: "F sample count",
                expected: measure.len(),
                found: f.len(),
            });
        }
        if g.len() != measure.len() {
            return Err(Error::DimensionMismatch {
                context: "G sample count",
                expected: measure.len(),
                found: g.len(),
            });
        }
        if !k.is_finite() {
            return Err(Error::NonFinite("target operator"));
        }
        if field == Field::Real && (f.max_imag() > 0.0 || g.max_imag() > 0.0 || k.max_imag() > 0.0)
        {
            return Err(Error::FieldMismatch);
        }
        let k = k.with_field(field);
        Ok(BiframeSystem {
            field,
            measure,
            f,
            g,
            k,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn f(&self) -> &SampledField {
        &self.f
    }

    pub fn g(&self) -> &SampledField {
        &self.g
    }

    pub fn k(&self) -> &Operator {
        &self.k
    }

    /// Exchanges the roles of `F` and `G`.
    pub fn swap(&self) -> Self {
        BiframeSystem {
            f: self.g.clone(),
            g: self.f.clone(),
            ..self.clone()
        }
    }

    /// Same samples, new target.
    pub fn with_target(&self, k: Operator) -> Result<Self> {
        let field = self.field.join(k.field());
        Self::new(
            field,
            self.measure.clone(),
            self.f.clone(),
            self.g.clone(),
            k,
        )
    }

    /// Applies `u` to both sample fields and installs `target`.
    pub fn map_samples(&self, u: &Operator, target: Operator) -> Result<Self> {
        let field = self.field.join(u.field()).join(target.field());
        Self::new(
            field,
            self.measure.clone(),
            self.f.map(u)?,
            self.g.map(u)?,
            target,
        )
    }
}

/// `S = Σ wᵢ Gᵢ Fᵢ*`, so that `S f = Σ wᵢ ⟨f, Fᵢ⟩ Gᵢ`.
pub fn frame_operator(sys: &BiframeSystem) -> Operator {
    let n = sys.dim();
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for (i, node) in sys.measure.nodes().iter().enumerate() {
        let (fi, gi) = (sys.f.sample(i), sys.g.sample(i));
        for r in 0..n {
            let a = gi[r] * node.weight;
            for c in 0..n {
                data[r * n + c] += a * fi[c].conj();
            }
        }
    }
    Operator::from_fn(n, n, sys.field, |r, c| data[r * n + c])
}

/// Value of the biframe form at a vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormValue {
    /// Real part of `Σ wᵢ ⟨f, Fᵢ⟩⟨Gᵢ, f⟩`.
    pub value: f64,
    pub imaginary: f64,
    /// The imaginary part exceeds `tol·‖f‖²·‖S‖`.
    pub non_self_adjoint: bool,
}

/// `Σ wᵢ ⟨f, Fᵢ⟩⟨Gᵢ, f⟩`.
pub fn biframe_form(sys: &BiframeSystem, f: &[C64], tol: f64) -> Result<FormValue> {
    if f.len() != sys.dim() {
        return Err(Error::DimensionMismatch {
            context: "biframe_form",
            expected: sys.dim(),
            found: f.len(),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (i, node) in sys.measure.nodes().iter().enumerate() {
        acc += vector::inner(f, sys.f.sample(i)) * vector::inner(sys.g.sample(i), f) * node.weight;
    }
    let scale = vector::norm(f).powi(2) * spectral_norm(&frame_operator(sys));
    Ok(FormValue {
        value: acc.re,
        imaginary: acc.im,
        non_self_adjoint: acc.im.abs() > tol * scale,
    })
}

/// `Σ wᵢ φᵢ Fᵢ`.
pub fn synthesis(
    samples: &SampledField,
    measure: &DiscreteMeasure,
    phi: &[C64],
) -> Result<Vec<C64>> {
    if phi.len() != measure.len() || samples.len() != measure.len() {
        return Err(Error::DimensionMismatch {
            context: "synthesis",
            expected: measure.len(),
            found: phi.len(),
        });
    }
    let mut out = vector::zeros(samples.dim());
    for (i, node) in measure.nodes().iter().enumerate() {
        vector::axpy(&mut out, phi[i] * node.weight, samples.sample(i));
    }
    Ok(out)
}

/// Coefficients `⟨f, Fᵢ⟩`, unweighted.
pub fn analysis(samples: &SampledField, f: &[C64]) -> Result<CoefficientVector> {
    if f.len() != samples.dim() {
        return Err(Error::DimensionMismatch {
            context: "analysis",
            expected: samples.dim(),
            found: f.len(),
        });
    }
    Ok(samples
        .samples()
        .iter()
        .map(|s| vector::inner(f, s))
        .collect())
}

/// Optimal bounds of a system and the vectors that certify them.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    /// Largest `A` with `Herm(S) ⪰ A·KK*`. `None` when no positive `A` exists,
    /// `+∞` when `K = 0` (see `degenerate`).
    pub lower: Option<f64>,
    /// `λ_max(Herm(S))`.
    pub upper: f64,
    pub valid: bool,
    /// `K = 0`, so the lower inequality is vacuous.
    pub degenerate: bool,
    /// Unit vector where the lower inequality binds (or fails).
    pub witness_lower: Option<Vec<C64>>,
    /// Unit vector with a negative form value, when one exists.
    pub witness_negative_form: Option<Vec<C64>>,
    /// Smallest eigenvalue of `Herm(S)`.
    pub min_form_eigenvalue: f64,
    /// `‖S − S*‖_F / ‖S‖_F`.
    pub asymmetry: f64,
}

impl BoundsReport {
    /// Lower bound with `None` mapped to zero.
    pub fn lower_or_zero(&self) -> f64 {
        self.lower.unwrap_or(0.0)
    }
}

/// Optimal bounds from the pencil `Herm(S) − A·KK*`.
pub fn optimal_bounds(sys: &BiframeSystem, tol: f64) -> Result<BoundsReport> {
    let s = frame_operator(sys);
    let h = s.hermitian_part();
    let kk = (sys.k() * &sys.k().adjoint()).hermitian_part();
    bounds_from_operators(&h, &kk, s.asymmetry(), tol)
}

pub(crate) fn bounds_from_operators(
    h: &Operator,
    kk: &Operator,
    asymmetry: f64,
    tol: f64,
) -> Result<BoundsReport> {
    let eig = hermitian_eigen(h, tol)?;
    let floor = -tol * eig.spectral_radius().max(1.0);
    let witness_negative_form = (eig.min() < floor).then(|| eig.vector(0));
    let shift = max_psd_shift(h, kk, tol)?;
    let (lower, valid, degenerate, witness_lower) = match shift {
        Shift::Finite { value, witness } => (Some(value), true, false, Some(witness)),
        Shift::Unbounded => (Some(f64::INFINITY), true, true, None),
        Shift::Infeasible { witness } => (None, false, false, witness),
    };
    Ok(BoundsReport {
        lower,
        upper: eig.max(),
        valid,
        degenerate,
        witness_lower,
        witness_negative_form,
        min_form_eigenvalue: eig.min(),
        asymmetry,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

impl BoundSide {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundSide::Lower => "lower",
            BoundSide::Upper => "upper",
        }
    }
}

/// Outcome of checking a candidate pair `(A, B)`.
#[derive(Debug, Clone)]
pub struct BoundsVerdict {
    pub holds: bool,
    pub failed_side: Option<BoundSide>,
    pub witness: Option<Vec<C64>>,
    /// `λ_min(Herm(S) − A·KK*)`.
    pub lower_margin: f64,
    /// `λ_min(B·I − Herm(S))`.
    pub upper_margin: f64,
}

/// Checks `A‖K*f‖² ≤ Re⟨Sf, f⟩ ≤ B‖f‖²` for all `f`.
pub fn verify_bounds(sys: &BiframeSystem, a: f64, b: f64, tol: f64) -> Result<BoundsVerdict> {
    if !(a > 0.0) || !(b >= a) || !b.is_finite() {
        return Err(Error::MalformedBounds { lower: a, upper: b });
    }
    let h = frame_operator(sys).hermitian_part();
    let kk = sys.k() * &sys.k().adjoint();
    let lower = is_psd(&(&h - &kk.scale(a)).hermitian_part(), tol)?;
    let upper = is_psd(
        &(&Operator::identity(sys.dim(), sys.field()).scale(b) - &h),
        tol,
    )?;
    let (failed_side, witness) = if !lower.psd {
        (Some(BoundSide::Lower), lower.witness)
    } else if !upper.psd {
        (Some(BoundSide::Upper), upper.witness)
    } else {
        (None, None)
    };
    Ok(BoundsVerdict {
        holds: failed_side.is_none(),
        failed_side,
        witness,
        lower_margin: lower.min_eigenvalue,
        upper_margin: upper.min_eigenvalue,
    })
}

/// Structural flags of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub f_equals_g: bool,
    /// Constant `A` with `Herm(S) = A·KK*`, when the system is tight.
    pub tight: Option<f64>,
    pub parseval: bool,
    /// Only the upper inequality holds.
    pub bessel_only: bool,
}

pub fn classify(sys: &BiframeSystem, tol: f64) -> Result<Classification> {
    let f_equals_g = sys.f.samples().iter().zip(sys.g.samples()).all(|(x, y)| {
        vector::max_abs_diff(x, y) <= tol * vector::norm(x).max(vector::norm(y)).max(1.0)
    });
    let h = frame_operator(sys).hermitian_part();
    let kk = sys.k() * &sys.k().adjoint();
    let tight = tight_constant(&h, &kk, tol);
    let report = bounds_from_operators(&h, &kk, 0.0, tol)?;
    let parseval = tight.is_some_and(|a| (a - 1.0).abs() <= tol && report.upper <= 1.0 + tol);
    Ok(Classification {
        f_equals_g,
        tight,
        parseval,
        bessel_only: !report.valid,
    })
}

/// Least-squares fit of `H ≈ A·P`; returned when positive and the relative
/// residual is within `tol`.
pub(crate) fn tight_constant(h: &Operator, p: &Operator, tol: f64) -> Option<f64> {
    let pp = p.frobenius_norm().powi(2);
    if pp == 0.0 {
        return None;
    }
    let dot: f64 = h
        .as_slice()
        .iter()
        .zip(p.as_slice())
        .map(|(x, y)| (x * y.conj()).re)
        .sum();
    let a = dot / pp;
    let residual = (h - &p.scale(a)).frobenius_norm() / h.frobenius_norm().max(f64::MIN_POSITIVE);
    (a > 0.0 && residual <= tol).then_some(a)
}
