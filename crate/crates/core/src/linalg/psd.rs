use super::{hermitian_eigen, vector, Operator, C64};
use crate::error::{Error, Result};

const BISECTION_STEPS: usize = 60;
/// Relative slack added to the Cholesky probe to absorb rounding in `S − A·P`.
const PROBE_NOISE: f64 = 1e-12;
const POLISH_STEPS: usize = 3;

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Unit eigenvector with `⟨Aw, w⟩ < 0`, present when `psd` is false.
    pub witness: Option<Vec<C64>>,
}

/// `A ⪰ 0` up to `λ_min(A) ≥ −tol·max(1, ‖A‖)`.
pub fn is_psd(a: &Operator, tol: f64) -> Result<PsdVerdict> {
    let eig = hermitian_eigen(a, tol)?;
    let floor = -tol * eig.spectral_radius().max(1.0);
    let min = eig.min();
    if eig.values.is_empty() || min >= floor {
        Ok(PsdVerdict {
            psd: true,
            min_eigenvalue: min,
            witness: None,
        })
    } else {
        Ok(PsdVerdict {
            psd: false,
            min_eigenvalue: min,
            witness: Some(eig.vector(0)),
        })
    }
}

/// Hermitian square root of a PSD operator. Eigenvalues up to `tol·‖A‖` are
/// treated as exact zeros, so the square reproduces `A` to a relative error
/// of order `tol`.
pub fn sqrt_psd(a: &Operator, tol: f64) -> Result<Operator> {
    let eig = hermitian_eigen(a, tol)?;
    let radius = eig.spectral_radius();
    if eig.min() < -tol * radius.max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min(),
        });
    }
    let band = tol * radius;
    let root = eig.reconstruct_with(|l| if l <= band { 0.0 } else { l.sqrt() });
    Ok(root.hermitian_part())
}

/// Result of [`max_psd_shift`].
#[derive(Debug, Clone)]
pub enum Shift {
    /// Largest `A > 0` with `S − A·P ⪰ 0`, plus the unit vector minimizing
    /// `⟨(S − A·P) w, w⟩` at that value.
    Finite { value: f64, witness: Vec<C64> },
    /// `P = 0` and `S ⪰ 0`: every shift works.
    Unbounded,
    /// No positive shift exists. The witness, when present, is a unit
    /// direction on which `S − A·P` goes negative for every usable `A`.
    Infeasible { witness: Option<Vec<C64>> },
}

impl Shift {
    /// Shift value, `+∞` for the unbounded case.
    pub fn value(&self) -> Option<f64> {
        match self {
            Shift::Finite { value, .. } => Some(*value),
            Shift::Unbounded => Some(f64::INFINITY),
            Shift::Infeasible { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&[C64]> {
        match self {
            Shift::Finite { witness, .. } => Some(witness),
            Shift::Infeasible { witness } => witness.as_deref(),
            Shift::Unbounded => None,
        }
    }
}

/// Largest `A ≥ 0` such that `S − A·P` is positive semidefinite.
///
/// Both operators must be Hermitian and `P` positive semidefinite. The search
/// bisects on `[0, λ_max(S) / λ⁺_min(P)]`, where `λ⁺_min` is the smallest
/// nonzero eigenvalue of `P`, using a Cholesky factorization as the
/// feasibility probe. The probe accepts `λ_min(S − A·P)` down to
/// `min(λ_min(S), 0)` minus rounding noise, so a slightly negative `S` that
/// already passed the `tol` test does not bias the answer.
pub fn max_psd_shift(s: &Operator, p: &Operator, tol: f64) -> Result<Shift> {
    if !s.is_square() || s.rows() != p.rows() || !p.is_square() {
        return Err(Error::DimensionMismatch {
            context: "max_psd_shift",
            expected: s.rows(),
            found: p.rows(),
        });
    }
    let es = hermitian_eigen(s, tol)?;
    let ep = hermitian_eigen(p, tol)?;
    let s_norm = es.spectral_radius();
    let p_norm = ep.spectral_radius();
    if ep.min() < -tol * p_norm.max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: ep.min(),
        });
    }
    let s_floor = -tol * s_norm.max(1.0);
    if es.min() < s_floor {
        return Ok(Shift::Infeasible {
            witness: Some(es.vector(0)),
        });
    }
    if p_norm <= f64::EPSILON * f64::EPSILON * s_norm.max(1.0) {
        return Ok(Shift::Unbounded);
    }

    let p_cut = tol * p_norm;
    let smallest_positive = ep
        .values
        .iter()
        .copied()
        .find(|&l| l > p_cut)
        .unwrap_or(p_norm);
    let hi = es.max().max(0.0) / smallest_positive;
    let negligible = tol * s_norm.max(1.0) / p_norm;
    if hi <= negligible {
        return Ok(Shift::Infeasible {
            witness: Some(min_direction(s, p, negligible, tol)?),
        });
    }

    let base = (-es.min()).max(0.0);
    let feasible = |a: f64| {
        let noise = PROBE_NOISE * (s_norm + a * p_norm).max(1.0);
        let mut m = s - &p.scale(a);
        for i in 0..m.rows() {
            let d = m.get(i, i) + base + noise;
            m.set(i, i, d);
        }
        cholesky_ok(&m)
    };

    let value = if feasible(hi) {
        hi
    } else {
        let (mut lo, mut up) = (0.0, hi);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + up);
            if feasible(mid) {
                lo = mid;
            } else {
                up = mid;
            }
        }
        lo
    };
    let value = polish(s, p, value, p_cut, tol)?;

    if value <= negligible {
        return Ok(Shift::Infeasible {
            witness: Some(min_direction(s, p, negligible, tol)?),
        });
    }
    Ok(Shift::Finite {
        value,
        witness: min_direction(s, p, value, tol)?,
    })
}

/// Newton steps on `a ↦ λmin(S − a·P)` starting from the bisection estimate.
/// The Cholesky probe carries a small diagonal regularization, which biases
/// the estimate upward by roughly its size. Steps that would move the estimate
/// by more than a relative `1e-6` are rejected.
fn polish(s: &Operator, p: &Operator, value: f64, p_cut: f64, tol: f64) -> Result<f64> {
    let mut a = value;
    for _ in 0..POLISH_STEPS {
        let w = min_direction(s, p, a, tol)?;
        let pw = vector::inner(&p.apply(&w), &w).re;
        if pw <= p_cut {
            break;
        }
        let m = s - &p.scale(a);
        let step = vector::inner(&m.apply(&w), &w).re / pw;
        let next = a + step;
        if !next.is_finite() || (next - value).abs() > 1e-6 * value.abs() {
            break;
        }
        if next == a {
            break;
        }
        a = next;
    }
    Ok(a)
}

/// Unit vector minimizing `⟨(S − a·P) w, w⟩`. Among (near-)minimizers the one
/// with the largest `⟨P w, w⟩` is chosen, so directions that `P` ignores do not
/// shadow the constraint that actually binds.
fn min_direction(s: &Operator, p: &Operator, a: f64, tol: f64) -> Result<Vec<C64>> {
    let m = (s - &p.scale(a)).hermitian_part();
    let eig = hermitian_eigen(&m, tol)?;
    let band = eig.min() + 1e-8 * eig.spectral_radius().max(a * p.frobenius_norm()).max(1.0);
    let k = eig.values.iter().take_while(|&&l| l <= band).count();
    if k <= 1 {
        return Ok(eig.vector(0));
    }
    let basis = Operator::from_fn(m.rows(), k, m.field(), |i, j| eig.vectors.get(i, j));
    let reduced = (&(&basis.adjoint() * p) * &basis).hermitian_part();
    let top = hermitian_eigen(&reduced, tol)?;
    let coeffs = top.vector(k - 1);
    Ok(vector::canonical_unit(&basis.apply(&coeffs)))
}

/// Whether the Hermitian part of `m` admits a Cholesky factorization.
fn cholesky_ok(m: &Operator) -> bool {
    let n = m.rows();
    let mut l = vec![C64::new(0.0, 0.0); n * n];
    for j in 0..n {
        let mut d = m.get(j, j).re;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let ljj = d.sqrt();
        l[j * n + j] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut acc = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
            for k in 0..j {
                acc -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = acc / ljj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{vector, Field, DEFAULT_TOL};
    use approx::assert_abs_diff_eq;

    #[test]
    fn psd_verdicts() {
        assert!(
            is_psd(&Operator::diag_real(&[2.0, 1.0, 0.0]), DEFAULT_TOL)
                .unwrap()
                .psd
        );
        assert!(
            is_psd(&Operator::zeros(3, 3, Field::Real), DEFAULT_TOL)
                .unwrap()
                .psd
        );
    }

    #[test]
    fn indefinite_form_has_antisymmetric_witness() {
        let h = Operator::from_real_rows(&[
            [1.0, 7.0 / 6.0, 1.0],
            [7.0 / 6.0, 1.0, 1.0],
            [1.0, 1.0, 1.0],
        ]);
        let v = is_psd(&h, DEFAULT_TOL).unwrap();
        assert!(!v.psd);
        let w = v.witness.unwrap();
        let s = 0.5f64.sqrt();
        assert!(vector::max_abs_diff(&w, &vector::from_real(&[s, -s, 0.0])) < 1e-12);
        // ⟨H(1,−1,0), (1,−1,0)⟩ = 2 − 7/3
        let x = vector::from_real(&[1.0, -1.0, 0.0]);
        let q = vector::inner(&h.apply(&x), &x).re;
        assert_abs_diff_eq!(q, -1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn square_roots() {
        let r = sqrt_psd(&Operator::diag_real(&[4.0, 9.0]), DEFAULT_TOL).unwrap();
        assert!(r.relative_distance(&Operator::diag_real(&[2.0, 3.0])) < 1e-14);
        let id = Operator::identity(3, Field::Real);
        assert!(sqrt_psd(&id, DEFAULT_TOL).unwrap().relative_distance(&id) < 1e-14);
        let r = sqrt_psd(&Operator::diag_real(&[5.0, 7.0, 11.0]), DEFAULT_TOL).unwrap();
        let expected = Operator::diag_real(&[5f64.sqrt(), 7f64.sqrt(), 11f64.sqrt()]);
        assert!(r.relative_distance(&expected) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = Operator::diag_real(&[1.0, -1.0]);
        assert!(matches!(
            sqrt_psd(&a, DEFAULT_TOL),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn shift_against_scaled_identity() {
        let s = Operator::diag_real(&[5.0, 7.0, 11.0]);
        let p = Operator::identity(3, Field::Real).scale(4.0);
        let shift = max_psd_shift(&s, &p, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(shift.value().unwrap(), 1.25, epsilon = 1e-11);
        assert_eq!(shift.witness().unwrap(), &vector::basis(3, 0)[..]);
    }

    #[test]
    fn shift_with_identity_pencil() {
        let s = Operator::diag_real(&[4.0, 3.0, 2.0]);
        let p = Operator::identity(3, Field::Real);
        let v = max_psd_shift(&s, &p, DEFAULT_TOL).unwrap().value().unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-11);
    }

    #[test]
    fn negative_direction_in_range_has_no_shift() {
        let s = Operator::diag_real(&[1.0, -1.0]);
        let p = Operator::identity(2, Field::Real);
        let shift = max_psd_shift(&s, &p, DEFAULT_TOL).unwrap();
        assert!(shift.value().is_none());
        assert_eq!(shift.witness().unwrap(), &vector::basis(2, 1)[..]);
    }

    #[test]
    fn zero_pencil_is_unbounded() {
        let s = Operator::diag_real(&[1.0, 0.0]);
        let p = Operator::zeros(2, 2, Field::Real);
        assert!(matches!(
            max_psd_shift(&s, &p, DEFAULT_TOL).unwrap(),
            Shift::Unbounded
        ));
    }

    #[test]
    fn range_escape_has_no_shift() {
        // S vanishes on e2 while P does not
        let s = Operator::diag_real(&[1.0, 0.0]);
        let p = Operator::identity(2, Field::Real);
        let shift = max_psd_shift(&s, &p, DEFAULT_TOL).unwrap();
        assert!(shift.value().is_none());
        assert_eq!(shift.witness().unwrap(), &vector::basis(2, 1)[..]);
    }

    #[test]
    fn witness_prefers_constrained_direction() {
        // e3 is a zero direction of S − A·P at every A, but P does not see it
        let s = Operator::diag_real(&[3.0, 5.0, 0.0]);
        let p = Operator::diag_real(&[1.0, 1.0, 0.0]);
        let shift = max_psd_shift(&s, &p, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(shift.value().unwrap(), 3.0, epsilon = 1e-11);
        assert!(vector::max_abs_diff(shift.witness().unwrap(), &vector::basis(3, 0)) < 1e-9);
    }

    #[test]
    fn singular_pencil_uses_positive_part() {
        let s = Operator::diag_real(&[2.0, 1.0, 1.0]);
        let p = Operator::diag_real(&[1.0, 0.0, 0.0]);
        let v = max_psd_shift(&s, &p, DEFAULT_TOL).unwrap().value().unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-11);
    }
}
