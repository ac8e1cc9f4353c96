mod common;

use common::{field, invertible, operator, rank_deficient, rng, system, Shape, TestRng};
use kbiframe::linalg::{inverse, is_psd, spectral_norm, vector};
use kbiframe::opcalc::{
    apply_operator, canonical_k_dual, combine_product, combine_product_chain, commuting_construct,
    inverse_conjugate, perturb_positive, promote_biframe, restrict_to_range, sandwich,
    transfer_check, ConstructionResult,
};
use kbiframe::{
    frame_operator, BiframeSystem, Error, Field, Operator, DEFAULT_RANK_TOL, DEFAULT_TOL,
};
use proptest::prelude::*;

fn relative(a: &Operator, b: &Operator) -> f64 {
    (a - b).frobenius_norm() / a.frobenius_norm().max(b.frobenius_norm()).max(1e-300)
}

/// `G = F` with more nodes than dimensions, a biframe for any target.
fn frame_system(r: &mut TestRng, dim: usize, fl: Field) -> BiframeSystem {
    system(r, dim, dim + 3, fl, Shape::Symmetric)
}

fn dominates(res: Result<ConstructionResult, Error>) -> Result<(), TestCaseError> {
    match res {
        Ok(res) => {
            let cert = res.certify(DEFAULT_TOL).unwrap();
            prop_assert!(
                cert.dominates(),
                "{}: certified ({:?}, {}) vs guaranteed ({:?}, {})",
                res.rule,
                cert.report.lower,
                cert.report.upper,
                res.guaranteed_lower,
                res.guaranteed_upper
            );
            Ok(())
        }
        // a random draw that misses a precondition is not a counterexample
        Err(Error::NotAKBiframe { .. } | Error::NotABiframe | Error::SingularOperator) => Ok(()),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rigorous_constructions_dominate(seed in any::<u64>(), dim in 1usize..=6) {
        let mut r = rng(seed);
        let fl = field(&mut r);
        let sys = frame_system(&mut r, dim, fl);
        let k = sys.k().clone();
        let u = operator(&mut r, dim, dim, fl);
        let v = invertible(&mut r, dim, fl);
        dominates(promote_biframe(&sys, &operator(&mut r, dim, dim, fl), DEFAULT_TOL))?;
        dominates(combine_product(&sys, &k, &u, DEFAULT_TOL))?;
        let chain = [k.clone(), u.clone(), v.clone()];
        dominates(combine_product_chain(&sys, &chain, DEFAULT_TOL))?;
        dominates(apply_operator(&sys, &u, DEFAULT_TOL))?;
        dominates(canonical_k_dual(&sys, &u, DEFAULT_TOL))?;
        dominates(sandwich(&sys, &u, DEFAULT_TOL))?;
        let mapped = sys.map_samples(&v, k.clone()).unwrap();
        dominates(inverse_conjugate(&mapped, &v, DEFAULT_TOL))?;
        // a polynomial in K commutes with K
        let t = &(&Operator::identity(dim, fl) + &k.scale(0.3)) + &(&k * &k).scale(0.1);
        dominates(commuting_construct(&sys, &t, DEFAULT_TOL))?;
    }

    #[test]
    fn restriction_dominates(seed in any::<u64>(), dim in 2usize..=6) {
        let mut r = rng(seed);
        let fl = field(&mut r);
        let sys = frame_system(&mut r, dim, fl);
        let k = rank_deficient(&mut r, dim, dim, dim - 1, fl);
        let sys = sys.with_target(k).unwrap();
        let res = restrict_to_range(&sys, DEFAULT_RANK_TOL, DEFAULT_TOL).unwrap();
        prop_assert_eq!(res.system.dim(), dim - 1);
        dominates(Ok(res))?;
    }

    #[test]
    fn mapped_frame_operator_is_conjugated(seed in any::<u64>(), dim in 1usize..=6, nodes in 1usize..=24) {
        let mut r = rng(seed);
        let fl = field(&mut r);
        let sys = system(&mut r, dim, nodes, fl, Shape::Mixed);
        let u = operator(&mut r, dim, dim, fl);
        let s = frame_operator(&sys);
        let res = apply_operator(&sys, &u, DEFAULT_TOL).unwrap();
        prop_assert!(relative(&frame_operator(&res.system), &(&(&u * &s) * &u.adjoint())) <= 1e-10);
    }

    #[test]
    fn positive_perturbation_law(seed in any::<u64>(), dim in 1usize..=6, n in 1u32..=3) {
        let mut r = rng(seed);
        let fl = field(&mut r);
        let sys = frame_system(&mut r, dim, fl);
        let t = common::psd(&mut r, dim, dim, fl).scale(0.5);
        let m = &Operator::identity(dim, fl) + &t.powi(n);
        let s = frame_operator(&sys);
        let res = perturb_positive(&sys, &t, n, DEFAULT_TOL).unwrap();
        let s2 = frame_operator(&res.system);
        prop_assert!(relative(&s2, &(&(&m * &s) * &m.adjoint())) <= 1e-10);
    }

    #[test]
    fn commuting_positive_perturbation_dominates(seed in any::<u64>(), dim in 1usize..=6, n in 1u32..=3) {
        let mut r = rng(seed);
        let fl = field(&mut r);
        let sys = frame_system(&mut r, dim, fl);
        let h = frame_operator(&sys).hermitian_part();
        // T = c·S + d·S² is positive and commutes with S
        let scale = 1.0 / spectral_norm(&h);
        let t = &h.scale(0.5 * scale) + &(&h * &h).scale(0.25 * scale * scale);
        let res = perturb_positive(&sys, &t, n, DEFAULT_TOL).unwrap();
        let diff = (&frame_operator(&res.system).hermitian_part() - &h).hermitian_part();
        prop_assert!(is_psd(&diff, DEFAULT_TOL).unwrap().psd);
        dominates(Ok(res))?;
    }

    #[test]
    fn inverse_conjugate_undoes_mapping(seed in any::<u64>(), dim in 1usize..=6) {
        let mut r = rng(seed);
        let fl = field(&mut r);
        let sys = frame_system(&mut r, dim, fl);
        let u = invertible(&mut r, dim, fl);
        let mapped = apply_operator(&sys, &u, DEFAULT_TOL).unwrap();
        let back = match inverse_conjugate(&mapped.system, &u, DEFAULT_TOL) {
            Ok(b) => b,
            Err(Error::NotAKBiframe { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        for (x, y) in back.system.f().samples().iter().zip(sys.f().samples()) {
            prop_assert!(vector::max_abs_diff(x, y) <= 1e-10 * vector::norm(y).max(1.0));
        }
        let recovered = &(&inverse(&u).unwrap() * &(&u * sys.k())) * &u;
        prop_assert!(relative(back.system.k(), &recovered) <= 1e-12);
    }

    #[test]
    fn transfer_constant_matches_mapped_validity(seed in any::<u64>(), dim in 1usize..=6, rank in 1usize..=6, urank in 0usize..=6) {
        let mut r = rng(seed);
        let fl = field(&mut r);
        let rank = rank.min(dim);
        let k = rank_deficient(&mut r, dim, dim, rank, fl);
        // U = K·C keeps range(U) inside range(K)
        let c = rank_deficient(&mut r, dim, dim, urank.min(dim), fl);
        let u = &k * &c;
        let sys = frame_system(&mut r, dim, fl).with_target(k).unwrap();
        let check = transfer_check(&sys, &u, DEFAULT_RANK_TOL, DEFAULT_TOL).unwrap();
        prop_assert!(check.agree || check.indeterminate, "delta {} mapped {}", check.delta_max, check.mapped_valid);
    }
}
