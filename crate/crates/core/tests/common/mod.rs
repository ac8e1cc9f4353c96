//! Seeded random generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use kbiframe::linalg::vector;
use kbiframe::{BiframeSystem, DiscreteMeasure, Field, Operator, SampledField, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn field(rng: &mut TestRng) -> Field {
    if rng.gen_bool(0.5) {
        Field::Real
    } else {
        Field::Complex
    }
}

pub fn scalar(rng: &mut TestRng, field: Field) -> C64 {
    let re = rng.gen_range(-1.0..1.0);
    match field {
        Field::Real => C64::new(re, 0.0),
        Field::Complex => C64::new(re, rng.gen_range(-1.0..1.0)),
    }
}

pub fn vector(rng: &mut TestRng, n: usize, field: Field) -> Vec<C64> {
    (0..n).map(|_| scalar(rng, field)).collect()
}

pub fn unit_vector(rng: &mut TestRng, n: usize, field: Field) -> Vec<C64> {
    loop {
        let v = vector(rng, n, field);
        let norm = vector::norm(&v);
        if norm > 1e-3 {
            return vector::scale(&v, C64::new(1.0 / norm, 0.0));
        }
    }
}

pub fn operator(rng: &mut TestRng, rows: usize, cols: usize, field: Field) -> Operator {
    Operator::from_fn(rows, cols, field, |_, _| scalar(rng, field))
}

/// Product of random `rows × rank` and `rank × cols` factors.
pub fn rank_deficient(
    rng: &mut TestRng,
    rows: usize,
    cols: usize,
    rank: usize,
    field: Field,
) -> Operator {
    &operator(rng, rows, rank, field) * &operator(rng, rank, cols, field)
}

pub fn hermitian(rng: &mut TestRng, n: usize, field: Field) -> Operator {
    operator(rng, n, n, field).hermitian_part()
}

/// `AA*` for a random `n × rank` factor `A`.
pub fn psd(rng: &mut TestRng, n: usize, rank: usize, field: Field) -> Operator {
    let a = operator(rng, n, rank, field);
    (&a * &a.adjoint()).hermitian_part()
}

/// `AA* + shift·I`, comfortably positive definite.
pub fn positive_definite(rng: &mut TestRng, n: usize, field: Field, shift: f64) -> Operator {
    &psd(rng, n, n, field) + &Operator::identity(n, field).scale(shift)
}

/// Invertible operator with condition number kept moderate.
pub fn invertible(rng: &mut TestRng, n: usize, field: Field) -> Operator {
    &operator(rng, n, n, field).scale(0.5) + &Operator::identity(n, field)
}

pub fn weights(rng: &mut TestRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.1..2.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `F` and `G` drawn independently.
    Mixed,
    /// `G = F`, so the frame operator is positive semidefinite.
    Symmetric,
    /// `G = F` plus a small perturbation.
    Perturbed,
}

pub fn system(
    rng: &mut TestRng,
    dim: usize,
    nodes: usize,
    field: Field,
    shape: Shape,
) -> BiframeSystem {
    let f: Vec<Vec<C64>> = (0..nodes).map(|_| vector(rng, dim, field)).collect();
    let g = match shape {
        Shape::Mixed => (0..nodes).map(|_| vector(rng, dim, field)).collect(),
        Shape::Symmetric => f.clone(),
        Shape::Perturbed => f
            .iter()
            .map(|x| {
                let mut y = x.clone();
                vector::axpy(&mut y, C64::new(0.1, 0.0), &vector(rng, dim, field));
                y
            })
            .collect(),
    };
    let k = operator(rng, dim, dim, field);
    assemble(field, &weights(rng, nodes), f, g, k)
}

pub fn assemble(
    field: Field,
    weights: &[f64],
    f: Vec<Vec<C64>>,
    g: Vec<Vec<C64>>,
    k: Operator,
) -> BiframeSystem {
    let dim = k.rows();
    BiframeSystem::new(
        field,
        DiscreteMeasure::from_weights(weights).unwrap(),
        SampledField::new(dim, f).unwrap(),
        SampledField::new(dim, g).unwrap(),
        k,
    )
    .unwrap()
}

/// A system whose frame operator is exactly `s` up to rounding: node `i`
/// samples `F = eᵢ` and `G = s·eᵢ / wᵢ`.
pub fn system_with_operator(rng: &mut TestRng, s: &Operator, k: Operator) -> BiframeSystem {
    let n = s.rows();
    let w = weights(rng, n);
    let f = (0..n).map(|i| vector::basis(n, i)).collect();
    let g = (0..n)
        .map(|i| vector::scale(&s.column(i), C64::new(1.0 / w[i], 0.0)))
        .collect();
    assemble(s.field().join(k.field()), &w, f, g, k)
}
