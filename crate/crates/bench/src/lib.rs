//! Seeded inputs for the benchmarks.

use kbiframe::{BiframeSystem, DiscreteMeasure, Field, Operator, SampledField, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scalar(r: &mut ChaCha8Rng, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(r.gen_range(-1.0..1.0), 0.0),
        Field::Complex => C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)),
    }
}

pub fn operator(r: &mut ChaCha8Rng, n: usize, field: Field) -> Operator {
    Operator::from_fn(n, n, field, |_, _| scalar(r, field))
}

pub fn hermitian(r: &mut ChaCha8Rng, n: usize, field: Field) -> Operator {
    operator(r, n, field).hermitian_part()
}

/// `G = F` plus a small perturbation on `nodes` weighted nodes.
pub fn system(r: &mut ChaCha8Rng, dim: usize, nodes: usize, field: Field) -> BiframeSystem {
    let f: Vec<Vec<C64>> = (0..nodes)
        .map(|_| (0..dim).map(|_| scalar(r, field)).collect())
        .collect();
    let g = f
        .iter()
        .map(|x| x.iter().map(|z| z + scalar(r, field) * 0.1).collect())
        .collect();
    let weights: Vec<f64> = (0..nodes).map(|_| r.gen_range(0.1..2.0)).collect();
    BiframeSystem::new(
        field,
        DiscreteMeasure::from_weights(&weights).unwrap(),
        SampledField::new(dim, f).unwrap(),
        SampledField::new(dim, g).unwrap(),
        operator(r, dim, field),
    )
    .unwrap()
}
