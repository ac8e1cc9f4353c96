//! Catalog of worked example systems.

use crate::biframe::{BiframeSystem, SampledField};
use crate::error::{Error, Result};
use crate::linalg::{vector, Field, Operator, C64};
use crate::measure::{from_partition, gauss_legendre, Interval, DEFAULT_QUAD_NODES};

pub const FIXTURE_NAMES: [&str; 6] = [
    "example-3-3",
    "example-3-4",
    "example-3-5",
    "example-3-11",
    "example-5-3-left",
    "example-5-3-right",
];

/// Cell masses of the three-cell partitions. Any masses work, the samples are
/// normalized by `1/√mass` so each cell contributes its coefficient exactly.
const PARTITION_MASSES: [f64; 3] = [3.0, 2.0, 1.5];

#[derive(Debug, Clone, Copy)]
pub struct FixtureOptions {
    /// Gauss–Legendre nodes for the interval example.
    pub quad_nodes: usize,
    /// Dimension kept from the infinite-dimensional examples.
    pub truncation: usize,
    /// Rank of the coordinate projection used as target there.
    pub projection_rank: usize,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions {
            quad_nodes: DEFAULT_QUAD_NODES,
            truncation: 8,
            projection_rank: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub system: BiframeSystem,
    /// Bounds the example claims for the system.
    pub claimed: (f64, f64),
}

pub fn fixture(name: &str) -> Result<Fixture> {
    fixture_with(name, &FixtureOptions::default())
}

pub fn fixture_with(name: &str, opts: &FixtureOptions) -> Result<Fixture> {
    let (name, system, claimed) = match name {
        "example-3-3" => ("example-3-3", permuted_partition()?, (2.0, 5.0)),
        "example-3-4" => ("example-3-4", interval_pair(opts.quad_nodes)?, (0.75, 4.0)),
        "example-3-5" => ("example-3-5", projected_sequence(opts)?, (1.0, 2.0)),
        "example-3-11" => ("example-3-11", skew_partition()?, (1.25, 11.0)),
        "example-5-3-left" => ("example-5-3-left", projected_sequence(opts)?, (1.0, 2.0)),
        "example-5-3-right" => ("example-5-3-right", even_projection(opts)?, (1.0, 3.0)),
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    Ok(Fixture {
        name,
        system,
        claimed,
    })
}

fn scaled_basis(n: usize, k: usize, c: f64) -> Vec<C64> {
    vector::scale(&vector::basis(n, k), C64::new(c, 0.0))
}

/// Partition system with samples `fᵢ/√mass(Bᵢ)` and `gᵢ/√mass(Bᵢ)`.
fn partition_system(
    masses: &[f64],
    f: Vec<Vec<C64>>,
    g: Vec<Vec<C64>>,
    k: Operator,
) -> Result<BiframeSystem> {
    let dim = k.rows();
    let norm = |v: Vec<Vec<C64>>| -> Vec<Vec<C64>> {
        v.into_iter()
            .zip(masses)
            .map(|(s, m)| vector::scale(&s, C64::new(1.0 / m.sqrt(), 0.0)))
            .collect()
    };
    BiframeSystem::new(
        Field::Real,
        from_partition(masses)?,
        SampledField::new(dim, norm(f))?,
        SampledField::new(dim, norm(g))?,
        k,
    )
}

/// Form `4|x₁|² + 3|x₂|² + 2|x₃|²` with `K` swapping `e₂` and `e₃`.
fn permuted_partition() -> Result<BiframeSystem> {
    let f = vec![
        scaled_basis(3, 0, 2.0),
        scaled_basis(3, 1, 3.0),
        scaled_basis(3, 2, -2.0),
    ];
    let g = vec![
        scaled_basis(3, 0, 2.0),
        scaled_basis(3, 1, 1.0),
        scaled_basis(3, 2, -1.0),
    ];
    let k = Operator::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]]);
    partition_system(&PARTITION_MASSES, f, g, k)
}

/// `F(w) = (2w, 1, 1)`, `G(w) = (1, 2w, 1)` on `[0, 1]`.
fn interval_pair(quad_nodes: usize) -> Result<BiframeSystem> {
    let q = gauss_legendre(Interval::unit(), quad_nodes)?;
    let f: Vec<Vec<f64>> = q.points.iter().map(|&w| vec![2.0 * w, 1.0, 1.0]).collect();
    let g: Vec<Vec<f64>> = q.points.iter().map(|&w| vec![1.0, 2.0 * w, 1.0]).collect();
    let k = Operator::from_real_rows(&[[1.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]);
    BiframeSystem::new(
        Field::Real,
        q.measure,
        SampledField::from_real(3, &f)?,
        SampledField::from_real(3, &g)?,
        k,
    )
}

/// Rows of `F` are `f₁, f₂, f₃`, `G` is the standard basis, `K = diag(2, −2, −2)`.
fn skew_partition() -> Result<BiframeSystem> {
    let f = vec![
        vector::from_real(&[5.0, 1.0, 1.0]),
        vector::from_real(&[-1.0, 7.0, -1.0]),
        vector::from_real(&[-1.0, 1.0, 11.0]),
    ];
    let g = (0..3).map(|k| vector::basis(3, k)).collect();
    partition_system(
        &PARTITION_MASSES,
        f,
        g,
        Operator::diag_real(&[2.0, -2.0, -2.0]),
    )
}

fn truncated_masses(cells: usize) -> Vec<f64> {
    (0..cells).map(|i| 1.0 + 0.5 * i as f64).collect()
}

fn coordinate_projection(n: usize, keep: impl Fn(usize) -> bool) -> Operator {
    let d: Vec<f64> = (0..n).map(|i| if keep(i) { 1.0 } else { 0.0 }).collect();
    Operator::diag_real(&d)
}

/// Form `|⟨f, e₁⟩|² + ‖f‖²` truncated to `opts.truncation` coordinates, with
/// target the projection onto the first `opts.projection_rank` coordinates.
///
/// One cell pairs `3e₁` with `e₁/3`, then cell `j` pairs `2eⱼ` with `eⱼ/2`.
fn projected_sequence(opts: &FixtureOptions) -> Result<BiframeSystem> {
    let n = opts.truncation;
    if opts.projection_rank == 0 || opts.projection_rank > n {
        return Err(Error::Validation(format!(
            "projection rank {} must lie in 1..={n}",
            opts.projection_rank
        )));
    }
    let mut f = vec![scaled_basis(n, 0, 3.0)];
    let mut g = vec![scaled_basis(n, 0, 1.0 / 3.0)];
    for j in 0..n {
        f.push(scaled_basis(n, j, 2.0));
        g.push(scaled_basis(n, j, 0.5));
    }
    let k = coordinate_projection(n, |i| i < opts.projection_rank);
    partition_system(&truncated_masses(n + 1), f, g, k)
}

/// Form `|⟨g, e₁⟩|² + 2‖g‖²` with target the projection onto `e₂, e₄, …`.
fn even_projection(opts: &FixtureOptions) -> Result<BiframeSystem> {
    let n = opts.truncation;
    let mut f = vec![scaled_basis(n, 0, 5.0)];
    let mut g = vec![scaled_basis(n, 0, 0.2)];
    for j in 0..n {
        f.push(scaled_basis(n, j, 2.0));
        g.push(vector::basis(n, j));
    }
    // 1-based even coordinates are the odd 0-based ones
    let k = coordinate_projection(n, |i| i % 2 == 1);
    partition_system(&truncated_masses(n + 1), f, g, k)
}
