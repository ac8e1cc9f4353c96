//! Bounds, constructions and tensor products for biframe systems sampled on
//! finite measure spaces.

// `!(x > 0.0)` style checks reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biframe;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod manifest;
pub mod measure;
pub mod opcalc;
pub mod quotient;
pub mod tensor;

pub use biframe::{
    biframe_form, classify, frame_operator, optimal_bounds, verify_bounds, BiframeSystem,
    BoundSide, BoundsReport, BoundsVerdict, Classification, SampledField,
};
pub use error::{Error, Result};
pub use fixtures::{fixture, fixture_with, Fixture, FixtureOptions, FIXTURE_NAMES};
pub use linalg::{Field, Operator, C64, DEFAULT_RANK_TOL, DEFAULT_TOL};
pub use manifest::{load, save, Manifest};
pub use measure::{DiscreteMeasure, Interval, Node};
pub use opcalc::{Certificate, ConstructionResult, Rule, Strength, SumTerm};
pub use quotient::{quotient_norm, QuotientResult};
pub use tensor::{kron, tensor_system, TensorSystem};
