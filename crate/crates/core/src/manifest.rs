//! JSON manifests for biframe systems.
//!
//! Keys are written in sorted order and numbers in shortest round-trip form,
//! so `load(save(x))` reproduces every entry bit for bit. Complex scalars are
//! two-element arrays `[re, im]`, real ones plain numbers.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::biframe::{BiframeSystem, SampledField};
use crate::error::{Error, Result};
use crate::linalg::{Field, Operator, C64};
use crate::measure::{DiscreteMeasure, Node};

pub const FORMAT_VERSION: u32 = 1;

/// A system together with the optional claim and label stored beside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub system: BiframeSystem,
    pub claimed_bounds: Option<(f64, f64)>,
    pub label: Option<String>,
}

impl Manifest {
    pub fn new(system: BiframeSystem) -> Self {
        Manifest {
            system,
            claimed_bounds: None,
            label: None,
        }
    }

    pub fn with_claim(mut self, lower: f64, upper: f64) -> Self {
        self.claimed_bounds = Some((lower, upper));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Raw = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        raw.into_manifest()
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(&Raw::from_manifest(self)).expect("manifest serializes");
        text.push('\n');
        text
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<Manifest> {
    Manifest::from_json(&fs::read_to_string(path)?)
}

pub fn save(manifest: &Manifest, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, manifest.to_json())?;
    Ok(())
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    fn encode(z: C64, field: Field) -> Self {
        match field {
            Field::Real => Scalar::Real(z.re),
            Field::Complex => Scalar::Complex([z.re, z.im]),
        }
    }

    fn decode(self) -> C64 {
        match self {
            Scalar::Real(re) => C64::new(re, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: String,
    weight: f64,
}

// Fields are declared in sorted key order, which fixes the output order.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    #[serde(rename = "F")]
    f: Vec<Vec<Scalar>>,
    #[serde(rename = "G")]
    g: Vec<Vec<Scalar>>,
    #[serde(rename = "K")]
    k: Vec<Vec<Scalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claimed_bounds: Option<[f64; 2]>,
    dim: usize,
    field: Field,
    format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    measure: Vec<RawNode>,
}

fn encode_rows(rows: &[Vec<C64>], field: Field) -> Vec<Vec<Scalar>> {
    rows.iter()
        .map(|r| r.iter().map(|&z| Scalar::encode(z, field)).collect())
        .collect()
}

fn decode_rows(rows: Vec<Vec<Scalar>>) -> Vec<Vec<C64>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(Scalar::decode).collect())
        .collect()
}

fn invalid(e: Error) -> Error {
    match e {
        Error::Validation(_) => e,
        other => Error::Validation(other.to_string()),
    }
}

impl Raw {
    fn from_manifest(m: &Manifest) -> Self {
        let sys = &m.system;
        let field = sys.field();
        let k = sys.k();
        let k_rows: Vec<Vec<C64>> = (0..k.rows()).map(|i| k.row(i).to_vec()).collect();
        Raw {
            f: encode_rows(sys.f().samples(), field),
            g: encode_rows(sys.g().samples(), field),
            k: encode_rows(&k_rows, field),
            claimed_bounds: m.claimed_bounds.map(|(a, b)| [a, b]),
            dim: sys.dim(),
            field,
            format_version: FORMAT_VERSION,
            label: m.label.clone(),
            measure: sys
                .measure()
                .nodes()
                .iter()
                .map(|n| RawNode {
                    id: n.id.clone(),
                    weight: n.weight,
                })
                .collect(),
        }
    }

    fn into_manifest(self) -> Result<Manifest> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let n = self.dim;
        if self.k.len() != n || self.k.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!(
                "K must have {n} rows of {n} entries"
            )));
        }
        if let Some([a, b]) = self.claimed_bounds {
            if !(a > 0.0 && a <= b && b.is_finite()) {
                return Err(Error::Validation(format!(
                    "claimed_bounds need 0 < A <= B, got [{a}, {b}]"
                )));
            }
        }
        let nodes = self
            .measure
            .into_iter()
            .map(|n| Node {
                id: n.id,
                weight: n.weight,
            })
            .collect();
        let measure = DiscreteMeasure::new(nodes).map_err(invalid)?;
        let k_rows = decode_rows(self.k);
        let k = Operator::from_rows(self.field, &k_rows);
        let f = SampledField::new(n, decode_rows(self.f)).map_err(invalid)?;
        let g = SampledField::new(n, decode_rows(self.g)).map_err(invalid)?;
        let system = BiframeSystem::new(self.field, measure, f, g, k).map_err(invalid)?;
        Ok(Manifest {
            system,
            claimed_bounds: self.claimed_bounds.map(|[a, b]| (a, b)),
            label: self.label,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture, FIXTURE_NAMES};

    fn minimal(measure: &str) -> String {
        format!(
            r#"{{"F": [[1.0]], "G": [[1.0]], "K": [[1.0]], "dim": 1, "field": "real",
                "format_version": 1, "measure": {measure}}}"#
        )
    }

    #[test]
    fn round_trip_fixtures() {
        for name in FIXTURE_NAMES {
            let fx = fixture(name).unwrap();
            let m = Manifest::new(fx.system)
                .with_claim(fx.claimed.0, fx.claimed.1)
                .with_label(name);
            let text = m.to_json();
            let back = Manifest::from_json(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_json(), text);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let text = Manifest::new(fixture("example-3-3").unwrap().system).to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        let positions: Vec<usize> = keys
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn complex_entries_are_pairs() {
        let text = r#"{"F": [[[1.0, 2.0]]], "G": [[1.0]], "K": [[[0.0, 1.0]]], "dim": 1,
                       "field": "complex", "format_version": 1, "measure": [{"id": "a", "weight": 0.5}]}"#;
        let m = Manifest::from_json(text).unwrap();
        assert_eq!(m.system.f().sample(0)[0], C64::new(1.0, 2.0));
        assert_eq!(m.system.k().get(0, 0), C64::new(0.0, 1.0));
        assert!(m
            .to_json()
            .contains("[\n        1.0,\n        2.0\n      ]"));
    }

    #[test]
    fn empty_measure_is_invalid() {
        assert!(matches!(
            Manifest::from_json(&minimal("[]")),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn negative_weight_is_invalid() {
        let err = Manifest::from_json(&minimal(r#"[{"id": "a", "weight": -1.0}]"#)).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains("weights strictly positive")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = Manifest::from_json("{\n  \"dim\": 1,\n  oops\n}").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn imaginary_entry_in_real_field_is_invalid() {
        let text = minimal(r#"[{"id": "a", "weight": 1.0}]"#)
            .replace(r#""F": [[1.0]]"#, r#""F": [[[1.0, 1.0]]]"#);
        assert!(matches!(
            Manifest::from_json(&text),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn save_overwrites() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sys.json");
        fs::write(&path, "stale").unwrap();
        let m = Manifest::new(fixture("example-3-11").unwrap().system);
        save(&m, &path).unwrap();
        assert_eq!(load(&path).unwrap(), m);
    }
}
