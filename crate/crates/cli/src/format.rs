//! Number and vector rendering for reports.

use kbiframe::{biframe_form, BiframeSystem, Field, C64};
use serde_json::{json, Value};

const DIGITS: i32 = 12;

/// `x` rounded to 12 significant digits with trailing zeros dropped.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        let s = format!("{:.*e}", (DIGITS - 1) as usize, x);
        let (mantissa, e) = s.split_once('e').unwrap();
        format!("{}e{e}", trim(mantissa))
    }
}

fn trim(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

pub fn scalar(z: C64, field: Field) -> String {
    match field {
        Field::Real => num(z.re),
        Field::Complex if z.im == 0.0 => num(z.re),
        Field::Complex => {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", num(z.re), num(z.im.abs()))
        }
    }
}

pub fn vector(v: &[C64], field: Field) -> String {
    let parts: Vec<String> = v.iter().map(|&z| scalar(z, field)).collect();
    format!("({})", parts.join(", "))
}

pub fn json_vector(v: &[C64], field: Field) -> Value {
    match field {
        Field::Real => json!(v.iter().map(|z| z.re).collect::<Vec<_>>()),
        Field::Complex => json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
    }
}

/// JSON has no infinities; those become `null`.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// A witness rescaled so its largest entry is exactly 1, with the form value
/// there. Entries below `1e-12` of the peak are set to zero.
pub struct Witness {
    pub vector: Vec<C64>,
    pub form: f64,
}

impl Witness {
    pub fn new(sys: &BiframeSystem, w: &[C64], tol: f64) -> Option<Self> {
        let peak = w.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if peak == 0.0 {
            return None;
        }
        let pivot = *w.iter().find(|z| z.norm() >= (1.0 - 1e-9) * peak)?;
        let vector: Vec<C64> = w
            .iter()
            .map(|z| {
                let s = z / pivot;
                let snap = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
                C64::new(snap(s.re), snap(s.im))
            })
            .collect();
        let form = biframe_form(sys, &vector, tol).ok()?.value;
        Some(Witness { vector, form })
    }

    pub fn text(&self, field: Field) -> String {
        format!(
            "witness {}\nform at witness {}",
            vector(&self.vector, field),
            num(self.form)
        )
    }

    pub fn json(&self, field: Field) -> Value {
        json!({ "vector": json_vector(&self.vector, field), "form": self.form })
    }
}
