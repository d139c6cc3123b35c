//! Text formatting shared by the subcommands.

use std::io::Write;

use ndyn::poly::Complex;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

const SIGNIFICANT_DIGITS: usize = 12;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits; `-0` becomes `0`.
pub(crate) fn tidy(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// A part of a complex number this small relative to its modulus prints as 0.
const NOISE: f64 = 1e-12;

fn snap_pair(items: &mut [Value]) {
    let [Some(re), Some(im)] = [items[0].as_f64(), items[1].as_f64()] else { return };
    let size = NOISE * re.abs().max(im.abs()).max(1.0);
    for (slot, x) in items.iter_mut().zip([re, im]) {
        if x.abs() <= size {
            *slot = Value::from(0.0);
        }
    }
}

/// Round numbers, drop noise from `[re, im]` pairs and flatten points of the sphere.
fn tidy_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(tidy(x))) {
                *n = x;
            }
        }
        Value::Array(items) => {
            if items.len() == 2 && items.iter().all(|x| x.is_f64()) {
                snap_pair(items);
            }
            items.iter_mut().for_each(tidy_value);
        }
        Value::Object(map) if map.len() == 1 && map.contains_key("Finite") => {
            let mut inner = map.remove("Finite").expect("checked");
            tidy_value(&mut inner);
            *v = inner;
        }
        Value::Object(map) => map.values_mut().for_each(tidy_value),
        Value::String(s) if s == "Infinity" => *s = "inf".into(),
        _ => {}
    }
}

/// `re+imi` with tidied parts.
pub(crate) fn fmt_complex(z: Complex) -> String {
    format!("{}{:+}i", tidy(z.re), tidy(z.im))
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Indented JSON; arrays of scalars stay on one line.
fn render(v: &Value, indent: usize, s: &mut String) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Array(items) if items.is_empty() => s.push_str("[]"),
        Value::Object(map) if map.is_empty() => s.push_str("{}"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            s.push('[');
            s.push_str(&parts.join(", "));
            s.push(']');
        }
        Value::Array(items) => {
            s.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                s.push_str(&pad);
                render(item, indent + 1, s);
                s.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            s.push_str(&"  ".repeat(indent));
            s.push(']');
        }
        Value::Object(map) => {
            s.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                s.push_str(&pad);
                s.push_str(&Value::String(k.clone()).to_string());
                s.push_str(": ");
                render(item, indent + 1, s);
                s.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            s.push_str(&"  ".repeat(indent));
            s.push('}');
        }
        scalar => s.push_str(&scalar.to_string()),
    }
}

/// JSON with sorted keys and tidied numbers, followed by a newline.
pub(crate) fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let mut v = serde_json::to_value(value).map_err(CliError::compute)?;
    tidy_value(&mut v);
    let mut text = String::new();
    render(&v, 0, &mut text);
    writeln!(out, "{text}").map_err(CliError::compute)
}
