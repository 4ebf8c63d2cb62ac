//! Report formats: CSV tables, JSON documents, SVG figures and scenario
//! files. Every float written goes through [`fmt_num`], so outputs are
//! byte-stable across runs.

mod csv_out;
mod scenario;
mod svg;

pub use csv_out::{audit_csv, convergence_csv, torus3_csv};
pub use scenario::{ConvergeScenario, Torus3Scenario};
pub use svg::{convergence_figure, geodesic_figure, profile_figure, ret_balls_figure, torus3_figure};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Result, WarpError};

/// Significant digits kept in every emitted number.
pub const SIG_DIGITS: usize = 12;

/// `v` rounded to 12 significant digits, in plain notation for exponents
/// in `[−5, 15)` and scientific otherwise, without trailing zeros.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, v);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if neg { "-" } else { "" };
    if !(-5..15).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() { format!("{sign}{head}e{exp}") } else { format!("{sign}{head}.{tail}e{exp}") };
    }
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{a}.{b}")
    };
    format!("{sign}{body}")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = fmt_num(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with floats rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// Reads a JSON file into `T`; unreadable files are input errors.
pub fn read_json<T: DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WarpError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(100.0), "100");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_num(-0.000123456789012345), "-0.000123456789012");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(2.5e20), "2.5e20");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(123456789012345.0), "123456789012000");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
        for x in [1.234e-3, 9.87654321e9, -42.125, 6.02214076e23] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn json_rounds_floats_only() {
        #[derive(Serialize, serde::Deserialize, PartialEq, Debug)]
        struct T {
            a: f64,
            n: u64,
            v: Vec<f64>,
        }
        let s = to_json(&T { a: 0.1 + 0.2, n: 7, v: vec![1.0 / 3.0] }).unwrap();
        assert!(s.contains("0.3,") && s.contains("0.333333333333") && s.contains("\"n\": 7"));
        let back: T = from_json(&s).unwrap();
        assert_eq!(back.n, 7);
    }
}
