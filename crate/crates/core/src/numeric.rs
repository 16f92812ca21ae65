//! Tolerances, probability literals and fixed-precision decimal formatting.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Absolute tolerance for probability mass and utility comparisons.
pub const TOLERANCE: f64 = 1e-9;

/// Significant digits used in machine-readable graph output.
pub const JSON_DIGITS: usize = 12;

/// Significant digits used in DOT and text output.
pub const DISPLAY_DIGITS: usize = 4;

/// Parses a probability literal: a decimal number or an exact fraction `"p/q"`.
pub fn parse_probability(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in fraction {s:?}"))?;
        let den: f64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in fraction {s:?}"))?;
        if den == 0.0 {
            return Err(format!("zero denominator in fraction {s:?}"));
        }
        Ok(num / den)
    } else {
        s.parse().map_err(|_| format!("not a probability: {s:?}"))
    }
}

/// A probability as it appears in scenario files. Serializes as a plain
/// JSON number; accepts numbers or `"p/q"` strings.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Prob(pub f64);

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ProbVisitor;
        impl Visitor<'_> for ProbVisitor {
            type Value = Prob;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a fraction string \"p/q\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Prob, E> {
                Ok(Prob(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Prob, E> {
                Ok(Prob(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Prob, E> {
                Ok(Prob(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Prob, E> {
                parse_probability(v).map(Prob).map_err(E::custom)
            }
        }
        d.deserialize_any(ProbVisitor)
    }
}

/// Formats `x` with at most `digits` significant digits, trimming trailing
/// zeros. Plain notation is used for moderate exponents, scientific otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let (sign, mantissa) = match mantissa.strip_prefix('-') {
            Some(m) => ("-", m),
            None => ("", mantissa),
        };
        let mut ds: String = mantissa.chars().filter(char::is_ascii_digit).collect();
        let plain = if exp >= 0 {
            let int_len = exp as usize + 1;
            while ds.len() < int_len {
                ds.push('0');
            }
            let (int, frac) = ds.split_at(int_len);
            format!("{sign}{int}.{frac}")
        } else {
            format!("{sign}0.{}{ds}", "0".repeat((-exp - 1) as usize))
        };
        trim_zeros(plain)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

/// Rounds to the machine-readable precision. Idempotent.
pub fn round_json(x: f64) -> f64 {
    format_sig(x, JSON_DIGITS).parse().unwrap_or(x)
}

/// Display form of a stored weight. Rounds through the JSON precision first so
/// that a graph re-read from JSON displays exactly like the original.
pub fn display(x: f64) -> String {
    format_sig(round_json(x), DISPLAY_DIGITS)
}

/// Serde adapter: `f64` as a 12-significant-digit decimal string.
pub mod decimal {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_sig(*x, JSON_DIGITS))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Serde adapter: `Vec<f64>` as an array of decimal strings.
pub mod decimal_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&format_sig(*x, JSON_DIGITS))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(de::Error::custom)).collect()
    }
}
