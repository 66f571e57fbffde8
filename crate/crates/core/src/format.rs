//! Number rendering shared by every CSV writer.
//!
//! Machine CSVs carry 12 significant digits, human tables 3 decimals.

/// 12 significant digits, shortest form, no exponent. Infinities render as
/// `inf` / `-inf`.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        // drop the sign of negative zero
        return "0".to_string();
    }
    format!("{rounded}")
}

pub fn fixed3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

pub fn opt_sig12(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

/// `0.025` → `2.5%`.
pub fn percent(x: f64) -> String {
    format!("{}%", sig12(x * 100.0))
}

/// Serde adapter for `f64` fields that may hold an infinity: JSON has no
/// infinities, so `±inf` travel as the strings `"inf"` / `"-inf"`.
pub mod serde_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*x)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("not a number: {s}"))),
        }
    }
}
