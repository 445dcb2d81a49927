//! JSON output with round-trip exact floats.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// Writes every float with 17 significant digits and non-finite values as
/// `null`.
#[derive(Debug, Default, Clone, Copy)]
pub struct ExactFloatFormatter;

impl Formatter for ExactFloatFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
}

/// Serializes to a JSON string using [`ExactFloatFormatter`].
pub fn to_json<V: Serialize + ?Sized>(value: &V) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloatFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Formats one float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let xs = [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            12345.678901234567,
            f64::MIN_POSITIVE,
        ];
        let s = to_json(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_json(&[f64::NAN, f64::INFINITY]).unwrap(), "[null,null]");
    }
}
