//! Coefficient files: one period entry per line, columns `a[,b]`, `#` comments.

use thinspec::io::fmt_f64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("entry {index}: off-diagonal coefficient a = {value} must be positive")]
    NonPositive { index: usize, value: f64 },
    #[error("no coefficients found")]
    Empty,
}

/// Parses `a` and `b`. A single column means `b = 0`. Indices in errors are
/// 1-based entry numbers; line numbers count every physical line.
pub fn parse_coefficients(text: &str) -> Result<(Vec<f64>, Vec<f64>), ParseError> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut columns = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields.len() > 2 {
            return Err(ParseError::Syntax {
                line,
                msg: format!("expected 1 or 2 columns, found {}", fields.len()),
            });
        }
        match columns {
            None => columns = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(ParseError::Syntax {
                    line,
                    msg: format!("expected {c} columns like the previous lines, found {}", fields.len()),
                })
            }
            _ => {}
        }
        let num = |s: &str| -> Result<f64, ParseError> {
            let v: f64 = s.parse().map_err(|_| ParseError::Syntax {
                line,
                msg: format!("cannot parse {s:?} as a number"),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(ParseError::Syntax {
                    line,
                    msg: format!("{s:?} is not finite"),
                })
            }
        };
        let av = num(fields[0])?;
        if av <= 0.0 {
            return Err(ParseError::NonPositive {
                index: a.len() + 1,
                value: av,
            });
        }
        a.push(av);
        b.push(if fields.len() == 2 { num(fields[1])? } else { 0.0 });
    }
    if a.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok((a, b))
}

/// Emits the file format read by [`parse_coefficients`]; one column when
/// `b` vanishes identically.
pub fn emit_coefficients(a: &[f64], b: &[f64]) -> String {
    let two = b.iter().any(|&x| x != 0.0);
    let mut out = String::new();
    for (i, &av) in a.iter().enumerate() {
        out.push_str(&fmt_f64(av));
        if two {
            out.push(',');
            out.push_str(&fmt_f64(b[i]));
        }
        out.push('\n');
    }
    out
}

/// Parses an inline list such as `1,2.5,3`.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("cannot parse {t:?} as a finite number"))
        })
        .collect()
}
