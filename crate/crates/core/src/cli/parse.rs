//! Command-line literals for signals and probability profiles.
//!
//! Signals: terms joined by `+`, each one of
//! * `point:v@x`: `v delta_x`;
//! * `block:v@a..b`: `v` on the half-open range `[a, b)`;
//! * `file:path`: JSON `{offset, values}`, or the binary signal format when
//!   the path ends in `.bin`.
//!
//! Profiles: `power:alpha`, `const:p`, `invlog`, or `file:path` holding one
//! `tau_n` per line.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kernel::IntegerSignal;
use crate::selector::TauProfile;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn num<T: std::str::FromStr>(s: &str, what: &str, term: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(format!("bad {what} '{s}' in '{term}'")))
}

pub fn parse_signal(text: &str) -> Result<IntegerSignal> {
    let mut acc = IntegerSignal::zero();
    let mut any = false;
    for term in split_terms(text) {
        let term = term.trim();
        if term.is_empty() {
            return Err(parse_err(format!("empty term in signal '{text}'")));
        }
        acc = acc.add(&parse_term(term)?);
        any = true;
    }
    if !any {
        return Err(parse_err("empty signal literal"));
    }
    Ok(acc)
}

/// Split on `+` only where a new term starts, so signs inside numbers
/// (`1e+3`) and `+` inside file paths are left alone.
fn split_terms(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, _) in text.match_indices('+') {
        let next = text[i + 1..].trim_start();
        if ["point:", "block:", "file:"].iter().any(|k| next.starts_with(k)) {
            out.push(&text[start..i]);
            start = i + 1;
        }
    }
    out.push(&text[start..]);
    out
}

fn parse_term(term: &str) -> Result<IntegerSignal> {
    let (kind, body) = term
        .split_once(':')
        .ok_or_else(|| parse_err(format!("signal term '{term}' lacks a kind prefix")))?;
    match kind {
        "point" => {
            let (v, x) = body
                .split_once('@')
                .ok_or_else(|| parse_err(format!("expected point:v@x, got '{term}'")))?;
            let v: f64 = num(v, "value", term)?;
            finite(v, term)?;
            Ok(IntegerSignal::delta(num(x, "position", term)?, v))
        }
        "block" => {
            let (v, range) = body
                .split_once('@')
                .ok_or_else(|| parse_err(format!("expected block:v@a..b, got '{term}'")))?;
            let (a, b) = range
                .split_once("..")
                .ok_or_else(|| parse_err(format!("expected a..b range in '{term}'")))?;
            let v: f64 = num(v, "value", term)?;
            finite(v, term)?;
            let a: i64 = num(a, "start", term)?;
            let b: i64 = num(b, "end", term)?;
            if b <= a {
                return Err(parse_err(format!("empty block range in '{term}'")));
            }
            if b - a > 1 << 28 {
                return Err(parse_err(format!("block range too long in '{term}'")));
            }
            Ok(IntegerSignal::block(a, b, v))
        }
        "file" => read_signal_file(Path::new(body)),
        other => Err(parse_err(format!("unknown signal kind '{other}'"))),
    }
}

fn finite(v: f64, term: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(parse_err(format!("non-finite value in '{term}'")))
    }
}

fn read_signal_file(path: &Path) -> Result<IntegerSignal> {
    if path.extension().is_some_and(|e| e == "bin") {
        IntegerSignal::from_binary(&std::fs::read(path)?)
    } else {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Profile literal; `len` sizes the explicit profiles.
pub fn parse_tau(text: &str, len: usize) -> Result<TauProfile> {
    let text = text.trim();
    if text == "invlog" {
        return Ok(TauProfile::inverse_log(len));
    }
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| parse_err(format!("unknown profile '{text}'")))?;
    match kind {
        "power" => Ok(TauProfile::power_law(num(body, "exponent", text)?)),
        "const" => Ok(TauProfile::constant(num(body, "probability", text)?, len)),
        "file" => {
            let raw = std::fs::read_to_string(body)?;
            let values = raw
                .split_whitespace()
                .map(|t| num(t, "probability", text))
                .collect::<Result<Vec<f64>>>()?;
            Ok(TauProfile::Explicit { values })
        }
        other => Err(parse_err(format!("unknown profile kind '{other}'"))),
    }
}
