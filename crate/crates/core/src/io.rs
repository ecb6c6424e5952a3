//! Plain-text point and weight files.
//!
//! Points: one point per line, whitespace-separated reals, `#` starts a
//! comment line, blank lines are skipped. The dimension is fixed by the first
//! point. Rows need not be unit length; they are normalized on load.
//!
//! Weights: one positive real per line, same comment rules.

use std::path::Path;

use crate::error::{Error, Result};
use crate::projective::UnitVector;

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_real(line: usize, tok: &str) -> Result<f64> {
    let x: f64 = tok.parse().map_err(|_| Error::Parse { line, msg: format!("not a real number: {tok:?}") })?;
    if !x.is_finite() {
        return Err(Error::Parse { line, msg: format!("non-finite value {tok:?}") });
    }
    Ok(x)
}

pub fn parse_points(text: &str) -> Result<Vec<UnitVector>> {
    let mut dim = None;
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let coords = l.split_whitespace().map(|t| parse_real(line, t)).collect::<Result<Vec<_>>>()?;
        let d = *dim.get_or_insert(coords.len());
        if coords.len() != d {
            return Err(Error::Parse { line, msg: format!("expected {d} coordinates, found {}", coords.len()) });
        }
        let p = UnitVector::normalize(coords).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        out.push(p);
    }
    if out.is_empty() {
        return Err(Error::InvalidPointSet("no points".into()));
    }
    Ok(out)
}

pub fn parse_weights(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let mut toks = l.split_whitespace();
        let w = parse_real(line, toks.next().unwrap_or_default())?;
        if toks.next().is_some() {
            return Err(Error::Parse { line, msg: "expected a single weight".into() });
        }
        if w <= 0.0 {
            return Err(Error::Parse { line, msg: format!("weight must be positive, got {w}") });
        }
        out.push(w);
    }
    Ok(out)
}

pub fn read_points(path: &Path) -> Result<Vec<UnitVector>> {
    parse_points(&std::fs::read_to_string(path)?)
}

pub fn read_weights(path: &Path) -> Result<Vec<f64>> {
    parse_weights(&std::fs::read_to_string(path)?)
}

/// Inverse of [`parse_points`], with enough digits to round-trip.
pub fn format_points(points: &[UnitVector]) -> String {
    let mut s = String::new();
    for p in points {
        let row: Vec<String> = p.as_slice().iter().map(|x| format!("{x:e}")).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}
