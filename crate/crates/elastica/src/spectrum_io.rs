//! Plain-text spectrum files.
//!
//! ```text
//! # comment lines start with '#'
//! 2 0 4
//! 1 2.0003 3.1e-11
//! 2 2.0003 2.9e-11
//! 3 5.0021 4.0e-11
//! 4 5.0021 3.8e-11
//! ```
//!
//! The header is `n alpha count`. Each data line is `index value [residual]`;
//! a line holding only a value is also accepted. Residuals are all present
//! or all absent.

use std::fmt::Write as _;
use std::path::Path;

use elastica_core::{Spectrum, SpectrumSource};

use crate::error::{HarnessError, Result};

pub fn render(spectrum: &Spectrum) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", spectrum.dim(), spectrum.alpha(), spectrum.len());
    let residuals = match spectrum.source() {
        SpectrumSource::Computed { residuals, .. } => Some(residuals),
        SpectrumSource::Synthetic => None,
    };
    for (i, v) in spectrum.values().iter().enumerate() {
        match residuals {
            Some(r) => writeln!(out, "{} {} {:e}", i + 1, v, r[i]),
            None => writeln!(out, "{} {}", i + 1, v),
        }
        .unwrap();
    }
    out
}

pub fn write(path: &Path, spectrum: &Spectrum) -> Result<()> {
    std::fs::write(path, render(spectrum)).map_err(|e| HarnessError::io(path, e))
}

/// Reads a spectrum; residuals, when present, must not exceed `tolerance`.
pub fn read(path: &Path, tolerance: f64) -> Result<Spectrum> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse(&text, tolerance, Some(path.display().to_string())).map_err(|(line, message)| HarnessError::Format {
        path: path.into(),
        line,
        message,
    })
}

/// Parses file contents. Errors carry a 1-based line number (0 for the file
/// as a whole).
pub fn parse(text: &str, tolerance: f64, origin: Option<String>) -> Result<Spectrum, (usize, String)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or((0, "empty file".to_string()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err((hline, format!("header must be `n alpha count`, got `{header}`")));
    }
    let dim: usize = fields[0].parse().map_err(|_| (hline, format!("bad dimension `{}`", fields[0])))?;
    let alpha: f64 = fields[1].parse().map_err(|_| (hline, format!("bad alpha `{}`", fields[1])))?;
    let count: usize = fields[2].parse().map_err(|_| (hline, format!("bad count `{}`", fields[2])))?;

    let mut values = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for (n, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        let number = |s: &str| s.parse::<f64>().map_err(|_| (n, format!("cannot read `{s}` as a number")));
        let (index, value, residual) = match f.len() {
            1 => (None, number(f[0])?, None),
            2 => (Some(f[0]), number(f[1])?, None),
            3 => (Some(f[0]), number(f[1])?, Some(number(f[2])?)),
            _ => return Err((n, format!("expected `index value [residual]`, got `{line}`"))),
        };
        if let Some(idx) = index {
            if idx.parse::<usize>() != Ok(values.len() + 1) {
                return Err((n, format!("index `{idx}` out of sequence; expected {}", values.len() + 1)));
            }
        }
        if !(value > 0.0) || !value.is_finite() {
            return Err((n, format!("eigenvalue {value} is not positive")));
        }
        if let Some(&last) = values.last() {
            if value < last {
                return Err((n, format!("eigenvalues are not sorted: {value} follows {last}")));
            }
        }
        if residual.is_some() != (residuals.len() == values.len()) && !values.is_empty() {
            return Err((n, "residuals must be given on every line or on none".into()));
        }
        values.push(value);
        if let Some(r) = residual {
            residuals.push(r);
        }
    }
    if values.len() != count {
        return Err((0, format!("header announces {count} values, file has {}", values.len())));
    }
    let spectrum = if residuals.is_empty() {
        Spectrum::synthetic(dim, alpha, values)
    } else {
        Spectrum::computed(dim, alpha, values, origin, residuals, tolerance)
    };
    spectrum.map_err(|e| (0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let values = vec![2.0000123456789012, 2.0000123456789012, 5.1, 5.100000000000001];
        let s = Spectrum::computed(2, 0.5, values.clone(), None, vec![1e-11, 2e-12, 3e-10, 0.0], 1e-8).unwrap();
        let back = parse(&render(&s), 1e-8, None).unwrap();
        assert_eq!(back.values(), &values[..]);
        assert_eq!(back.alpha(), 0.5);
        assert_eq!(render(&back), render(&s));
    }

    #[test]
    fn tolerant_columns_and_comments() {
        let s = parse("# generated\n3 0.5 3\n\n1\n4\n9\n", 1e-8, None).unwrap();
        assert_eq!(s.values(), &[1.0, 4.0, 9.0]);
        assert_eq!(*s.source(), SpectrumSource::Synthetic);
        let s = parse("2 0 2\n1 1.0\n2 3.0\n", 1e-8, None).unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn inconsistent_files_are_load_errors() {
        assert_eq!(parse("2 0 2\n1 3.0\n2 1.0\n", 1e-8, None).unwrap_err().0, 3);
        assert_eq!(parse("2 0 2\n1 -1.0\n2 1.0\n", 1e-8, None).unwrap_err().0, 2);
        assert_eq!(parse("2 0 3\n1 1.0\n2 2.0\n", 1e-8, None).unwrap_err().0, 0);
        assert_eq!(parse("2 0\n", 1e-8, None).unwrap_err().0, 1);
        assert_eq!(parse("2 0 2\n1 1.0\n3 2.0\n", 1e-8, None).unwrap_err().0, 3);
        assert_eq!(parse("2 0 2\n1 1.0 1e-9\n2 2.0\n", 1e-8, None).unwrap_err().0, 3);
        assert!(parse("2 0 1\n1 1.0 1e-3\n", 1e-8, None).unwrap_err().1.contains("residual"));
        assert!(parse("", 1e-8, None).is_err());
    }
}
