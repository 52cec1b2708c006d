//! Matrix Market coordinate files for symmetric real matrices.
//!
//! Writing emits the lower triangle with the `symmetric` qualifier. Reading
//! accepts `real` or `integer` data in `symmetric` or `general` storage; a
//! general file must describe a symmetric matrix.

use std::fmt::Write as _;
use std::path::Path;

use elastica_core::SparseSymMatrix;

use crate::error::{HarnessError, Result};

pub fn render(matrix: &SparseSymMatrix, comment: Option<&str>) -> String {
    let entries: Vec<_> = matrix.lower_triplets().collect();
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "% {line}");
        }
    }
    let n = matrix.order();
    let _ = writeln!(out, "{n} {n} {}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
    }
    out
}

pub fn write(path: &Path, matrix: &SparseSymMatrix, comment: Option<&str>) -> Result<()> {
    std::fs::write(path, render(matrix, comment)).map_err(|e| HarnessError::io(path, e))
}

pub fn read(path: &Path) -> Result<SparseSymMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse(&text).map_err(|(line, message)| HarnessError::Format {
        path: path.into(),
        line,
        message,
    })
}

pub fn parse(text: &str) -> Result<SparseSymMatrix, (usize, String)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or((0, "empty file".to_string()))?;
    let banner: Vec<String> = banner.split_whitespace().map(str::to_lowercase).collect();
    if banner.len() != 5 || banner[0] != "%%matrixmarket" || banner[1] != "matrix" || banner[2] != "coordinate" {
        return Err((1, "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`".into()));
    }
    if banner[3] != "real" && banner[3] != "integer" {
        return Err((1, format!("unsupported field `{}`", banner[3])));
    }
    let symmetric = match banner[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err((1, format!("unsupported symmetry `{other}`"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = body.next().ok_or((0, "missing size line".to_string()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| (sline, format!("bad size entry `{t}`"))))
        .collect::<Result<_, _>>()?;
    if dims.len() != 3 || dims[0] != dims[1] {
        return Err((sline, format!("expected `n n nnz` for a square matrix, got `{size}`")));
    }
    let (n, nnz) = (dims[0], dims[2]);

    let mut triplets = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    let mut seen = 0;
    for (ln, line) in body {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err((ln, format!("expected `row col value`, got `{line}`")));
        }
        let idx = |s: &str| match s.parse::<usize>() {
            Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
            _ => Err((ln, format!("index `{s}` outside 1..={n}"))),
        };
        let (i, j) = (idx(f[0])?, idx(f[1])?);
        let v: f64 = f[2].parse().map_err(|_| (ln, format!("bad value `{}`", f[2])))?;
        if symmetric && j > i {
            return Err((ln, "symmetric storage lists the lower triangle only".into()));
        }
        triplets.push((i, j, v));
        if symmetric && i != j {
            triplets.push((j, i, v));
        }
        seen += 1;
    }
    if seen != nnz {
        return Err((0, format!("size line announces {nnz} entries, file has {seen}")));
    }
    let m = SparseSymMatrix::from_triplets(n, &triplets);
    if !symmetric && m.max_asymmetry() > 0.0 {
        return Err((0, "general matrix is not symmetric".into()));
    }
    Ok(m)
}
