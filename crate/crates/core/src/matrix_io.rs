//! Text export and import of binary matrices.
//!
//! Two single-matrix formats:
//! * dense: one line of `0`/`1` characters per row;
//! * alist: the sparse format `cols rows` / `max_col_w max_row_w` / column
//!   weights / row weights / one line of 1-based row indices per column / one
//!   line of 1-based column indices per row.
//!
//! A parity-check pair is written as two sections headed `# H_X` and `# H_Z`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::BinMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    Dense,
    Alist,
}

impl std::str::FromStr for MatrixFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Self::Dense),
            "alist" => Ok(Self::Alist),
            other => Err(Error::InvalidArgument(format!(
                "unknown matrix format {other:?}"
            ))),
        }
    }
}

pub fn write_matrix(m: &BinMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Dense => write_dense(m),
        MatrixFormat::Alist => write_alist(m),
    }
}

pub fn write_dense(m: &BinMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * (m.cols() + 1));
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            out.push(if m.get(r, c) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn write_alist(m: &BinMatrix) -> String {
    let col_sets: Vec<Vec<usize>> = (0..m.cols())
        .map(|c| (0..m.rows()).filter(|&r| m.get(r, c)).collect())
        .collect();
    let row_sets: Vec<Vec<usize>> = (0..m.rows()).map(|r| m.row_support(r)).collect();
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let one_based = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.cols(), m.rows());
    let max_c = col_sets.iter().map(Vec::len).max().unwrap_or(0);
    let max_r = row_sets.iter().map(Vec::len).max().unwrap_or(0);
    let _ = writeln!(out, "{max_c} {max_r}");
    let _ = writeln!(
        out,
        "{}",
        join(&col_sets.iter().map(Vec::len).collect::<Vec<_>>())
    );
    let _ = writeln!(
        out,
        "{}",
        join(&row_sets.iter().map(Vec::len).collect::<Vec<_>>())
    );
    for c in &col_sets {
        let _ = writeln!(out, "{}", join(&one_based(c)));
    }
    for r in &row_sets {
        let _ = writeln!(out, "{}", join(&one_based(r)));
    }
    out
}

/// Parses either format. A first line of two whitespace-separated numbers
/// marks alist; dense rows carry no spaces.
pub fn read_matrix(text: &str) -> Result<BinMatrix> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        Some(line) if line.split_whitespace().count() == 2 => read_alist(text),
        _ => read_dense(text),
    }
}

pub fn read_dense(text: &str) -> Result<BinMatrix> {
    let rows: Vec<Vec<u8>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    other => Err(Error::MatrixFormat(format!(
                        "unexpected character {other:?}"
                    ))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(Error::MatrixFormat("no rows".into()));
    }
    BinMatrix::from_rows(&rows)
}

pub fn read_alist(text: &str) -> Result<BinMatrix> {
    let bad = |msg: &str| Error::MatrixFormat(msg.to_string());
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut numbers = |expect: Option<usize>| -> Result<Vec<usize>> {
        let line = lines.next().ok_or_else(|| bad("unexpected end of file"))?;
        let v = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| bad("non-numeric token")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(n) = expect {
            if v.len() != n {
                return Err(bad(&format!("expected {n} numbers, found {}", v.len())));
            }
        }
        Ok(v)
    };
    let dims = numbers(Some(2))?;
    let (cols, rows) = (dims[0], dims[1]);
    numbers(Some(2))?;
    let col_w = numbers(Some(cols))?;
    let row_w = numbers(Some(rows))?;
    let mut m = BinMatrix::zeros(rows, cols);
    for (c, &w) in col_w.iter().enumerate() {
        let entries = if w == 0 { Vec::new() } else { numbers(None)? };
        let entries: Vec<usize> = entries.into_iter().filter(|&x| x != 0).collect();
        if entries.len() != w {
            return Err(bad(&format!(
                "column {c} lists {} entries, weight {w}",
                entries.len()
            )));
        }
        for r in entries {
            if r > rows {
                return Err(bad("row index out of range"));
            }
            m.set(r - 1, c, true);
        }
    }
    for (r, &w) in row_w.iter().enumerate() {
        if m.row_weight(r) != w {
            return Err(bad(&format!("row {r} weight disagrees with column lists")));
        }
    }
    Ok(m)
}

pub fn write_check_pair(h_x: &BinMatrix, h_z: &BinMatrix, format: MatrixFormat) -> String {
    format!(
        "# H_X\n{}# H_Z\n{}",
        write_matrix(h_x, format),
        write_matrix(h_z, format)
    )
}

/// Reads the two-section file written by [`write_check_pair`].
pub fn read_check_pair(text: &str) -> Result<(BinMatrix, BinMatrix)> {
    let mut sections: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if let Some(name) = t.strip_prefix('#') {
            sections.push((name.trim().to_ascii_uppercase(), String::new()));
        } else if let Some((_, body)) = sections.last_mut() {
            body.push_str(line);
            body.push('\n');
        } else if !t.is_empty() {
            return Err(Error::MatrixFormat(
                "content before the first section header".into(),
            ));
        }
    }
    let find = |name: &str| {
        sections
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| Error::MatrixFormat(format!("missing section {name}")))
            .and_then(|(_, body)| read_matrix(body))
    };
    Ok((find("H_X")?, find("H_Z")?))
}
