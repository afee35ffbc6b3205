//! The plain-text solution format.
//!
//! ```text
//! # optional comment lines
//! 3
//! 2 3 1
//! 2 3 1
//! 2 3 1
//! ```
//!
//! The first line is `n`; the next `n` lines hold the images of `σ_1..σ_n`
//! as 1-based integers. τ is never stored. A stream holds several records
//! separated by blank lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::solution::{Solution, SolutionError, Table};

pub const FILE_EXTENSION: &str = "sol";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String, source: SolutionError },
    #[error("expected exactly one solution, found {found}")]
    RecordCount { found: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    InFile { path: PathBuf, source: Box<FormatError> },
}

/// One parsed record together with the line its header sits on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub line: usize,
    pub solution: Solution,
}

/// Describes a validation error with 1-based points, as in the files.
pub fn describe(err: &SolutionError) -> String {
    match err {
        SolutionError::NotBijective { table: Table::Sigma, row } => format!("row {} is not a bijection", row + 1),
        SolutionError::NotBijective { table: Table::Tau, row } => {
            format!("derived tau_{} is not a bijection (degenerate)", row + 1)
        }
        SolutionError::Involutivity { x, y } => format!("r is not involutive at ({}, {})", x + 1, y + 1),
        SolutionError::TauMismatch { x, y } => format!("tau is inconsistent at ({}, {})", x + 1, y + 1),
        SolutionError::YangBaxter { x, y, z } => {
            format!("Yang-Baxter equation fails at ({}, {}, {})", x + 1, y + 1, z + 1)
        }
        SolutionError::PointOutOfRange(p) => format!("point {} out of range", p + 1),
        other => other.to_string(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.starts_with('#'))
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

/// Parses every record in `text`.
pub fn parse_stream(text: &str) -> Result<Vec<Record>, FormatError> {
    let mut records = Vec::new();
    let mut lines = content_lines(text).peekable();
    loop {
        while lines.peek().is_some_and(|(_, l)| l.is_empty()) {
            lines.next();
        }
        let Some((header_line, header)) = lines.next() else {
            break;
        };
        let n: usize =
            header.parse().map_err(|_| syntax(header_line, format!("expected the size n, found {header:?}")))?;
        if n == 0 {
            return Err(syntax(header_line, "size must be positive"));
        }
        let mut rows = Vec::with_capacity(n);
        let mut row_lines = Vec::with_capacity(n);
        for row in 1..=n {
            let (line, content) = match lines.next() {
                Some((line, l)) if !l.is_empty() => (line, l),
                Some((line, _)) => return Err(syntax(line, format!("blank line where row {row} of {n} was expected"))),
                None => return Err(syntax(header_line, format!("record ends after {} of {n} rows", row - 1))),
            };
            let images = content
                .split_whitespace()
                .map(|tok| match tok.parse::<usize>() {
                    Ok(v) if (1..=n).contains(&v) => Ok(v - 1),
                    Ok(v) => Err(syntax(line, format!("entry {v} outside 1..={n}"))),
                    Err(_) => Err(syntax(line, format!("entry {tok:?} is not an integer"))),
                })
                .collect::<Result<Vec<usize>, _>>()?;
            if images.len() != n {
                return Err(syntax(line, format!("row {row} has {} entries, expected {n}", images.len())));
            }
            rows.push(images);
            row_lines.push(line);
        }
        let solution = Solution::from_sigma_rows(rows).map_err(|e| {
            let line = match e {
                SolutionError::NotBijective { table: Table::Sigma, row } => row_lines[row],
                _ => header_line,
            };
            FormatError::Invalid { line, message: describe(&e), source: e }
        })?;
        records.push(Record { line: header_line, solution });
    }
    Ok(records)
}

/// Parses text holding exactly one record.
pub fn parse_solution(text: &str) -> Result<Solution, FormatError> {
    let mut records = parse_stream(text)?;
    if records.len() != 1 {
        return Err(FormatError::RecordCount { found: records.len() });
    }
    Ok(records.pop().expect("one record").solution)
}

pub fn serialize_solution(s: &Solution) -> String {
    let mut out = String::new();
    writeln!(out, "{}", s.n()).expect("writing to a string");
    for p in s.sigmas() {
        let row: Vec<String> = p.images().iter().map(|v| (v + 1).to_string()).collect();
        writeln!(out, "{}", row.join(" ")).expect("writing to a string");
    }
    out
}

/// Records separated by single blank lines.
pub fn serialize_stream<'a>(solutions: impl IntoIterator<Item = &'a Solution>) -> String {
    solutions.into_iter().map(serialize_solution).collect::<Vec<_>>().join("\n")
}

pub fn read_file(path: &Path) -> Result<Vec<Solution>, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_owned(), source })?;
    let records =
        parse_stream(&text).map_err(|e| FormatError::InFile { path: path.to_owned(), source: Box::new(e) })?;
    Ok(records.into_iter().map(|r| r.solution).collect())
}

/// Every record of every `.sol` file in `dir`, files in name order. Each
/// solution is labelled `file` or `file#k` when a file holds several.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, Solution)>, FormatError> {
    let entries = fs::read_dir(dir).map_err(|source| FormatError::Io { path: dir.to_owned(), source })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| FormatError::Io { path: dir.to_owned(), source })?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|e| e == FILE_EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let name = path.file_name().expect("file has a name").to_string_lossy().into_owned();
        let solutions = read_file(&path)?;
        let many = solutions.len() > 1;
        for (k, s) in solutions.into_iter().enumerate() {
            let label = if many { format!("{name}#{}", k + 1) } else { name.clone() };
            out.push((label, s));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const S8_TEXT: &str = "\
# size-8 indecomposable solution
8
2 1 4 3 6 5 8 7
2 1 6 7 8 3 4 5
5 6 1 3 4 7 8 2
3 8 6 2 4 7 1 5
7 4 8 2 6 5 1 3
7 4 1 5 8 3 6 2
3 8 4 5 1 2 6 7
5 6 8 7 1 2 4 3
";

    #[test]
    fn parses_s8() {
        assert_eq!(parse_solution(S8_TEXT).unwrap(), fixtures::s8());
    }

    #[test]
    fn parses_trivial() {
        assert_eq!(parse_solution("2\n1 2\n1 2\n").unwrap(), fixtures::trivial(2));
    }

    #[test]
    fn rejects_non_bijective_row() {
        let err = parse_solution("3\n1 2 3\n1 2 3\n1 2 2\n").unwrap_err();
        match &err {
            FormatError::Invalid { line, source, .. } => {
                assert_eq!(*line, 4);
                assert_eq!(*source, SolutionError::NotBijective { table: Table::Sigma, row: 2 });
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(err.to_string(), "line 4: row 3 is not a bijection");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let cases = [
            ("x\n", 1),
            ("2\n1 2\n", 1),
            ("2\n1 2\n1\n", 3),
            ("2\n1 3\n1 2\n", 2),
            ("# c\n2\n1 a\n1 2\n", 3),
            ("2\n1 2\n\n1 2\n", 3),
            ("0\n", 1),
        ];
        for (text, want) in cases {
            match parse_solution(text) {
                Err(FormatError::Syntax { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn validation_errors_are_one_based() {
        // σ_1 = (1 2), σ_2 = σ_3 = id
        let err = parse_solution("3\n2 1 3\n1 2 3\n1 2 3\n").unwrap_err();
        assert!(matches!(err, FormatError::Invalid { line: 1, .. }), "{err}");
    }

    #[test]
    fn round_trip() {
        for s in fixtures::all() {
            let text = serialize_solution(&s);
            assert_eq!(parse_solution(&text).unwrap(), s);
        }
        assert_eq!(serialize_solution(&fixtures::shift(3)), "3\n3 1 2\n3 1 2\n3 1 2\n");
    }

    #[test]
    fn streams() {
        let all = fixtures::all();
        let text = serialize_stream(&all);
        let back: Vec<Solution> = parse_stream(&text).unwrap().into_iter().map(|r| r.solution).collect();
        assert_eq!(back, all);
        assert!(parse_stream("").unwrap().is_empty());
        assert!(matches!(parse_solution(&text), Err(FormatError::RecordCount { found: 8 })));
        assert!(matches!(parse_solution("# nothing\n"), Err(FormatError::RecordCount { found: 0 })));
    }
}
