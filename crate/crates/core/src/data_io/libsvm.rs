//! LIBSVM sparse text format: `label idx:val idx:val ...` with 1-based indices.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::{NystromError, Result};
use crate::kernel::{DataMatrix, Point};

/// One parsed line. Indices are kept 1-based as in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmRecord {
    pub label: f64,
    pub features: Vec<(u32, f64)>,
}

fn parse_finite(s: &str, what: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("invalid {what} `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite {what} `{s}`"));
    }
    Ok(v)
}

/// Parses one line. Blank lines give `Ok(None)`.
pub fn parse_line(line: &str) -> Result<Option<LibsvmRecord>, String> {
    let mut tokens = line.split_ascii_whitespace();
    let Some(label) = tokens.next() else {
        return Ok(None);
    };
    if label.starts_with('#') {
        return Err("comments are not supported".into());
    }
    let label = parse_finite(label, "label")?;
    let mut features = Vec::new();
    let mut prev = 0u32;
    for tok in tokens {
        if tok.starts_with('#') {
            return Err("comments are not supported".into());
        }
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| format!("expected index:value, got `{tok}`"))?;
        let idx: u32 = idx
            .parse()
            .map_err(|_| format!("invalid feature index `{idx}`"))?;
        if idx == 0 {
            return Err("feature indices are 1-based".into());
        }
        if idx <= prev {
            return Err(format!("feature index {idx} does not increase (after {prev})"));
        }
        prev = idx;
        features.push((idx, parse_finite(val, "feature value")?));
    }
    Ok(Some(LibsvmRecord { label, features }))
}

/// Reads LIBSVM data from any buffered reader; `source` only labels errors.
///
/// The dimension is the largest index seen, or `declared_p` when given (it
/// must cover every index). Zero values are dropped from the sparse storage.
pub fn read_libsvm_from<R: BufRead>(
    reader: R,
    source: &Path,
    declared_p: Option<usize>,
) -> Result<DataMatrix> {
    let err = |line: usize, msg: String| NystromError::Parse {
        path: source.to_path_buf(),
        line,
        msg,
    };
    let mut rows: Vec<Vec<(u32, f64)>> = Vec::new();
    let mut max_index = 0u32;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let Some(rec) = parse_line(&line).map_err(|m| err(i + 1, m))? else {
            continue;
        };
        if let Some(&(last, _)) = rec.features.last() {
            max_index = max_index.max(last);
        }
        rows.push(
            rec.features
                .into_iter()
                .filter(|&(_, v)| v != 0.0)
                .map(|(k, v)| (k - 1, v))
                .collect(),
        );
    }
    if rows.is_empty() {
        return Err(NystromError::DegenerateData(format!(
            "{}: no data points",
            source.display()
        )));
    }
    let p = match declared_p {
        Some(p) if p < max_index as usize => {
            return Err(NystromError::InvalidParameter(format!(
                "declared dimension {p} is below the largest feature index {max_index}"
            )))
        }
        Some(p) => p,
        None => max_index as usize,
    };
    log::info!(
        "{}: read {} points in {} dimensions; labels discarded",
        source.display(),
        rows.len(),
        p
    );
    DataMatrix::from_sparse_rows(p, &rows)
}

/// Reads a LIBSVM file from disk.
pub fn read_libsvm(path: impl AsRef<Path>, declared_p: Option<usize>) -> Result<DataMatrix> {
    let path: PathBuf = path.as_ref().to_path_buf();
    let file = File::open(&path)?;
    read_libsvm_from(BufReader::new(file), &path, declared_p)
}

/// Writes `x` in LIBSVM format, omitting zeros. Labels default to 0.
///
/// Values use the shortest representation that parses back to the same `f64`.
pub fn write_libsvm<W: Write>(mut out: W, x: &DataMatrix, labels: Option<&[f64]>) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != x.n() {
            return Err(NystromError::Dimension(format!(
                "{} labels for {} points",
                l.len(),
                x.n()
            )));
        }
    }
    for i in 0..x.n() {
        write!(out, "{}", labels.map_or(0.0, |l| l[i]))?;
        match x.point(i) {
            Point::Dense(v) => {
                for (k, &val) in v.iter().enumerate() {
                    if val != 0.0 {
                        write!(out, " {}:{}", k + 1, val)?;
                    }
                }
            }
            Point::Sparse { indices, values } => {
                for (&k, &val) in indices.iter().zip(values) {
                    if val != 0.0 {
                        write!(out, " {}:{}", k + 1, val)?;
                    }
                }
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_io::synthetic_sparse_binary;
    use crate::landmark::RngSeed;
    use std::io::Cursor;

    fn read_str(s: &str, p: Option<usize>) -> Result<DataMatrix> {
        read_libsvm_from(Cursor::new(s), Path::new("mem"), p)
    }

    #[test]
    fn parses_a_line() {
        let rec = parse_line("1 1:0.5 3:2.0").unwrap().unwrap();
        assert_eq!(rec.label, 1.0);
        assert_eq!(rec.features, vec![(1, 0.5), (3, 2.0)]);
    }

    #[test]
    fn indices_become_zero_based() {
        let x = read_str("1 1:0.5 3:2.0\n", None).unwrap();
        assert_eq!(x.dim(), 3);
        assert_eq!(x.dense_row(0), vec![0.5, 0.0, 2.0]);
    }

    #[test]
    fn label_only_line_is_zero_point() {
        let x = read_str("-1\n+1 2:1\n", None).unwrap();
        assert_eq!(x.n(), 2);
        assert_eq!(x.dense_row(0), vec![0.0, 0.0]);
    }

    #[test]
    fn blank_lines_are_skipped() {
        let x = read_str("\n1 1:1\n   \n2 2:2\n", None).unwrap();
        assert_eq!(x.n(), 2);
    }

    #[test]
    fn declared_dimension() {
        assert_eq!(read_str("1 2:1\n", Some(16)).unwrap().dim(), 16);
        assert!(read_str("1 20:1\n", Some(16)).is_err());
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let cases = [
            ("1 1:1\n1 2:x\n", 2),
            ("1 1:1\n1 1:1 3\n", 2),
            ("1 3:1 2:1\n", 1),
            ("1 2:1 2:1\n", 1),
            ("1 0:1\n", 1),
            ("# header\n1 1:1\n", 1),
            ("1 1:1 # trailing\n", 1),
            ("abc 1:1\n", 1),
            ("1 1:1\n\n1 1:nan\n", 3),
            ("1 1:inf\n", 1),
            ("1 -1:2\n", 1),
        ];
        for (text, want) in cases {
            match read_str(text, None) {
                Err(NystromError::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(read_str("", None).is_err());
        assert!(read_str("\n\n", None).is_err());
    }

    #[test]
    fn pendigits_shape() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/pendigits");
        if !path.exists() {
            return;
        }
        let x = read_libsvm(&path, None).unwrap();
        assert_eq!((x.n(), x.dim()), (10_992, 16));
    }

    #[test]
    fn round_trip_sparse() {
        let x = synthetic_sparse_binary(50, 40, 0.1, RngSeed(1)).unwrap();
        let mut buf = Vec::new();
        write_libsvm(&mut buf, &x, None).unwrap();
        let y = read_str(std::str::from_utf8(&buf).unwrap(), Some(40)).unwrap();
        for i in 0..50 {
            assert_eq!(x.dense_row(i), y.dense_row(i));
        }
    }

    #[test]
    fn round_trip_dense_values() {
        let rows = vec![vec![0.1, -2.5e-7, 0.0], vec![1.0 / 3.0, 123456.789, -0.0]];
        let x = DataMatrix::from_rows(&rows).unwrap();
        let mut buf = Vec::new();
        write_libsvm(&mut buf, &x, Some(&[1.0, -1.0])).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("1 1:0.1 2:-0.00000025\n"));
        let y = read_str(&text, Some(3)).unwrap();
        for i in 0..2 {
            for (a, b) in x.dense_row(i).iter().zip(y.dense_row(i)) {
                assert!((a - b).abs() <= 1e-12 * a.abs());
            }
        }
    }

    #[test]
    fn writer_checks_label_count() {
        let x = DataMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(write_libsvm(Vec::new(), &x, Some(&[])).is_err());
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            read_libsvm("/nonexistent/file", None),
            Err(NystromError::Io(_))
        ));
    }
}
