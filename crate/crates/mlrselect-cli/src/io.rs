//! CSV ingestion and emission for numeric matrices.

use std::path::Path;

use nalgebra::DMatrix;

use crate::CliError;

/// Read a numeric matrix from a CSV file. A single leading header row is
/// auto-detected: if any field of the first row fails to parse as a number,
/// the row is skipped. Every later parse failure reports its 1-based file
/// row and column.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            row: 0,
            col: 0,
            detail: e.to_string(),
        })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut file_row = 0usize;
    for record in reader.records() {
        file_row += 1;
        let record = record.map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            row: file_row,
            col: 0,
            detail: e.to_string(),
        })?;
        let mut parsed = Vec::with_capacity(record.len());
        let mut bad_col = None;
        for (ci, field) in record.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) => parsed.push(v),
                Err(_) => {
                    bad_col = Some(ci + 1);
                    break;
                }
            }
        }
        match bad_col {
            None => rows.push(parsed),
            Some(col) => {
                if file_row == 1 {
                    continue; // header row
                }
                return Err(CliError::Parse {
                    path: path.display().to_string(),
                    row: file_row,
                    col,
                    detail: format!(
                        "field `{}` is not a number",
                        record.get(col - 1).unwrap_or("")
                    ),
                });
            }
        }
    }

    if rows.is_empty() {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            row: 0,
            col: 0,
            detail: "no numeric rows found".to_string(),
        });
    }
    let ncols = rows[0].len();
    let nrows = rows.len();
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

/// Write a matrix as headerless CSV with shortest round-trip float
/// formatting and LF line endings.
#[cfg(test)]
pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<(), CliError> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| CliError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| m[(r, c)].to_string()).collect();
        writer.write_record(&row).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
    }
    writer.flush().map_err(|e| CliError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn header_autodetection_and_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "a,b\n1.5,2\n-3,4e-2\n").unwrap();
        let m = read_matrix(&path).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (2, 2));
        assert_eq!(m[(0, 0)], 1.5);
        assert_eq!(m[(1, 1)], 0.04);

        std::fs::write(&path, "1,2\n3,4\n").unwrap();
        let m = read_matrix(&path).unwrap();
        assert_eq!(m.nrows(), 2);
    }

    #[test]
    fn parse_error_carries_location() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "1,2\n3,oops\n").unwrap();
        match read_matrix(&path) {
            Err(CliError::Parse { row: 2, col: 2, .. }) => {}
            other => panic!("expected Parse at (2,2), got {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(matches!(read_matrix(&path), Err(CliError::Parse { .. })));
    }

    #[test]
    fn round_trip_preserves_doubles_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        let m = DMatrix::from_fn(7, 4, |_, _| {
            let v: f64 = rng.random::<f64>();
            (v - 0.5) * 1e6 * rng.random::<f64>()
        });
        write_matrix(&path, &m).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(m, back);
        // LF endings, no CRLF.
        let raw = std::fs::read_to_string(&path).unwrap();
        assert!(!raw.contains('\r'));
    }
}
