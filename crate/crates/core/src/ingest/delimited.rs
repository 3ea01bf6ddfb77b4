//! Comma-separated tables with a mandatory header row.
//!
//! Column kinds are inferred: a column is numeric when every non-missing
//! cell parses as a finite number, nominal otherwise.

use super::{is_missing_token, Cell, Column, ColumnKind, IngestError, RawTable};

pub fn parse_csv(text: &str, name: &str) -> Result<RawTable, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| IngestError::Header {
            line: 1,
            msg: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(IngestError::Header {
            line: 1,
            msg: "empty header row".into(),
        });
    }
    let width = headers.len();

    let mut cells: Vec<Vec<String>> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| IngestError::Header {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != width {
            return Err(IngestError::Arity {
                line,
                expected: width,
                found: rec.len(),
            });
        }
        cells.push(rec.iter().map(str::to_string).collect());
    }

    let mut columns = Vec::with_capacity(width);
    for (c, h) in headers.iter().enumerate() {
        let numeric = cells
            .iter()
            .map(|r| r[c].as_str())
            .filter(|s| !is_missing_token(s))
            .all(|s| s.parse::<f64>().map(f64::is_finite).unwrap_or(false));
        let kind = if numeric {
            ColumnKind::Numeric
        } else {
            let mut labels: Vec<String> = cells
                .iter()
                .map(|r| r[c].clone())
                .filter(|s| !is_missing_token(s))
                .collect();
            labels.sort();
            labels.dedup();
            ColumnKind::Nominal(labels)
        };
        columns.push(Column {
            name: h.to_string(),
            kind,
        });
    }

    let rows = cells
        .into_iter()
        .map(|r| {
            r.into_iter()
                .zip(&columns)
                .map(|(s, col)| {
                    if is_missing_token(&s) {
                        Cell::Missing
                    } else {
                        match col.kind {
                            // inference guarantees the parse succeeds
                            ColumnKind::Numeric => Cell::Number(s.parse().unwrap()),
                            ColumnKind::Nominal(_) => Cell::Label(s),
                        }
                    }
                })
                .collect()
        })
        .collect();

    Ok(RawTable {
        name: name.to_string(),
        columns,
        rows,
    })
}
