//! Minimal ARFF reader covering the PROMISE subset: `@relation`,
//! numeric/nominal `@attribute`s, dense `@data`, `%` comments and `?`.

use super::{is_missing_token, Cell, Column, ColumnKind, IngestError, RawTable};

/// Splits on commas outside single or double quotes, trimming and unquoting
/// each field.
pub(crate) fn split_fields(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quote: Option<char> = None;
    let mut was_quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(ch) = chars.next() {
        match quote {
            Some(q) if ch == '\\' => {
                if let Some(&next) = chars.peek() {
                    if next == q || next == '\\' {
                        cur.push(next);
                        chars.next();
                        continue;
                    }
                }
                cur.push(ch);
            }
            Some(q) if ch == q => quote = None,
            Some(_) => cur.push(ch),
            None if (ch == '\'' || ch == '"') && cur.trim().is_empty() => {
                cur.clear();
                quote = Some(ch);
                was_quoted = true;
            }
            None if ch == ',' => {
                out.push(finish(&cur, was_quoted));
                cur.clear();
                was_quoted = false;
            }
            None => cur.push(ch),
        }
    }
    out.push(finish(&cur, was_quoted));
    out
}

fn finish(s: &str, quoted: bool) -> String {
    if quoted {
        s.to_string()
    } else {
        s.trim().to_string()
    }
}

fn strip_keyword<'a>(line: &'a str, kw: &str) -> Option<&'a str> {
    if line.len() >= kw.len() && line[..kw.len()].eq_ignore_ascii_case(kw) {
        let rest = &line[kw.len()..];
        if rest.is_empty() || rest.starts_with(char::is_whitespace) {
            return Some(rest.trim());
        }
    }
    None
}

/// Splits `name type` where the name may be quoted.
fn split_attribute(spec: &str, line: usize) -> Result<(String, String), IngestError> {
    let spec = spec.trim();
    let header = |msg: &str| IngestError::Header {
        line,
        msg: msg.to_string(),
    };
    let first = spec.chars().next().ok_or_else(|| header("empty @attribute"))?;
    if first == '\'' || first == '"' {
        let end = spec[1..]
            .find(first)
            .ok_or_else(|| header("unterminated quoted attribute name"))?;
        let name = spec[1..1 + end].to_string();
        let ty = spec[end + 2..].trim().to_string();
        if ty.is_empty() {
            return Err(header("attribute without a type"));
        }
        Ok((name, ty))
    } else {
        let end = spec
            .find(|c: char| c.is_whitespace() || c == '{')
            .ok_or_else(|| header("attribute without a type"))?;
        Ok((spec[..end].to_string(), spec[end..].trim().to_string()))
    }
}

fn parse_kind(ty: &str, line: usize) -> Result<ColumnKind, IngestError> {
    if ty.starts_with('{') {
        let inner = ty
            .strip_prefix('{')
            .and_then(|s| s.trim_end().strip_suffix('}'))
            .ok_or_else(|| IngestError::Header {
                line,
                msg: format!("malformed nominal specification `{ty}`"),
            })?;
        let labels = split_fields(inner)
            .into_iter()
            .filter(|s| !s.is_empty())
            .collect();
        return Ok(ColumnKind::Nominal(labels));
    }
    let word = ty.split_whitespace().next().unwrap_or("").to_ascii_lowercase();
    match word.as_str() {
        "numeric" | "real" | "integer" => Ok(ColumnKind::Numeric),
        "string" | "date" | "relational" => Err(IngestError::Unsupported {
            line,
            msg: format!("attribute type `{word}` is not supported"),
        }),
        _ => Err(IngestError::Header {
            line,
            msg: format!("unknown attribute type `{ty}`"),
        }),
    }
}

pub fn parse_arff(text: &str, default_name: &str) -> Result<RawTable, IngestError> {
    let mut name = default_name.to_string();
    let mut columns: Vec<Column> = Vec::new();
    let mut rows = Vec::new();
    let mut in_data = false;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            if let Some(rest) = strip_keyword(line, "@relation") {
                name = split_fields(rest)
                    .into_iter()
                    .next()
                    .filter(|s| !s.is_empty())
                    .unwrap_or(name);
            } else if let Some(rest) = strip_keyword(line, "@attribute") {
                let (col, ty) = split_attribute(rest, lineno)?;
                let kind = parse_kind(&ty, lineno)?;
                columns.push(Column { name: col, kind });
            } else if strip_keyword(line, "@data").is_some() {
                if columns.is_empty() {
                    return Err(IngestError::Header {
                        line: lineno,
                        msg: "@data before any @attribute".into(),
                    });
                }
                in_data = true;
            } else {
                return Err(IngestError::Header {
                    line: lineno,
                    msg: format!("unexpected header line `{line}`"),
                });
            }
            continue;
        }

        if line.starts_with('{') {
            return Err(IngestError::Unsupported {
                line: lineno,
                msg: "sparse ARFF rows are not supported".into(),
            });
        }
        let fields = split_fields(line);
        if fields.len() != columns.len() {
            return Err(IngestError::Arity {
                line: lineno,
                expected: columns.len(),
                found: fields.len(),
            });
        }
        let row = fields
            .into_iter()
            .zip(&columns)
            .map(|(f, col)| parse_cell(f, col, lineno))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }

    if !in_data {
        return Err(IngestError::Header {
            line: text.lines().count().max(1),
            msg: "missing @data section".into(),
        });
    }
    Ok(RawTable {
        name,
        columns,
        rows,
    })
}

fn parse_cell(field: String, col: &Column, line: usize) -> Result<Cell, IngestError> {
    if field == "?" {
        return Ok(Cell::Missing);
    }
    match &col.kind {
        ColumnKind::Numeric => {
            if is_missing_token(&field) {
                return Ok(Cell::Missing);
            }
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Cell::Number(v)),
                _ => Err(IngestError::BadNumber {
                    line,
                    column: col.name.clone(),
                    value: field,
                }),
            }
        }
        ColumnKind::Nominal(_) => Ok(Cell::Label(field)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "% PROMISE style header
@relation 'kc1-mini'

@attribute loc numeric
@attribute 'v(g)' numeric
@attribute v real
@attribute defects {false,true}

@data
1.1,1.4,1.3,false
% interleaved comment
2,?,30.5,true
";

    #[test]
    fn parses_promise_subset() {
        let t = parse_arff(SAMPLE, "x").unwrap();
        assert_eq!(t.name, "kc1-mini");
        assert_eq!(t.n_cols(), 4);
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.columns[1].name, "v(g)");
        assert_eq!(
            t.columns[3].kind,
            ColumnKind::Nominal(vec!["false".into(), "true".into()])
        );
        assert_eq!(t.rows[0][0], Cell::Number(1.1));
        assert_eq!(t.rows[1][1], Cell::Missing);
        assert_eq!(t.rows[1][3], Cell::Label("true".into()));
        assert_eq!(t.find_column("V(G)"), Some(1));
    }

    #[test]
    fn arity_mismatch_names_line() {
        let bad = "@relation r\n@attribute a numeric\n@attribute b numeric\n@data\n1,2\n3\n";
        match parse_arff(bad, "r").unwrap_err() {
            IngestError::Arity {
                line,
                expected,
                found,
            } => {
                assert_eq!((line, expected, found), (6, 2, 1));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_number_and_unsupported() {
        let bad = "@relation r\n@attribute a numeric\n@data\nabc\n";
        assert!(matches!(
            parse_arff(bad, "r").unwrap_err(),
            IngestError::BadNumber { line: 4, .. }
        ));
        let sparse = "@relation r\n@attribute a numeric\n@data\n{0 1}\n";
        assert!(matches!(
            parse_arff(sparse, "r").unwrap_err(),
            IngestError::Unsupported { line: 4, .. }
        ));
        let string_attr = "@relation r\n@attribute a string\n@data\n";
        assert!(matches!(
            parse_arff(string_attr, "r").unwrap_err(),
            IngestError::Unsupported { line: 2, .. }
        ));
        assert!(matches!(
            parse_arff("@relation r\n@attribute a numeric\n", "r").unwrap_err(),
            IngestError::Header { .. }
        ));
    }

    #[test]
    fn quoted_fields() {
        assert_eq!(split_fields("'a,b', c ,\"d\""), vec!["a,b", "c", "d"]);
        assert_eq!(split_fields("'it\\'s',x"), vec!["it's", "x"]);
    }
}
