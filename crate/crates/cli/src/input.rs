//! CSV ingestion. A header row is required; values use a decimal point.

use std::path::Path;

use stadf_core::TimeSeries;

use crate::error::{CliError, CliResult};

/// Fewest observations accepted by `stadf test`.
pub const MIN_OBSERVATIONS: usize = 20;

#[derive(Debug, Clone, Default)]
pub struct ColumnSelection {
    pub date: Option<String>,
    /// Defaults to the last column that is not the date column.
    pub value: Option<String>,
}

#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: TimeSeries,
    pub value_column: String,
}

fn column_index(headers: &csv::StringRecord, name: &str, path: &Path) -> CliResult<usize> {
    headers.iter().position(|h| h.trim() == name).ok_or_else(|| CliError::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: format!("no column named {name:?}; header is {:?}", headers.iter().collect::<Vec<_>>()),
    })
}

pub fn read_series(path: &Path, columns: &ColumnSelection) -> CliResult<LoadedSeries> {
    let file = std::fs::File::open(path).map_err(CliError::io(path))?;
    read_series_from(file, path, columns)
}

pub fn read_series_from<R: std::io::Read>(reader: R, path: &Path, columns: &ColumnSelection) -> CliResult<LoadedSeries> {
    let parse_error = |line: u64, message: String| CliError::Parse { path: path.to_path_buf(), line, message };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_error(1, e.to_string()))?.clone();
    if headers.is_empty() {
        return Err(parse_error(1, "empty header row".into()));
    }

    let date_idx = columns.date.as_deref().map(|d| column_index(&headers, d, path)).transpose()?;
    let value_idx = match columns.value.as_deref() {
        Some(v) => column_index(&headers, v, path)?,
        None => (0..headers.len())
            .rev()
            .find(|i| Some(*i) != date_idx)
            .ok_or_else(|| parse_error(1, "no value column besides the date column".into()))?,
    };

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let raw = record.get(value_idx).unwrap_or("");
        let value: f64 = raw
            .parse()
            .map_err(|_| parse_error(line, format!("cannot parse {raw:?} in column {:?} as a number", &headers[value_idx])))?;
        if !value.is_finite() {
            return Err(parse_error(line, format!("non-finite value {raw:?}")));
        }
        values.push(value);
        if let Some(d) = date_idx {
            labels.push(record.get(d).unwrap_or("").to_string());
        }
    }

    if values.len() < MIN_OBSERVATIONS {
        return Err(CliError::Precondition(format!(
            "series too short: {} observations, need at least {MIN_OBSERVATIONS}",
            values.len()
        )));
    }
    let series = if date_idx.is_some() { TimeSeries::with_labels(values, labels)? } else { TimeSeries::new(values)? };
    Ok(LoadedSeries { series, value_column: headers[value_idx].to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, columns: &ColumnSelection) -> CliResult<LoadedSeries> {
        read_series_from(text.as_bytes(), Path::new("mem.csv"), columns)
    }

    fn rows(n: usize) -> String {
        let mut s = String::from("date,close\n");
        for i in 0..n {
            s.push_str(&format!("2020-01-{:02},{}\n", i + 1, 100.0 + i as f64));
        }
        s
    }

    #[test]
    fn reads_labelled_series() {
        let cols = ColumnSelection { date: Some("date".into()), value: None };
        let loaded = parse(&rows(25), &cols).unwrap();
        assert_eq!(loaded.value_column, "close");
        assert_eq!(loaded.series.len(), 25);
        assert_eq!(loaded.series.label(0), "2020-01-01");
        assert_eq!(loaded.series.values()[24], 124.0);
    }

    #[test]
    fn bad_value_reports_its_line() {
        let mut text = rows(25);
        text = text.replacen("105", "1o5", 1);
        match parse(&text, &ColumnSelection::default()) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_input_is_a_precondition_error() {
        let err = parse(&rows(10), &ColumnSelection::default()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn unknown_column_is_a_parse_error() {
        let cols = ColumnSelection { date: None, value: Some("price".into()) };
        assert_eq!(parse(&rows(25), &cols).unwrap_err().exit_code(), 3);
    }
}
