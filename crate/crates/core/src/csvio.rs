//! Small CSV helpers shared by the table, histogram and time-tag readers.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One data row with its 1-based line number in the source.
pub(crate) struct Row {
    pub line: usize,
    pub fields: csv::StringRecord,
}

impl Row {
    pub fn parse<T: FromStr>(&self, index: usize, source: &str) -> Result<T> {
        let raw = self.fields.get(index).unwrap_or("");
        raw.parse::<T>()
            .map_err(|_| Error::parse(source, self.line, format!("cannot parse field {} value {raw:?}", index + 1)))
    }
}

/// Reads a comma-separated text whose header must equal `header`.
/// Blank lines and lines starting with `#` are skipped.
pub(crate) fn read_rows(text: &str, source: &str, header: &[&str]) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let found = reader
        .headers()
        .map_err(|e| Error::parse(source, 1, e.to_string()))?
        .clone();
    let found: Vec<&str> = found.iter().collect();
    if found != header {
        return Err(Error::parse(
            source,
            1,
            format!("expected header {:?}, found {:?}", header.join(","), found.join(",")),
        ));
    }
    let mut rows = Vec::new();
    let mut lines = LineCounter::new(text);
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| lines.line_of(p.byte())).unwrap_or(0);
            Error::parse(source, line, e.to_string())
        })?;
        let line = record.position().map(|p| lines.line_of(p.byte())).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(Error::parse(
                source,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        rows.push(Row { line, fields: record });
    }
    Ok(rows)
}

// The reader's own line counter skips blank lines, and a record's byte
// offset may point at skipped blank or comment lines before it. Offsets
// arrive in increasing order, so newlines are counted incrementally.
struct LineCounter<'a> {
    text: &'a str,
    byte: usize,
    line: usize,
}

impl<'a> LineCounter<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, byte: 0, line: 1 }
    }

    fn line_of(&mut self, byte: u64) -> usize {
        let text = self.text;
        let mut start = (byte as usize).min(text.len());
        loop {
            let rest = &text[start..];
            let end = rest.find('\n').map(|i| i + 1).unwrap_or(rest.len());
            let line = rest[..end].trim();
            if end == 0 || !(line.is_empty() || line.starts_with('#')) || end == rest.len() {
                break;
            }
            start += end;
        }
        if start < self.byte {
            self.byte = 0;
            self.line = 1;
        }
        self.line += text.as_bytes()[self.byte..start].iter().filter(|&&b| b == b'\n').count();
        self.byte = start;
        self.line
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Formats with six significant digits, switching to exponent form for very
/// large or small magnitudes.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_infinite() {
            if x > 0.0 { "inf".into() } else { "-inf".into() }
        } else {
            "0".into()
        };
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(3.14159265), "3.14159");
        assert_eq!(fmt6(2.0), "2");
        assert_eq!(fmt6(-0.000123456789), "-0.000123457");
        assert_eq!(fmt6(123456.7), "123457");
        assert_eq!(fmt6(1234567.0), "1.23457e6");
        assert_eq!(fmt6(1.5e-9), "1.5e-9");
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(f64::INFINITY), "inf");
        assert_eq!(fmt6(99999.96), "100000");
    }

    #[test]
    fn header_mismatch_names_line_one() {
        let r = read_rows("a,b\n1,2\n", "x.csv", &["a", "c"]);
        assert!(matches!(r, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn bad_field_names_its_line() {
        let rows = read_rows("a,b\n1,2\n\n3,zz\n", "x.csv", &["a", "b"]).unwrap();
        assert_eq!(rows.len(), 2);
        let err = rows[1].parse::<f64>(1, "x.csv").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }
}
