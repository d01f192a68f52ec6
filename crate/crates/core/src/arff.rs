//! ARFF data dictionaries and a checker for the subset of ARFF we emit.
//!
//! Categorical columns become nominal attributes listing their clean values,
//! integers and floats become `NUMERIC`, dates become ISO date-times. In the
//! data section every cell the inference excluded, and every sentinel, is
//! written as `?`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::categorical::ColumnInference;
use crate::error::{Error, Result};
use crate::ingest::DataTable;
use crate::machines::MissingVocabulary;
use crate::types::DataType;

/// Format string declared for every date attribute.
pub const DATE_FORMAT: &str = "yyyy-MM-dd'T'HH:mm:ss";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArffKind {
    Nominal(Vec<String>),
    Numeric,
    String,
    Date(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArffAttribute {
    pub name: String,
    pub kind: ArffKind,
}

impl ArffAttribute {
    /// Attribute for an inferred column. A categorical column without any
    /// clean value has nothing to list and is declared `STRING`.
    pub fn from_inference(name: &str, inference: &ColumnInference) -> Self {
        let kind = match inference.predicted {
            DataType::Categorical => {
                let values: Vec<String> = inference.split.values.iter().map(|v| v.value.clone()).collect();
                if values.is_empty() {
                    ArffKind::String
                } else {
                    ArffKind::Nominal(values)
                }
            }
            DataType::Integer | DataType::Float => ArffKind::Numeric,
            DataType::String => ArffKind::String,
            DataType::Date => ArffKind::Date(DATE_FORMAT.to_string()),
        };
        Self {
            name: name.to_string(),
            kind,
        }
    }
}

fn needs_quotes(s: &str) -> bool {
    s.is_empty()
        || s == "?"
        || s.starts_with('@')
        || s.chars().any(|c| {
            c.is_whitespace() || c.is_control() || matches!(c, ',' | '{' | '}' | '%' | '\'' | '"' | '\\')
        })
}

/// Single-quotes `s` with backslash escapes when ARFF would misread it bare.
pub fn quote(s: &str) -> String {
    if !needs_quotes(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\'' => out.push_str("\\'"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn numeric_cell(s: &str) -> Option<String> {
    let t = s.trim().replace('\u{2212}', "-");
    t.parse::<f64>().ok().filter(|v| v.is_finite()).map(|_| t)
}

const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September",
    "October", "November", "December",
];

fn number(s: &str, lo: u32, hi: u32) -> Option<u32> {
    if s.is_empty() || s.len() > 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok().filter(|v| (lo..=hi).contains(v))
}

fn month_number(name: &str) -> Option<u32> {
    MONTHS.iter().position(|m| *m == name).map(|i| i as u32 + 1)
}

fn stamp(y: u32, m: u32, d: u32, time: Option<&str>) -> Option<String> {
    let time = match time {
        None => "00:00:00".to_string(),
        Some(t) => {
            let parts: Vec<&str> = t.split(':').collect();
            if parts.len() != 3 || parts.iter().any(|p| p.len() != 2) {
                return None;
            }
            number(parts[0], 0, 23)?;
            number(parts[1], 0, 59)?;
            number(parts[2], 0, 59)?;
            t.to_string()
        }
    };
    Some(format!("{y:04}-{m:02}-{d:02}T{time}"))
}

/// Rewrites a date in one of the recognised layouts as `yyyy-MM-ddTHH:mm:ss`.
/// Slash dates are read day-first when `day_first`, month-first otherwise.
pub fn normalize_date(s: &str, day_first: bool) -> Option<String> {
    let s = s.trim();
    let (date, time) = match s.split_once(['T', ' ']) {
        Some((d, t)) if d.contains('-') => (d, Some(t)),
        _ => (s, None),
    };
    let dashed: Vec<&str> = date.split('-').collect();
    if dashed.len() == 3 && dashed[0].len() == 4 && dashed[1].len() == 2 && dashed[2].len() == 2 {
        let y = number(dashed[0], 1000, 9999)?;
        return stamp(y, number(dashed[1], 1, 12)?, number(dashed[2], 1, 31)?, time);
    }
    if time.is_some() {
        return None;
    }
    let slashed: Vec<&str> = s.split('/').collect();
    if slashed.len() == 3 {
        let (d, m) = if day_first {
            (slashed[0], slashed[1])
        } else {
            (slashed[1], slashed[0])
        };
        return stamp(number(slashed[2], 1000, 9999)?, number(m, 1, 12)?, number(d, 1, 31)?, None);
    }
    let words: Vec<&str> = s.split(' ').collect();
    match words.as_slice() {
        [y] => stamp(number(y, 1000, 9999)?, 1, 1, None),
        [d, m, y] if month_number(m).is_some() => {
            stamp(number(y, 1000, 9999)?, month_number(m)?, number(d, 1, 31)?, None)
        }
        [m, d, y] => stamp(number(y, 1000, 9999)?, month_number(m)?, number(d, 1, 31)?, None),
        _ => None,
    }
}

/// Day-first when some slash date can only be read that way.
fn slash_dates_day_first<'a>(cells: impl Iterator<Item = &'a str>) -> bool {
    cells.into_iter().any(|c| {
        let parts: Vec<&str> = c.trim().split('/').collect();
        parts.len() == 3 && number(parts[0], 13, 31).is_some()
    })
}

/// Renders the table as ARFF. `inferences` holds one entry per column, in
/// column order.
pub fn emit_arff(
    table: &DataTable,
    relation: Option<&str>,
    inferences: &[ColumnInference],
    vocabulary: &MissingVocabulary,
    header_only: bool,
) -> Result<String> {
    let columns = table.columns();
    if inferences.len() != columns.len() {
        return Err(Error::Config(format!(
            "{} inferences for {} columns",
            inferences.len(),
            columns.len()
        )));
    }
    let mut names = BTreeSet::new();
    for c in columns {
        if !names.insert(c.name()) {
            return Err(Error::DuplicateColumn(c.name().to_string()));
        }
    }
    let attributes: Vec<ArffAttribute> = columns
        .iter()
        .zip(inferences)
        .map(|(c, inf)| ArffAttribute::from_inference(c.name(), inf))
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, "@RELATION {}", quote(relation.unwrap_or(table.relation_name())));
    out.push('\n');
    for a in &attributes {
        let kind = match &a.kind {
            ArffKind::Nominal(values) => {
                let listed: Vec<String> = values.iter().map(|v| quote(v)).collect();
                format!("{{{}}}", listed.join(","))
            }
            ArffKind::Numeric => "NUMERIC".to_string(),
            ArffKind::String => "STRING".to_string(),
            ArffKind::Date(f) => format!("DATE \"{f}\""),
        };
        let _ = writeln!(out, "@ATTRIBUTE {} {kind}", quote(&a.name));
    }
    if header_only {
        return Ok(out);
    }

    let day_first: Vec<bool> = columns
        .iter()
        .map(|c| slash_dates_day_first(c.tallies().keys().map(String::as_str)))
        .collect();
    let nominal: Vec<Option<BTreeSet<&str>>> = attributes
        .iter()
        .map(|a| match &a.kind {
            ArffKind::Nominal(v) => Some(v.iter().map(String::as_str).collect()),
            _ => None,
        })
        .collect();

    out.push_str("\n@DATA\n");
    for row in 0..table.row_count() {
        let mut cells = Vec::with_capacity(columns.len());
        for (j, column) in columns.iter().enumerate() {
            let raw = column.cells()[row].as_str();
            let excluded = vocabulary.contains(raw) || inferences[j].split.is_excluded(raw);
            let cell = if excluded {
                None
            } else {
                match &attributes[j].kind {
                    ArffKind::Nominal(_) => nominal[j]
                        .as_ref()
                        .filter(|set| set.contains(raw))
                        .map(|_| quote(raw)),
                    ArffKind::Numeric => numeric_cell(raw),
                    ArffKind::String => Some(quote(raw)),
                    ArffKind::Date(_) => normalize_date(raw, day_first[j]),
                }
            };
            cells.push(cell.unwrap_or_else(|| "?".to_string()));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// A parsed ARFF file; `None` cells are missing.
#[derive(Debug, Clone, PartialEq)]
pub struct ArffDocument {
    pub relation: String,
    pub attributes: Vec<ArffAttribute>,
    pub data: Vec<Vec<Option<String>>>,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line: line as u64,
        message: message.into(),
    }
}

/// Splits off one token: quoted (single or double, backslash escapes) or
/// bare up to the next delimiter. Returns the token, whether it was quoted,
/// and the rest of the input.
fn take_token<'a>(s: &'a str, line: usize, delimiters: &[char]) -> Result<(String, bool, &'a str)> {
    let s = s.trim_start_matches([' ', '\t']);
    let mut chars = s.char_indices();
    match chars.next() {
        Some((_, q @ ('\'' | '"'))) => {
            let mut token = String::new();
            let mut escaped = false;
            for (i, c) in chars {
                if escaped {
                    token.push(match c {
                        'n' => '\n',
                        'r' => '\r',
                        't' => '\t',
                        c => c,
                    });
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    return Ok((token, true, &s[i + 1..]));
                } else {
                    token.push(c);
                }
            }
            Err(parse_error(line, "unterminated quoted token"))
        }
        Some(_) => {
            let end = s.find(|c: char| delimiters.contains(&c)).unwrap_or(s.len());
            let token = s[..end].trim_end_matches([' ', '\t']);
            if token.chars().any(|c| matches!(c, '\'' | '"' | '{' | '}' | '%') || c.is_whitespace()) {
                return Err(parse_error(line, format!("bare token {token:?} needs quoting")));
            }
            Ok((token.to_string(), false, &s[end..]))
        }
        None => Err(parse_error(line, "missing token")),
    }
}

fn keyword<'a>(s: &'a str, word: &str) -> Option<&'a str> {
    let head = s.get(..word.len())?;
    let rest = &s[word.len()..];
    (head.eq_ignore_ascii_case(word) && rest.starts_with([' ', '\t'])).then_some(rest)
}

fn is_iso_stamp(s: &str) -> bool {
    normalize_date(s, false).is_some_and(|n| n == s)
}

fn parse_attribute(rest: &str, line: usize) -> Result<ArffAttribute> {
    let (name, _, rest) = take_token(rest, line, &[' ', '\t'])?;
    let rest = rest.trim();
    let kind = if let Some(list) = rest.strip_prefix('{') {
        let inner = list
            .strip_suffix('}')
            .ok_or_else(|| parse_error(line, "nominal list is not closed"))?;
        let mut values = Vec::new();
        let mut s = inner;
        loop {
            let (v, _, tail) = take_token(s, line, &[','])?;
            values.push(v);
            let tail = tail.trim_start();
            match tail.strip_prefix(',') {
                Some(t) => s = t,
                None if tail.is_empty() => break,
                None => return Err(parse_error(line, "junk in nominal list")),
            }
        }
        let distinct: BTreeSet<&String> = values.iter().collect();
        if distinct.len() != values.len() {
            return Err(parse_error(line, "duplicate nominal value"));
        }
        ArffKind::Nominal(values)
    } else if let Some(fmt) = keyword(rest, "DATE") {
        let (f, quoted, tail) = take_token(fmt, line, &[' ', '\t'])?;
        if !quoted || !tail.trim().is_empty() {
            return Err(parse_error(line, "date format must be one quoted string"));
        }
        ArffKind::Date(f)
    } else {
        match rest.to_ascii_uppercase().as_str() {
            "NUMERIC" | "REAL" | "INTEGER" => ArffKind::Numeric,
            "STRING" => ArffKind::String,
            "DATE" => ArffKind::Date(DATE_FORMAT.to_string()),
            other => return Err(parse_error(line, format!("unknown attribute type {other:?}"))),
        }
    };
    Ok(ArffAttribute { name, kind })
}

fn check_cell(kind: &ArffKind, value: &str, line: usize) -> Result<()> {
    let ok = match kind {
        ArffKind::Nominal(values) => values.iter().any(|v| v == value),
        ArffKind::Numeric => value.parse::<f64>().is_ok_and(f64::is_finite),
        ArffKind::String => true,
        ArffKind::Date(f) => f != DATE_FORMAT || is_iso_stamp(value),
    };
    if ok {
        Ok(())
    } else {
        Err(parse_error(line, format!("{value:?} does not fit {kind:?}")))
    }
}

/// Parses and validates ARFF text: header order, attribute syntax, row arity
/// and that every cell fits its attribute.
pub fn parse_arff(text: &str) -> Result<ArffDocument> {
    let mut relation = None;
    let mut attributes: Vec<ArffAttribute> = Vec::new();
    let mut data = Vec::new();
    let mut in_data = false;
    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        if raw.ends_with('\r') {
            return Err(parse_error(line, "CR line ending"));
        }
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if in_data {
            let mut row = Vec::with_capacity(attributes.len());
            let mut s = trimmed;
            loop {
                let (token, quoted, tail) = take_token(s, line, &[','])?;
                row.push(if !quoted && token == "?" { None } else { Some(token) });
                let tail = tail.trim_start();
                match tail.strip_prefix(',') {
                    Some(t) => s = t,
                    None if tail.is_empty() => break,
                    None => return Err(parse_error(line, "junk after value")),
                }
            }
            if row.len() != attributes.len() {
                return Err(parse_error(
                    line,
                    format!("{} values for {} attributes", row.len(), attributes.len()),
                ));
            }
            for (cell, a) in row.iter().zip(&attributes) {
                if let Some(v) = cell {
                    check_cell(&a.kind, v, line)?;
                }
            }
            data.push(row);
        } else if let Some(rest) = keyword(trimmed, "@RELATION") {
            if relation.is_some() {
                return Err(parse_error(line, "second @RELATION"));
            }
            let (name, _, tail) = take_token(rest, line, &[' ', '\t'])?;
            if !tail.trim().is_empty() {
                return Err(parse_error(line, "junk after relation name"));
            }
            relation = Some(name);
        } else if let Some(rest) = keyword(trimmed, "@ATTRIBUTE") {
            if relation.is_none() {
                return Err(parse_error(line, "@ATTRIBUTE before @RELATION"));
            }
            attributes.push(parse_attribute(rest, line)?);
        } else if trimmed.eq_ignore_ascii_case("@DATA") {
            if attributes.is_empty() {
                return Err(parse_error(line, "@DATA without attributes"));
            }
            in_data = true;
        } else {
            return Err(parse_error(line, format!("unexpected line {trimmed:?}")));
        }
    }
    let relation = relation.ok_or_else(|| parse_error(1, "missing @RELATION"))?;
    let names: BTreeSet<&String> = attributes.iter().map(|a| &a.name).collect();
    if names.len() != attributes.len() {
        return Err(parse_error(1, "duplicate attribute name"));
    }
    Ok(ArffDocument {
        relation,
        attributes,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting_rules() {
        assert_eq!(quote("A"), "A");
        assert_eq!(quote("San Luis Potosi"), "'San Luis Potosi'");
        assert_eq!(quote("a,b"), "'a,b'");
        assert_eq!(quote("it's"), "'it\\'s'");
        assert_eq!(quote("50%"), "'50%'");
        assert_eq!(quote("{x}"), "'{x}'");
        assert_eq!(quote("say \"hi\""), "'say \"hi\"'");
        assert_eq!(quote(""), "''");
        assert_eq!(quote("?"), "'?'");
        assert_eq!(quote("back\\slash"), "'back\\\\slash'");
    }

    #[test]
    fn quoted_tokens_round_trip() {
        for s in ["plain", "San Luis Potosi", "it's", "a\\b", "", "?", "x\ny", "%", "\"q\""] {
            let q = quote(s);
            let (back, _, rest) = take_token(&q, 1, &[',']).unwrap();
            assert_eq!(back, s);
            assert!(rest.is_empty());
        }
    }

    #[test]
    fn dates_normalize() {
        let cases = [
            ("2020-03-04", "2020-03-04T00:00:00"),
            ("2020-03-04T05:06:07", "2020-03-04T05:06:07"),
            ("2020-03-04 05:06:07", "2020-03-04T05:06:07"),
            ("4 March 2015", "2015-03-04T00:00:00"),
            ("March 4 2015", "2015-03-04T00:00:00"),
            ("1995", "1995-01-01T00:00:00"),
        ];
        for (raw, want) in cases {
            assert_eq!(normalize_date(raw, false).as_deref(), Some(want), "{raw}");
        }
        assert_eq!(normalize_date("03/04/2020", false).as_deref(), Some("2020-03-04T00:00:00"));
        assert_eq!(normalize_date("03/04/2020", true).as_deref(), Some("2020-04-03T00:00:00"));
        assert_eq!(normalize_date("12:30:00", false), None);
        assert_eq!(normalize_date("March", false), None);
        assert_eq!(normalize_date("2020-13-01", false), None);
    }

    #[test]
    fn checker_rejects_malformed_files() {
        let ok = "@RELATION r\n@ATTRIBUTE a {x,y}\n@ATTRIBUTE b NUMERIC\n@DATA\nx,1\n?,?\n";
        assert_eq!(parse_arff(ok).unwrap().data.len(), 2);
        let bad = [
            "@ATTRIBUTE a NUMERIC\n",
            "@RELATION r\n@ATTRIBUTE a {x,x}\n",
            "@RELATION r\n@ATTRIBUTE a {x,y}\n@DATA\nz\n",
            "@RELATION r\n@ATTRIBUTE a NUMERIC\n@DATA\nabc\n",
            "@RELATION r\n@ATTRIBUTE a NUMERIC\n@DATA\n1,2\n",
            "@RELATION r\n@ATTRIBUTE a STRING\n@DATA\nhas space\n",
            "@RELATION r\n@ATTRIBUTE a STRING\n@DATA\n'open\n",
            "@RELATION r\n@ATTRIBUTE a DATE \"yyyy-MM-dd'T'HH:mm:ss\"\n@DATA\n2020-01-01\n",
            "@RELATION r\r\n@ATTRIBUTE a STRING\n",
        ];
        for text in bad {
            assert!(parse_arff(text).is_err(), "{text:?}");
        }
    }
}
