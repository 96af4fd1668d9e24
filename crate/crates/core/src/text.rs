//! Small helpers shared by the line-oriented text formats.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::label::{is_valid_label, Label};

/// Non-empty, non-comment lines with 1-based line numbers, trimmed.
pub fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn label(tok: &str, line: usize) -> Result<Label> {
    if is_valid_label(tok) {
        Ok(Label::from(tok))
    } else {
        Err(Error::parse(line, format!("invalid label {tok:?}")))
    }
}

/// Parses `{a,b,c}` (possibly `{}`) into a set.
pub fn set(tok: &str, line: usize) -> Result<BTreeSet<Label>> {
    let inner = tok
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::parse(line, format!("expected {{...}}, got {tok:?}")))?;
    if inner.is_empty() {
        return Ok(BTreeSet::new());
    }
    inner.split(',').map(|t| label(t, line)).collect()
}

pub fn format_set<'a>(items: impl IntoIterator<Item = &'a Label>) -> String {
    let mut out = String::from("{");
    for (i, l) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(l);
    }
    out.push('}');
    out
}

/// Splits `key=value`, requiring the given key.
pub fn keyed<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::parse(line, format!("expected {key}=..., got {tok:?}")))
}

pub fn number<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid number {tok:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_round_trip() {
        let s = set("{b,a}", 1).unwrap();
        assert_eq!(format_set(&s), "{a,b}");
        assert!(set("{}", 1).unwrap().is_empty());
        assert!(set("a,b", 3).is_err());
    }
}
