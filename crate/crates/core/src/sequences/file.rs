use std::path::Path;

use super::{Coeff, Exactness, SequenceProvider};
use crate::error::{Error, Result};
use crate::Rational;

/// Finitely many coefficients A_offset, A_offset+1, ... read from text.
#[derive(Clone, Debug)]
pub struct FiniteSequence {
    offset: usize,
    values: Vec<Coeff>,
}

impl FiniteSequence {
    pub fn new(offset: usize, values: Vec<Coeff>) -> Result<Self> {
        if values.is_empty() {
            return Err(crate::error::invalid("a finite sequence needs at least one value"));
        }
        Ok(FiniteSequence { offset, values })
    }

    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        Self::new(0, values.into_iter().map(Coeff::Exact).collect())
    }

    pub fn from_f64(values: Vec<f64>) -> Result<Self> {
        Self::new(0, values.into_iter().map(Coeff::Float).collect())
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl SequenceProvider for FiniteSequence {
    fn kind(&self) -> &str {
        "file"
    }

    fn exactness(&self) -> Exactness {
        if self.values.iter().all(Coeff::is_exact) {
            Exactness::Exact
        } else {
            Exactness::Floating
        }
    }

    fn available(&self) -> Option<usize> {
        Some(self.offset + self.values.len())
    }

    fn term(&self, m: usize) -> Result<Coeff> {
        let end = self.offset + self.values.len();
        if m < self.offset || m >= end {
            return Err(Error::OutOfRange { index: m, start: self.offset, end });
        }
        Ok(self.values[m - self.offset].clone())
    }
}

fn parse_value(s: &str, line: usize) -> Result<Coeff> {
    let is_float = s.contains(['.', 'e', 'E']) || s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("nan");
    if !is_float {
        if let Some(q) = crate::parse_rational(s) {
            return Ok(Coeff::Exact(q));
        }
        if s.contains('/') {
            return Err(Error::Parse { line, msg: format!("`{s}` is not a rational p/q with q != 0") });
        }
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(Coeff::Float(x)),
        _ => Err(Error::Parse { line, msg: format!("`{s}` is not a number") }),
    }
}

/// Parses the sequence file format: one value per line (integer, `p/q`, or
/// decimal float), `#` comments, and an optional `# offset N` header before
/// the first value. An explicit `offset` argument must agree with the header.
pub fn parse_sequence(text: &str, offset: Option<usize>) -> Result<FiniteSequence> {
    let mut header: Option<usize> = None;
    let mut values = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = i + 1;
        let s = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if s.is_empty() {
            continue;
        }
        if let Some(comment) = s.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("offset") {
                if !values.is_empty() {
                    return Err(Error::Parse { line, msg: "offset header after the first value".into() });
                }
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .filter(|_| words.next().is_none())
                    .ok_or_else(|| Error::Parse { line, msg: "expected `# offset N`".into() })?;
                header = Some(n);
            }
            continue;
        }
        values.push(parse_value(s, line)?);
    }
    if values.is_empty() {
        return Err(Error::Parse { line: 1, msg: "no values in sequence file".into() });
    }
    let offset = match (offset, header) {
        (Some(a), Some(b)) if a != b => {
            return Err(crate::error::invalid(format!("offset {a} conflicts with the file header offset {b}")))
        }
        (a, b) => a.or(b).unwrap_or(0),
    };
    FiniteSequence::new(offset, values)
}

pub fn load_sequence(path: impl AsRef<Path>, offset: Option<usize>) -> Result<FiniteSequence> {
    let bytes = std::fs::read(path.as_ref())?;
    let text =
        String::from_utf8(bytes).map_err(|e| Error::Parse { line: 1, msg: format!("file is not UTF-8: {e}") })?;
    parse_sequence(&text, offset)
}
