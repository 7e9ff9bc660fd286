//! Sequence specs: `trie`, `geom:w/q[,w/q…]`, `expmix:w/c[,…]`, `file:PATH`.
//!
//! Atom parameters are exact rationals. `w/q` with plain integers reads as
//! weight w and ratio q; rational parts need parentheses, `(2/3)/(1/2)`, or
//! the colon form `2/3:1/2`, which is also what specs print as.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use depoisson::sequences::{exp_mixture, geometric_mixture, load_sequence, trie_expectation};
use depoisson::{parse_rational, Error, Rational, SequenceProvider};

#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    Trie,
    Geom(Vec<(Rational, Rational)>),
    ExpMix(Vec<(Rational, Rational)>),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bad sequence spec `{spec}`: {msg}")]
pub struct SpecError {
    pub spec: String,
    pub msg: String,
}

fn rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(t);
    parse_rational(t).ok_or_else(|| format!("`{s}` is not a rational number"))
}

/// Splits on `/` outside parentheses.
fn split_top(s: &str) -> Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parentheses".into());
                }
            }
            '/' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn atom(s: &str) -> Result<(Rational, Rational), String> {
    if let Some((w, q)) = s.split_once(':') {
        return Ok((rational(w)?, rational(q)?));
    }
    match split_top(s)?.as_slice() {
        [w, q] => Ok((rational(w)?, rational(q)?)),
        [a, b, c, d] if !s.contains('(') => Ok((rational(&format!("{a}/{b}"))?, rational(&format!("{c}/{d}"))?)),
        _ => Err(format!("cannot split `{s}` into weight and parameter; write it as w:q")),
    }
}

fn atoms(s: &str) -> Result<Vec<(Rational, Rational)>, String> {
    if s.trim().is_empty() {
        return Err("no atoms".into());
    }
    s.split(',').map(atom).collect()
}

impl FromStr for SequenceSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let err = |msg: String| SpecError { spec: s.to_string(), msg };
        if s == "trie" {
            return Ok(SequenceSpec::Trie);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(|| err("expected trie, geom:, expmix: or file:".into()))?;
        match kind {
            "geom" => atoms(rest).map(SequenceSpec::Geom).map_err(err),
            "expmix" => atoms(rest).map(SequenceSpec::ExpMix).map_err(err),
            "file" if !rest.is_empty() => Ok(SequenceSpec::File(PathBuf::from(rest))),
            "file" => Err(err("empty path".into())),
            _ => Err(err(format!("unknown sequence kind `{kind}`"))),
        }
    }
}

fn write_atoms(f: &mut fmt::Formatter<'_>, atoms: &[(Rational, Rational)]) -> fmt::Result {
    for (i, (w, q)) in atoms.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{w}:{q}")?;
    }
    Ok(())
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::Trie => f.write_str("trie"),
            SequenceSpec::Geom(a) => {
                f.write_str("geom:")?;
                write_atoms(f, a)
            }
            SequenceSpec::ExpMix(a) => {
                f.write_str("expmix:")?;
                write_atoms(f, a)
            }
            SequenceSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl SequenceSpec {
    /// Builds the provider. `reach` is the largest index or center the run
    /// will touch; the trie table is sized from it.
    pub fn build(&self, reach: f64) -> depoisson::Result<Box<dyn SequenceProvider>> {
        Ok(match self {
            SequenceSpec::Trie => {
                let top = 2.0 * reach.max(8.0);
                Box::new(trie_expectation((top + 12.0 * top.sqrt() + 64.0) as usize)?)
            }
            SequenceSpec::Geom(a) => Box::new(geometric_mixture(a)?),
            SequenceSpec::ExpMix(a) => Box::new(exp_mixture(a)?),
            SequenceSpec::File(p) => Box::new(load_sequence(p, None).map_err(|e| match e {
                Error::Io(io) => Error::InvalidArgument(format!("cannot read {}: {io}", p.display())),
                other => other,
            })?),
        })
    }
}
