//! Row emission. CSV carries the fixed columns
//! `n,N,R,partial_sum,certified_bound,oracle_value,actual_error`, with empty
//! fields for values a direction does not produce. Flat records write one
//! `key=value` line per field, including the term lists, and separate
//! records with a blank line.

use std::io::Write;

use depoisson::{ExtFloat, Theorem};

use crate::commands::CliError;

pub const COLUMNS: [&str; 7] = ["n", "N", "R", "partial_sum", "certified_bound", "oracle_value", "actual_error"];

#[derive(Clone, Debug, PartialEq)]
pub struct TermRow {
    /// m for derivatives, s for differences.
    pub index: usize,
    pub value: ExtFloat,
    pub poly: ExtFloat,
    pub term: ExtFloat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub n: Option<usize>,
    pub order: usize,
    pub r: f64,
    pub theorem: Option<Theorem>,
    pub partial_sum: ExtFloat,
    pub certified_bound: Option<ExtFloat>,
    pub oracle_value: Option<ExtFloat>,
    pub actual_error: Option<ExtFloat>,
    pub terms: Vec<TermRow>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl Row {
    pub fn label(&self) -> String {
        match self.n {
            Some(n) => format!("n={n} N={} R={}", self.order, self.r),
            None => format!("N={} R={}", self.order, self.r),
        }
    }

    fn fields(&self) -> [String; 7] {
        [
            opt(&self.n),
            self.order.to_string(),
            self.r.to_string(),
            self.partial_sum.to_string(),
            opt(&self.certified_bound),
            opt(&self.oracle_value),
            opt(&self.actual_error),
        ]
    }
}

pub fn write_csv(out: &mut dyn Write, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| CliError::Failure(e.into());
    w.write_record(COLUMNS).map_err(fail)?;
    for row in rows {
        w.write_record(row.fields()).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::Failure(e.into()))
}

pub fn write_flat(out: &mut dyn Write, rows: &[Row]) -> std::io::Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "record={i}")?;
        for (k, v) in COLUMNS.iter().zip(row.fields()) {
            writeln!(out, "{k}={v}")?;
        }
        if let Some(t) = row.theorem {
            writeln!(out, "theorem={t}")?;
        }
        writeln!(out, "terms={}", row.terms.len())?;
        for t in &row.terms {
            let k = t.index;
            writeln!(out, "term.{k}.value={}", t.value)?;
            writeln!(out, "term.{k}.poly={}", t.poly)?;
            writeln!(out, "term.{k}.term={}", t.term)?;
        }
    }
    Ok(())
}
