use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::GameTrace;
use crate::error::Result;

/// Column order of `trace.csv`.
pub const CSV_HEADER: [&str; 8] = [
    "t",
    "w_t",
    "p_t",
    "a_t",
    "valid",
    "n_t",
    "m_t",
    "mem_queries_cum",
];

/// One `trace.csv` row; ids are universe indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub t: usize,
    pub w_t: u64,
    pub p_t: String,
    pub a_t: u64,
    pub valid: bool,
    pub n_t: Option<usize>,
    pub m_t: Option<u64>,
    pub mem_queries_cum: u64,
}

pub fn write_csv(trace: &GameTrace, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &trace.steps {
        w.serialize(CsvRow {
            t: r.t,
            w_t: r.w_t.get(),
            p_t: r.p_t.clone().unwrap_or_default(),
            a_t: r.a_t.get(),
            valid: r.valid,
            n_t: r.n_t,
            m_t: r.m_t,
            mem_queries_cum: r.queries.membership,
        })?;
    }
    if trace.steps.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv_rows(input: impl Read) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
