use std::io::Write;

use gameopt_core::solvers::TraceRecord;
use serde::{Deserialize, Serialize};

pub const TRACE_HEADER: &str = "iter,violated_index,violation,game_loss,regret_bound,elapsed_ns";

/// One CSV row. Floats are written in shortest round-trip form, so
/// reading a row back gives the recorded values bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: u64,
    pub violated_index: Option<usize>,
    pub violation: f64,
    pub game_loss: f64,
    pub regret_bound: f64,
    pub elapsed_ns: u64,
}

impl From<&TraceRecord> for TraceRow {
    fn from(r: &TraceRecord) -> Self {
        TraceRow {
            iter: r.iter,
            violated_index: r.violated_index,
            violation: r.violation,
            game_loss: r.game_loss,
            regret_bound: r.regret_bound,
            elapsed_ns: r.elapsed_ns,
        }
    }
}

pub fn write_trace<W: Write>(out: W, records: &[TraceRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(TraceRow::from(r))?;
    }
    if records.is_empty() {
        w.write_record(TRACE_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace<R: std::io::Read>(input: R) -> csv::Result<Vec<TraceRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
