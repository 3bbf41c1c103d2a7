/// One row of the per-iteration log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: u64,
    pub violated_index: Option<usize>,
    pub violation: f64,
    pub game_loss: f64,
    pub regret_bound: f64,
    pub elapsed_ns: u64,
}

/// Append-only destination for trace rows.
pub trait TraceSink {
    fn record(&mut self, row: TraceRecord);
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _row: TraceRecord) {}
}

impl TraceSink for Vec<TraceRecord> {
    fn record(&mut self, row: TraceRecord) {
        self.push(row);
    }
}
