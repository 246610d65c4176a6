use std::io::{self, Write};
use std::time::{Duration, Instant};

use crate::kernel::TransportPlan;

/// Header of the trace CSV.
pub const TRACE_HEADER: &str = "iteration,epoch,time_s,objective,duality_gap,sparsity";

/// One checkpoint of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: u64,
    /// Iterations divided by the number of blocks for block methods; equal to
    /// `iteration` for full-gradient methods.
    pub epoch: f64,
    pub wall_time_seconds: f64,
    pub objective: f64,
    /// Present only at gap checkpoints.
    pub duality_gap: Option<f64>,
    pub sparsity: f64,
}

/// Writes `records` as CSV with [`TRACE_HEADER`]. A missing gap is an empty field.
pub fn write_trace_csv<W: Write>(mut w: W, records: &[TraceRecord]) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in records {
        let gap = r.duality_gap.map(|g| g.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.iteration, r.epoch, r.wall_time_seconds, r.objective, gap, r.sparsity
        )?;
    }
    Ok(())
}

/// Parses a trace CSV produced by [`write_trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRACE_HEADER => {}
        other => return Err(format!("unexpected trace header {other:?}")),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(k, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(format!("row {}: expected 6 fields, got {}", k + 1, f.len()));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("row {}: {e}", k + 1));
            Ok(TraceRecord {
                iteration: f[0].parse().map_err(|e| format!("row {}: {e}", k + 1))?,
                epoch: num(f[1])?,
                wall_time_seconds: num(f[2])?,
                objective: num(f[3])?,
                duality_gap: if f[4].is_empty() {
                    None
                } else {
                    Some(num(f[4])?)
                },
                sparsity: num(f[5])?,
            })
        })
        .collect()
}

/// Hooks into a solver run.
///
/// `on_record` fires after each trace record; `on_snapshot` fires once for
/// every iteration listed by `snapshot_iterations` that the run reaches
/// (iteration 0 is the initial plan). Time spent in hooks is excluded from
/// the recorded wall time.
pub trait Monitor {
    fn on_record(&mut self, _record: &TraceRecord, _plan: &TransportPlan) {}

    fn snapshot_iterations(&self) -> Vec<u64> {
        Vec::new()
    }

    fn on_snapshot(&mut self, _iteration: u64, _plan: &TransportPlan) {}
}

/// Monitor that does nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoMonitor;

impl Monitor for NoMonitor {}

/// Monotonic clock that can be paused.
#[derive(Debug)]
pub(crate) struct Stopwatch {
    accumulated: Duration,
    started: Option<Instant>,
}

impl Stopwatch {
    pub fn start() -> Self {
        Stopwatch {
            accumulated: Duration::ZERO,
            started: Some(Instant::now()),
        }
    }

    pub fn pause(&mut self) {
        if let Some(s) = self.started.take() {
            self.accumulated += s.elapsed();
        }
    }

    pub fn resume(&mut self) {
        if self.started.is_none() {
            self.started = Some(Instant::now());
        }
    }

    pub fn seconds(&self) -> f64 {
        let running = self.started.map_or(Duration::ZERO, |s| s.elapsed());
        (self.accumulated + running).as_secs_f64()
    }
}

/// Trace bookkeeping shared by every solver loop.
pub(crate) struct Recorder<'a> {
    pub trace: Vec<TraceRecord>,
    clock: Stopwatch,
    monitor: &'a mut dyn Monitor,
    snapshots: Vec<u64>,
    next_snapshot: usize,
    iterations_per_epoch: f64,
}

impl<'a> Recorder<'a> {
    pub fn new(monitor: &'a mut dyn Monitor, iterations_per_epoch: usize) -> Self {
        let mut snapshots = monitor.snapshot_iterations();
        snapshots.sort_unstable();
        snapshots.dedup();
        Recorder {
            trace: Vec::new(),
            clock: Stopwatch::start(),
            monitor,
            snapshots,
            next_snapshot: 0,
            iterations_per_epoch: iterations_per_epoch as f64,
        }
    }

    pub fn epoch(&self, iteration: u64) -> f64 {
        iteration as f64 / self.iterations_per_epoch
    }

    pub fn record(
        &mut self,
        iteration: u64,
        objective: f64,
        gap: Option<f64>,
        plan: &TransportPlan,
    ) {
        let sparsity = plan.sparsity();
        self.clock.pause();
        let record = TraceRecord {
            iteration,
            epoch: self.epoch(iteration),
            wall_time_seconds: self.clock.seconds(),
            objective,
            duality_gap: gap,
            sparsity,
        };
        self.monitor.on_record(&record, plan);
        self.trace.push(record);
        self.clock.resume();
    }

    /// Fires pending snapshots up to and including `iteration`.
    #[inline]
    pub fn snapshot(&mut self, iteration: u64, plan: &TransportPlan) {
        while self.next_snapshot < self.snapshots.len()
            && self.snapshots[self.next_snapshot] <= iteration
        {
            let at = self.snapshots[self.next_snapshot];
            self.next_snapshot += 1;
            if at == iteration {
                self.clock.pause();
                self.monitor.on_snapshot(iteration, plan);
                self.clock.resume();
            }
        }
    }
}
