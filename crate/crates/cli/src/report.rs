use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One check. It passes when `residual ≤ tolerance`; exact checks use
/// the number of surviving terms as residual and a zero tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub suite: String,
    pub id: String,
    /// The identity or property being checked.
    pub anchor: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub wall_ms: f64,
    pub note: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.status == Status::Pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status == Status::Fail).count()
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,id,status,residual,tolerance,wall_ms,anchor,note\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:e},{:e},{:.3},{},{}",
                r.suite,
                r.id,
                status_text(r.status),
                r.residual,
                r.tolerance,
                r.wall_ms,
                quote(&r.anchor),
                quote(&r.note)
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{} {:<10} {:<28} residual {:<10.3e} tol {:<9.1e} {:>9.1} ms  {}{}",
                status_text(r.status),
                r.suite,
                r.id,
                r.residual,
                r.tolerance,
                r.wall_ms,
                r.anchor,
                if r.note.is_empty() { String::new() } else { format!("  [{}]", r.note) }
            );
        }
        let _ = writeln!(out, "{} checks, {} failed", self.rows.len(), self.failures());
        out
    }
}

fn status_text(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Collects rows of one suite, timing each check.
pub struct Recorder {
    suite: &'static str,
    report: Report,
    started: Instant,
}

impl Recorder {
    pub fn new(suite: &'static str) -> Self {
        Recorder {
            suite,
            report: Report::default(),
            started: Instant::now(),
        }
    }

    /// Restarts the clock for the next check.
    pub fn start(&mut self) {
        self.started = Instant::now();
    }

    pub fn record(&mut self, id: &str, anchor: &str, residual: f64, tolerance: f64, note: impl Into<String>) {
        let wall_ms = self.started.elapsed().as_secs_f64() * 1e3;
        // NaN residuals fail
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        self.report.rows.push(Row {
            suite: self.suite.into(),
            id: id.into(),
            anchor: anchor.into(),
            status,
            residual,
            tolerance,
            wall_ms,
            note: note.into(),
        });
        self.started = Instant::now();
    }

    /// Records an error raised while running a check as a failure.
    pub fn error(&mut self, id: &str, anchor: &str, err: impl std::fmt::Display) {
        self.record(id, anchor, f64::INFINITY, 0.0, format!("error: {err}"));
    }

    pub fn finish(self) -> Report {
        self.report
    }
}
