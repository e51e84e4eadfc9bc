use std::io::{self, Write};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{norm2, CsrMatrix};
use crate::report::format_sig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRule {
    /// Threshold on `‖r_k‖ / ‖r_0‖`.
    pub tol: f64,
    pub max_iter: usize,
}

impl StopRule {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        if !(tol > 0.0) || max_iter == 0 {
            return Err(Error::InvalidArgument(format!(
                "stop rule needs tol > 0 and max_iter >= 1, got ({tol}, {max_iter})"
            )));
        }
        Ok(Self { tol, max_iter })
    }
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub residual_norm: f64,
    /// `‖r_k‖ / ‖r_{k−1}‖`; absent for the initial guess.
    pub cf: Option<f64>,
    /// Wall time since the solve started.
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub records: Vec<TraceRecord>,
    pub status: SolveStatus,
}

impl IterationTrace {
    /// Number of iterations performed (records minus the initial one).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn initial_residual(&self) -> f64 {
        self.records.first().map_or(0.0, |r| r.residual_norm)
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.residual_norm)
    }

    pub fn elapsed(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.seconds)
    }

    pub const CSV_HEADER: &'static str = "iter,residual_norm,cf,seconds";

    /// Writes the trace as CSV. With `timing == false` the seconds column
    /// is left empty so that reruns are byte-identical.
    pub fn write_csv<W: Write>(&self, mut out: W, timing: bool) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for r in &self.records {
            let cf = r.cf.map(|c| format_sig(c, 9)).unwrap_or_default();
            let secs = if timing { format_sig(r.seconds, 6) } else { String::new() };
            writeln!(out, "{},{},{},{}", r.iter, format_sig(r.residual_norm, 9), cf, secs)?;
        }
        Ok(())
    }
}

/// Geometric mean of the last `m` convergence factors of `trace`.
pub fn acf_estimate(trace: &IterationTrace, m: usize) -> Result<f64> {
    let needed = m + 1;
    if m == 0 || trace.records.len() < needed {
        return Err(Error::InsufficientRecords {
            needed,
            available: trace.records.len(),
        });
    }
    let tail = &trace.records[trace.records.len() - m..];
    let mut log_sum = 0.0;
    for r in tail {
        let cf = r.cf.expect("records after the first carry a factor");
        if cf == 0.0 {
            return Ok(0.0);
        }
        log_sum += cf.ln();
    }
    Ok((log_sum / m as f64).exp())
}

/// Records explicit residuals `rhs − A x` and decides when to stop.
pub(crate) struct Monitor<'a> {
    a: &'a CsrMatrix,
    rhs: &'a [f64],
    stop: StopRule,
    start: Instant,
    residual: Vec<f64>,
    trace: IterationTrace,
}

impl<'a> Monitor<'a> {
    pub(crate) fn new(a: &'a CsrMatrix, rhs: &'a [f64], stop: StopRule) -> Self {
        Self {
            a,
            rhs,
            stop,
            start: Instant::now(),
            residual: vec![0.0; rhs.len()],
            trace: IterationTrace {
                records: Vec::new(),
                status: SolveStatus::MaxIter,
            },
        }
    }

    /// Records the residual of `x` as the next iteration. Returns `true`
    /// once the solve should stop.
    pub(crate) fn record(&mut self, x: &[f64]) -> Result<bool> {
        self.a.residual_into(x, self.rhs, &mut self.residual);
        let norm = norm2(&self.residual);
        let iter = self.trace.records.len();
        let cf = self.trace.records.last().map(|prev| norm / prev.residual_norm);
        self.trace.records.push(TraceRecord {
            iter,
            residual_norm: norm,
            cf,
            seconds: self.start.elapsed().as_secs_f64(),
        });
        if !norm.is_finite() {
            return Err(Error::Diverged(Box::new(self.trace.clone())));
        }
        let r0 = self.trace.records[0].residual_norm;
        if norm == 0.0 || norm <= self.stop.tol * r0 {
            self.trace.status = SolveStatus::Converged;
            return Ok(true);
        }
        Ok(iter >= self.stop.max_iter)
    }

    /// Latest explicit residual.
    pub(crate) fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub(crate) fn mark_converged(&mut self) {
        self.trace.status = SolveStatus::Converged;
    }

    pub(crate) fn finish(self) -> IterationTrace {
        self.trace
    }
}
