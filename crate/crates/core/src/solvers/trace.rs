use crate::matcore::Scalar;

/// One checkpoint of a solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// Projections (Kaczmarz) or CG steps (CGLS) performed so far.
    pub k: u64,
    /// `||x_k - x_true||_2`, when the solution is known.
    pub error: Option<f64>,
    /// `||A x_k - b||_2`.
    pub residual: f64,
    /// Cumulative real flops.
    pub flops: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedTolerance,
    BudgetExhausted,
}

/// Checkpoints of a run. `k` strictly increases, `flops` never decreases,
/// and the first record is `k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub records: Vec<TraceRecord>,
    pub terminated_by: Termination,
    pub final_iterate: Vec<Scalar>,
}

impl IterateTrace {
    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("a trace always holds the k = 0 record")
    }

    pub fn reached_tolerance(&self) -> bool {
        self.terminated_by == Termination::ReachedTolerance
    }

    /// Iterations needed to reach the tolerance, if it was reached.
    pub fn iterations_to_tolerance(&self) -> Option<u64> {
        self.reached_tolerance().then(|| self.last().k)
    }

    pub fn flops_to_tolerance(&self) -> Option<u64> {
        self.reached_tolerance().then(|| self.last().flops)
    }

    /// Record in effect at iteration `k`: the last one with `record.k <= k`.
    /// After termination the final record stays in effect.
    pub fn record_at(&self, k: u64) -> &TraceRecord {
        let idx = self.records.partition_point(|r| r.k <= k);
        &self.records[idx.saturating_sub(1)]
    }

    /// Record in effect once `flops` have been spent.
    pub fn record_at_flops(&self, flops: u64) -> &TraceRecord {
        let idx = self.records.partition_point(|r| r.flops <= flops);
        &self.records[idx.saturating_sub(1)]
    }
}

/// Accumulates records, keeping the strictly-increasing-k invariant.
pub(crate) struct TraceBuilder {
    records: Vec<TraceRecord>,
}

impl TraceBuilder {
    pub(crate) fn new(first: TraceRecord) -> Self {
        debug_assert_eq!(first.k, 0);
        Self { records: vec![first] }
    }

    pub(crate) fn last_k(&self) -> u64 {
        self.records.last().map_or(0, |r| r.k)
    }

    pub(crate) fn push(&mut self, rec: TraceRecord) {
        if rec.k > self.last_k() {
            self.records.push(rec);
        }
    }

    pub(crate) fn finish(self, terminated_by: Termination, final_iterate: Vec<Scalar>) -> IterateTrace {
        IterateTrace { records: self.records, terminated_by, final_iterate }
    }
}
