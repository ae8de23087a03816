//! Program spectra: the failing/passing hit matrix and per-entity counters.
//!
//! Rows are execution traces, columns are the entities hit by at least one
//! trace. Each column carries the four counters a_ef, a_ep, a_nf, a_np that
//! the suspiciousness formulas consume.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::entity::{EntityId, Interner};
use crate::error::Error;
use crate::expansion::{ExecutionTrace, TraceLabel, TraceOrigin};
use crate::Result;

/// Per-entity trace counters. For every entity,
/// a_ef + a_nf = failing traces and a_ep + a_np = passing traces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpectraCounts {
    /// Failing traces that executed the entity.
    pub a_ef: u32,
    /// Passing traces that executed the entity.
    pub a_ep: u32,
    /// Failing traces that did not execute the entity.
    pub a_nf: u32,
    /// Passing traces that did not execute the entity.
    pub a_np: u32,
}

impl SpectraCounts {
    pub fn new(a_ef: u32, a_nf: u32, a_ep: u32, a_np: u32) -> Self {
        SpectraCounts { a_ef, a_ep, a_nf, a_np }
    }

    pub fn total(&self) -> u32 {
        self.a_ef + self.a_ep + self.a_nf + self.a_np
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TraceRow {
    pub(crate) trace_id: String,
    pub(crate) label: TraceLabel,
    pub(crate) origin: TraceOrigin,
    pub(crate) hits: Vec<bool>,
}

/// Borrowed view of one matrix row.
#[derive(Debug, Clone, Copy)]
pub struct SpectraRow<'a> {
    pub trace_id: &'a str,
    pub label: TraceLabel,
    pub origin: TraceOrigin,
    pub hits: &'a [bool],
}

/// Immutable hit matrix plus counters. Entity order is ascending by id, so
/// every derived artifact is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramSpectra {
    entities: Vec<EntityId>,
    rows: Vec<TraceRow>,
    counts: Vec<SpectraCounts>,
    failing_total: u32,
    passing_total: u32,
}

impl ProgramSpectra {
    /// Entities appearing in at least one trace, ascending by id.
    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn trace_count(&self) -> usize {
        self.rows.len()
    }

    pub fn failing_total(&self) -> u32 {
        self.failing_total
    }

    pub fn passing_total(&self) -> u32 {
        self.passing_total
    }

    pub fn column_of(&self, entity: EntityId) -> Option<usize> {
        self.entities.binary_search(&entity).ok()
    }

    pub fn counts_at(&self, column: usize) -> &SpectraCounts {
        &self.counts[column]
    }

    pub fn counts(&self, entity: EntityId) -> Option<&SpectraCounts> {
        self.column_of(entity).map(|c| &self.counts[c])
    }

    pub fn rows(&self) -> impl Iterator<Item = SpectraRow<'_>> {
        self.rows.iter().map(|r| SpectraRow {
            trace_id: &r.trace_id,
            label: r.label,
            origin: r.origin,
            hits: &r.hits,
        })
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [TraceRow] {
        &mut self.rows
    }

    /// Recomputes the per-column counters from the raw matrix.
    pub(crate) fn recount(&mut self) {
        self.counts = count_columns(self.entities.len(), &self.rows);
        self.failing_total = self
            .rows
            .iter()
            .filter(|r| r.label == TraceLabel::Fail)
            .count() as u32;
        self.passing_total = self.rows.len() as u32 - self.failing_total;
    }
}

fn count_columns(width: usize, rows: &[TraceRow]) -> Vec<SpectraCounts> {
    let mut counts = vec![SpectraCounts::default(); width];
    for row in rows {
        for (col, &hit) in row.hits.iter().enumerate() {
            let c = &mut counts[col];
            match (row.label, hit) {
                (TraceLabel::Fail, true) => c.a_ef += 1,
                (TraceLabel::Fail, false) => c.a_nf += 1,
                (TraceLabel::Pass, true) => c.a_ep += 1,
                (TraceLabel::Pass, false) => c.a_np += 1,
            }
        }
    }
    counts
}

/// Combines expanded failing traces with observed passing traces.
///
/// The entity universe is the union of entities hit by any trace; graph
/// entities hit by no trace take no part in ranking. At least one failing
/// trace is required; passing traces may be absent (degenerate but allowed).
pub fn build_spectra(
    failing: &[ExecutionTrace],
    passing: &[ExecutionTrace],
) -> Result<ProgramSpectra> {
    if failing.is_empty() {
        return Err(Error::NoFailingTraces);
    }
    let mut universe: BTreeSet<EntityId> = BTreeSet::new();
    for trace in failing.iter().chain(passing) {
        universe.extend(trace.hits().iter().copied());
    }
    let entities: Vec<EntityId> = universe.into_iter().collect();

    let to_row = |trace: &ExecutionTrace, forced: Option<TraceLabel>| TraceRow {
        trace_id: String::from(trace.trace_id()),
        label: forced.unwrap_or(trace.label()),
        origin: trace.origin(),
        hits: entities.iter().map(|e| trace.hits().contains(e)).collect(),
    };

    let mut rows = Vec::with_capacity(failing.len() + passing.len());
    rows.extend(failing.iter().map(|t| to_row(t, Some(TraceLabel::Fail))));
    rows.extend(passing.iter().map(|t| to_row(t, Some(TraceLabel::Pass))));

    let counts = count_columns(entities.len(), &rows);
    Ok(ProgramSpectra {
        counts,
        failing_total: failing.len() as u32,
        passing_total: passing.len() as u32,
        entities,
        rows,
    })
}

/// Builds spectra from already-labeled traces (statement-level matrix files).
pub fn build_spectra_mixed(traces: &[ExecutionTrace]) -> Result<ProgramSpectra> {
    let failing: Vec<ExecutionTrace> = traces
        .iter()
        .filter(|t| t.label() == TraceLabel::Fail)
        .cloned()
        .collect();
    let passing: Vec<ExecutionTrace> = traces
        .iter()
        .filter(|t| t.label() == TraceLabel::Pass)
        .cloned()
        .collect();
    build_spectra(&failing, &passing)
}

/// Turns parsed passing-trace records into observed passing traces, interning
/// names the workspace has not seen (they extend the entity universe).
/// Duplicate hit names within a record collapse (set semantics).
pub fn ingest_passing<S: AsRef<str>>(
    interner: &mut Interner,
    records: impl IntoIterator<Item = (String, Vec<S>)>,
) -> Result<Vec<ExecutionTrace>> {
    let mut traces = Vec::new();
    for (trace_id, names) in records {
        let mut hits = BTreeSet::new();
        for name in &names {
            hits.insert(interner.intern(name.as_ref())?);
        }
        traces.push(ExecutionTrace::observed(trace_id, hits, TraceLabel::Pass)?);
    }
    Ok(traces)
}
