//! Expands crash stack traces into approximate failing execution traces.
//!
//! A crash stack only names the functions still on the stack at crash time;
//! functions that were called and returned are gone. Expanding the stack over
//! the static call graph up to a chosen depth approximates the set of
//! functions the failing run could have executed.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::callgraph::{compute_call_depths, CallGraph, DepthMap};
use crate::entity::{EntityId, Interner, MatchMode};
use crate::error::Error;
use crate::Result;

/// Ordered crash frames; index 0 is the crash signature (top frame).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackTrace {
    stack_id: String,
    frames: Vec<String>,
}

impl StackTrace {
    pub fn new<S: Into<String>>(
        stack_id: impl Into<String>,
        frames: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let stack_id = stack_id.into();
        let frames: Vec<String> = frames.into_iter().map(Into::into).collect();
        if frames.is_empty() {
            return Err(Error::EmptyStack { stack_id });
        }
        Ok(StackTrace { stack_id, frames })
    }

    pub fn stack_id(&self) -> &str {
        &self.stack_id
    }

    pub fn frames(&self) -> &[String] {
        &self.frames
    }

    pub fn crash_signature(&self) -> &str {
        &self.frames[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TraceLabel {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOrigin {
    /// Collected by actually running the program (test suites).
    Observed,
    /// Synthesized from a crash stack via call-graph expansion.
    Expanded,
}

/// A hit set over entities, labeled pass or fail.
///
/// Expanded traces are always failing; hit sets are never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    trace_id: String,
    hits: BTreeSet<EntityId>,
    label: TraceLabel,
    origin: TraceOrigin,
}

impl ExecutionTrace {
    pub fn observed(
        trace_id: impl Into<String>,
        hits: BTreeSet<EntityId>,
        label: TraceLabel,
    ) -> Result<Self> {
        let trace_id = trace_id.into();
        if hits.is_empty() {
            return Err(Error::EmptyHits { trace_id });
        }
        Ok(ExecutionTrace {
            trace_id,
            hits,
            label,
            origin: TraceOrigin::Observed,
        })
    }

    pub fn expanded(trace_id: impl Into<String>, hits: BTreeSet<EntityId>) -> Result<Self> {
        let trace_id = trace_id.into();
        if hits.is_empty() {
            return Err(Error::EmptyHits { trace_id });
        }
        Ok(ExecutionTrace {
            trace_id,
            hits,
            label: TraceLabel::Fail,
            origin: TraceOrigin::Expanded,
        })
    }

    pub fn trace_id(&self) -> &str {
        &self.trace_id
    }

    pub fn hits(&self) -> &BTreeSet<EntityId> {
        &self.hits
    }

    pub fn label(&self) -> TraceLabel {
        self.label
    }

    pub fn origin(&self) -> TraceOrigin {
        self.origin
    }
}

/// Expands one stack: the hit set is the domain of its depth map, i.e. every
/// entity within `depth` call steps of a stack function. Returns the depth
/// map alongside the trace; distance reweighting consumes it later.
pub fn expand_stack_trace(
    graph: &CallGraph,
    interner: &Interner,
    stack: &StackTrace,
    depth: u32,
    mode: MatchMode,
) -> Result<(ExecutionTrace, DepthMap)> {
    let depths = compute_call_depths(graph, interner, stack, depth, mode)?;
    let trace = ExecutionTrace::expanded(stack.stack_id(), depths.hit_set())?;
    Ok((trace, depths))
}

/// Result of expanding a batch of stacks. Stacks that fail to expand are
/// reported by id and do not abort the rest of the batch.
#[derive(Debug, Clone)]
pub struct ExpansionBatch {
    pub traces: Vec<ExecutionTrace>,
    pub depth_maps: Vec<DepthMap>,
    pub failures: Vec<(String, Error)>,
}

impl ExpansionBatch {
    pub fn all_failed(&self) -> bool {
        self.traces.is_empty()
    }
}

/// Expands every stack at the same depth; ids are preserved in input order.
pub fn expand_all(
    graph: &CallGraph,
    interner: &Interner,
    stacks: &[StackTrace],
    depth: u32,
    mode: MatchMode,
) -> Result<ExpansionBatch> {
    if stacks.is_empty() {
        return Err(Error::EmptyStackList);
    }
    let mut batch = ExpansionBatch {
        traces: Vec::with_capacity(stacks.len()),
        depth_maps: Vec::with_capacity(stacks.len()),
        failures: Vec::new(),
    };
    for stack in stacks {
        match expand_stack_trace(graph, interner, stack, depth, mode) {
            Ok((trace, depths)) => {
                batch.traces.push(trace);
                batch.depth_maps.push(depths);
            }
            Err(err) => batch.failures.push((stack.stack_id().to_owned(), err)),
        }
    }
    Ok(batch)
}
