//! Error type shared by all pipeline stages.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A call graph was built with no entities at all.
    EmptyGraph,
    /// A stack trace was constructed with zero frames.
    EmptyStack { stack_id: String },
    /// No frame of the stack resolved to a known entity.
    EmptySeedSet { stack_id: String },
    /// Batch expansion was given no stacks.
    EmptyStackList,
    /// A trace was constructed with an empty hit set.
    EmptyHits { trace_id: String },
    /// Spectra construction requires at least one failing trace.
    NoFailingTraces,
    /// A ground-truth fault has no fix locations.
    EmptyFixSet { fault_id: String },
    /// The same fault id was registered twice in the ground truth.
    DuplicateFault { fault_id: String },
    /// Entity names must be non-empty and free of tabs and newlines.
    InvalidName { name: String },
    /// Arguments outside the domain of the random-guess probability.
    InvalidProbabilityArgs { examined: usize, total: usize, fix_points: usize },
    /// Precision is undefined for a zero maximum depth.
    ZeroMaxDepth,
    /// Precision was requested for a depth beyond the expansion fixpoint.
    DepthExceedsMax { depth: u32, d_max: u32 },
    /// Depth tuning was given an empty depth range.
    EmptyDepthRange,
    /// Average cost is undefined when no fault is covered by the spectra.
    NoCoveredFaults,
    /// A fraction or rate parameter fell outside [0, 1].
    InvalidFraction { value: f64 },
    /// The synthetic generator could not satisfy the configuration.
    InfeasibleConfig(String),
    /// A configuration value violates its invariant.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyGraph => write!(f, "empty graph"),
            Error::EmptyStack { stack_id } => write!(f, "stack '{stack_id}' has no frames"),
            Error::EmptySeedSet { stack_id } => write!(f, "empty seed set: no frame of stack '{stack_id}' resolves to a known entity"),
            Error::EmptyStackList => write!(f, "no stacks to expand"),
            Error::EmptyHits { trace_id } => write!(f, "trace '{trace_id}' has an empty hit set"),
            Error::NoFailingTraces => write!(f, "no failing traces"),
            Error::EmptyFixSet { fault_id } => write!(f, "fault '{fault_id}' has an empty fix set"),
            Error::DuplicateFault { fault_id } => write!(f, "fault '{fault_id}' registered twice"),
            Error::InvalidName { name } => write!(f, "invalid entity name {name:?}"),
            Error::InvalidProbabilityArgs { examined, total, fix_points } => write!(
                f,
                "invalid probability arguments: m={examined}, n={total}, k={fix_points}"
            ),
            Error::ZeroMaxDepth => write!(f, "maximum depth must be positive"),
            Error::DepthExceedsMax { depth, d_max } => {
                write!(f, "depth {depth} exceeds maximum depth {d_max}")
            }
            Error::EmptyDepthRange => write!(f, "empty depth range"),
            Error::NoCoveredFaults => write!(f, "no fault fix location is covered by the spectra"),
            Error::InvalidFraction { value } => write!(f, "fraction {value} outside [0, 1]"),
            Error::InfeasibleConfig(why) => write!(f, "infeasible configuration: {why}"),
            Error::InvalidConfig(why) => write!(f, "invalid configuration: {why}"),
        }
    }
}

impl core::error::Error for Error {}
