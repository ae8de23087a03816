//! Core pipeline for locating crashing faults from crash stack traces.
//!
//! The pipeline expands crash stacks into approximate failing execution
//! traces over a static call graph, contrasts them with passing traces as
//! program spectra, ranks entities by suspiciousness (Ochiai, Tarantula, or
//! Jaccard, optionally reshaped by distance and coverage heuristics), and
//! measures localization quality.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats, and the CLI live
//! in the companion `crashloc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod callgraph;
pub mod entity;
pub mod error;
pub mod evaluation;
pub mod expansion;
pub mod ranking;
pub mod spectra;
pub mod synthgen;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
