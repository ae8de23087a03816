//! Interned code entities: the unit of localization.
//!
//! An entity is a fully-qualified function name at function granularity, or a
//! statement label in statement-level mode. Names map to dense ids so the
//! rest of the pipeline works on integer indices.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

/// Dense, zero-based identifier of an interned entity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(u32);

impl EntityId {
    pub const fn from_index(index: usize) -> Self {
        EntityId(index as u32)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl core::fmt::Display for EntityId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// How stack-frame strings are matched against interned names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Exact string comparison.
    #[default]
    Exact,
    /// Truncate both sides at the first `(` before comparing, so frames that
    /// carry parameter lists match graph names that do not (and vice versa).
    StripParams,
}

/// Truncates a name at the first `(` and trims trailing whitespace.
pub fn strip_params(name: &str) -> &str {
    match name.find('(') {
        Some(i) => name[..i].trim_end(),
        None => name,
    }
}

/// Name ↔ id table for one workspace.
///
/// Ids are assigned contiguously from 0 in first-appearance order, and the
/// mapping is a bijection: re-interning a known name returns its existing id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    by_name: BTreeMap<String, EntityId>,
    // Stripped-name lookup for MatchMode::StripParams; the first interned
    // entity wins when two names collapse to the same stripped form.
    by_stripped: BTreeMap<String, EntityId>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Interns `name`, returning its id. Names must be non-empty and must not
    /// contain tabs or line breaks (they appear as fields of tab-separated
    /// and line-oriented files).
    pub fn intern(&mut self, name: &str) -> Result<EntityId> {
        if name.is_empty() || name.contains(['\t', '\n', '\r']) {
            return Err(Error::InvalidName { name: name.to_owned() });
        }
        if let Some(&id) = self.by_name.get(name) {
            return Ok(id);
        }
        let id = EntityId::from_index(self.names.len());
        self.names.push(name.to_owned());
        self.by_name.insert(name.to_owned(), id);
        let stripped = strip_params(name);
        if !stripped.is_empty() {
            self.by_stripped.entry(stripped.to_owned()).or_insert(id);
        }
        Ok(id)
    }

    /// Looks up a name without interning it.
    pub fn resolve(&self, name: &str, mode: MatchMode) -> Option<EntityId> {
        match mode {
            MatchMode::Exact => self.by_name.get(name).copied(),
            MatchMode::StripParams => {
                let stripped = strip_params(name);
                if stripped.is_empty() {
                    None
                } else {
                    self.by_stripped.get(stripped).copied()
                }
            }
        }
    }

    /// The name of an interned entity. Panics on a foreign id.
    pub fn name(&self, id: EntityId) -> &str {
        &self.names[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (EntityId::from_index(i), n.as_str()))
    }
}
