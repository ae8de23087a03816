//! Static function call graph and per-stack call depths.
//!
//! The graph is a set of ordered call pairs over interned entities. A stack
//! trace seeds a multi-source breadth-first traversal that assigns every
//! reachable entity its call depth: the least number of caller→callee steps
//! from any function on the stack.

use alloc::borrow::ToOwned;
use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::entity::{EntityId, Interner, MatchMode};
use crate::error::Error;
use crate::expansion::StackTrace;
use crate::Result;

/// Directed call graph: nodes are the entities interned when the graph was
/// built, edges are deduplicated (caller, callee) pairs. Self-loops are
/// permitted (recursive functions). Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallGraph {
    entity_count: usize,
    adjacency: Vec<Vec<EntityId>>,
    edge_count: usize,
}

impl CallGraph {
    pub fn entity_count(&self) -> usize {
        self.entity_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn entities(&self) -> impl Iterator<Item = EntityId> {
        (0..self.entity_count).map(EntityId::from_index)
    }

    /// Callees of `caller` in first-appearance order. Ids outside the graph
    /// (interned later, e.g. by passing traces) have no callees.
    pub fn callees(&self, caller: EntityId) -> &[EntityId] {
        self.adjacency
            .get(caller.index())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn callers_of(&self, callee: EntityId) -> Vec<EntityId> {
        self.entities()
            .filter(|&c| self.callees(c).contains(&callee))
            .collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EntityId, EntityId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(caller, callees)| {
            callees
                .iter()
                .map(move |&callee| (EntityId::from_index(caller), callee))
        })
    }
}

/// Incremental construction; entities are interned in first appearance order
/// and duplicate edges collapse silently.
pub struct CallGraphBuilder<'a> {
    interner: &'a mut Interner,
    edges: Vec<(EntityId, EntityId)>,
    seen: BTreeSet<(EntityId, EntityId)>,
}

impl<'a> CallGraphBuilder<'a> {
    pub fn new(interner: &'a mut Interner) -> Self {
        CallGraphBuilder {
            interner,
            edges: Vec::new(),
            seen: BTreeSet::new(),
        }
    }

    /// Registers a node with no edges (the `@entity` form of the graph file).
    pub fn add_entity(&mut self, name: &str) -> Result<EntityId> {
        self.interner.intern(name)
    }

    pub fn add_edge(&mut self, caller: &str, callee: &str) -> Result<()> {
        let caller = self.interner.intern(caller)?;
        let callee = self.interner.intern(callee)?;
        if self.seen.insert((caller, callee)) {
            self.edges.push((caller, callee));
        }
        Ok(())
    }

    pub fn finish(self) -> Result<CallGraph> {
        let entity_count = self.interner.len();
        if entity_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = Vec::new();
        adjacency.resize_with(entity_count, Vec::new);
        let edge_count = self.edges.len();
        for (caller, callee) in self.edges {
            adjacency[caller.index()].push(callee);
        }
        Ok(CallGraph {
            entity_count,
            adjacency,
            edge_count,
        })
    }
}

/// Builds a graph from (caller, callee) name pairs.
pub fn build_call_graph<S: AsRef<str>>(
    interner: &mut Interner,
    edge_records: impl IntoIterator<Item = (S, S)>,
) -> Result<CallGraph> {
    let mut builder = CallGraphBuilder::new(interner);
    for (caller, callee) in edge_records {
        builder.add_edge(caller.as_ref(), callee.as_ref())?;
    }
    builder.finish()
}

/// Call depths of one stack trace: entity → least number of call steps from
/// any stack function, limited to a horizon. Entities beyond the horizon are
/// absent. Frames that resolved to no entity are recorded for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthMap {
    stack_id: String,
    depths: BTreeMap<EntityId, u32>,
    skipped_frames: Vec<String>,
}

impl DepthMap {
    pub fn stack_id(&self) -> &str {
        &self.stack_id
    }

    pub fn depth(&self, entity: EntityId) -> Option<u32> {
        self.depths.get(&entity).copied()
    }

    pub fn len(&self) -> usize {
        self.depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths.is_empty()
    }

    /// (entity, depth) pairs in ascending entity order.
    pub fn iter(&self) -> impl Iterator<Item = (EntityId, u32)> + '_ {
        self.depths.iter().map(|(&id, &d)| (id, d))
    }

    pub fn domain(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.depths.keys().copied()
    }

    pub fn hit_set(&self) -> BTreeSet<EntityId> {
        self.depths.keys().copied().collect()
    }

    /// Stack frames that resolved to no known entity (system frames, etc).
    pub fn skipped_frames(&self) -> &[String] {
        &self.skipped_frames
    }
}

fn resolve_seeds(
    interner: &Interner,
    stack: &StackTrace,
    mode: MatchMode,
) -> Result<(Vec<EntityId>, Vec<String>)> {
    let mut seeds = Vec::new();
    let mut seen = BTreeSet::new();
    let mut skipped = Vec::new();
    for frame in stack.frames() {
        match interner.resolve(frame, mode) {
            // Duplicate frames (recursion) seed once.
            Some(id) => {
                if seen.insert(id) {
                    seeds.push(id);
                }
            }
            None => skipped.push(frame.to_owned()),
        }
    }
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet {
            stack_id: stack.stack_id().to_owned(),
        });
    }
    Ok((seeds, skipped))
}

/// Multi-source BFS from all stack entities at depth 0, following
/// caller→callee edges only. Each entity reachable within `horizon` steps is
/// assigned its minimal depth; unresolvable frames are skipped, and a stack
/// with no resolvable frame at all is an error.
pub fn compute_call_depths(
    graph: &CallGraph,
    interner: &Interner,
    stack: &StackTrace,
    horizon: u32,
    mode: MatchMode,
) -> Result<DepthMap> {
    let (seeds, skipped_frames) = resolve_seeds(interner, stack, mode)?;
    let mut depths: BTreeMap<EntityId, u32> = BTreeMap::new();
    let mut frontier = seeds;
    for &seed in &frontier {
        depths.insert(seed, 0);
    }
    let mut next = Vec::new();
    let mut level = 0;
    while level < horizon && !frontier.is_empty() {
        level += 1;
        for &at in &frontier {
            for &callee in graph.callees(at) {
                if let Entry::Vacant(slot) = depths.entry(callee) {
                    slot.insert(level);
                    next.push(callee);
                }
            }
        }
        core::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    Ok(DepthMap {
        stack_id: stack.stack_id().to_owned(),
        depths,
        skipped_frames,
    })
}

/// The depth at which expansion of `stack` stops adding entities: the least
/// d with domain(d) = domain(d + 1). Zero when the stack functions call
/// nothing new.
pub fn fixpoint_depth(
    graph: &CallGraph,
    interner: &Interner,
    stack: &StackTrace,
    mode: MatchMode,
) -> Result<u32> {
    let (seeds, _) = resolve_seeds(interner, stack, mode)?;
    let mut visited: BTreeSet<EntityId> = seeds.iter().copied().collect();
    let mut frontier = seeds;
    let mut next = Vec::new();
    let mut level = 0;
    loop {
        for &at in &frontier {
            for &callee in graph.callees(at) {
                if visited.insert(callee) {
                    next.push(callee);
                }
            }
        }
        if next.is_empty() {
            return Ok(level);
        }
        level += 1;
        core::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
}

/// Expansion fixpoint over a whole dataset: the maximum per-stack fixpoint.
/// Stacks that fail to resolve are ignored; an error is returned only when
/// every stack fails.
pub fn dataset_fixpoint(
    graph: &CallGraph,
    interner: &Interner,
    stacks: &[StackTrace],
    mode: MatchMode,
) -> Result<u32> {
    let mut best: Option<u32> = None;
    for stack in stacks {
        if let Ok(d) = fixpoint_depth(graph, interner, stack, mode) {
            best = Some(best.map_or(d, |b| b.max(d)));
        }
    }
    best.ok_or(Error::EmptyStackList)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{figure3, figure3_stack};

    #[test]
    fn duplicate_edges_collapse() {
        let mut interner = Interner::new();
        let g = build_call_graph(&mut interner, [("f1", "f3"), ("f3", "f6"), ("f1", "f3")])
            .unwrap();
        assert_eq!(g.entity_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn empty_graph_is_an_error() {
        let mut interner = Interner::new();
        let edges: [(&str, &str); 0] = [];
        assert_eq!(build_call_graph(&mut interner, edges), Err(Error::EmptyGraph));
    }

    #[test]
    fn entity_only_nodes_are_registered() {
        let mut interner = Interner::new();
        let mut b = CallGraphBuilder::new(&mut interner);
        b.add_entity("lonely").unwrap();
        let g = b.finish().unwrap();
        assert_eq!(g.entity_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn self_loops_are_permitted() {
        let mut interner = Interner::new();
        let g = build_call_graph(&mut interner, [("rec", "rec")]).unwrap();
        let id = interner.resolve("rec", MatchMode::Exact).unwrap();
        assert_eq!(g.callees(id), &[id]);
    }

    #[test]
    fn figure3_f13_has_two_callers() {
        let (interner, graph) = figure3();
        let f13 = interner.resolve("f13", MatchMode::Exact).unwrap();
        let callers: Vec<_> = graph
            .callers_of(f13)
            .into_iter()
            .map(|c| interner.name(c).to_owned())
            .collect();
        assert_eq!(callers.len(), 2);
        assert!(callers.contains(&"f4".to_owned()));
        assert!(callers.contains(&"f12".to_owned()));
    }

    #[test]
    fn figure3_depths() {
        let (interner, graph) = figure3();
        let stack = figure3_stack();
        let depths = compute_call_depths(&graph, &interner, &stack, 2, MatchMode::Exact).unwrap();
        let id = |n: &str| interner.resolve(n, MatchMode::Exact).unwrap();
        // All stack functions sit at depth 0.
        for name in ["f1", "f3", "f12", "f11"] {
            assert_eq!(depths.depth(id(name)), Some(0), "{name}");
        }
        // f13 is reachable in 2 steps via f4 but in 1 via f12; least wins.
        assert_eq!(depths.depth(id("f13")), Some(1));
        assert_eq!(depths.depth(id("f14")), Some(1));
        assert_eq!(depths.depth(id("f5")), Some(2));
        assert_eq!(depths.depth(id("f7")), None);
    }

    #[test]
    fn horizon_zero_keeps_only_seeds() {
        let (interner, graph) = figure3();
        let stack = figure3_stack();
        let depths = compute_call_depths(&graph, &interner, &stack, 0, MatchMode::Exact).unwrap();
        assert_eq!(depths.len(), 4);
        assert!(depths.iter().all(|(_, d)| d == 0));
    }

    #[test]
    fn unresolvable_frames_are_skipped_not_fatal() {
        let (interner, graph) = figure3();
        let stack = StackTrace::new("s", ["f11", "BaseProcessStart"]).unwrap();
        let depths = compute_call_depths(&graph, &interner, &stack, 1, MatchMode::Exact).unwrap();
        assert_eq!(depths.skipped_frames(), &["BaseProcessStart".to_owned()]);
        assert!(depths.depth(interner.resolve("f11", MatchMode::Exact).unwrap()).is_some());
    }

    #[test]
    fn all_frames_unresolvable_is_empty_seed_set() {
        let (interner, graph) = figure3();
        let stack = StackTrace::new("s", ["nope", "also_nope"]).unwrap();
        let err = compute_call_depths(&graph, &interner, &stack, 1, MatchMode::Exact).unwrap_err();
        assert!(matches!(err, Error::EmptySeedSet { .. }));
    }

    #[test]
    fn figure3_fixpoint_is_six() {
        let (interner, graph) = figure3();
        let stack = figure3_stack();
        // Deepest chain: f1 → f2 → f5 → f7 → f8 → f9 → f10.
        assert_eq!(fixpoint_depth(&graph, &interner, &stack, MatchMode::Exact).unwrap(), 6);
        let at_6 = compute_call_depths(&graph, &interner, &stack, 6, MatchMode::Exact).unwrap();
        let at_7 = compute_call_depths(&graph, &interner, &stack, 7, MatchMode::Exact).unwrap();
        assert_eq!(at_6, at_7);
    }

    #[test]
    fn horizon_monotonicity_on_figure3() {
        let (interner, graph) = figure3();
        let stack = figure3_stack();
        let mut previous: Option<DepthMap> = None;
        for horizon in 0..=7 {
            let depths =
                compute_call_depths(&graph, &interner, &stack, horizon, MatchMode::Exact).unwrap();
            if let Some(prev) = previous {
                for (id, d) in prev.iter() {
                    assert_eq!(depths.depth(id), Some(d));
                }
                assert!(depths.len() >= prev.len());
            }
            previous = Some(depths);
        }
    }
}
