//! Reproducible synthetic benchmarks: a random call graph, seeded faults,
//! simulated crash stacks, and passing traces.
//!
//! Stacks are generated as genuine call paths and then truncated from the
//! crash end, so fix locations get popped off the stack in a controllable
//! way — the core difficulty of locating crashing faults. Everything is
//! fully determined by the seed.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::callgraph::{CallGraph, CallGraphBuilder};
use crate::entity::{EntityId, Interner};
use crate::error::Error;
use crate::evaluation::{FaultStacks, GroundTruth};
use crate::expansion::{ExecutionTrace, StackTrace, TraceLabel};
use crate::Result;

const WALK_RETRIES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_entities: usize,
    /// Mean out-degree; degrees are drawn geometrically.
    pub edge_density: f64,
    pub n_faults: usize,
    pub fix_points_per_fault: usize,
    pub n_stacks_per_fault: usize,
    /// Frames popped off each stack before the crash; 0 keeps every fix
    /// entity on its fault's stack.
    pub stack_truncation: usize,
    pub n_passing_traces: usize,
    /// Fraction of entities the passing traces should cover (hit ±5pp).
    pub target_coverage_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_entities: 200,
            edge_density: 2.5,
            n_faults: 5,
            fix_points_per_fault: 2,
            n_stacks_per_fault: 3,
            stack_truncation: 2,
            n_passing_traces: 60,
            target_coverage_rate: 0.9,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidConfig(String::from(why)));
        if self.n_entities < 2 {
            return bad("n_entities must be at least 2");
        }
        if !(self.edge_density > 0.0) {
            return bad("edge_density must be positive");
        }
        if self.n_faults == 0 || self.fix_points_per_fault == 0 || self.n_stacks_per_fault == 0 {
            return bad("fault, fix-point, and stack counts must be positive");
        }
        if self.n_passing_traces == 0 {
            return bad("n_passing_traces must be positive");
        }
        if !(self.target_coverage_rate > 0.0 && self.target_coverage_rate <= 1.0) {
            return bad("target_coverage_rate must be in (0, 1]");
        }
        Ok(())
    }
}

/// The four artifacts a benchmark instance consists of.
#[derive(Debug, Clone)]
pub struct SynthBenchmark {
    pub interner: Interner,
    pub graph: CallGraph,
    pub faults: Vec<FaultStacks>,
    pub passing: Vec<ExecutionTrace>,
    pub truth: GroundTruth,
}

impl SynthBenchmark {
    pub fn all_stacks(&self) -> Vec<StackTrace> {
        self.faults
            .iter()
            .flat_map(|f| f.stacks.iter().cloned())
            .collect()
    }
}

// Geometric with the given mean via inversion: P(X >= x) = q^x.
fn sample_geometric(rng: &mut ChaCha8Rng, mean: f64, cap: usize) -> usize {
    let q = mean / (1.0 + mean);
    let u: f64 = rng.gen();
    let x = libm::floor(libm::log(1.0 - u) / libm::log(q)) as usize;
    x.min(cap)
}

fn reverse_adjacency(graph: &CallGraph) -> Vec<Vec<EntityId>> {
    let mut reverse = Vec::new();
    reverse.resize_with(graph.entity_count(), Vec::new);
    for (caller, callee) in graph.edges() {
        reverse[callee.index()].push(caller);
    }
    reverse
}

// A call path ending with `suffix`, grown to `total` nodes by walking caller
// edges backwards from the suffix head. Returns nodes in call order.
fn extend_backward(
    reverse: &[Vec<EntityId>],
    suffix: &[EntityId],
    total: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<EntityId>> {
    let mut nodes = Vec::with_capacity(total);
    let mut at = suffix[0];
    while nodes.len() + suffix.len() < total {
        let preds = &reverse[at.index()];
        if preds.is_empty() {
            return None;
        }
        at = preds[rng.gen_range(0..preds.len())];
        nodes.push(at);
    }
    nodes.reverse();
    nodes.extend_from_slice(suffix);
    Some(nodes)
}

fn generate_graph(config: &SynthConfig, interner: &mut Interner, rng: &mut ChaCha8Rng) -> Result<CallGraph> {
    let n = config.n_entities;
    let mut builder = CallGraphBuilder::new(interner);
    let mut names = Vec::with_capacity(n);
    for i in 0..n {
        let name = format!("f{i}");
        builder.add_entity(&name)?;
        names.push(name);
    }
    for caller in 0..n {
        let degree = sample_geometric(rng, config.edge_density, n);
        for _ in 0..degree {
            let callee = rng.gen_range(0..n);
            builder.add_edge(&names[caller], &names[callee])?;
        }
    }
    builder.finish()
}

struct FaultPlan {
    fault_id: String,
    fix: Vec<EntityId>,
    stacks: Vec<StackTrace>,
}

fn plan_fault(
    index: usize,
    config: &SynthConfig,
    interner: &Interner,
    reverse: &[Vec<EntityId>],
    rng: &mut ChaCha8Rng,
) -> Result<FaultPlan> {
    let n = config.n_entities;
    let t = config.stack_truncation;
    let k = config.fix_points_per_fault;
    let min_kept = 3.max(k);
    let max_kept = 8.max(min_kept);

    'candidates: for _ in 0..WALK_RETRIES {
        let fix_entity = EntityId::from_index(rng.gen_range(0..n));
        if reverse[fix_entity.index()].is_empty() {
            continue;
        }
        let kept = rng.gen_range(min_kept..=max_kept);
        let walk = match extend_backward(reverse, &[fix_entity], kept + t, rng) {
            Some(w) => w,
            None => continue,
        };
        // Fix points are the last k distinct nodes of the walk, so with
        // truncation 0 they all sit on the stack, and with truncation >= 1
        // the primary fix entity is popped off.
        let mut fix = Vec::new();
        let mut span = 0;
        for (back, &node) in walk.iter().rev().enumerate() {
            if !fix.contains(&node) {
                fix.push(node);
                if fix.len() == k {
                    span = back + 1;
                    break;
                }
            }
        }
        if fix.len() < k {
            continue;
        }
        // Every stack of the fault shares the fix-bearing suffix of the
        // primary walk (same crash region, different entry paths), which
        // keeps all fix points on-stack when nothing is truncated.
        let min_kept_j = min_kept.max(span.saturating_sub(t));
        if min_kept_j > max_kept {
            continue;
        }
        // Prefer stacks that exclude the popped fix entity entirely.
        if t > 0 && walk[..kept].contains(&fix_entity) {
            continue;
        }
        let suffix = walk[walk.len() - span..].to_vec();

        let fault_id = format!("fault{index}");
        let mut stacks = Vec::with_capacity(config.n_stacks_per_fault);
        stacks.push(stack_from_walk(&walk, kept, &fault_id, 0, interner));
        let mut attempts = 0;
        while stacks.len() < config.n_stacks_per_fault {
            if attempts > 4 * WALK_RETRIES {
                continue 'candidates;
            }
            let kept_j = rng.gen_range(min_kept_j..=max_kept);
            let walk_j = match extend_backward(reverse, &suffix, kept_j + t, rng) {
                Some(w) => w,
                None => {
                    attempts += 1;
                    continue;
                }
            };
            if t > 0 && walk_j[..kept_j].contains(&fix_entity) && attempts <= WALK_RETRIES {
                attempts += 1;
                continue;
            }
            stacks.push(stack_from_walk(&walk_j, kept_j, &fault_id, stacks.len(), interner));
        }
        return Ok(FaultPlan {
            fault_id,
            fix,
            stacks,
        });
    }
    Err(Error::InfeasibleConfig(format!(
        "could not route a walk through a fix entity for fault {index}"
    )))
}

// Keep the first `kept` call-order nodes (the rest were popped before the
// crash) and list frames crash-first.
fn stack_from_walk(
    walk: &[EntityId],
    kept: usize,
    fault_id: &str,
    stack_index: usize,
    interner: &Interner,
) -> StackTrace {
    let frames: Vec<&str> = walk[..kept].iter().rev().map(|&e| interner.name(e)).collect();
    StackTrace::new(format!("{fault_id}-s{stack_index}"), frames)
        .expect("kept prefix is never empty")
}

fn generate_passing(
    config: &SynthConfig,
    graph: &CallGraph,
    fix_all: &BTreeSet<EntityId>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ExecutionTrace>> {
    let n = config.n_entities;
    let wanted = libm::ceil(config.target_coverage_rate * n as f64 - 1e-9) as usize;
    let pool: Vec<EntityId> = (0..n)
        .map(EntityId::from_index)
        .filter(|e| !fix_all.contains(e))
        .collect();
    if pool.len() < wanted {
        return Err(Error::InfeasibleConfig(format!(
            "coverage target needs {wanted} non-fix entities but only {} exist",
            pool.len()
        )));
    }
    let picked = rand::seq::index::sample(rng, pool.len(), wanted);
    let universe: BTreeSet<EntityId> = picked.iter().map(|i| pool[i]).collect();
    let starts: Vec<EntityId> = universe.iter().copied().collect();

    let mut hit_sets: Vec<BTreeSet<EntityId>> = Vec::with_capacity(config.n_passing_traces);
    for _ in 0..config.n_passing_traces {
        let mut at = starts[rng.gen_range(0..starts.len())];
        let mut hits = BTreeSet::new();
        hits.insert(at);
        let length = rng.gen_range(4..=12);
        for _ in 1..length {
            let next: Vec<EntityId> = graph
                .callees(at)
                .iter()
                .copied()
                .filter(|c| universe.contains(c))
                .collect();
            if next.is_empty() {
                break;
            }
            at = next[rng.gen_range(0..next.len())];
            hits.insert(at);
        }
        hit_sets.push(hits);
    }
    // Walks alone rarely land on the exact coverage target; spread the
    // remaining universe entities over the existing traces.
    let covered: BTreeSet<EntityId> = hit_sets.iter().flatten().copied().collect();
    for (i, entity) in universe.difference(&covered).enumerate() {
        let slot = i % hit_sets.len();
        hit_sets[slot].insert(*entity);
    }

    hit_sets
        .into_iter()
        .enumerate()
        .map(|(i, hits)| ExecutionTrace::observed(format!("pass{i}"), hits, TraceLabel::Pass))
        .collect()
}

/// Generates one benchmark instance. Byte-identical for identical configs.
pub fn generate(config: &SynthConfig) -> Result<SynthBenchmark> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut interner = Interner::new();
    let graph = generate_graph(config, &mut interner, &mut rng)?;
    let reverse = reverse_adjacency(&graph);

    let mut truth = GroundTruth::new();
    let mut faults = Vec::with_capacity(config.n_faults);
    let mut fix_all = BTreeSet::new();
    for i in 0..config.n_faults {
        let plan = plan_fault(i, config, &interner, &reverse, &mut rng)?;
        fix_all.extend(plan.fix.iter().copied());
        truth.insert(
            &plan.fault_id,
            plan.fix.iter().map(|&e| interner.name(e)),
        )?;
        faults.push(FaultStacks {
            fault_id: plan.fault_id,
            stacks: plan.stacks,
        });
    }

    let passing = generate_passing(config, &graph, &fix_all, &mut rng)?;
    Ok(SynthBenchmark {
        interner,
        graph,
        faults,
        passing,
        truth,
    })
}
