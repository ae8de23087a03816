//! Localization quality measurement, depth tuning, the random-guess
//! baseline, and the coverage-degradation / noise-injection experiments.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::callgraph::{dataset_fixpoint, CallGraph};
use crate::entity::{Interner, MatchMode};
use crate::error::Error;
use crate::expansion::{expand_all, ExecutionTrace, StackTrace, TraceLabel};
use crate::ranking::{score_all, ScoreConfig, SuspiciousnessReport};
use crate::spectra::{build_spectra, ProgramSpectra};
use crate::Result;

/// Known fix locations per fault. A fault may have several bug-fixing
/// points; locating any one of them counts as locating the fault.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    faults: BTreeMap<String, BTreeSet<String>>,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<S: Into<String>>(
        &mut self,
        fault_id: impl Into<String>,
        fix_names: impl IntoIterator<Item = S>,
    ) -> Result<()> {
        let fault_id = fault_id.into();
        let fix: BTreeSet<String> = fix_names.into_iter().map(Into::into).collect();
        if fix.is_empty() {
            return Err(Error::EmptyFixSet { fault_id });
        }
        if self.faults.contains_key(&fault_id) {
            return Err(Error::DuplicateFault { fault_id });
        }
        self.faults.insert(fault_id, fix);
        Ok(())
    }

    pub fn get(&self, fault_id: &str) -> Option<&BTreeSet<String>> {
        self.faults.get(fault_id)
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.faults.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// 1-based rank at which a fault is located in a report, or `None` when no
/// fix-set member appears in the spectra at all.
///
/// The rank is conservative under ties: the first fix-set member encountered
/// in the list is charged the worst position within its equal-score group,
/// as a developer examining tied entities in arbitrary order might see it
/// last.
pub fn fault_rank(
    report: &SuspiciousnessReport,
    fix_set: &BTreeSet<String>,
) -> Result<Option<usize>> {
    if fix_set.is_empty() {
        return Err(Error::EmptyFixSet {
            fault_id: String::new(),
        });
    }
    let entries = &report.entries;
    let hit = match entries.iter().position(|e| fix_set.contains(&e.name)) {
        Some(i) => i,
        None => return Ok(None),
    };
    let score = entries[hit].final_score;
    let mut last = hit;
    while last + 1 < entries.len() && entries[last + 1].final_score == score {
        last += 1;
    }
    Ok(Some(last + 1))
}

/// Outcome of localizing one fault: its conservative rank (if covered) and
/// the size of the ranked list it was searched in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultOutcome {
    pub fault_id: String,
    pub rank: Option<usize>,
    pub entity_count: usize,
}

impl FaultOutcome {
    /// Located after examining `percent`% of the ranked list?
    pub fn located_within_percent(&self, percent: u32) -> bool {
        match self.rank {
            // Integer cross-multiplication keeps the threshold exact.
            Some(rank) => 100 * rank <= percent as usize * self.entity_count,
            None => false,
        }
    }
}

/// Configuration echo carried by evaluation outputs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEcho {
    pub metric: Option<String>,
    pub depth: Option<u32>,
    pub use_h1: Option<bool>,
    pub use_h2: Option<bool>,
}

impl ConfigEcho {
    pub fn from_score_config(config: &ScoreConfig) -> Self {
        ConfigEcho {
            metric: Some(config.metric.name().to_owned()),
            depth: Some(config.depth),
            use_h1: Some(config.use_h1),
            use_h2: Some(config.use_h2),
        }
    }
}

/// Percent-of-faults-located as a function of percent-of-entities-examined,
/// sampled at every integer percentage 1..=100. Non-decreasing; the terminal
/// point equals 100 × recall.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationCurve {
    pub points: Vec<(f64, f64)>,
    pub config: ConfigEcho,
}

pub fn curve(outcomes: &[FaultOutcome], config: ConfigEcho) -> Result<EvaluationCurve> {
    if outcomes.is_empty() {
        return Err(Error::InvalidConfig("curve needs at least one fault".to_owned()));
    }
    let total = outcomes.len() as f64;
    let points = (1..=100u32)
        .map(|percent| {
            let located = outcomes
                .iter()
                .filter(|o| o.located_within_percent(percent))
                .count() as f64;
            (percent as f64, 100.0 * located / total)
        })
        .collect();
    Ok(EvaluationCurve { points, config })
}

/// Probability that a uniformly random ranking of `total` entities places at
/// least one of `fix_points` faulty entities within the first `examined`.
///
/// Computed as 1 − Π_{t=0}^{k−1} (n−m−t)/(n−t); for k = 3 this reduces to
/// the closed form 1 − ((n−m−2)(n−m−1)(n−m)) / (n(n−1)(n−2)).
pub fn dummy_guess_probability(examined: usize, total: usize, fix_points: usize) -> Result<f64> {
    if examined > total || fix_points > total || fix_points == 0 || total == 0 {
        return Err(Error::InvalidProbabilityArgs {
            examined,
            total,
            fix_points,
        });
    }
    let mut missed = 1.0;
    for t in 0..fix_points {
        let numerator = total as f64 - examined as f64 - t as f64;
        if numerator <= 0.0 {
            missed = 0.0;
            break;
        }
        missed *= numerator / (total - t) as f64;
    }
    Ok(1.0 - missed)
}

/// Depth-weighted precision over covered faults with per-fault list sizes:
/// Σ_i (1 − n_v(i)/n_t(i)) · w_d with w_d = 1 − d/d_max, where n_v is the
/// number of entities viewed before locating fault i. A sum, not a mean, so
/// values above 1 are expected with several faults.
pub fn precision_over(ranked: &[(usize, usize)], depth: u32, d_max: u32) -> Result<f64> {
    if d_max == 0 {
        return Err(Error::ZeroMaxDepth);
    }
    if depth > d_max {
        return Err(Error::DepthExceedsMax { depth, d_max });
    }
    let weight = 1.0 - depth as f64 / d_max as f64;
    let sum: f64 = ranked
        .iter()
        .map(|&(rank, entity_count)| 1.0 - (rank as f64 - 1.0) / entity_count as f64)
        .sum();
    Ok(sum * weight)
}

/// Precision with a single shared list size.
pub fn precision(ranks: &[usize], entity_count: usize, depth: u32, d_max: u32) -> Result<f64> {
    let ranked: Vec<(usize, usize)> = ranks.iter().map(|&r| (r, entity_count)).collect();
    precision_over(&ranked, depth, d_max)
}

/// Fraction of faults whose fix locations are covered by the spectra.
pub fn recall(covered: usize, total_faults: usize) -> f64 {
    assert!(total_faults > 0, "recall needs at least one fault");
    covered as f64 / total_faults as f64
}

pub fn f_measure(precision: f64, recall: f64) -> f64 {
    let denominator = precision + recall;
    if denominator == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / denominator
    }
}

/// Mean over covered faults of rank / spectra size. Faults with no covered
/// fix location are excluded and reported.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageCost {
    pub cost: f64,
    pub excluded: Vec<String>,
}

pub fn average_cost(outcomes: &[FaultOutcome]) -> Result<AverageCost> {
    let mut excluded = Vec::new();
    let mut sum = 0.0;
    let mut covered = 0usize;
    for outcome in outcomes {
        match outcome.rank {
            Some(rank) => {
                sum += rank as f64 / outcome.entity_count as f64;
                covered += 1;
            }
            None => excluded.push(outcome.fault_id.clone()),
        }
    }
    if covered == 0 {
        return Err(Error::NoCoveredFaults);
    }
    Ok(AverageCost {
        cost: sum / covered as f64,
        excluded,
    })
}

/// One fault's stacks, as grouped for per-fault evaluation.
#[derive(Debug, Clone)]
pub struct FaultStacks {
    pub fault_id: String,
    pub stacks: Vec<StackTrace>,
}

/// Localizes one fault: expands its stacks at `depth`, combines them with the
/// shared passing traces, and scores. Returns `None` when no stack of the
/// fault could be expanded.
pub fn localize_fault(
    graph: &CallGraph,
    interner: &Interner,
    stacks: &[StackTrace],
    passing: &[ExecutionTrace],
    config: &ScoreConfig,
    mode: MatchMode,
) -> Result<Option<SuspiciousnessReport>> {
    let batch = expand_all(graph, interner, stacks, config.depth, mode)?;
    if batch.all_failed() {
        return Ok(None);
    }
    let spectra = build_spectra(&batch.traces, passing)?;
    Ok(Some(score_all(&spectra, interner, &batch.depth_maps, config)))
}

/// Per-fault outcomes for one configuration over a whole dataset.
pub fn evaluate_faults(
    graph: &CallGraph,
    interner: &Interner,
    faults: &[FaultStacks],
    passing: &[ExecutionTrace],
    truth: &GroundTruth,
    config: &ScoreConfig,
    mode: MatchMode,
) -> Result<Vec<FaultOutcome>> {
    let mut outcomes = Vec::with_capacity(faults.len());
    for fault in faults {
        let fix = truth.get(&fault.fault_id).ok_or_else(|| {
            Error::InvalidConfig(alloc::format!(
                "fault '{}' missing from ground truth",
                fault.fault_id
            ))
        })?;
        let outcome = match localize_fault(graph, interner, &fault.stacks, passing, config, mode)?
        {
            Some(report) => FaultOutcome {
                fault_id: fault.fault_id.clone(),
                rank: fault_rank(&report, fix)?,
                entity_count: report.entries.len(),
            },
            None => FaultOutcome {
                fault_id: fault.fault_id.clone(),
                rank: None,
                entity_count: 0,
            },
        };
        outcomes.push(outcome);
    }
    Ok(outcomes)
}

/// Precision / recall / F-measure of one expansion depth.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthScore {
    pub depth: u32,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthTuning {
    pub rows: Vec<DepthScore>,
    /// Smallest depth achieving the maximum F-measure.
    pub optimal: u32,
    /// Expansion fixpoint used for the depth weight.
    pub d_max: u32,
    /// Requested depths beyond the fixpoint, skipped because the depth
    /// weight is undefined there.
    pub skipped: Vec<u32>,
}

/// Runs the full pipeline at every requested depth and selects the depth
/// with the maximum F-measure (smallest wins ties: cheaper examination).
/// `d_max` defaults to the dataset's expansion fixpoint.
pub fn select_optimal_depth(
    graph: &CallGraph,
    interner: &Interner,
    faults: &[FaultStacks],
    passing: &[ExecutionTrace],
    truth: &GroundTruth,
    depths: &[u32],
    d_max: Option<u32>,
    base_config: &ScoreConfig,
    mode: MatchMode,
) -> Result<DepthTuning> {
    if depths.is_empty() {
        return Err(Error::EmptyDepthRange);
    }
    let d_max = match d_max {
        Some(d) => d,
        None => {
            let all_stacks: Vec<StackTrace> = faults
                .iter()
                .flat_map(|f| f.stacks.iter().cloned())
                .collect();
            dataset_fixpoint(graph, interner, &all_stacks, mode)?
        }
    };
    if d_max == 0 {
        return Err(Error::ZeroMaxDepth);
    }

    let total_faults = truth.len().max(faults.len());
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &depth in depths {
        if depth > d_max {
            skipped.push(depth);
            continue;
        }
        let config = ScoreConfig { depth, ..*base_config };
        let outcomes = evaluate_faults(graph, interner, faults, passing, truth, &config, mode)?;
        let ranked: Vec<(usize, usize)> = outcomes
            .iter()
            .filter_map(|o| o.rank.map(|r| (r, o.entity_count)))
            .collect();
        let p = precision_over(&ranked, depth, d_max)?;
        let r = recall(ranked.len(), total_faults);
        rows.push(DepthScore {
            depth,
            precision: p,
            recall: r,
            f_measure: f_measure(p, r),
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyDepthRange);
    }
    let mut optimal = rows[0].depth;
    let mut best = rows[0].f_measure;
    for row in &rows[1..] {
        if row.f_measure > best {
            best = row.f_measure;
            optimal = row.depth;
        }
    }
    Ok(DepthTuning {
        rows,
        optimal,
        d_max,
        skipped,
    })
}

fn check_fraction(value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidFraction { value });
    }
    Ok(value)
}

// Sample size as ⌊fraction·count⌋, with a tolerance for binary rounding so
// e.g. 0.3 × 10 lands on 3.
fn scaled_count(fraction: f64, count: usize) -> usize {
    libm::floor(fraction * count as f64 + 1e-9) as usize
}

/// Simulates a lower test coverage rate: uniformly picks ⌊fraction·k⌋ of the
/// k entities with positive passing coverage and clears their hit bits in
/// every passing trace, as if they were never executed. Failing rows are
/// untouched; counters are rebuilt. Deterministic under `seed`.
pub fn degrade_coverage(
    spectra: &ProgramSpectra,
    fraction: f64,
    seed: u64,
) -> Result<ProgramSpectra> {
    check_fraction(fraction)?;
    let covered: Vec<usize> = (0..spectra.entity_count())
        .filter(|&col| spectra.counts_at(col).a_ep > 0)
        .collect();
    let picks = scaled_count(fraction, covered.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, covered.len(), picks);
    let mut columns: Vec<usize> = chosen.iter().map(|i| covered[i]).collect();
    columns.sort_unstable();

    let mut degraded = spectra.clone();
    for row in degraded.rows_mut() {
        if row.label == TraceLabel::Pass {
            for &col in &columns {
                row.hits[col] = false;
            }
        }
    }
    degraded.recount();
    Ok(degraded)
}

/// Creates a noisy spectra by flipping the hit bit of a uniformly sampled
/// rate-fraction of (trace, entity) cells. Trace count and labels are
/// preserved; counters are rebuilt. Deterministic under `seed`.
pub fn inject_noise(spectra: &ProgramSpectra, rate: f64, seed: u64) -> Result<ProgramSpectra> {
    check_fraction(rate)?;
    let width = spectra.entity_count();
    let cells = spectra.trace_count() * width;
    let picks = scaled_count(rate, cells);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, cells, picks);

    let mut noisy = spectra.clone();
    let rows = noisy.rows_mut();
    for cell in chosen.iter() {
        let row = cell / width;
        let col = cell % width;
        rows[row].hits[col] = !rows[row].hits[col];
    }
    noisy.recount();
    Ok(noisy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::Interner;
    use crate::ranking::{BetaMode, Metric, ScoredEntity};
    use crate::spectra::build_spectra;
    use crate::testutil::trace;
    use alloc::format;
    use alloc::vec;

    fn report_from_scores(scores: &[(&str, f64)]) -> SuspiciousnessReport {
        let entries = scores
            .iter()
            .enumerate()
            .map(|(i, &(name, score))| ScoredEntity {
                entity: crate::entity::EntityId::from_index(i),
                name: name.to_owned(),
                base: score,
                adjusted: score,
                beta: 1.0,
                final_score: score,
                min_depth: None,
            })
            .collect();
        SuspiciousnessReport {
            config: ScoreConfig::default(),
            h2_degenerate: false,
            entries,
        }
    }

    fn fix(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| (*s).to_owned()).collect()
    }

    #[test]
    fn fault_rank_top_with_unique_score() {
        let report = report_from_scores(&[("a", 0.9), ("b", 0.5), ("c", 0.1)]);
        assert_eq!(fault_rank(&report, &fix(&["a"])).unwrap(), Some(1));
    }

    #[test]
    fn fault_rank_absent_fix_set() {
        let report = report_from_scores(&[("a", 0.9)]);
        assert_eq!(fault_rank(&report, &fix(&["zz"])).unwrap(), None);
    }

    #[test]
    fn fault_rank_charges_the_whole_tie_group() {
        // Three entities share the fix entity's score: rank = last of group.
        let report =
            report_from_scores(&[("a", 0.9), ("b", 0.5), ("c", 0.5), ("d", 0.5), ("e", 0.1)]);
        assert_eq!(fault_rank(&report, &fix(&["c"])).unwrap(), Some(4));
        // Verified against every arrangement of the tie group: whichever
        // permutation the sort had produced, position 4 is the worst case.
        let members = ["b", "c", "d"];
        let mut worst = 0;
        for skip in 0..3usize {
            // rotate the group so each member lands last once
            let mut order = vec![("a", 0.9)];
            for (i, name) in members.iter().enumerate() {
                if i != skip {
                    order.push((*name, 0.5));
                }
            }
            order.push((members[skip], 0.5));
            order.push(("e", 0.1));
            let r = report_from_scores(&order);
            let pos = r.entries.iter().position(|e| e.name == "c").unwrap() + 1;
            worst = worst.max(pos);
        }
        assert_eq!(worst, 4);
    }

    #[test]
    fn fault_rank_takes_first_fix_member_then_its_group() {
        let report = report_from_scores(&[("a", 0.9), ("b", 0.9), ("c", 0.2), ("d", 0.2)]);
        // "b" is the first fix member; group {a, b} ends at position 2.
        assert_eq!(fault_rank(&report, &fix(&["b", "d"])).unwrap(), Some(2));
    }

    #[test]
    fn fault_rank_rejects_empty_fix_set() {
        let report = report_from_scores(&[("a", 0.9)]);
        assert!(fault_rank(&report, &BTreeSet::new()).is_err());
    }

    fn outcome(id: &str, rank: Option<usize>, n: usize) -> FaultOutcome {
        FaultOutcome {
            fault_id: id.to_owned(),
            rank,
            entity_count: n,
        }
    }

    #[test]
    fn curve_single_fault_rank_one_of_hundred() {
        let outcomes = [outcome("f", Some(1), 100)];
        let curve = curve(&outcomes, ConfigEcho::default()).unwrap();
        assert_eq!(curve.points[0], (1.0, 100.0));
        assert_eq!(curve.points[99], (100.0, 100.0));
    }

    #[test]
    fn curve_plateaus_with_an_absent_fault() {
        let outcomes = [outcome("a", Some(5), 100), outcome("b", None, 100)];
        let curve = curve(&outcomes, ConfigEcho::default()).unwrap();
        assert_eq!(curve.points[4], (5.0, 50.0));
        assert_eq!(curve.points[99], (100.0, 50.0));
        // non-decreasing
        for pair in curve.points.windows(2) {
            assert!(pair[1].1 >= pair[0].1);
        }
    }

    #[test]
    fn curve_terminal_point_is_recall() {
        let outcomes = [
            outcome("a", Some(3), 10),
            outcome("b", None, 10),
            outcome("c", Some(9), 10),
        ];
        let curve = curve(&outcomes, ConfigEcho::default()).unwrap();
        let recall = recall(2, 3);
        assert!((curve.points[99].1 - 100.0 * recall).abs() < 1e-12);
    }

    #[test]
    fn dummy_guess_endpoints() {
        for n in [1usize, 10, 100] {
            for k in [1usize, 2, 3] {
                if k <= n {
                    assert_eq!(dummy_guess_probability(0, n, k).unwrap(), 0.0);
                    assert_eq!(dummy_guess_probability(n, n, k).unwrap(), 1.0);
                }
            }
        }
    }

    #[test]
    fn dummy_guess_matches_paper_closed_form() {
        let got = dummy_guess_probability(5, 100, 3).unwrap();
        let closed = 1.0 - (95.0 * 94.0 * 93.0) / (100.0 * 99.0 * 98.0);
        assert!((got - closed).abs() < 1e-15);
        assert!((got - 0.14399).abs() < 2e-5);
    }

    #[test]
    fn dummy_guess_rejects_bad_arguments() {
        assert!(dummy_guess_probability(11, 10, 1).is_err());
        assert!(dummy_guess_probability(1, 10, 11).is_err());
        assert!(dummy_guess_probability(1, 10, 0).is_err());
        assert!(dummy_guess_probability(0, 0, 1).is_err());
    }

    #[test]
    fn precision_examples() {
        // single fault at rank 1, n_t = 10, d = 0, d_max = 30 → 1.0
        assert_eq!(precision(&[1], 10, 0, 30).unwrap(), 1.0);
        // same at d = 30 → weight 0
        assert_eq!(precision(&[1], 10, 30, 30).unwrap(), 0.0);
        // ranks 1, 3, 5 in a 10-entity list, d = 3, d_max = 30:
        // (1.0 + 0.8 + 0.6) · 0.9 = 2.16
        let p = precision(&[1, 3, 5], 10, 3, 30).unwrap();
        assert!((p - 2.16).abs() < 1e-12);
    }

    #[test]
    fn precision_errors() {
        assert_eq!(precision(&[1], 10, 0, 0), Err(Error::ZeroMaxDepth));
        assert!(matches!(
            precision(&[1], 10, 31, 30),
            Err(Error::DepthExceedsMax { .. })
        ));
    }

    #[test]
    fn recall_and_f_measure_examples() {
        assert!((recall(48, 61) - 48.0 / 61.0).abs() < 1e-15);
        assert_eq!(recall(0, 7), 0.0);
        assert_eq!(recall(7, 7), 1.0);
        assert_eq!(f_measure(1.0, 1.0), 1.0);
        assert_eq!(f_measure(0.0, 0.5), 0.0);
        assert_eq!(f_measure(0.0, 0.0), 0.0);
        let f = f_measure(2.16, 0.787);
        assert!((f - 2.0 * 2.16 * 0.787 / (2.16 + 0.787)).abs() < 1e-15);
        assert!((f - 1.1537).abs() < 1e-4);
    }

    #[test]
    fn average_cost_examples() {
        let one = average_cost(&[outcome("a", Some(1), 100)]).unwrap();
        assert!((one.cost - 0.01).abs() < 1e-15);
        let two =
            average_cost(&[outcome("a", Some(10), 100), outcome("b", Some(30), 100)]).unwrap();
        assert!((two.cost - 0.20).abs() < 1e-15);
        let with_excluded =
            average_cost(&[outcome("a", Some(10), 100), outcome("b", None, 100)]).unwrap();
        assert_eq!(with_excluded.excluded, vec!["b".to_owned()]);
        assert!((with_excluded.cost - 0.1).abs() < 1e-15);
        assert_eq!(
            average_cost(&[outcome("a", None, 100)]),
            Err(Error::NoCoveredFaults)
        );
    }

    fn small_spectra() -> ProgramSpectra {
        let mut interner = Interner::new();
        let failing = [
            trace(&mut interner, "t1", TraceLabel::Fail, ["a", "b", "c"]),
            trace(&mut interner, "t2", TraceLabel::Fail, ["b", "d"]),
        ];
        let passing = [
            trace(&mut interner, "p1", TraceLabel::Pass, ["a", "c", "d"]),
            trace(&mut interner, "p2", TraceLabel::Pass, ["a", "e"]),
            trace(&mut interner, "p3", TraceLabel::Pass, ["c"]),
        ];
        build_spectra(&failing, &passing).unwrap()
    }

    #[test]
    fn degrade_zero_is_identity_and_one_clears_everything() {
        let spectra = small_spectra();
        assert_eq!(degrade_coverage(&spectra, 0.0, 7).unwrap(), spectra);
        let cleared = degrade_coverage(&spectra, 1.0, 7).unwrap();
        for col in 0..cleared.entity_count() {
            assert_eq!(cleared.counts_at(col).a_ep, 0);
        }
        // failing rows untouched
        for (row, orig) in cleared.rows().zip(spectra.rows()) {
            if row.label == TraceLabel::Fail {
                assert_eq!(row.hits, orig.hits);
            }
        }
    }

    #[test]
    fn degrade_half_zeroes_exactly_half_of_covered_columns() {
        let spectra = small_spectra();
        let covered_before = (0..spectra.entity_count())
            .filter(|&c| spectra.counts_at(c).a_ep > 0)
            .count();
        assert_eq!(covered_before, 4); // a, c, d, e
        let degraded = degrade_coverage(&spectra, 0.5, 11).unwrap();
        let covered_after = (0..degraded.entity_count())
            .filter(|&c| degraded.counts_at(c).a_ep > 0)
            .count();
        assert_eq!(covered_after, 2);
        // deterministic under seed
        assert_eq!(degraded, degrade_coverage(&spectra, 0.5, 11).unwrap());
        assert_ne!(degraded, degrade_coverage(&spectra, 0.5, 12).unwrap());
    }

    #[test]
    fn inject_zero_is_identity_and_one_complements() {
        let spectra = small_spectra();
        assert_eq!(inject_noise(&spectra, 0.0, 3).unwrap(), spectra);
        let complement = inject_noise(&spectra, 1.0, 3).unwrap();
        for (row, orig) in complement.rows().zip(spectra.rows()) {
            assert_eq!(row.label, orig.label);
            for (a, b) in row.hits.iter().zip(orig.hits) {
                assert_eq!(*a, !b);
            }
        }
    }

    #[test]
    fn inject_flips_exactly_the_requested_fraction() {
        let spectra = small_spectra(); // 5 rows × 5 columns
        let noisy = inject_noise(&spectra, 0.4, 5).unwrap();
        let mut differing = 0;
        for (row, orig) in noisy.rows().zip(spectra.rows()) {
            differing += row
                .hits
                .iter()
                .zip(orig.hits)
                .filter(|(a, b)| *a != *b)
                .count();
        }
        assert_eq!(differing, 10); // 0.4 × 25
        assert_eq!(noisy.trace_count(), spectra.trace_count());
    }

    #[test]
    fn fraction_bounds_are_checked() {
        let spectra = small_spectra();
        assert!(degrade_coverage(&spectra, -0.1, 0).is_err());
        assert!(inject_noise(&spectra, 1.5, 0).is_err());
    }

    #[test]
    fn ground_truth_validation() {
        let mut truth = GroundTruth::new();
        truth.insert("bug-1", ["f1", "f2"]).unwrap();
        let empty: [&str; 0] = [];
        assert!(matches!(
            truth.insert("bug-2", empty),
            Err(Error::EmptyFixSet { .. })
        ));
        assert!(matches!(
            truth.insert("bug-1", ["f9"]),
            Err(Error::DuplicateFault { .. })
        ));
        assert_eq!(truth.len(), 1);
    }

    #[test]
    fn tuning_single_depth_returns_it() {
        let (interner, graph) = crate::testutil::figure3();
        let faults = [FaultStacks {
            fault_id: "bug".to_owned(),
            stacks: vec![crate::testutil::figure3_stack()],
        }];
        let mut truth = GroundTruth::new();
        truth.insert("bug", ["f13"]).unwrap();
        let tuning = select_optimal_depth(
            &graph,
            &interner,
            &faults,
            &[],
            &truth,
            &[2],
            None,
            &ScoreConfig {
                metric: Metric::Ochiai,
                use_h1: false,
                use_h2: false,
                beta_mode: BetaMode::Offset,
                depth: 0,
            },
            MatchMode::Exact,
        )
        .unwrap();
        assert_eq!(tuning.optimal, 2);
        assert_eq!(tuning.rows.len(), 1);
        assert_eq!(tuning.d_max, 6);
    }

    #[test]
    fn tuning_argmax_matches_recomputation() {
        let (interner, graph) = crate::testutil::figure3();
        let faults: Vec<FaultStacks> = (0..3)
            .map(|i| FaultStacks {
                fault_id: format!("bug{i}"),
                stacks: vec![crate::testutil::figure3_stack()],
            })
            .collect();
        let mut truth = GroundTruth::new();
        truth.insert("bug0", ["f13"]).unwrap();
        truth.insert("bug1", ["f5"]).unwrap();
        truth.insert("bug2", ["f10"]).unwrap();
        let config = ScoreConfig {
            use_h1: true,
            use_h2: false,
            ..ScoreConfig::default()
        };
        let depths = [0, 1, 2, 3, 4, 5, 6];
        let tuning = select_optimal_depth(
            &graph, &interner, &faults, &[], &truth, &depths, None, &config, MatchMode::Exact,
        )
        .unwrap();
        let mut best = f64::MIN;
        let mut best_depth = 0;
        for row in &tuning.rows {
            assert!((f_measure(row.precision, row.recall) - row.f_measure).abs() < 1e-15);
            if row.f_measure > best {
                best = row.f_measure;
                best_depth = row.depth;
            }
        }
        assert_eq!(tuning.optimal, best_depth);
    }
}
