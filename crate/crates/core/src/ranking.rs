//! Suspiciousness scoring and ranking.
//!
//! Three spectrum metrics are supported:
//!
//! ```text
//! ochiai    = a_ef / sqrt((a_ef + a_nf) · (a_ef + a_ep))
//! tarantula = (a_ef/(a_ef+a_nf)) / (a_ef/(a_ef+a_nf) + a_ep/(a_ep+a_np))
//! jaccard   = a_ef / (a_ef + a_nf + a_ep)
//! ```
//!
//! Two heuristics reshape the base score S into the final score S″ = S′·β:
//! distance reweighting multiplies by a weight β that decays with the
//! entity's distance from the crash stacks, and coverage adjustment replaces
//! a zero a_ep with the average a_ep of entities that do appear in passing
//! traces, yielding S′.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::callgraph::DepthMap;
use crate::entity::{EntityId, Interner};
use crate::spectra::{ProgramSpectra, SpectraCounts};

/// The base suspiciousness formula to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    #[default]
    Ochiai,
    Tarantula,
    Jaccard,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Ochiai, Metric::Tarantula, Metric::Jaccard];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ochiai => "ochiai",
            Metric::Tarantula => "tarantula",
            Metric::Jaccard => "jaccard",
        }
    }

    pub fn score(self, c: &SpectraCounts) -> f64 {
        self.score_with(c.a_ef as f64, c.a_nf as f64, c.a_ep as f64, c.a_np as f64)
    }

    /// Formula over real-valued counters, so the coverage-adjusted a′_ep
    /// (a mean, generally fractional) can be substituted for a_ep.
    ///
    /// Zero-denominator conventions: an entity never executed by a failing
    /// trace scores 0, and Tarantula's 0/0 sub-ratios are taken as 0. Every
    /// result is finite and lies in [0, 1].
    pub fn score_with(self, a_ef: f64, a_nf: f64, a_ep: f64, a_np: f64) -> f64 {
        match self {
            Metric::Ochiai => {
                if a_ef <= 0.0 {
                    0.0
                } else {
                    a_ef / libm::sqrt((a_ef + a_nf) * (a_ef + a_ep))
                }
            }
            Metric::Tarantula => {
                let failing_rate = ratio(a_ef, a_ef + a_nf);
                let passing_rate = ratio(a_ep, a_ep + a_np);
                ratio(failing_rate, failing_rate + passing_rate)
            }
            Metric::Jaccard => ratio(a_ef, a_ef + a_nf + a_ep),
        }
    }
}

impl core::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ochiai" => Ok(Metric::Ochiai),
            "tarantula" => Ok(Metric::Tarantula),
            "jaccard" => Ok(Metric::Jaccard),
            other => Err(alloc::format!("unknown metric '{other}'")),
        }
    }
}

impl core::fmt::Display for Metric {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn ochiai(c: &SpectraCounts) -> f64 {
    Metric::Ochiai.score(c)
}

pub fn tarantula(c: &SpectraCounts) -> f64 {
    Metric::Tarantula.score(c)
}

pub fn jaccard(c: &SpectraCounts) -> f64 {
    Metric::Jaccard.score(c)
}

/// How the distance weight handles the all-zero-distance case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaMode {
    /// β = n / Σ(dis + 1): total, lands in (0, 1], equals 1 exactly for
    /// entities sitting on every covering stack.
    #[default]
    Offset,
    /// β = n / Σ dis, with Σ = 0 mapped to β = 2n (a zero sum counts as ½).
    Raw,
}

impl core::str::FromStr for BetaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "offset" => Ok(BetaMode::Offset),
            "raw" => Ok(BetaMode::Raw),
            other => Err(alloc::format!("unknown beta mode '{other}'")),
        }
    }
}

impl core::fmt::Display for BetaMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            BetaMode::Offset => "offset",
            BetaMode::Raw => "raw",
        })
    }
}

/// Distance weight for one entity over the expanded stacks that cover it
/// (n covering stacks, dis = call depth in each). Entities in no expanded
/// trace get β = 1: the weight only means something for members of failing
/// traces.
pub fn distance_weight(entity: EntityId, depth_maps: &[DepthMap], mode: BetaMode) -> f64 {
    let mut covering = 0u64;
    let mut distance_sum = 0u64;
    for map in depth_maps {
        if let Some(d) = map.depth(entity) {
            covering += 1;
            distance_sum += u64::from(d);
        }
    }
    if covering == 0 {
        return 1.0;
    }
    let n = covering as f64;
    match mode {
        BetaMode::Offset => n / (distance_sum as f64 + n),
        BetaMode::Raw => {
            if distance_sum == 0 {
                2.0 * n
            } else {
                n / distance_sum as f64
            }
        }
    }
}

/// The coverage-adjusted a′_ep per spectra column.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageAdjustment {
    /// a′_ep per column: a_ep where positive, otherwise the mean a_ep over
    /// entities with positive passing coverage.
    pub adjusted_ep: Vec<f64>,
    /// No entity appears in any passing trace, so the adjustment degraded to
    /// the identity. Callers should surface a warning.
    pub degenerate: bool,
}

/// Test-coverage adjustment: entities never covered by a passing trace would
/// otherwise see their denominator shrink and their suspiciousness inflate,
/// so they are assigned the average a_ep of the entities that are covered.
pub fn adjust_coverage(spectra: &ProgramSpectra) -> CoverageAdjustment {
    let columns = spectra.entity_count();
    let mut positive_sum = 0u64;
    let mut positive_count = 0u64;
    for col in 0..columns {
        let a_ep = spectra.counts_at(col).a_ep;
        if a_ep > 0 {
            positive_sum += u64::from(a_ep);
            positive_count += 1;
        }
    }
    if positive_count == 0 {
        let adjusted_ep = (0..columns)
            .map(|c| spectra.counts_at(c).a_ep as f64)
            .collect();
        return CoverageAdjustment {
            adjusted_ep,
            degenerate: true,
        };
    }
    let mean = positive_sum as f64 / positive_count as f64;
    let adjusted_ep = (0..columns)
        .map(|col| {
            let a_ep = spectra.counts_at(col).a_ep;
            if a_ep > 0 {
                a_ep as f64
            } else {
                mean
            }
        })
        .collect();
    CoverageAdjustment {
        adjusted_ep,
        degenerate: false,
    }
}

/// Scoring configuration, echoed into the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreConfig {
    pub metric: Metric,
    /// Heuristic-1: distance reweighting.
    pub use_h1: bool,
    /// Heuristic-2: test coverage adjustment.
    pub use_h2: bool,
    pub beta_mode: BetaMode,
    /// Expansion depth the failing traces were built with (report metadata).
    pub depth: u32,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            metric: Metric::Ochiai,
            use_h1: true,
            use_h2: true,
            beta_mode: BetaMode::Offset,
            depth: 0,
        }
    }
}

/// One ranked entity and its score components. S″ = S′ · β exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredEntity {
    pub entity: EntityId,
    pub name: String,
    /// Base metric score S.
    pub base: f64,
    /// Coverage-adjusted score S′ (equals S when Heuristic-2 is off).
    pub adjusted: f64,
    /// Distance weight β (1 when Heuristic-1 is off).
    pub beta: f64,
    /// Final score S″ = S′ · β.
    pub final_score: f64,
    /// Least call depth over the expanded stacks covering the entity; absent
    /// for entities found only in passing traces.
    pub min_depth: Option<u32>,
}

/// Deterministically ordered ranking: final score descending, then least
/// depth ascending (absent sorts last), then name ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspiciousnessReport {
    pub config: ScoreConfig,
    /// The Heuristic-2 mean was undefined (nothing covered by passing
    /// traces); scores fall back to the raw counters.
    pub h2_degenerate: bool,
    pub entries: Vec<ScoredEntity>,
}

impl SuspiciousnessReport {
    /// 1-based rank of an entity by name.
    pub fn rank_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name).map(|i| i + 1)
    }
}

/// Scores every spectra entity and emits the ranked report.
///
/// With Heuristic-2 enabled, S′ substitutes a′_ep into the chosen metric;
/// with Heuristic-1 enabled, β is the distance weight over `depth_maps`
/// (one map per expanded stack, as produced by batch expansion).
pub fn score_all(
    spectra: &ProgramSpectra,
    interner: &Interner,
    depth_maps: &[DepthMap],
    config: &ScoreConfig,
) -> SuspiciousnessReport {
    let adjustment = if config.use_h2 {
        Some(adjust_coverage(spectra))
    } else {
        None
    };

    let mut entries: Vec<ScoredEntity> = spectra
        .entities()
        .iter()
        .enumerate()
        .map(|(col, &entity)| {
            let c = spectra.counts_at(col);
            let base = config.metric.score(c);
            let adjusted = match &adjustment {
                Some(adj) => config.metric.score_with(
                    c.a_ef as f64,
                    c.a_nf as f64,
                    adj.adjusted_ep[col],
                    c.a_np as f64,
                ),
                None => base,
            };
            let beta = if config.use_h1 {
                distance_weight(entity, depth_maps, config.beta_mode)
            } else {
                1.0
            };
            let min_depth = depth_maps.iter().filter_map(|m| m.depth(entity)).min();
            ScoredEntity {
                entity,
                name: interner.name(entity).to_string(),
                base,
                adjusted,
                beta,
                final_score: adjusted * beta,
                min_depth,
            }
        })
        .collect();

    entries.sort_by(|a, b| {
        b.final_score
            .total_cmp(&a.final_score)
            .then_with(|| {
                let da = a.min_depth.map_or(u64::MAX, u64::from);
                let db = b.min_depth.map_or(u64::MAX, u64::from);
                da.cmp(&db)
            })
            .then_with(|| a.name.cmp(&b.name))
    });

    SuspiciousnessReport {
        config: *config,
        h2_degenerate: adjustment.as_ref().is_some_and(|a| a.degenerate),
        entries,
    }
}
