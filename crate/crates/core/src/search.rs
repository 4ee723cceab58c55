// SPDX-License-Identifier: Apache-2.0

//! Budgeted pipeline search over a finite space.
//!
//! A space lists, per template slot, alternative primitives with explicit
//! hyperparameter grids. Candidates are enumerated in lexicographic order of
//! slot choices (the first slot varies slowest), so every candidate has a
//! stable ordinal.
//!
//! ```json
//! {
//!   "slots": {
//!     "data_processing": [{"primitive": "tods.data.timestamp_validation", "grid": {}}],
//!     "ts_processing": [{"primitive": null}],
//!     "feature_analysis": [{"primitive": "tods.feature.window_statistics", "grid": {"window": [1, 5]}}],
//!     "detection": [{"primitive": "tods.detection.iforest", "grid": {"seed": [0]}}],
//!     "thresholding": [{"primitive": "tods.detection.threshold", "grid": {"contamination": [0.01]}}]
//!   },
//!   "reinforcement": null
//! }
//! ```
//!
//! A `null` primitive skips the slot. `thresholding` is optional and defaults
//! to `tods.detection.threshold` with its default contamination.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value as Json};
use uuid::Uuid;

use crate::dataset::TimeSeriesDataset;
use crate::detection::Rule;
use crate::engine::{evaluate_pipeline, validate, Diagnostic, Metric, SplitScheme};
use crate::frame::ValueKind;
use crate::hyperparams::HyperparamValue;
use crate::pipeline::{serialize_pipeline, PipelineDescription, PipelineStep};
use crate::registry::{registry, Family};

const DEFAULT_SPACE: &str = include_str!("default_space.json");

/// Template slots in pipeline order.
pub const SLOTS: [&str; 5] = [
    "data_processing",
    "ts_processing",
    "feature_analysis",
    "detection",
    "thresholding",
];

const REINFORCEMENT_ID: &str = "tods.reinforcement.rule_based_filter";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("slot {0} has no choices")]
    EmptySlot(String),
    #[error("bad search space: {0}")]
    BadSpace(String),
    #[error("candidate {ordinal} does not validate: {}", .diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidCandidate {
        ordinal: u64,
        diagnostics: Vec<Diagnostic>,
    },
    #[error("budget must be at least 1")]
    BudgetZero,
    #[error("dataset has no ground-truth labels")]
    NoLabels,
    #[error("candidate {0} failed and cannot be exported")]
    FailedCandidate(u64),
}

impl SearchError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EmptySlot(_) => "EmptySlot",
            Self::BadSpace(_) => "BadSpace",
            Self::InvalidCandidate { .. } => "InvalidCandidate",
            Self::BudgetZero => "BudgetZero",
            Self::NoLabels => "NoLabels",
            Self::FailedCandidate(_) => "FailedCandidate",
        }
    }
}

/// One primitive (or a skip) with its hyperparameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotChoice {
    pub primitive: Option<String>,
    pub grid: BTreeMap<String, Vec<HyperparamValue>>,
}

/// A fully resolved slot alternative: one grid point of one choice.
#[derive(Debug, Clone, PartialEq)]
struct Alternative {
    primitive: Option<String>,
    hyperparams: BTreeMap<String, HyperparamValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    /// Choices per entry of [`SLOTS`].
    pub slots: Vec<Vec<SlotChoice>>,
    /// Rules for a final reinforcement step; `None` leaves it out.
    pub reinforcement: Option<Vec<Rule>>,
    alternatives: Vec<Vec<Alternative>>,
}

fn slot_family(slot: &str) -> Family {
    match slot {
        "data_processing" => Family::DataProcessing,
        "ts_processing" => Family::TimeSeriesProcessing,
        "feature_analysis" => Family::FeatureAnalysis,
        _ => Family::DetectionAlgorithm,
    }
}

impl SearchSpace {
    /// The space shipped with the CLI.
    pub fn default_space() -> Self {
        Self::from_json_str(DEFAULT_SPACE).expect("embedded default space is valid")
    }

    pub fn default_space_json() -> &'static str {
        DEFAULT_SPACE
    }

    pub fn from_json_str(text: &str) -> Result<Self, SearchError> {
        let v: Json = serde_json::from_str(text).map_err(|e| SearchError::BadSpace(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Json) -> Result<Self, SearchError> {
        let bad = |m: String| SearchError::BadSpace(m);
        let obj = v
            .as_object()
            .ok_or_else(|| bad("space must be an object".into()))?;
        if let Some(k) = obj
            .keys()
            .find(|k| !matches!(k.as_str(), "slots" | "reinforcement"))
        {
            return Err(bad(format!("unknown field {k:?}")));
        }
        let slots_obj = obj
            .get("slots")
            .and_then(Json::as_object)
            .ok_or_else(|| bad("missing slots object".into()))?;
        if let Some(k) = slots_obj.keys().find(|k| !SLOTS.contains(&k.as_str())) {
            return Err(bad(format!("unknown slot {k:?}")));
        }
        let mut slots = Vec::with_capacity(SLOTS.len());
        for slot in SLOTS {
            let raw = match slots_obj.get(slot) {
                Some(r) => r,
                None if slot == "thresholding" => {
                    slots.push(vec![SlotChoice {
                        primitive: Some("tods.detection.threshold".into()),
                        grid: BTreeMap::new(),
                    }]);
                    continue;
                }
                None => return Err(SearchError::EmptySlot(slot.into())),
            };
            let list = raw
                .as_array()
                .ok_or_else(|| bad(format!("slot {slot} must be a list")))?;
            if list.is_empty() {
                return Err(SearchError::EmptySlot(slot.into()));
            }
            slots.push(
                list.iter()
                    .map(|c| parse_choice(slot, c))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let reinforcement = match obj.get("reinforcement") {
            None | Some(Json::Null) => None,
            Some(r) => {
                let rules = r
                    .get("rules")
                    .and_then(Json::as_array)
                    .ok_or_else(|| bad("reinforcement needs a rules list".into()))?;
                Some(
                    rules
                        .iter()
                        .map(Rule::from_json)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(bad)?,
                )
            }
        };
        Self::new(slots, reinforcement)
    }

    /// Builds a space from per-slot choices and checks every candidate validates.
    pub fn new(slots: Vec<Vec<SlotChoice>>, reinforcement: Option<Vec<Rule>>) -> Result<Self, SearchError> {
        if slots.len() != SLOTS.len() {
            return Err(SearchError::BadSpace(format!("expected {} slots", SLOTS.len())));
        }
        let alternatives: Vec<Vec<Alternative>> = slots
            .iter()
            .zip(SLOTS)
            .map(|(choices, slot)| {
                let alts: Vec<Alternative> = choices.iter().flat_map(expand_grid).collect();
                if alts.is_empty() {
                    Err(SearchError::EmptySlot(slot.into()))
                } else {
                    Ok(alts)
                }
            })
            .collect::<Result<_, _>>()?;
        let space = Self {
            slots,
            reinforcement,
            alternatives,
        };
        // Steps compose kind-wise slot by slot, so checking every
        // alternative against one representative of the other slots covers
        // all combinations.
        for slot in 0..SLOTS.len() {
            for alt in 0..space.alternatives[slot].len() {
                let mut digits = vec![0usize; SLOTS.len()];
                digits[slot] = alt;
                let ordinal = space.encode(&digits);
                let p = space.candidate(ordinal);
                let diagnostics = validate(&p);
                if !diagnostics.is_empty() {
                    return Err(SearchError::InvalidCandidate { ordinal, diagnostics });
                }
            }
        }
        Ok(space)
    }

    /// Number of candidates.
    pub fn size(&self) -> u64 {
        self.alternatives.iter().map(|a| a.len() as u64).product()
    }

    fn encode(&self, digits: &[usize]) -> u64 {
        digits
            .iter()
            .zip(&self.alternatives)
            .fold(0u64, |acc, (&d, alts)| acc * alts.len() as u64 + d as u64)
    }

    fn decode(&self, mut ordinal: u64) -> Vec<usize> {
        let mut digits = vec![0usize; self.alternatives.len()];
        for (slot, alts) in self.alternatives.iter().enumerate().rev() {
            let radix = alts.len() as u64;
            digits[slot] = (ordinal % radix) as usize;
            ordinal /= radix;
        }
        digits
    }

    /// The pipeline with the given ordinal. Panics if `ordinal >= size()`.
    pub fn candidate(&self, ordinal: u64) -> PipelineDescription {
        assert!(ordinal < self.size(), "ordinal {ordinal} out of range");
        let digits = self.decode(ordinal);
        let mut steps: Vec<PipelineStep> = digits
            .iter()
            .zip(&self.alternatives)
            .filter_map(|(&d, alts)| {
                let alt = &alts[d];
                alt.primitive.as_ref().map(|id| {
                    let mut step = PipelineStep::new(id, &[]);
                    step.hyperparams.extend(alt.hyperparams.clone());
                    step
                })
            })
            .collect();
        if let Some(rules) = &self.reinforcement {
            steps.push(
                PipelineStep::new(REINFORCEMENT_ID, &[]).with("rules", HyperparamValue::Rules(rules.clone())),
            );
        }
        PipelineDescription::chain(candidate_id(ordinal).to_string(), steps)
    }

    /// All candidates in ordinal order.
    pub fn enumerate(&self) -> impl Iterator<Item = PipelineDescription> + '_ {
        (0..self.size()).map(|o| self.candidate(o))
    }
}

/// Stable id of the candidate with `ordinal`.
fn candidate_id(ordinal: u64) -> Uuid {
    let mut bytes = [0u8; 16];
    bytes[..8].copy_from_slice(b"tsodscnd");
    bytes[8..].copy_from_slice(&ordinal.to_be_bytes());
    uuid::Builder::from_random_bytes(bytes).into_uuid()
}

fn parse_choice(slot: &str, v: &Json) -> Result<SlotChoice, SearchError> {
    let bad = |m: String| SearchError::BadSpace(format!("slot {slot}: {m}"));
    let obj = v
        .as_object()
        .ok_or_else(|| bad("choice must be an object".into()))?;
    if let Some(k) = obj.keys().find(|k| !matches!(k.as_str(), "primitive" | "grid")) {
        return Err(bad(format!("unknown field {k:?}")));
    }
    let primitive = match obj.get("primitive") {
        None | Some(Json::Null) => None,
        Some(Json::String(s)) => Some(s.clone()),
        Some(other) => return Err(bad(format!("primitive must be a string or null, got {other}"))),
    };
    let Some(id) = &primitive else {
        if matches!(slot, "detection" | "thresholding") {
            return Err(bad("this slot cannot be skipped".into()));
        }
        if obj
            .get("grid")
            .and_then(Json::as_object)
            .is_some_and(|g| !g.is_empty())
        {
            return Err(bad("a skipped slot has no grid".into()));
        }
        return Ok(SlotChoice {
            primitive,
            grid: BTreeMap::new(),
        });
    };
    let desc = registry()
        .descriptor(id)
        .ok_or_else(|| bad(format!("unknown primitive {id:?}")))?;
    let family_ok = desc.family == slot_family(slot)
        && match slot {
            "detection" => desc.produces == ValueKind::Scores,
            "thresholding" => desc.produces == ValueKind::Labels,
            _ => true,
        };
    if !family_ok {
        return Err(bad(format!("{id} does not belong in this slot")));
    }
    let mut grid = BTreeMap::new();
    if let Some(g) = obj.get("grid") {
        let g = g
            .as_object()
            .ok_or_else(|| bad("grid must be an object".into()))?;
        for (name, values) in g {
            let spec = desc
                .hyperparam(name)
                .ok_or_else(|| bad(format!("{id} has no hyperparameter {name:?}")))?;
            let values = values
                .as_array()
                .filter(|a| !a.is_empty())
                .ok_or_else(|| bad(format!("grid for {name} must be a non-empty list")))?;
            let parsed = values
                .iter()
                .map(|v| spec.kind.parse(v).map_err(|e| bad(format!("{name}: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            grid.insert(name.clone(), parsed);
        }
    }
    Ok(SlotChoice { primitive, grid })
}

/// Cartesian product of a choice's grid, last hyperparameter name fastest.
fn expand_grid(choice: &SlotChoice) -> Vec<Alternative> {
    let mut points = vec![BTreeMap::new()];
    for (name, values) in &choice.grid {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(name.clone(), v.clone());
                    q
                })
            })
            .collect();
    }
    points
        .into_iter()
        .map(|hyperparams| Alternative {
            primitive: choice.primitive.clone(),
            hyperparams,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Random,
    Exhaustive,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(Self::Random),
            "exhaustive" => Ok(Self::Exhaustive),
            _ => Err(format!("unknown strategy {s:?} (expected random or exhaustive)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Random => "random",
            Self::Exhaustive => "exhaustive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub budget: u64,
    pub seed: u64,
    pub scheme: SplitScheme,
    pub metric: Metric,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Random,
            budget: 20,
            seed: 42,
            scheme: SplitScheme::KFold(5),
            metric: Metric::F1,
        }
    }
}

/// Ordinals a search evaluates, in order. Random sampling is a seeded partial
/// Fisher-Yates shuffle, so a smaller budget yields a prefix of a larger one.
pub fn candidate_order(size: u64, strategy: Strategy, budget: u64, seed: u64) -> Vec<u64> {
    let n = budget.min(size);
    match strategy {
        Strategy::Exhaustive => (0..n).collect(),
        Strategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Sparse permutation: only displaced positions are stored.
            let mut moved: HashMap<u64, u64> = HashMap::new();
            (0..n)
                .map(|i| {
                    let j = rng.random_range(i..size);
                    let at_j = *moved.get(&j).unwrap_or(&j);
                    let at_i = *moved.get(&i).unwrap_or(&i);
                    moved.insert(j, at_i);
                    at_j
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateStatus {
    Ok,
    Failed(String),
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchRecord {
    pub ordinal: u64,
    /// 1-based leaderboard position.
    pub rank: usize,
    pub pipeline: PipelineDescription,
    /// Primary metric per fold; empty when the candidate failed.
    pub fold_scores: Vec<f64>,
    /// Fold mean of the primary metric, or -1 for a failed candidate.
    pub aggregate: f64,
    pub wall_ms: f64,
    pub status: CandidateStatus,
}

impl SearchRecord {
    pub fn is_ok(&self) -> bool {
        self.status == CandidateStatus::Ok
    }

    pub fn to_json(&self) -> Json {
        let mut j = json!({
            "ordinal": self.ordinal,
            "rank": self.rank,
            "aggregate": self.aggregate,
            "fold_scores": self.fold_scores,
            "wall_ms": self.wall_ms,
            "status": if self.is_ok() { "ok" } else { "failed" },
            "pipeline": self.pipeline.to_json(),
        });
        if let CandidateStatus::Failed(e) = &self.status {
            j["error"] = Json::String(e.clone());
        }
        j
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: SearchRecord,
    /// Sorted by aggregate descending, then ordinal ascending.
    pub leaderboard: Vec<SearchRecord>,
    /// Candidate ordinals in the order they were drawn.
    pub evaluated: Vec<u64>,
    pub space_size: u64,
}

impl SearchOutcome {
    pub fn to_json(&self) -> Json {
        json!({
            "space_size": self.space_size,
            "evaluations": self.evaluated.len(),
            "best": self.best.to_json(),
            "leaderboard": self.leaderboard.iter().map(SearchRecord::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Evaluates up to `config.budget` candidates of `space` on `ds` and ranks them.
pub fn search(
    ds: &TimeSeriesDataset,
    space: &SearchSpace,
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    search_with_counter(ds, space, config, &AtomicUsize::new(0))
}

/// [`search`], incrementing `evaluations` once per candidate evaluated.
pub fn search_with_counter(
    ds: &TimeSeriesDataset,
    space: &SearchSpace,
    config: &SearchConfig,
    evaluations: &AtomicUsize,
) -> Result<SearchOutcome, SearchError> {
    if config.budget == 0 {
        return Err(SearchError::BudgetZero);
    }
    if !ds.has_labels() {
        return Err(SearchError::NoLabels);
    }
    let order = candidate_order(space.size(), config.strategy, config.budget, config.seed);
    let mut records: Vec<SearchRecord> = order
        .par_iter()
        .map(|&ordinal| {
            let pipeline = space.candidate(ordinal);
            let started = Instant::now();
            let result = evaluate_pipeline(ds, &pipeline, config.metric, &config.scheme, config.seed);
            evaluations.fetch_add(1, Ordering::Relaxed);
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let (fold_scores, aggregate, status) = match result {
                Ok(e) => (
                    e.folds.iter().map(|f| f.metric(config.metric)).collect(),
                    e.aggregate,
                    CandidateStatus::Ok,
                ),
                Err(e) => {
                    tracing::info!(ordinal, error = %e, "candidate failed");
                    (
                        Vec::new(),
                        -1.0,
                        CandidateStatus::Failed(format!("{}: {e}", e.name())),
                    )
                }
            };
            tracing::debug!(ordinal, aggregate, wall_ms, "candidate evaluated");
            SearchRecord {
                ordinal,
                rank: 0,
                pipeline,
                fold_scores,
                aggregate,
                wall_ms,
                status,
            }
        })
        .collect();
    records.sort_by(|a, b| {
        b.aggregate
            .total_cmp(&a.aggregate)
            .then(a.ordinal.cmp(&b.ordinal))
    });
    for (i, r) in records.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(SearchOutcome {
        best: records[0].clone(),
        leaderboard: records,
        evaluated: order,
        space_size: space.size(),
    })
}

/// Canonical JSON of a successful candidate's pipeline.
pub fn export_best(record: &SearchRecord) -> Result<String, SearchError> {
    if !record.is_ok() {
        return Err(SearchError::FailedCandidate(record.ordinal));
    }
    Ok(serialize_pipeline(&record.pipeline))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::parse_pipeline;

    fn space(text: Json) -> Result<SearchSpace, SearchError> {
        SearchSpace::from_json(&text)
    }

    fn six() -> SearchSpace {
        space(json!({
            "slots": {
                "data_processing": [{"primitive": "tods.data.timestamp_validation"}, {"primitive": null}],
                "ts_processing": [{"primitive": "tods.timeseries.standardize"}],
                "feature_analysis": [{"primitive": null}],
                "detection": [
                    {"primitive": "tods.detection.zscore"},
                    {"primitive": "tods.detection.knn", "grid": {"k": [1, 3]}}
                ]
            },
            "reinforcement": null
        }))
        .unwrap()
    }

    #[test]
    fn product_count_and_order() {
        let s = six();
        assert_eq!(s.size(), 6);
        let ids: Vec<String> = s
            .enumerate()
            .map(|p| {
                p.steps
                    .iter()
                    .map(|st| st.primitive_id.rsplit('.').next().unwrap().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        assert_eq!(
            ids,
            [
                "timestamp_validation,standardize,zscore,threshold",
                "timestamp_validation,standardize,knn,threshold",
                "timestamp_validation,standardize,knn,threshold",
                "standardize,zscore,threshold",
                "standardize,knn,threshold",
                "standardize,knn,threshold",
            ]
        );
        let a: Vec<_> = s.enumerate().collect();
        let b: Vec<_> = s.enumerate().collect();
        assert_eq!(a, b);
        assert_eq!(a[2].steps[2].hyperparams["k"], HyperparamValue::Int(3));
    }

    #[test]
    fn single_choice_space_is_one_pipeline() {
        let s = space(json!({"slots": {
            "data_processing": [{"primitive": "tods.data.timestamp_validation"}],
            "ts_processing": [{"primitive": "tods.timeseries.standardize"}],
            "feature_analysis": [{"primitive": "tods.feature.window_statistics"}],
            "detection": [{"primitive": "tods.detection.iforest"}]
        }}))
        .unwrap();
        assert_eq!(s.size(), 1);
        assert_eq!(s.candidate(0).steps.len(), 5);
    }

    #[test]
    fn space_errors() {
        let e = space(json!({"slots": {
            "data_processing": [], "ts_processing": [{"primitive": null}],
            "feature_analysis": [{"primitive": null}], "detection": [{"primitive": "tods.detection.zscore"}]
        }}))
        .unwrap_err();
        assert_eq!(e, SearchError::EmptySlot("data_processing".into()));
        let e = space(json!({"slots": {
            "data_processing": [{"primitive": "tods.detection.zscore"}], "ts_processing": [{"primitive": null}],
            "feature_analysis": [{"primitive": null}], "detection": [{"primitive": "tods.detection.zscore"}]
        }}))
        .unwrap_err();
        assert_eq!(e.name(), "BadSpace");
    }

    #[test]
    fn random_order_is_a_seeded_prefix_permutation() {
        let full = candidate_order(50, Strategy::Random, 50, 9);
        let mut sorted = full.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_eq!(candidate_order(50, Strategy::Random, 7, 9), full[..7]);
        assert_eq!(candidate_order(50, Strategy::Random, 50, 9), full);
        assert_ne!(candidate_order(50, Strategy::Random, 50, 10), full);
        assert_eq!(candidate_order(5, Strategy::Exhaustive, 3, 0), vec![0, 1, 2]);
        assert_eq!(candidate_order(u64::MAX, Strategy::Random, 3, 1).len(), 3);
    }

    #[test]
    fn default_space_is_valid() {
        let s = SearchSpace::default_space();
        assert!(s.size() >= 2);
        for p in s.enumerate() {
            assert_eq!(parse_pipeline(&serialize_pipeline(&p)).unwrap(), p);
        }
    }

    #[test]
    fn budget_zero_and_no_labels() {
        let ds = TimeSeriesDataset::from_columns("x", vec![("v".into(), vec![0.0; 10])]).unwrap();
        let cfg = SearchConfig {
            budget: 0,
            ..SearchConfig::default()
        };
        assert_eq!(search(&ds, &six(), &cfg).unwrap_err(), SearchError::BudgetZero);
        assert_eq!(
            search(&ds, &six(), &SearchConfig::default()).unwrap_err(),
            SearchError::NoLabels
        );
    }

    #[test]
    fn failed_record_cannot_be_exported() {
        let r = SearchRecord {
            ordinal: 3,
            rank: 1,
            pipeline: six().candidate(3),
            fold_scores: vec![],
            aggregate: -1.0,
            wall_ms: 0.0,
            status: CandidateStatus::Failed("x".into()),
        };
        assert_eq!(export_best(&r).unwrap_err(), SearchError::FailedCandidate(3));
    }
}
