// SPDX-License-Identifier: Apache-2.0

//! The primitive registry: descriptors plus the function each step runs.

use std::collections::{BTreeMap, HashMap};
use std::sync::LazyLock;

use serde::Serialize;

use crate::error::PrimitiveError;
use crate::frame::{TrainMask, Value, ValueKind};
use crate::hyperparams::{HyperparamKind as K, HyperparamSpec, HyperparamValue as V, Hyperparams};

mod steps;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    DataProcessing,
    TimeSeriesProcessing,
    FeatureAnalysis,
    DetectionAlgorithm,
    Reinforcement,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::DataProcessing,
        Family::TimeSeriesProcessing,
        Family::FeatureAnalysis,
        Family::DetectionAlgorithm,
        Family::Reinforcement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::DataProcessing => "DataProcessing",
            Self::TimeSeriesProcessing => "TimeSeriesProcessing",
            Self::FeatureAnalysis => "FeatureAnalysis",
            Self::DetectionAlgorithm => "DetectionAlgorithm",
            Self::Reinforcement => "Reinforcement",
        }
    }
}

/// A named step argument and the value kinds it accepts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgumentSpec {
    pub name: &'static str,
    pub accepts: Vec<ValueKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimitiveDescriptor {
    pub id: &'static str,
    pub family: Family,
    pub description: &'static str,
    pub hyperparam_schema: Vec<HyperparamSpec>,
    pub arguments: Vec<ArgumentSpec>,
    pub produces: ValueKind,
    /// Learns state from training rows when run under a train mask.
    pub fit_capable: bool,
}

impl PrimitiveDescriptor {
    pub fn hyperparam(&self, name: &str) -> Option<&HyperparamSpec> {
        self.hyperparam_schema.iter().find(|h| h.name == name)
    }

    pub fn argument(&self, name: &str) -> Option<&ArgumentSpec> {
        self.arguments.iter().find(|a| a.name == name)
    }

    /// Schema defaults overlaid with `given`.
    pub fn resolve(&self, given: &BTreeMap<String, V>) -> Hyperparams {
        let mut hp: BTreeMap<String, V> = self
            .hyperparam_schema
            .iter()
            .map(|h| (h.name.to_string(), h.default.clone()))
            .collect();
        hp.extend(given.iter().map(|(k, v)| (k.clone(), v.clone())));
        Hyperparams(hp)
    }
}

/// Everything a step sees when it runs.
pub struct Invocation<'a> {
    pub args: BTreeMap<&'a str, &'a Value>,
    pub hyperparams: &'a Hyperparams,
    pub train: Option<&'a TrainMask>,
}

pub type RunFn = fn(&Invocation<'_>) -> Result<Value, PrimitiveError>;

pub struct Entry {
    pub descriptor: PrimitiveDescriptor,
    pub run: RunFn,
}

pub struct Registry {
    entries: Vec<Entry>,
    index: HashMap<&'static str, usize>,
}

impl Registry {
    fn new(mut entries: Vec<Entry>) -> Self {
        entries.sort_by(|a, b| {
            (a.descriptor.family, a.descriptor.id).cmp(&(b.descriptor.family, b.descriptor.id))
        });
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            let previous = index.insert(e.descriptor.id, i);
            assert!(previous.is_none(), "duplicate primitive id {}", e.descriptor.id);
        }
        Self { entries, index }
    }

    pub fn get(&self, id: &str) -> Option<&Entry> {
        self.index.get(id).map(|&i| &self.entries[i])
    }

    pub fn descriptor(&self, id: &str) -> Option<&PrimitiveDescriptor> {
        self.get(id).map(|e| &e.descriptor)
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &PrimitiveDescriptor> {
        self.entries.iter().map(|e| &e.descriptor)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

static REGISTRY: LazyLock<Registry> = LazyLock::new(|| Registry::new(builtin()));

/// The process-wide registry, built on first use.
pub fn registry() -> &'static Registry {
    &REGISTRY
}

/// All descriptors ordered by family, then id.
pub fn registry_list() -> Vec<PrimitiveDescriptor> {
    registry().descriptors().cloned().collect()
}

fn hp(name: &'static str, kind: K, default: V, description: &'static str) -> HyperparamSpec {
    HyperparamSpec {
        name,
        kind,
        default,
        description,
    }
}

fn int(min: i64, max: Option<i64>) -> K {
    K::Int { min: Some(min), max }
}

fn arg(name: &'static str, accepts: &[ValueKind]) -> ArgumentSpec {
    ArgumentSpec {
        name,
        accepts: accepts.to_vec(),
    }
}

fn window_hps(window: i64) -> Vec<HyperparamSpec> {
    vec![
        hp("window", int(1, None), V::Int(window), "Window length in points."),
        hp("stride", int(1, None), V::Int(1), "Step between window starts."),
    ]
}

fn column_hp() -> HyperparamSpec {
    hp(
        "column",
        int(0, None),
        V::Int(0),
        "Index of the input column to score.",
    )
}

fn builtin() -> Vec<Entry> {
    use Family::*;
    use ValueKind::{Labels, Scores, Table};

    let table_in = || vec![arg("inputs", &[Table])];
    let entry = |id, family, description, hyperparam_schema, arguments, produces, fit_capable, run| Entry {
        descriptor: PrimitiveDescriptor {
            id,
            family,
            description,
            hyperparam_schema,
            arguments,
            produces,
            fit_capable,
        },
        run,
    };

    vec![
        entry(
            "tods.data.timestamp_validation",
            DataProcessing,
            "Sorts rows by timestamp and drops or rejects duplicate timestamps.",
            vec![
                hp(
                    "order_policy",
                    K::Enum {
                        options: vec!["sort", "error"],
                    },
                    V::Enum("sort".into()),
                    "Sort unsorted rows, or fail.",
                ),
                hp(
                    "duplicate_policy",
                    K::Enum {
                        options: vec!["keep_first", "error"],
                    },
                    V::Enum("keep_first".into()),
                    "Keep the first of duplicate timestamps, or fail.",
                ),
            ],
            table_in(),
            Table,
            false,
            steps::timestamp_validation,
        ),
        entry(
            "tods.data.impute_missing",
            DataProcessing,
            "Fills missing values column by column.",
            vec![hp(
                "strategy",
                K::Enum {
                    options: vec!["mean", "forward_fill", "linear"],
                },
                V::Enum("linear".into()),
                "Imputation strategy.",
            )],
            table_in(),
            Table,
            false,
            steps::impute_missing,
        ),
        entry(
            "tods.data.column_select",
            DataProcessing,
            "Keeps the listed columns (by index) in the listed order; an empty list keeps all.",
            vec![hp(
                "columns",
                K::FloatList {
                    min: Some(0.0),
                    max: None,
                },
                V::FloatList(Vec::new()),
                "Column indices to keep.",
            )],
            table_in(),
            Table,
            false,
            steps::column_select,
        ),
        entry(
            "tods.timeseries.seasonal_decomposition",
            TimeSeriesProcessing,
            "Classical additive decomposition into trend, seasonal and residual parts.",
            vec![
                hp("period", int(2, None), V::Int(24), "Season length in points."),
                hp(
                    "output",
                    K::Enum {
                        options: vec!["residual", "components"],
                    },
                    V::Enum("residual".into()),
                    "Emit only the residual per column, or all three components.",
                ),
            ],
            table_in(),
            Table,
            false,
            steps::seasonal_decomposition,
        ),
        entry(
            "tods.timeseries.moving_average",
            TimeSeriesProcessing,
            "Centered moving average, truncated at the edges.",
            vec![hp("window", int(1, None), V::Int(5), "Window length in points.")],
            table_in(),
            Table,
            false,
            steps::moving_average,
        ),
        entry(
            "tods.timeseries.difference",
            TimeSeriesProcessing,
            "Repeated first differences; drops the first `order` rows.",
            vec![hp(
                "order",
                int(1, Some(16)),
                V::Int(1),
                "Number of differencing passes.",
            )],
            table_in(),
            Table,
            false,
            steps::difference,
        ),
        entry(
            "tods.timeseries.standardize",
            TimeSeriesProcessing,
            "Per-column z-scaling with statistics learned on training rows.",
            Vec::new(),
            table_in(),
            Table,
            true,
            steps::standardize,
        ),
        entry(
            "tods.timeseries.subsequence_segmentation",
            TimeSeriesProcessing,
            "Turns one column into a table of sliding windows, one row per window start.",
            {
                let mut v = window_hps(10);
                v.push(column_hp());
                v
            },
            table_in(),
            Table,
            false,
            steps::subsequence_segmentation,
        ),
        entry(
            "tods.feature.autocorrelation",
            FeatureAnalysis,
            "Rolling autocorrelation at lags 1..max_lag for every column.",
            {
                let mut v = window_hps(32);
                v.push(hp("max_lag", int(1, None), V::Int(4), "Largest lag."));
                v
            },
            table_in(),
            Table,
            false,
            steps::autocorrelation,
        ),
        entry(
            "tods.feature.window_statistics",
            FeatureAnalysis,
            "Rolling mean, std, min, max, skewness and kurtosis for every column.",
            window_hps(10),
            table_in(),
            Table,
            false,
            steps::window_statistics,
        ),
        entry(
            "tods.feature.dft_magnitudes",
            FeatureAnalysis,
            "Rolling DFT magnitudes (DC excluded) for every column.",
            {
                let mut v = window_hps(16);
                v.push(hp("n_bins", int(1, None), V::Int(4), "Number of frequency bins."));
                v
            },
            table_in(),
            Table,
            false,
            steps::dft_magnitudes,
        ),
        entry(
            "tods.feature.nmf",
            FeatureAnalysis,
            "Row-wise reconstruction error of a non-negative matrix factorization of the table.",
            vec![
                hp("rank", int(1, None), V::Int(2), "Factorization rank."),
                hp("max_iter", int(1, None), V::Int(200), "Iteration cap."),
                hp(
                    "tol",
                    K::Float {
                        min: Some(0.0),
                        max: None,
                    },
                    V::Float(1e-6),
                    "Stop when the relative objective improvement drops below this.",
                ),
                hp("seed", int(0, None), V::Int(0), "Initialization seed."),
                hp(
                    "shift",
                    K::Bool,
                    V::Bool(true),
                    "Shift columns with negative entries so their minimum is zero.",
                ),
            ],
            table_in(),
            Table,
            false,
            steps::nmf,
        ),
        entry(
            "tods.detection.zscore",
            DetectionAlgorithm,
            "Absolute z-score of one column.",
            vec![column_hp()],
            table_in(),
            Scores,
            false,
            steps::zscore,
        ),
        entry(
            "tods.detection.iforest",
            DetectionAlgorithm,
            "Isolation forest over all columns.",
            vec![
                hp("n_trees", int(1, Some(10_000)), V::Int(100), "Number of trees."),
                hp("subsample_size", int(2, None), V::Int(256), "Points per tree."),
                hp("seed", int(0, None), V::Int(0), "Random seed."),
            ],
            table_in(),
            Scores,
            true,
            steps::iforest,
        ),
        entry(
            "tods.detection.knn",
            DetectionAlgorithm,
            "Distance to the k-th nearest other row.",
            vec![hp("k", int(1, None), V::Int(5), "Neighbour rank.")],
            table_in(),
            Scores,
            false,
            steps::knn,
        ),
        entry(
            "tods.detection.ar_residual",
            DetectionAlgorithm,
            "Absolute one-step residual of a least-squares autoregressive model of one column.",
            vec![
                hp("order", int(1, Some(64)), V::Int(3), "Autoregressive order."),
                hp(
                    "train_fraction",
                    K::Float {
                        min: Some(0.01),
                        max: Some(1.0),
                    },
                    V::Float(1.0),
                    "Leading fraction of points to fit on when run outside evaluation.",
                ),
                column_hp(),
            ],
            table_in(),
            Scores,
            true,
            steps::ar_residual,
        ),
        entry(
            "tods.detection.matrix_profile",
            DetectionAlgorithm,
            "Matrix-profile discord score of one column, attributed to window starts.",
            vec![
                hp("window", int(2, None), V::Int(16), "Subsequence length."),
                column_hp(),
            ],
            table_in(),
            Scores,
            false,
            steps::matrix_profile,
        ),
        entry(
            "tods.detection.threshold",
            DetectionAlgorithm,
            "Labels the top contamination fraction of scores as outliers.",
            vec![hp(
                "contamination",
                K::Float {
                    min: Some(0.0),
                    max: Some(1.0),
                },
                V::Float(0.01),
                "Expected outlier fraction.",
            )],
            vec![arg("inputs", &[Scores])],
            Labels,
            false,
            steps::threshold,
        ),
        entry(
            "tods.reinforcement.rule_based_filter",
            Reinforcement,
            "Overwrites predicted labels with human-authored rules.",
            vec![hp("rules", K::Rules, V::Rules(Vec::new()), "Ordered rule list.")],
            vec![arg("inputs", &[Labels]), arg("data", &[Table])],
            Labels,
            false,
            steps::rule_based_filter,
        ),
    ]
}
