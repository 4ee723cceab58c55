// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised while turning CSV text into a [`crate::TimeSeriesDataset`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("input has no data rows")]
    EmptyInput,
    #[error("bad target index {index}: {reason}")]
    BadTargetIndex { index: usize, reason: String },
    #[error("bad timestamp column {index}: {reason}")]
    BadTimestampColumn { index: usize, reason: String },
    #[error("non-numeric cell {value:?} at row {row}, column {column:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("no feature columns left after removing timestamp and target")]
    NoFeatures,
    #[error("csv: {0}")]
    Csv(String),
}

impl DatasetError {
    /// Stable variant name used in machine-readable error bodies.
    pub fn name(&self) -> &'static str {
        match self {
            Self::EmptyInput => "EmptyInput",
            Self::BadTargetIndex { .. } => "BadTargetIndex",
            Self::BadTimestampColumn { .. } => "BadTimestampColumn",
            Self::NonNumericCell { .. } => "NonNumericCell",
            Self::RaggedRows { .. } => "RaggedRows",
            Self::NoFeatures => "NoFeatures",
            Self::Csv(_) => "Csv",
        }
    }
}

/// Errors raised by [`crate::parse_pipeline`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("malformed pipeline json: {0}")]
    MalformedJson(String),
    #[error("unknown schema version {0:?}")]
    UnknownSchemaVersion(String),
    #[error("unknown primitive {0:?}")]
    UnknownPrimitive(String),
    #[error("step {step}: unknown hyperparameter {name:?}")]
    UnknownHyperparam { step: usize, name: String },
    #[error("step {step}: hyperparameter {name:?} out of range: {reason}")]
    HyperparamOutOfRange {
        step: usize,
        name: String,
        reason: String,
    },
    #[error("step {step}: reference {reference:?} points at a step that does not precede it")]
    ForwardReference { step: usize, reference: String },
    #[error("step {step}: bad data reference {reference:?}")]
    BadReference { step: usize, reference: String },
    #[error("step {step}: {reason}")]
    BadArguments { step: usize, reason: String },
    #[error("bad pipeline outputs: {0}")]
    BadOutputs(String),
}

impl PipelineError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MalformedJson(_) => "MalformedJson",
            Self::UnknownSchemaVersion(_) => "UnknownSchemaVersion",
            Self::UnknownPrimitive(_) => "UnknownPrimitive",
            Self::UnknownHyperparam { .. } => "UnknownHyperparam",
            Self::HyperparamOutOfRange { .. } => "HyperparamOutOfRange",
            Self::ForwardReference { .. } => "ForwardReference",
            Self::BadReference { .. } => "BadReference",
            Self::BadArguments { .. } => "BadArguments",
            Self::BadOutputs(_) => "BadOutputs",
        }
    }

    /// Step index the error is attached to, if any.
    pub fn step(&self) -> Option<usize> {
        match self {
            Self::UnknownHyperparam { step, .. }
            | Self::HyperparamOutOfRange { step, .. }
            | Self::ForwardReference { step, .. }
            | Self::BadReference { step, .. }
            | Self::BadArguments { step, .. } => Some(*step),
            _ => None,
        }
    }
}

/// Errors raised by primitive functions, both when called directly and when
/// run as a pipeline step.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrimitiveError {
    #[error("timestamps are not sorted (row {row})")]
    UnsortedTimestamps { row: usize },
    #[error("duplicate timestamp {timestamp}")]
    DuplicateTimestamp { timestamp: i64 },
    #[error("column {column:?} has no observed values")]
    AllMissingColumn { column: String },
    #[error("period {period} needs at least {} points, got {n}", 2 * period)]
    PeriodTooLarge { period: usize, n: usize },
    #[error("period must be at least 2, got {0}")]
    NonPositivePeriod(i64),
    #[error("window must be at least 1, got {0}")]
    NonPositiveWindow(i64),
    #[error("stride must be at least 1, got {0}")]
    NonPositiveStride(i64),
    #[error("difference order {order} needs more than {order} points, got {n}")]
    OrderTooLarge { order: usize, n: usize },
    #[error("window {window} larger than series length {n}")]
    WindowTooLarge { window: usize, n: usize },
    #[error("max lag {max_lag} must be below series length {n}")]
    LagTooLarge { max_lag: usize, n: usize },
    #[error("series too short: need {required} points, got {n}")]
    SeriesTooShort { required: usize, n: usize },
    #[error("{n_bins} bins requested, at most {max} available")]
    TooManyBins { n_bins: usize, max: usize },
    #[error("matrix entry ({row}, {col}) is negative or not finite")]
    NegativeEntry { row: usize, col: usize },
    #[error("rank {rank} exceeds min(m, n) = {max}")]
    RankTooLarge { rank: usize, max: usize },
    #[error("subsample size must be at least 2, got {0}")]
    SubsampleTooSmall(usize),
    #[error("need at least {required} usable rows, got {n}")]
    TooFewRows { required: usize, n: usize },
    #[error("k = {k} requires more than {k} rows, got {rows}")]
    KTooLarge { k: usize, rows: usize },
    #[error("contamination {0} outside [0, 1]")]
    ContaminationOutOfRange(f64),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("column index {index} out of range for {columns} columns")]
    ColumnOutOfRange { index: usize, columns: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no training rows available for fitting")]
    NoTrainingRows,
    #[error("hyperparameter {name:?}: {reason}")]
    BadHyperparam { name: String, reason: String },
    #[error("argument {name:?}: {reason}")]
    BadArgument { name: String, reason: String },
}

impl PrimitiveError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::UnsortedTimestamps { .. } => "UnsortedTimestamps",
            Self::DuplicateTimestamp { .. } => "DuplicateTimestamp",
            Self::AllMissingColumn { .. } => "AllMissingColumn",
            Self::PeriodTooLarge { .. } => "PeriodTooLarge",
            Self::NonPositivePeriod(_) => "NonPositivePeriod",
            Self::NonPositiveWindow(_) => "NonPositiveWindow",
            Self::NonPositiveStride(_) => "NonPositiveStride",
            Self::OrderTooLarge { .. } => "OrderTooLarge",
            Self::WindowTooLarge { .. } => "WindowTooLarge",
            Self::LagTooLarge { .. } => "LagTooLarge",
            Self::SeriesTooShort { .. } => "SeriesTooShort",
            Self::TooManyBins { .. } => "TooManyBins",
            Self::NegativeEntry { .. } => "NegativeEntry",
            Self::RankTooLarge { .. } => "RankTooLarge",
            Self::SubsampleTooSmall(_) => "SubsampleTooSmall",
            Self::TooFewRows { .. } => "TooFewRows",
            Self::KTooLarge { .. } => "KTooLarge",
            Self::ContaminationOutOfRange(_) => "ContaminationOutOfRange",
            Self::UnknownFeature(_) => "UnknownFeature",
            Self::ColumnOutOfRange { .. } => "ColumnOutOfRange",
            Self::LengthMismatch { .. } => "LengthMismatch",
            Self::NoTrainingRows => "NoTrainingRows",
            Self::BadHyperparam { .. } => "BadHyperparam",
            Self::BadArgument { .. } => "BadArgument",
        }
    }
}
