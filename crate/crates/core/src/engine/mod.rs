// SPDX-License-Identifier: Apache-2.0

//! Pipeline validation, execution and evaluation.
//!
//! Evaluation follows a fit-on-train, produce-on-all, score-on-test protocol:
//! every fold runs the whole pipeline over the full series so that windows
//! may cross fold edges, but fit-capable primitives only learn from the
//! fold's training rows, and only test rows are scored.

mod scoring;
mod splits;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value as Json};

use crate::dataset::TimeSeriesDataset;
use crate::error::PrimitiveError;
use crate::frame::{AnomalyScores, Table, TrainMask, Value, ValueKind};
use crate::pipeline::{DataReference, PipelineDescription};
use crate::registry::registry;

pub use scoring::{score, Counts, ScoreReport};
pub use splits::{make_splits, Fold, SplitPlan, SplitScheme};

/// Metric used to rank pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    Precision,
    Recall,
    #[default]
    F1,
    /// F1 after point adjustment of true anomaly segments.
    F1PointAdjusted,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Self::Precision, Self::Recall, Self::F1, Self::F1PointAdjusted];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Precision => "precision",
            Self::Recall => "recall",
            Self::F1 => "f1",
            Self::F1PointAdjusted => "f1_pa",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown metric {s:?} (expected precision, recall, f1 or f1_pa)"))
    }
}

impl Serialize for Metric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// One problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub step: Option<usize>,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(k) => write!(f, "step {k}: {}: {}", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("pipeline is not executable: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("step {index} ({primitive_id}) failed: {}: {error}", .error.name())]
    StepFailed {
        index: usize,
        primitive_id: String,
        error: PrimitiveError,
        trace: ExecutionTrace,
    },
    #[error("dataset has no ground-truth labels")]
    MissingGroundTruth,
    #[error("length mismatch: {left} predictions vs {right} labels")]
    LengthMismatch { left: usize, right: usize },
    #[error("bad split scheme: {0}")]
    BadScheme(String),
    #[error("pipeline output is {0:?}; evaluation needs labels")]
    OutputNotLabels(ValueKind),
}

fn join(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl EngineError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Invalid(_) => "InvalidPipeline",
            Self::StepFailed { .. } => "StepFailed",
            Self::MissingGroundTruth => "MissingGroundTruth",
            Self::LengthMismatch { .. } => "LengthMismatch",
            Self::BadScheme(_) => "BadScheme",
            Self::OutputNotLabels(_) => "OutputNotLabels",
        }
    }
}

/// Returns every reason `p` cannot run; empty iff it is executable.
pub fn validate(p: &PipelineDescription) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |step: Option<usize>, code: &'static str, message: String| {
        out.push(Diagnostic { step, code, message })
    };
    let reg = registry();
    let produces: Vec<Option<ValueKind>> = p
        .steps
        .iter()
        .map(|s| reg.descriptor(&s.primitive_id).map(|d| d.produces))
        .collect();

    for (k, step) in p.steps.iter().enumerate() {
        let Some(desc) = reg.descriptor(&step.primitive_id) else {
            diag(
                Some(k),
                "UnknownPrimitive",
                format!("no primitive {:?}", step.primitive_id),
            );
            continue;
        };
        for (name, value) in &step.hyperparams {
            match desc.hyperparam(name) {
                None => diag(
                    Some(k),
                    "UnknownHyperparam",
                    format!("{} has no hyperparameter {name:?}", desc.id),
                ),
                Some(spec) => {
                    if let Err(reason) = spec.kind.check(value) {
                        diag(Some(k), "HyperparamOutOfRange", format!("{name}: {reason}"));
                    }
                }
            }
        }
        for arg in &desc.arguments {
            let Some(reference) = step.arguments.get(arg.name) else {
                diag(
                    Some(k),
                    "MissingArgument",
                    format!("missing argument {:?}", arg.name),
                );
                continue;
            };
            let kind = match *reference {
                DataReference::PipelineInput => Some(ValueKind::Table),
                DataReference::StepOutput(j) if j >= k => {
                    diag(
                        Some(k),
                        "ForwardReference",
                        format!("{reference} is not an earlier step"),
                    );
                    continue;
                }
                DataReference::StepOutput(j) => produces[j],
            };
            if let Some(kind) = kind {
                if !arg.accepts.contains(&kind) {
                    diag(
                        Some(k),
                        "KindMismatch",
                        format!(
                            "argument {:?} of {} accepts {:?} but {reference} produces {kind:?}",
                            arg.name, desc.id, arg.accepts
                        ),
                    );
                }
            }
        }
        for name in step.arguments.keys() {
            if desc.argument(name).is_none() {
                diag(
                    Some(k),
                    "UnknownArgument",
                    format!("{} takes no argument {name:?}", desc.id),
                );
            }
        }
    }

    let output = match p.outputs.as_slice() {
        [DataReference::StepOutput(k)] if *k < p.steps.len() => Some(*k),
        _ => {
            diag(
                None,
                "BadOutputs",
                "expected exactly one output referencing a step".into(),
            );
            None
        }
    };
    if let Some(k) = output {
        if let Some(kind) = produces[k] {
            if kind == ValueKind::Table {
                diag(None, "BadOutputs", format!("output step {k} produces a table"));
            }
        }
        // A step is live when it consumes the input (transitively) and feeds the output.
        let mut from_input = vec![false; p.steps.len()];
        for (j, step) in p.steps.iter().enumerate() {
            from_input[j] = !step.arguments.is_empty()
                && step.arguments.values().all(|r| match *r {
                    DataReference::PipelineInput => true,
                    DataReference::StepOutput(i) => i < j && from_input[i],
                });
        }
        let mut to_output = vec![false; p.steps.len()];
        to_output[k] = true;
        for j in (0..=k).rev() {
            if to_output[j] {
                for r in p.steps[j].arguments.values() {
                    if let DataReference::StepOutput(i) = *r {
                        if i < j {
                            to_output[i] = true;
                        }
                    }
                }
            }
        }
        for j in 0..p.steps.len() {
            if !(from_input[j] && to_output[j]) {
                let why = if from_input[j] {
                    "does not feed the output"
                } else {
                    "is not reachable from the pipeline input"
                };
                diag(Some(j), "OrphanStep", format!("step {j} {why}"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepTrace {
    pub index: usize,
    pub primitive_id: String,
    pub input_shapes: BTreeMap<String, (usize, usize)>,
    pub output_shape: Option<(usize, usize)>,
    pub wall_ms: f64,
    pub status: StepStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Per-step record of one execution, in execution order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ExecutionTrace {
    pub steps: Vec<StepTrace>,
}

impl ExecutionTrace {
    pub fn to_json(&self) -> Json {
        serde_json::to_value(&self.steps).expect("trace serializes")
    }
}

/// Result of running a pipeline once.
#[derive(Debug, Clone)]
pub struct Execution {
    /// Value of the pipeline output.
    pub output: Value,
    /// Output of the last step that produced scores, if any.
    pub scores: Option<AnomalyScores>,
    pub trace: ExecutionTrace,
}

/// Runs `p` over `ds` without a train mask, so fit-capable steps learn from all rows.
pub fn execute(p: &PipelineDescription, ds: &TimeSeriesDataset) -> Result<Execution, EngineError> {
    execute_with_mask(p, ds, None)
}

/// Runs `p` over `ds`; fit-capable steps learn only from rows in `train`.
pub fn execute_with_mask(
    p: &PipelineDescription,
    ds: &TimeSeriesDataset,
    train: Option<&TrainMask>,
) -> Result<Execution, EngineError> {
    let diagnostics = validate(p);
    if !diagnostics.is_empty() {
        return Err(EngineError::Invalid(diagnostics));
    }
    let input = Value::Table(Table::from_dataset(ds));
    let reg = registry();
    let mut outputs: Vec<Value> = Vec::with_capacity(p.steps.len());
    let mut trace = ExecutionTrace::default();
    let mut scores = None;

    for (k, step) in p.steps.iter().enumerate() {
        let entry = reg.get(&step.primitive_id).expect("validated primitive");
        let args: BTreeMap<&str, &Value> = step
            .arguments
            .iter()
            .map(|(name, r)| {
                let v = match *r {
                    DataReference::PipelineInput => &input,
                    DataReference::StepOutput(j) => &outputs[j],
                };
                (name.as_str(), v)
            })
            .collect();
        let input_shapes = args.iter().map(|(n, v)| (n.to_string(), v.shape())).collect();
        let hyperparams = entry.descriptor.resolve(&step.hyperparams);
        let started = Instant::now();
        let result = (entry.run)(&crate::registry::Invocation {
            args,
            hyperparams: &hyperparams,
            train,
        });
        let wall_ms = started.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(value) => {
                tracing::debug!(step = k, primitive = %step.primitive_id, wall_ms, "step ok");
                trace.steps.push(StepTrace {
                    index: k,
                    primitive_id: step.primitive_id.clone(),
                    input_shapes,
                    output_shape: Some(value.shape()),
                    wall_ms,
                    status: StepStatus::Ok,
                    error: None,
                });
                if let Value::Scores(s) = &value {
                    scores = Some(s.clone());
                }
                outputs.push(value);
            }
            Err(error) => {
                tracing::debug!(step = k, primitive = %step.primitive_id, %error, "step failed");
                trace.steps.push(StepTrace {
                    index: k,
                    primitive_id: step.primitive_id.clone(),
                    input_shapes,
                    output_shape: None,
                    wall_ms,
                    status: StepStatus::Failed,
                    error: Some(format!("{}: {error}", error.name())),
                });
                return Err(EngineError::StepFailed {
                    index: k,
                    primitive_id: step.primitive_id.clone(),
                    error,
                    trace,
                });
            }
        }
    }
    let DataReference::StepOutput(k) = p.outputs[0] else {
        unreachable!("validated output")
    };
    Ok(Execution {
        output: outputs.swap_remove(k),
        scores,
        trace,
    })
}

/// Labels of an execution laid out over the input dataset's rows; rows the
/// pipeline dropped (for example duplicate timestamps) count as normal.
pub fn labels_by_origin(output: &Value, n: usize) -> Result<Vec<u8>, EngineError> {
    let Value::Labels(labels) = output else {
        return Err(EngineError::OutputNotLabels(output.kind()));
    };
    let mut out = vec![0u8; n];
    for (&origin, &l) in labels.series.origins.iter().zip(&labels.values) {
        out[origin] = l;
    }
    Ok(out)
}

/// Scores of an execution laid out over the input dataset's rows (`NaN` where absent).
pub fn scores_by_origin(scores: &AnomalyScores, n: usize) -> Vec<f64> {
    let mut out = vec![f64::NAN; n];
    for (&origin, &s) in scores.series.origins.iter().zip(&scores.values) {
        out[origin] = s;
    }
    out
}

/// Per-fold reports and their aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub primary_metric: Metric,
    pub folds: Vec<ScoreReport>,
    /// Unweighted mean of the primary metric over folds.
    pub aggregate: f64,
}

impl Evaluation {
    /// Fold-mean of every metric.
    pub fn mean_scores(&self) -> [f64; 4] {
        let n = self.folds.len() as f64;
        let mut m = [0.0; 4];
        for f in &self.folds {
            for (slot, metric) in m.iter_mut().zip(Metric::ALL) {
                *slot += f.metric(metric);
            }
        }
        m.map(|v| v / n)
    }

    pub fn total_counts(&self) -> Counts {
        self.folds.iter().fold(Counts::default(), |a, f| a + f.counts)
    }

    /// `{primary_metric, aggregate, scores, counts, folds}`; `scores` are fold
    /// means and `counts` are summed over folds.
    pub fn to_json(&self) -> Json {
        let [precision, recall, f1, f1_pa] = self.mean_scores();
        json!({
            "primary_metric": self.primary_metric,
            "aggregate": self.aggregate,
            "scores": {"precision": precision, "recall": recall, "f1": f1, "f1_pa": f1_pa},
            "counts": self.total_counts(),
            "folds": self.folds.iter().map(ScoreReport::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Scores `p` on `ds` under `scheme`. Folds run concurrently and are merged
/// in fold order.
pub fn evaluate_pipeline(
    ds: &TimeSeriesDataset,
    p: &PipelineDescription,
    metric: Metric,
    scheme: &SplitScheme,
    seed: u64,
) -> Result<Evaluation, EngineError> {
    let truth = ds.labels().ok_or(EngineError::MissingGroundTruth)?;
    let diagnostics = validate(p);
    if !diagnostics.is_empty() {
        return Err(EngineError::Invalid(diagnostics));
    }
    let plan = make_splits(ds.len(), scheme, seed)?;
    let folds = plan
        .folds
        .par_iter()
        .map(|fold| {
            let mask = TrainMask::from_indices(ds.len(), &fold.train);
            let exec = execute_with_mask(p, ds, Some(&mask))?;
            let predicted = labels_by_origin(&exec.output, ds.len())?;
            let pick = |v: &[u8]| fold.test.iter().map(|&i| v[i]).collect::<Vec<u8>>();
            score(&pick(&predicted), &pick(truth), metric)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let aggregate = folds.iter().map(|f| f.metric(metric)).sum::<f64>() / folds.len() as f64;
    Ok(Evaluation {
        primary_metric: metric,
        folds,
        aggregate,
    })
}

/// Evaluation plus one execution over all rows, for reporting.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub evaluation: Evaluation,
    pub execution: Execution,
    /// Scores of the last scoring step over the dataset's rows.
    pub point_scores: Option<Vec<f64>>,
}

impl RunReport {
    /// Evaluation JSON with the full-data trace under `steps`.
    pub fn to_json(&self) -> Json {
        let mut j = self.evaluation.to_json();
        j["steps"] = self.execution.trace.to_json();
        j
    }
}

pub fn run_pipeline(
    ds: &TimeSeriesDataset,
    p: &PipelineDescription,
    metric: Metric,
    scheme: &SplitScheme,
    seed: u64,
) -> Result<RunReport, EngineError> {
    let evaluation = evaluate_pipeline(ds, p, metric, scheme, seed)?;
    let execution = execute(p, ds)?;
    let point_scores = execution.scores.as_ref().map(|s| scores_by_origin(s, ds.len()));
    Ok(RunReport {
        evaluation,
        execution,
        point_scores,
    })
}
