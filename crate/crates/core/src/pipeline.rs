// SPDX-License-Identifier: Apache-2.0

//! The `tsods-1.0` pipeline description language.
//!
//! ```json
//! {
//!   "id": "5a1f0d3c-...",
//!   "inputs": ["dataset"],
//!   "outputs": ["steps.1.produce"],
//!   "schema_version": "tsods-1.0",
//!   "steps": [
//!     {"arguments": {"inputs": "inputs.0"}, "hyperparams": {}, "primitive_id": "tods.detection.zscore"},
//!     {"arguments": {"inputs": "steps.0.produce"}, "hyperparams": {"contamination": 0.01},
//!      "primitive_id": "tods.detection.threshold"}
//!   ]
//! }
//! ```
//!
//! References may only point backwards, so every parsed pipeline is a DAG.
//! Parsing fills in default hyperparameters, and serialization is canonical:
//! sorted keys, shortest round-trip floats, two-space indentation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value as Json};
use uuid::Uuid;

use crate::error::PipelineError;
use crate::frame::ValueKind;
use crate::hyperparams::HyperparamValue;
use crate::registry::registry;

pub const SCHEMA_VERSION: &str = "tsods-1.0";
pub const DATASET_INPUT: &str = "dataset";

/// Edge of the pipeline DAG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataReference {
    /// `inputs.0`
    PipelineInput,
    /// `steps.<k>.produce`
    StepOutput(usize),
}

impl fmt::Display for DataReference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PipelineInput => f.write_str("inputs.0"),
            Self::StepOutput(k) => write!(f, "steps.{k}.produce"),
        }
    }
}

impl FromStr for DataReference {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s == "inputs.0" {
            return Ok(Self::PipelineInput);
        }
        let k = s
            .strip_prefix("steps.")
            .and_then(|rest| rest.strip_suffix(".produce"))
            .ok_or(())?;
        if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) || (k.len() > 1 && k.starts_with('0')) {
            return Err(());
        }
        k.parse().map(Self::StepOutput).map_err(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineStep {
    pub primitive_id: String,
    pub hyperparams: BTreeMap<String, HyperparamValue>,
    pub arguments: BTreeMap<String, DataReference>,
}

impl PipelineStep {
    /// Step with all hyperparameters at their defaults and the given arguments.
    pub fn new(primitive_id: &str, arguments: &[(&str, DataReference)]) -> Self {
        let hyperparams = registry()
            .descriptor(primitive_id)
            .map(|d| {
                d.hyperparam_schema
                    .iter()
                    .map(|h| (h.name.to_string(), h.default.clone()))
                    .collect()
            })
            .unwrap_or_default();
        Self {
            primitive_id: primitive_id.to_string(),
            hyperparams,
            arguments: arguments.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn with(mut self, name: &str, value: HyperparamValue) -> Self {
        self.hyperparams.insert(name.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineDescription {
    pub id: String,
    pub schema_version: String,
    pub inputs: Vec<String>,
    pub steps: Vec<PipelineStep>,
    pub outputs: Vec<DataReference>,
}

impl PipelineDescription {
    /// Chain pipeline: step `k` consumes step `k - 1` (the first step the
    /// dataset); the output is the last step. Steps that take a `data`
    /// argument are wired to the dataset.
    pub fn chain(id: impl Into<String>, steps: Vec<PipelineStep>) -> Self {
        let steps: Vec<PipelineStep> = steps
            .into_iter()
            .enumerate()
            .map(|(k, mut s)| {
                let prev = if k == 0 {
                    DataReference::PipelineInput
                } else {
                    DataReference::StepOutput(k - 1)
                };
                s.arguments.entry("inputs".into()).or_insert(prev);
                if let Some(d) = registry().descriptor(&s.primitive_id) {
                    if d.argument("data").is_some() {
                        s.arguments
                            .entry("data".into())
                            .or_insert(DataReference::PipelineInput);
                    }
                }
                s
            })
            .collect();
        let last = steps.len().saturating_sub(1);
        Self {
            id: id.into(),
            schema_version: SCHEMA_VERSION.into(),
            inputs: vec![DATASET_INPUT.into()],
            steps,
            outputs: vec![DataReference::StepOutput(last)],
        }
    }

    pub fn to_json(&self) -> Json {
        let steps: Vec<Json> = self
            .steps
            .iter()
            .map(|s| {
                let hyperparams: Map<String, Json> = s
                    .hyperparams
                    .iter()
                    .map(|(k, v)| (k.clone(), v.to_json()))
                    .collect();
                let arguments: Map<String, Json> = s
                    .arguments
                    .iter()
                    .map(|(k, v)| (k.clone(), Json::String(v.to_string())))
                    .collect();
                json!({
                    "primitive_id": s.primitive_id,
                    "hyperparams": hyperparams,
                    "arguments": arguments,
                })
            })
            .collect();
        json!({
            "id": self.id,
            "schema_version": self.schema_version,
            "inputs": self.inputs,
            "steps": steps,
            "outputs": self.outputs.iter().map(ToString::to_string).collect::<Vec<_>>(),
        })
    }
}

/// Id of [`default_pipeline`].
pub const DEFAULT_PIPELINE_ID: &str = "6f1c2a3e-0d4b-4c5e-9a7f-3b2d1e0c9a81";

/// timestamp_validation, standardize, per-point window statistics, isolation
/// forest, then a 0.5% contamination threshold.
pub fn default_pipeline() -> PipelineDescription {
    PipelineDescription::chain(
        DEFAULT_PIPELINE_ID,
        vec![
            PipelineStep::new("tods.data.timestamp_validation", &[]),
            PipelineStep::new("tods.timeseries.standardize", &[]),
            PipelineStep::new("tods.feature.window_statistics", &[]).with("window", HyperparamValue::Int(1)),
            PipelineStep::new("tods.detection.iforest", &[]),
            PipelineStep::new("tods.detection.threshold", &[])
                .with("contamination", HyperparamValue::Float(0.005)),
        ],
    )
}

/// Canonical JSON text of a pipeline.
pub fn serialize_pipeline(p: &PipelineDescription) -> String {
    // serde_json's Map is a BTreeMap, so keys come out sorted.
    let mut text = serde_json::to_string_pretty(&p.to_json()).expect("json value serializes");
    text.push('\n');
    text
}

fn malformed(msg: impl Into<String>) -> PipelineError {
    PipelineError::MalformedJson(msg.into())
}

fn check_fields(obj: &Map<String, Json>, allowed: &[&str], what: &str) -> Result<(), PipelineError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(malformed(format!("unknown field {k:?} in {what}"))),
        None => Ok(()),
    }
}

/// Parses and validates pipeline JSON, materializing default hyperparameters.
pub fn parse_pipeline(json_text: &str) -> Result<PipelineDescription, PipelineError> {
    let root: Json = serde_json::from_str(json_text).map_err(|e| malformed(e.to_string()))?;
    parse_pipeline_value(&root)
}

pub fn parse_pipeline_value(root: &Json) -> Result<PipelineDescription, PipelineError> {
    let obj = root
        .as_object()
        .ok_or_else(|| malformed("pipeline must be an object"))?;
    check_fields(
        obj,
        &["id", "schema_version", "inputs", "steps", "outputs"],
        "pipeline",
    )?;

    let version = obj
        .get("schema_version")
        .and_then(Json::as_str)
        .ok_or_else(|| malformed("missing schema_version"))?;
    if version != SCHEMA_VERSION {
        return Err(PipelineError::UnknownSchemaVersion(version.to_string()));
    }

    let id = obj
        .get("id")
        .and_then(Json::as_str)
        .ok_or_else(|| malformed("missing id"))?;
    let id = Uuid::parse_str(id)
        .map_err(|e| malformed(format!("id {id:?} is not a UUID: {e}")))?
        .hyphenated()
        .to_string();

    let inputs: Vec<String> = obj
        .get("inputs")
        .and_then(Json::as_array)
        .ok_or_else(|| malformed("missing inputs"))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| malformed("input names are strings"))
        })
        .collect::<Result<_, _>>()?;
    if inputs != [DATASET_INPUT] {
        return Err(malformed(format!(
            "inputs must be exactly [\"{DATASET_INPUT}\"], got {inputs:?}"
        )));
    }

    let raw_steps = obj
        .get("steps")
        .and_then(Json::as_array)
        .ok_or_else(|| malformed("missing steps"))?;
    if raw_steps.is_empty() {
        return Err(malformed("pipeline has no steps"));
    }
    let steps = raw_steps
        .iter()
        .enumerate()
        .map(|(k, s)| parse_step(k, s))
        .collect::<Result<Vec<_>, _>>()?;

    let outputs = obj
        .get("outputs")
        .and_then(Json::as_array)
        .ok_or_else(|| malformed("missing outputs"))?;
    let [output] = outputs.as_slice() else {
        return Err(PipelineError::BadOutputs(format!(
            "expected exactly one output, got {}",
            outputs.len()
        )));
    };
    let output_text = output
        .as_str()
        .ok_or_else(|| PipelineError::BadOutputs("output must be a string".into()))?;
    let output: DataReference = output_text
        .parse()
        .map_err(|_| PipelineError::BadOutputs(format!("bad reference {output_text:?}")))?;
    let DataReference::StepOutput(k) = output else {
        return Err(PipelineError::BadOutputs("output must reference a step".into()));
    };
    let Some(step) = steps.get(k) else {
        return Err(PipelineError::BadOutputs(format!("no step {k}")));
    };
    let produces = registry().descriptor(&step.primitive_id).map(|d| d.produces);
    if !matches!(produces, Some(ValueKind::Scores | ValueKind::Labels)) {
        return Err(PipelineError::BadOutputs(format!(
            "output step {k} ({}) does not produce scores or labels",
            step.primitive_id
        )));
    }

    Ok(PipelineDescription {
        id,
        schema_version: SCHEMA_VERSION.into(),
        inputs,
        steps,
        outputs: vec![output],
    })
}

fn parse_step(k: usize, raw: &Json) -> Result<PipelineStep, PipelineError> {
    let obj = raw
        .as_object()
        .ok_or_else(|| malformed(format!("step {k} must be an object")))?;
    check_fields(obj, &["primitive_id", "hyperparams", "arguments"], "step")?;
    let primitive_id = obj
        .get("primitive_id")
        .and_then(Json::as_str)
        .ok_or_else(|| malformed(format!("step {k} has no primitive_id")))?;
    let descriptor = registry()
        .descriptor(primitive_id)
        .ok_or_else(|| PipelineError::UnknownPrimitive(primitive_id.to_string()))?;

    let empty = Map::new();
    let given = match obj.get("hyperparams") {
        None => &empty,
        Some(v) => v
            .as_object()
            .ok_or_else(|| malformed(format!("step {k} hyperparams must be an object")))?,
    };
    let mut hyperparams = BTreeMap::new();
    for (name, v) in given {
        let spec = descriptor
            .hyperparam(name)
            .ok_or_else(|| PipelineError::UnknownHyperparam {
                step: k,
                name: name.clone(),
            })?;
        let value = spec
            .kind
            .parse(v)
            .map_err(|reason| PipelineError::HyperparamOutOfRange {
                step: k,
                name: name.clone(),
                reason,
            })?;
        hyperparams.insert(name.clone(), value);
    }
    for spec in &descriptor.hyperparam_schema {
        hyperparams
            .entry(spec.name.to_string())
            .or_insert_with(|| spec.default.clone());
    }

    let raw_args =
        obj.get("arguments")
            .and_then(Json::as_object)
            .ok_or_else(|| PipelineError::BadArguments {
                step: k,
                reason: "missing arguments object".into(),
            })?;
    let mut arguments = BTreeMap::new();
    for (name, v) in raw_args {
        if descriptor.argument(name).is_none() {
            return Err(PipelineError::BadArguments {
                step: k,
                reason: format!("{} takes no argument {name:?}", descriptor.id),
            });
        }
        let text = v.as_str().ok_or_else(|| PipelineError::BadReference {
            step: k,
            reference: v.to_string(),
        })?;
        let reference: DataReference = text.parse().map_err(|_| PipelineError::BadReference {
            step: k,
            reference: text.to_string(),
        })?;
        if let DataReference::StepOutput(j) = reference {
            if j >= k {
                return Err(PipelineError::ForwardReference {
                    step: k,
                    reference: text.to_string(),
                });
            }
        }
        arguments.insert(name.clone(), reference);
    }
    if let Some(missing) = descriptor
        .arguments
        .iter()
        .find(|a| !arguments.contains_key(a.name))
    {
        return Err(PipelineError::BadArguments {
            step: k,
            reason: format!("missing argument {:?}", missing.name),
        });
    }

    Ok(PipelineStep {
        primitive_id: primitive_id.to_string(),
        hyperparams,
        arguments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ID: &str = "00000000-0000-4000-8000-000000000001";

    fn four_step() -> String {
        json!({
            "id": ID,
            "schema_version": "tsods-1.0",
            "inputs": ["dataset"],
            "steps": [
                {"primitive_id": "tods.data.timestamp_validation", "arguments": {"inputs": "inputs.0"}},
                {"primitive_id": "tods.timeseries.standardize", "arguments": {"inputs": "steps.0.produce"}},
                {"primitive_id": "tods.feature.window_statistics", "hyperparams": {"window": 5},
                 "arguments": {"inputs": "steps.1.produce"}},
                {"primitive_id": "tods.detection.iforest", "arguments": {"inputs": "steps.2.produce"}}
            ],
            "outputs": ["steps.3.produce"]
        })
        .to_string()
    }

    #[test]
    fn four_step_chain_parses() {
        let p = parse_pipeline(&four_step()).unwrap();
        assert_eq!(p.steps.len(), 4);
        assert_eq!(p.outputs, vec![DataReference::StepOutput(3)]);
        // defaults are materialized
        assert_eq!(p.steps[2].hyperparams["stride"], HyperparamValue::Int(1));
        assert_eq!(p.steps[3].hyperparams["n_trees"], HyperparamValue::Int(100));
    }

    #[test]
    fn round_trip_and_canonical() {
        let p = parse_pipeline(&four_step()).unwrap();
        let text = serialize_pipeline(&p);
        let q = parse_pipeline(&text).unwrap();
        assert_eq!(p, q);
        assert_eq!(serialize_pipeline(&q), text);
        assert!(text.contains("\"window\": 5"));
        assert!(text.contains("\"stride\": 1"));
    }

    fn with_step(step: Json, outputs: &str) -> String {
        json!({
            "id": ID, "schema_version": "tsods-1.0", "inputs": ["dataset"],
            "steps": [
                {"primitive_id": "tods.detection.zscore", "arguments": {"inputs": "inputs.0"}},
                step
            ],
            "outputs": [outputs]
        })
        .to_string()
    }

    #[test]
    fn forward_reference() {
        let text = with_step(
            json!({"primitive_id": "tods.detection.threshold", "arguments": {"inputs": "steps.3.produce"}}),
            "steps.1.produce",
        );
        assert_eq!(
            parse_pipeline(&text).unwrap_err(),
            PipelineError::ForwardReference {
                step: 1,
                reference: "steps.3.produce".into()
            }
        );
        let text = with_step(
            json!({"primitive_id": "tods.detection.threshold", "arguments": {"inputs": "steps.1.produce"}}),
            "steps.1.produce",
        );
        assert_eq!(parse_pipeline(&text).unwrap_err().name(), "ForwardReference");
    }

    #[test]
    fn unknown_primitive_and_hyperparams() {
        let text = with_step(
            json!({"primitive_id": "tods.nope", "arguments": {"inputs": "steps.0.produce"}}),
            "steps.1.produce",
        );
        assert_eq!(
            parse_pipeline(&text).unwrap_err(),
            PipelineError::UnknownPrimitive("tods.nope".into())
        );
        let text = with_step(
            json!({"primitive_id": "tods.detection.threshold", "hyperparams": {"alpha": 1},
                   "arguments": {"inputs": "steps.0.produce"}}),
            "steps.1.produce",
        );
        assert_eq!(parse_pipeline(&text).unwrap_err().name(), "UnknownHyperparam");
        let text = with_step(
            json!({"primitive_id": "tods.detection.threshold", "hyperparams": {"contamination": 2.0},
                   "arguments": {"inputs": "steps.0.produce"}}),
            "steps.1.produce",
        );
        assert_eq!(parse_pipeline(&text).unwrap_err().name(), "HyperparamOutOfRange");
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_pipeline("{").unwrap_err().name(), "MalformedJson");
        let text = four_step().replace("tsods-1.0", "tsods-9");
        assert_eq!(
            parse_pipeline(&text).unwrap_err(),
            PipelineError::UnknownSchemaVersion("tsods-9".into())
        );
        let text = four_step().replace("\"steps.3.produce\"]", "\"steps.1.produce\"]");
        assert_eq!(parse_pipeline(&text).unwrap_err().name(), "BadOutputs");
        let text = four_step().replace("steps.2.produce", "step.2");
        assert_eq!(parse_pipeline(&text).unwrap_err().name(), "BadReference");
    }

    #[test]
    fn reference_syntax() {
        assert_eq!("inputs.0".parse(), Ok(DataReference::PipelineInput));
        assert_eq!("steps.12.produce".parse(), Ok(DataReference::StepOutput(12)));
        for bad in [
            "inputs.1",
            "steps..produce",
            "steps.01.produce",
            "steps.-1.produce",
            "steps.1",
        ] {
            assert!(bad.parse::<DataReference>().is_err(), "{bad}");
        }
    }

    #[test]
    fn chain_builder_wires_data_argument() {
        let p = PipelineDescription::chain(
            ID,
            vec![
                PipelineStep::new("tods.detection.zscore", &[]),
                PipelineStep::new("tods.detection.threshold", &[]),
                PipelineStep::new("tods.reinforcement.rule_based_filter", &[]),
            ],
        );
        assert_eq!(p.steps[2].arguments["data"], DataReference::PipelineInput);
        assert_eq!(p.steps[2].arguments["inputs"], DataReference::StepOutput(1));
        assert_eq!(parse_pipeline(&serialize_pipeline(&p)).unwrap(), p);
    }
}
