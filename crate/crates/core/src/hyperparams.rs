// SPDX-License-Identifier: Apache-2.0

//! Hyperparameter values and the schemas primitives declare for them.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::{json, Value as Json};

use crate::detection::rules::Rule;
use crate::error::PrimitiveError;

/// A concrete hyperparameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum HyperparamValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Enum(String),
    FloatList(Vec<f64>),
    /// Ordered rule list of the reinforcement primitive.
    Rules(Vec<Rule>),
}

impl HyperparamValue {
    pub fn to_json(&self) -> Json {
        match self {
            Self::Int(v) => json!(v),
            Self::Float(v) => json!(v),
            Self::Bool(v) => json!(v),
            Self::Enum(v) => json!(v),
            Self::FloatList(v) => json!(v),
            Self::Rules(rules) => Json::Array(rules.iter().map(Rule::to_json).collect()),
        }
    }
}

impl Serialize for HyperparamValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Type and admissible values of one hyperparameter.
#[derive(Debug, Clone, PartialEq)]
pub enum HyperparamKind {
    Int { min: Option<i64>, max: Option<i64> },
    Float { min: Option<f64>, max: Option<f64> },
    Bool,
    Enum { options: Vec<&'static str> },
    FloatList { min: Option<f64>, max: Option<f64> },
    Rules,
}

impl HyperparamKind {
    fn type_name(&self) -> &'static str {
        match self {
            Self::Int { .. } => "int",
            Self::Float { .. } => "float",
            Self::Bool => "bool",
            Self::Enum { .. } => "enum",
            Self::FloatList { .. } => "float_list",
            Self::Rules => "rules",
        }
    }

    /// Reads a JSON value as this kind. Type errors and range violations are
    /// both reported as a message.
    pub fn parse(&self, v: &Json) -> Result<HyperparamValue, String> {
        let value = match self {
            Self::Int { .. } => match v.as_i64() {
                Some(i) => HyperparamValue::Int(i),
                None => match v.as_f64() {
                    Some(f) if f.fract() == 0.0 && f.abs() < 9.0e15 => HyperparamValue::Int(f as i64),
                    _ => return Err(format!("expected integer, got {v}")),
                },
            },
            Self::Float { .. } => match v.as_f64() {
                Some(f) => HyperparamValue::Float(f),
                None => return Err(format!("expected number, got {v}")),
            },
            Self::Bool => match v.as_bool() {
                Some(b) => HyperparamValue::Bool(b),
                None => return Err(format!("expected boolean, got {v}")),
            },
            Self::Enum { .. } => match v.as_str() {
                Some(s) => HyperparamValue::Enum(s.to_string()),
                None => return Err(format!("expected string, got {v}")),
            },
            Self::FloatList { .. } => match v.as_array() {
                Some(items) => HyperparamValue::FloatList(
                    items
                        .iter()
                        .map(|x| x.as_f64().ok_or_else(|| format!("expected number, got {x}")))
                        .collect::<Result<_, _>>()?,
                ),
                None => return Err(format!("expected list of numbers, got {v}")),
            },
            Self::Rules => match v.as_array() {
                Some(items) => {
                    HyperparamValue::Rules(items.iter().map(Rule::from_json).collect::<Result<_, _>>()?)
                }
                None => return Err(format!("expected list of rules, got {v}")),
            },
        };
        self.check(&value)?;
        Ok(value)
    }

    /// Checks that `value` has this kind and lies in range.
    pub fn check(&self, value: &HyperparamValue) -> Result<(), String> {
        fn in_range<T: PartialOrd + std::fmt::Display + Copy>(
            v: T,
            min: Option<T>,
            max: Option<T>,
        ) -> Result<(), String> {
            if let Some(lo) = min {
                if v.partial_cmp(&lo).is_none_or(|o| o.is_lt()) {
                    return Err(format!("{v} is below the minimum {lo}"));
                }
            }
            if let Some(hi) = max {
                if v.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
                    return Err(format!("{v} is above the maximum {hi}"));
                }
            }
            Ok(())
        }
        match (self, value) {
            (Self::Int { min, max }, HyperparamValue::Int(v)) => in_range(*v, *min, *max),
            (Self::Float { min, max }, HyperparamValue::Float(v)) => {
                if !v.is_finite() {
                    return Err(format!("{v} is not finite"));
                }
                in_range(*v, *min, *max)
            }
            (Self::Bool, HyperparamValue::Bool(_)) => Ok(()),
            (Self::Enum { options }, HyperparamValue::Enum(v)) => {
                if options.iter().any(|o| o == v) {
                    Ok(())
                } else {
                    Err(format!("{v:?} is not one of {options:?}"))
                }
            }
            (Self::FloatList { min, max }, HyperparamValue::FloatList(vs)) => {
                for v in vs {
                    if !v.is_finite() {
                        return Err(format!("{v} is not finite"));
                    }
                    in_range(*v, *min, *max)?;
                }
                Ok(())
            }
            (Self::Rules, HyperparamValue::Rules(rules)) => rules.iter().try_for_each(Rule::check),
            (kind, v) => Err(format!("expected {}, got {}", kind.type_name(), v.to_json())),
        }
    }
}

/// Declared hyperparameter of a primitive.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparamSpec {
    pub name: &'static str,
    pub kind: HyperparamKind,
    pub default: HyperparamValue,
    pub description: &'static str,
}

impl Serialize for HyperparamSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        map.serialize_entry("name", self.name)?;
        map.serialize_entry("type", self.kind.type_name())?;
        map.serialize_entry("default", &self.default)?;
        match &self.kind {
            HyperparamKind::Int { min, max } => {
                map.serialize_entry("min", min)?;
                map.serialize_entry("max", max)?;
            }
            HyperparamKind::Float { min, max } | HyperparamKind::FloatList { min, max } => {
                map.serialize_entry("min", min)?;
                map.serialize_entry("max", max)?;
            }
            HyperparamKind::Enum { options } => map.serialize_entry("options", options)?,
            HyperparamKind::Bool | HyperparamKind::Rules => {}
        }
        map.serialize_entry("description", self.description)?;
        map.end()
    }
}

/// Resolved hyperparameters of one step, keyed by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Hyperparams(pub BTreeMap<String, HyperparamValue>);

impl Hyperparams {
    fn get(&self, name: &str) -> Result<&HyperparamValue, PrimitiveError> {
        self.0.get(name).ok_or_else(|| PrimitiveError::BadHyperparam {
            name: name.to_string(),
            reason: "missing".into(),
        })
    }

    fn mismatch(name: &str, expected: &str) -> PrimitiveError {
        PrimitiveError::BadHyperparam {
            name: name.to_string(),
            reason: format!("expected {expected}"),
        }
    }

    pub fn int(&self, name: &str) -> Result<i64, PrimitiveError> {
        match self.get(name)? {
            HyperparamValue::Int(v) => Ok(*v),
            _ => Err(Self::mismatch(name, "int")),
        }
    }

    /// Integer hyperparameter that must be non-negative.
    pub fn usize(&self, name: &str) -> Result<usize, PrimitiveError> {
        let v = self.int(name)?;
        usize::try_from(v).map_err(|_| PrimitiveError::BadHyperparam {
            name: name.to_string(),
            reason: format!("{v} is negative"),
        })
    }

    pub fn float(&self, name: &str) -> Result<f64, PrimitiveError> {
        match self.get(name)? {
            HyperparamValue::Float(v) => Ok(*v),
            HyperparamValue::Int(v) => Ok(*v as f64),
            _ => Err(Self::mismatch(name, "float")),
        }
    }

    pub fn bool(&self, name: &str) -> Result<bool, PrimitiveError> {
        match self.get(name)? {
            HyperparamValue::Bool(v) => Ok(*v),
            _ => Err(Self::mismatch(name, "bool")),
        }
    }

    pub fn enumeration(&self, name: &str) -> Result<&str, PrimitiveError> {
        match self.get(name)? {
            HyperparamValue::Enum(v) => Ok(v),
            _ => Err(Self::mismatch(name, "enum")),
        }
    }

    pub fn float_list(&self, name: &str) -> Result<&[f64], PrimitiveError> {
        match self.get(name)? {
            HyperparamValue::FloatList(v) => Ok(v),
            _ => Err(Self::mismatch(name, "float list")),
        }
    }

    pub fn rules(&self, name: &str) -> Result<&[Rule], PrimitiveError> {
        match self.get(name)? {
            HyperparamValue::Rules(v) => Ok(v),
            _ => Err(Self::mismatch(name, "rules")),
        }
    }
}
