// SPDX-License-Identifier: Apache-2.0

//! Time-series outlier detection built from composable primitives.
//!
//! A *primitive* is a function with a declared hyperparameter schema. Primitives
//! are chained into a *pipeline*: a forward-only DAG of steps written in a small
//! JSON language (`tsods-1.0`). The [`engine`] validates and executes pipelines
//! and scores them against ground truth with time-ordered k-fold or holdout
//! splits, and the [`search`] module looks for the best pipeline in a finite
//! space of candidates.
//!
//! ```no_run
//! use tsods_core::{dataset, engine, pipeline};
//!
//! let csv = std::fs::read_to_string("data.csv").unwrap();
//! let ds = dataset::generate_dataset(&csv, Some(2), None).unwrap();
//! let p = pipeline::parse_pipeline(&std::fs::read_to_string("p.json").unwrap()).unwrap();
//! let eval = engine::evaluate_pipeline(&ds, &p, engine::Metric::F1, &engine::SplitScheme::KFold(5), 0)
//!     .unwrap();
//! println!("{}", eval.aggregate);
//! ```

pub mod dataset;
pub mod detection;
pub mod engine;
pub mod features;
pub mod frame;
pub mod hyperparams;
pub mod pipeline;
pub mod processing;
pub mod registry;
pub mod search;
pub mod synthetic;

mod error;

pub use dataset::{generate_dataset, TimeSeriesDataset};
pub use error::{DatasetError, PipelineError, PrimitiveError};
pub use pipeline::{parse_pipeline, serialize_pipeline, DataReference, PipelineDescription};
pub use registry::{registry, registry_list, Family, PrimitiveDescriptor};
