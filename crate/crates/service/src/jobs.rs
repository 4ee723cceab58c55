// SPDX-License-Identifier: Apache-2.0

//! Job records and the FIFO worker pool.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use tokio::sync::mpsc;
use tsods_core::engine::{run_pipeline, EngineError, Metric, SplitScheme};
use tsods_core::search::{search, SearchConfig, SearchSpace};
use tsods_core::{PipelineDescription, TimeSeriesDataset};
use uuid::Uuid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Run,
    Search,
}

/// `queued -> running -> succeeded | failed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Queued,
    Running,
    Succeeded,
    Failed,
}

impl JobStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, Self::Succeeded | Self::Failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobError {
    pub name: String,
    pub message: String,
    /// Index of the failing step, for run jobs that failed mid-pipeline.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_step: Option<usize>,
    /// Execution trace up to and including the failing step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Json>,
}

impl From<EngineError> for JobError {
    fn from(e: EngineError) -> Self {
        let (failed_step, steps) = match &e {
            EngineError::StepFailed { index, trace, .. } => (Some(*index), Some(trace.to_json())),
            _ => (None, None),
        };
        Self {
            name: e.name().to_string(),
            message: e.to_string(),
            failed_step,
            steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: Uuid,
    pub kind: JobKind,
    pub status: JobStatus,
    pub dataset_id: Uuid,
    /// Milliseconds since the Unix epoch.
    pub submitted_at: u64,
    pub started_at: Option<u64>,
    pub finished_at: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Json>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<JobError>,
}

/// Per-point scores kept for plotting; `None` where no score exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointScores {
    pub timestamps: Vec<i64>,
    pub scores: Vec<Option<f64>>,
    pub truth: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobEntry {
    pub job: Job,
    pub point_scores: Option<PointScores>,
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// Synchronized job map. Status only moves forward; terminal jobs are frozen.
#[derive(Default)]
pub struct JobStore {
    jobs: Mutex<HashMap<Uuid, JobEntry>>,
}

impl JobStore {
    pub fn insert(&self, entry: JobEntry) {
        self.jobs.lock().unwrap().insert(entry.job.id, entry);
    }

    pub fn get(&self, id: &Uuid) -> Option<JobEntry> {
        self.jobs.lock().unwrap().get(id).cloned()
    }

    pub fn all(&self) -> Vec<JobEntry> {
        let mut v: Vec<JobEntry> = self.jobs.lock().unwrap().values().cloned().collect();
        v.sort_by_key(|e| (e.job.submitted_at, e.job.id));
        v
    }

    fn mark_running(&self, id: &Uuid) {
        if let Some(e) = self.jobs.lock().unwrap().get_mut(id) {
            if e.job.status == JobStatus::Queued {
                e.job.status = JobStatus::Running;
                e.job.started_at = Some(now_ms());
            }
        }
    }

    fn finish(&self, id: &Uuid, outcome: Result<Outcome, JobError>) {
        let mut jobs = self.jobs.lock().unwrap();
        let Some(e) = jobs.get_mut(id) else { return };
        if e.job.status.is_terminal() {
            return;
        }
        e.job.finished_at = Some(now_ms());
        match outcome {
            Ok(out) => {
                e.job.status = JobStatus::Succeeded;
                e.job.result = Some(out.result);
                e.point_scores = out.point_scores;
            }
            Err(err) => {
                e.job.status = JobStatus::Failed;
                e.job.error = Some(err);
            }
        }
    }
}

pub enum Work {
    Run {
        dataset: Arc<TimeSeriesDataset>,
        pipeline: PipelineDescription,
        metric: Metric,
        scheme: SplitScheme,
        seed: u64,
    },
    Search {
        dataset: Arc<TimeSeriesDataset>,
        space: SearchSpace,
        config: SearchConfig,
    },
}

struct Outcome {
    result: Json,
    point_scores: Option<PointScores>,
}

impl Work {
    fn execute(self) -> Result<Outcome, JobError> {
        match self {
            Work::Run {
                dataset,
                pipeline,
                metric,
                scheme,
                seed,
            } => {
                let report = run_pipeline(&dataset, &pipeline, metric, &scheme, seed)?;
                let point_scores = report.point_scores.as_ref().map(|s| PointScores {
                    timestamps: dataset.timestamps().to_vec(),
                    scores: s.iter().map(|v| v.is_finite().then_some(*v)).collect(),
                    truth: dataset.labels().map(<[u8]>::to_vec),
                });
                Ok(Outcome {
                    result: report.to_json(),
                    point_scores,
                })
            }
            Work::Search {
                dataset,
                space,
                config,
            } => {
                let outcome = search(&dataset, &space, &config).map_err(|e| JobError {
                    name: e.name().to_string(),
                    message: e.to_string(),
                    failed_step: None,
                    steps: None,
                })?;
                let mut result = outcome.to_json();
                result["best_pipeline"] = if outcome.best.is_ok() {
                    outcome.best.pipeline.to_json()
                } else {
                    Json::Null
                };
                result["seed"] = json!(config.seed);
                Ok(Outcome {
                    result,
                    point_scores: None,
                })
            }
        }
    }
}

/// Queue feeding a fixed number of workers in submission order.
pub struct Pool {
    tx: mpsc::UnboundedSender<(Uuid, Work)>,
}

impl Pool {
    /// Starts `workers` workers on the current tokio runtime.
    pub fn start(workers: usize, store: Arc<JobStore>) -> Self {
        let (tx, rx) = mpsc::unbounded_channel::<(Uuid, Work)>();
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        for worker in 0..workers {
            let rx = Arc::clone(&rx);
            let store = Arc::clone(&store);
            tokio::spawn(async move {
                loop {
                    let next = rx.lock().await.recv().await;
                    let Some((id, work)) = next else { break };
                    store.mark_running(&id);
                    tracing::info!(%id, worker, "job started");
                    let outcome = tokio::task::spawn_blocking(move || work.execute())
                        .await
                        .unwrap_or_else(|e| {
                            Err(JobError {
                                name: "Panicked".into(),
                                message: e.to_string(),
                                failed_step: None,
                                steps: None,
                            })
                        });
                    tracing::info!(%id, ok = outcome.is_ok(), "job finished");
                    store.finish(&id, outcome);
                }
            });
        }
        Self { tx }
    }

    pub fn submit(&self, id: Uuid, work: Work) {
        // Workers live as long as the runtime, so the receiver outlives every sender.
        let _ = self.tx.send((id, work));
    }
}
