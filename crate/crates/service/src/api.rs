// SPDX-License-Identifier: Apache-2.0

//! Routes and handlers.

// Handlers short-circuit with a ready `Response` as the error value.
#![allow(clippy::result_large_err)]

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as JsonValue};
use tsods_core::engine::{validate, Diagnostic, Metric, SplitScheme};
use tsods_core::pipeline::parse_pipeline_value;
use tsods_core::search::{SearchConfig, SearchSpace, Strategy};
use tsods_core::{generate_dataset, registry, Family, PipelineDescription, TimeSeriesDataset};
use uuid::Uuid;

use crate::jobs::{now_ms, Job, JobEntry, JobKind, JobStatus, JobStore, Pool, Work};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_BUDGET: u64 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetHandle {
    pub id: Uuid,
    pub name: String,
    pub n: usize,
    pub features: Vec<String>,
    pub has_labels: bool,
}

pub struct StoredDataset {
    pub handle: DatasetHandle,
    pub data: Arc<TimeSeriesDataset>,
}

pub struct AppState {
    pub datasets: RwLock<HashMap<Uuid, StoredDataset>>,
    pub jobs: Arc<JobStore>,
    pool: Pool,
}

impl AppState {
    pub fn new(workers: usize) -> Self {
        let jobs = Arc::new(JobStore::default());
        Self {
            datasets: RwLock::new(HashMap::new()),
            pool: Pool::start(workers, Arc::clone(&jobs)),
            jobs,
        }
    }

    pub fn add_dataset(&self, id: Uuid, name: String, data: TimeSeriesDataset) -> DatasetHandle {
        let handle = DatasetHandle {
            id,
            name,
            n: data.len(),
            features: data.feature_names(),
            has_labels: data.has_labels(),
        };
        self.datasets.write().unwrap().insert(
            id,
            StoredDataset {
                handle: handle.clone(),
                data: Arc::new(data),
            },
        );
        handle
    }

    fn dataset(&self, id: &Uuid) -> Option<Arc<TimeSeriesDataset>> {
        self.datasets.read().unwrap().get(id).map(|d| Arc::clone(&d.data))
    }
}

type Shared = State<Arc<AppState>>;

pub fn routes(state: Arc<AppState>, max_upload: usize) -> Router {
    Router::new()
        .route("/api/primitives", get(primitives))
        .route(
            "/api/datasets",
            post(upload_dataset)
                .get(list_datasets)
                .layer(DefaultBodyLimit::max(max_upload)),
        )
        .route("/api/datasets/{id}", get(get_dataset))
        .route("/api/pipelines/validate", post(validate_pipeline))
        .route("/api/runs", post(create_run))
        .route("/api/runs/{id}", get(get_job))
        .route("/api/runs/{id}/scores", get(get_scores))
        .route("/api/search", post(create_search))
        .route("/api/search/{id}", get(get_job))
        .with_state(state)
}

fn error(status: StatusCode, name: &str, message: impl Into<String>) -> Response {
    (status, Json(json!({"error": name, "message": message.into()}))).into_response()
}

fn bad_request(message: impl Into<String>) -> Response {
    error(StatusCode::BAD_REQUEST, "BadRequest", message)
}

async fn primitives() -> Json<JsonValue> {
    let families: Vec<JsonValue> = Family::ALL
        .iter()
        .map(|&f| {
            let prims: Vec<_> = registry().descriptors().filter(|d| d.family == f).collect();
            json!({"family": f, "primitives": prims})
        })
        .collect();
    Json(json!({"families": families}))
}

async fn upload_dataset(State(state): Shared, mut multipart: Multipart) -> Response {
    let mut file: Option<(Option<String>, Bytes)> = None;
    let mut fields: HashMap<String, String> = HashMap::new();
    loop {
        let field = match multipart.next_field().await {
            Ok(Some(f)) => f,
            Ok(None) => break,
            Err(e) => return multipart_error(e),
        };
        let name = field.name().unwrap_or_default().to_string();
        if name == "file" {
            let file_name = field.file_name().map(str::to_string);
            match field.bytes().await {
                Ok(b) => file = Some((file_name, b)),
                Err(e) => return multipart_error(e),
            }
        } else {
            match field.text().await {
                Ok(t) => {
                    fields.insert(name, t);
                }
                Err(e) => return multipart_error(e),
            }
        }
    }
    let Some((file_name, bytes)) = file else {
        return error(
            StatusCode::BAD_REQUEST,
            "MissingFile",
            "multipart field \"file\" is required",
        );
    };
    let Ok(text) = std::str::from_utf8(&bytes) else {
        return error(StatusCode::BAD_REQUEST, "NotUtf8", "CSV must be UTF-8");
    };
    let index = |key: &str, err: &str| -> Result<Option<usize>, Response> {
        match fields.get(key).map(|s| s.trim()).filter(|s| !s.is_empty()) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| {
                error(
                    StatusCode::BAD_REQUEST,
                    err,
                    format!("{key} {s:?} is not a column index"),
                )
            }),
        }
    };
    let target = match index("target_index", "BadTargetIndex") {
        Ok(v) => v,
        Err(r) => return r,
    };
    let timestamp = match index("timestamp_column", "BadTimestampColumn") {
        Ok(v) => v,
        Err(r) => return r,
    };
    let data = match generate_dataset(text, target, timestamp) {
        Ok(d) => d,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.name(), e.to_string()),
    };
    let name = fields
        .get("name")
        .cloned()
        .or(file_name)
        .unwrap_or_else(|| "dataset".into());
    let handle = state.add_dataset(Uuid::new_v4(), name, data);
    tracing::info!(id = %handle.id, n = handle.n, "dataset uploaded");
    (StatusCode::CREATED, Json(handle)).into_response()
}

fn multipart_error(e: axum::extract::multipart::MultipartError) -> Response {
    if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
        error(StatusCode::PAYLOAD_TOO_LARGE, "PayloadTooLarge", e.body_text())
    } else {
        bad_request(e.body_text())
    }
}

async fn list_datasets(State(state): Shared) -> Json<Vec<DatasetHandle>> {
    let mut v: Vec<DatasetHandle> = state
        .datasets
        .read()
        .unwrap()
        .values()
        .map(|d| d.handle.clone())
        .collect();
    v.sort_by(|a, b| a.name.cmp(&b.name).then(a.id.cmp(&b.id)));
    Json(v)
}

async fn get_dataset(State(state): Shared, Path(id): Path<String>) -> Response {
    let handle = Uuid::parse_str(&id)
        .ok()
        .and_then(|id| state.datasets.read().unwrap().get(&id).map(|d| d.handle.clone()));
    match handle {
        Some(h) => Json(h).into_response(),
        None => error(
            StatusCode::NOT_FOUND,
            "UnknownDataset",
            format!("no dataset {id}"),
        ),
    }
}

/// Parse errors become a single diagnostic; otherwise the engine's diagnostics.
fn diagnose(v: &JsonValue) -> Result<PipelineDescription, Vec<Diagnostic>> {
    let p = parse_pipeline_value(v).map_err(|e| {
        vec![Diagnostic {
            step: e.step(),
            code: e.name(),
            message: e.to_string(),
        }]
    })?;
    let d = validate(&p);
    if d.is_empty() {
        Ok(p)
    } else {
        Err(d)
    }
}

fn parse_body(body: &Bytes) -> Result<JsonValue, Response> {
    serde_json::from_slice(body).map_err(|e| error(StatusCode::BAD_REQUEST, "MalformedJson", e.to_string()))
}

async fn validate_pipeline(body: Bytes) -> Response {
    let v = match parse_body(&body) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let diagnostics = diagnose(&v).err().unwrap_or_default();
    Json(json!({"diagnostics": diagnostics})).into_response()
}

struct Common {
    dataset_id: Uuid,
    dataset: Arc<TimeSeriesDataset>,
    metric: Metric,
    scheme: SplitScheme,
    seed: u64,
}

/// Fields shared by run and search requests.
fn common(state: &AppState, v: &JsonValue) -> Result<Common, Response> {
    if !v.is_object() {
        return Err(bad_request("request body must be a JSON object"));
    }
    let id_text = v["dataset_id"]
        .as_str()
        .ok_or_else(|| bad_request("dataset_id is required"))?;
    let dataset_id = Uuid::parse_str(id_text).map_err(|_| {
        error(
            StatusCode::NOT_FOUND,
            "UnknownDataset",
            format!("no dataset {id_text}"),
        )
    })?;
    let dataset = state.dataset(&dataset_id).ok_or_else(|| {
        error(
            StatusCode::NOT_FOUND,
            "UnknownDataset",
            format!("no dataset {id_text}"),
        )
    })?;
    let text = |key: &str| -> Result<Option<&str>, Response> {
        match &v[key] {
            JsonValue::Null => Ok(None),
            JsonValue::String(s) => Ok(Some(s)),
            other => Err(bad_request(format!("{key} must be a string, got {other}"))),
        }
    };
    let metric = match text("metric")? {
        None => Metric::F1,
        Some(s) => s.parse().map_err(bad_request)?,
    };
    let scheme = match text("scheme")? {
        None => SplitScheme::KFold(5),
        Some(s) => s.parse().map_err(bad_request)?,
    };
    let seed = match &v["seed"] {
        JsonValue::Null => DEFAULT_SEED,
        s => s
            .as_u64()
            .ok_or_else(|| bad_request("seed must be a non-negative integer"))?,
    };
    if !dataset.has_labels() {
        return Err(error(
            StatusCode::UNPROCESSABLE_ENTITY,
            "NoLabels",
            "dataset was uploaded without a target_index",
        ));
    }
    Ok(Common {
        dataset_id,
        dataset,
        metric,
        scheme,
        seed,
    })
}

fn enqueue(state: &AppState, kind: JobKind, dataset_id: Uuid, work: Work) -> Response {
    let id = Uuid::new_v4();
    state.jobs.insert(JobEntry {
        job: Job {
            id,
            kind,
            status: JobStatus::Queued,
            dataset_id,
            submitted_at: now_ms(),
            started_at: None,
            finished_at: None,
            result: None,
            error: None,
        },
        point_scores: None,
    });
    state.pool.submit(id, work);
    (StatusCode::ACCEPTED, Json(json!({"job_id": id}))).into_response()
}

async fn create_run(State(state): Shared, body: Bytes) -> Response {
    let v = match parse_body(&body) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let c = match common(&state, &v) {
        Ok(c) => c,
        Err(r) => return r,
    };
    if let Err(e) = c.scheme.validate_for(c.dataset.len()) {
        return bad_request(e);
    }
    let pipeline = match diagnose(&v["pipeline"]) {
        Ok(p) => p,
        Err(diagnostics) => {
            return (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({"error": "InvalidPipeline", "diagnostics": diagnostics})),
            )
                .into_response()
        }
    };
    let work = Work::Run {
        dataset: c.dataset,
        pipeline,
        metric: c.metric,
        scheme: c.scheme,
        seed: c.seed,
    };
    enqueue(&state, JobKind::Run, c.dataset_id, work)
}

async fn create_search(State(state): Shared, body: Bytes) -> Response {
    let v = match parse_body(&body) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let c = match common(&state, &v) {
        Ok(c) => c,
        Err(r) => return r,
    };
    if let Err(e) = c.scheme.validate_for(c.dataset.len()) {
        return bad_request(e);
    }
    let budget = match &v["budget"] {
        JsonValue::Null => DEFAULT_BUDGET,
        b => match b.as_u64() {
            Some(b) => b,
            None => return bad_request("budget must be a non-negative integer"),
        },
    };
    if budget == 0 {
        return error(
            StatusCode::UNPROCESSABLE_ENTITY,
            "BudgetZero",
            "budget must be at least 1",
        );
    }
    let strategy = match &v["strategy"] {
        JsonValue::Null => Strategy::Random,
        JsonValue::String(s) => match s.parse() {
            Ok(s) => s,
            Err(e) => return bad_request(e),
        },
        other => return bad_request(format!("strategy must be a string, got {other}")),
    };
    let space = match &v["space"] {
        JsonValue::Null => SearchSpace::default_space(),
        s => match SearchSpace::from_json(s) {
            Ok(s) => s,
            Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.name(), e.to_string()),
        },
    };
    let config = SearchConfig {
        strategy,
        budget,
        seed: c.seed,
        scheme: c.scheme,
        metric: c.metric,
    };
    enqueue(
        &state,
        JobKind::Search,
        c.dataset_id,
        Work::Search {
            dataset: c.dataset,
            space,
            config,
        },
    )
}

fn find_job(state: &AppState, id: &str) -> Result<JobEntry, Response> {
    Uuid::parse_str(id)
        .ok()
        .and_then(|id| state.jobs.get(&id))
        .ok_or_else(|| error(StatusCode::NOT_FOUND, "UnknownJob", format!("no job {id}")))
}

async fn get_job(State(state): Shared, Path(id): Path<String>) -> Response {
    match find_job(&state, &id) {
        Ok(e) => Json(e.job).into_response(),
        Err(r) => r,
    }
}

async fn get_scores(State(state): Shared, Path(id): Path<String>) -> Response {
    let entry = match find_job(&state, &id) {
        Ok(e) => e,
        Err(r) => return r,
    };
    if entry.job.kind != JobKind::Run {
        return error(
            StatusCode::NOT_FOUND,
            "NoScores",
            "search jobs have no per-point scores",
        );
    }
    if entry.job.status != JobStatus::Succeeded {
        return (
            StatusCode::CONFLICT,
            Json(json!({"error": "NotReady", "status": entry.job.status})),
        )
            .into_response();
    }
    match entry.point_scores {
        Some(s) => Json(json!({
            "job_id": entry.job.id,
            "timestamps": s.timestamps,
            "scores": s.scores,
            "truth": s.truth,
        }))
        .into_response(),
        None => error(StatusCode::NOT_FOUND, "NoScores", "pipeline has no scoring step"),
    }
}
