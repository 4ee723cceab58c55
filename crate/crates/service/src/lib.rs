// SPDX-License-Identifier: Apache-2.0

//! HTTP service for the pipeline builder.
//!
//! | Method | Path | Result |
//! |---|---|---|
//! | GET | `/api/primitives` | registry grouped by family |
//! | POST | `/api/datasets` | multipart upload (`file`, `target_index`, optional `timestamp_column`, `name`) |
//! | GET | `/api/datasets`, `/api/datasets/{id}` | dataset handles |
//! | POST | `/api/pipelines/validate` | `{diagnostics}` |
//! | POST | `/api/runs` | queue an evaluation, `202 {job_id}` |
//! | GET | `/api/runs/{id}` | job status and result |
//! | GET | `/api/runs/{id}/scores` | per-point scores of the last scoring step |
//! | POST | `/api/search` | queue a search, `202 {job_id}` |
//! | GET | `/api/search/{id}` | job status and result |
//!
//! Jobs run FIFO on a fixed pool of workers. State lives in memory; with a
//! persistence directory it is loaded at start-up and written back on shutdown.

mod api;
mod jobs;
mod persist;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::HeaderValue;
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

pub use jobs::{JobKind, JobStatus};

/// Upload cap used when none is configured.
pub const DEFAULT_MAX_UPLOAD: usize = 50 * 1024 * 1024;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub workers: usize,
    /// Allowed browser origin; `"*"` allows any.
    pub cors_origin: Option<String>,
    /// Built UI served at `/`.
    pub ui_dir: Option<PathBuf>,
    /// Directory for JSON snapshots of datasets and jobs.
    pub persist: Option<PathBuf>,
    pub max_upload_bytes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cors_origin: None,
            ui_dir: None,
            persist: None,
            max_upload_bytes: DEFAULT_MAX_UPLOAD,
        }
    }
}

fn router(state: Arc<api::AppState>, config: &ServiceConfig) -> std::io::Result<axum::Router> {
    let mut app = api::routes(state, config.max_upload_bytes);
    if let Some(origin) = &config.cors_origin {
        let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
        let cors = if origin == "*" {
            cors.allow_origin(Any)
        } else {
            let value = HeaderValue::from_str(origin)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
            cors.allow_origin(value)
        };
        app = app.layer(cors);
    }
    if let Some(dir) = &config.ui_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    Ok(app)
}

/// A server running on a background task.
pub struct RunningServer {
    pub addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: tokio::task::JoinHandle<std::io::Result<()>>,
}

impl RunningServer {
    /// Stops accepting requests, waits for in-flight requests, and writes the
    /// snapshot when persistence is configured.
    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.task.await.map_err(std::io::Error::other)?
    }
}

/// Binds `addr` (port 0 picks a free port) and serves until [`RunningServer::shutdown`].
pub async fn start(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<RunningServer> {
    let listener = TcpListener::bind(addr).await?;
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let task = tokio::spawn(run(listener, config, async {
        let _ = rx.await;
    }));
    Ok(RunningServer {
        addr,
        shutdown: Some(tx),
        task,
    })
}

/// Serves on `addr` until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    run(listener, config, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}

async fn run(
    listener: TcpListener,
    config: ServiceConfig,
    signal: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let state = Arc::new(api::AppState::new(config.workers.max(1)));
    if let Some(dir) = &config.persist {
        persist::load(dir, &state)?;
    }
    let app = router(Arc::clone(&state), &config)?;
    axum::serve(listener, app).with_graceful_shutdown(signal).await?;
    if let Some(dir) = &config.persist {
        persist::save(dir, &state)?;
        tracing::info!(dir = %dir.display(), "snapshot written");
    }
    Ok(())
}
