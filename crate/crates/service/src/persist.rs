// SPDX-License-Identifier: Apache-2.0

//! Best-effort JSON snapshots of datasets and jobs.
//!
//! Datasets are stored as CSV text so missing values survive the trip.
//! Jobs still queued or running at shutdown are restored as failed.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tsods_core::generate_dataset;

use crate::api::{AppState, DatasetHandle};
use crate::jobs::{now_ms, JobEntry, JobError, JobStatus};

const DATASETS: &str = "datasets.json";
const JOBS: &str = "jobs.json";

#[derive(Serialize, Deserialize)]
struct DatasetSnapshot {
    handle: DatasetHandle,
    csv: String,
}

fn invalid(e: impl std::fmt::Display) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e.to_string())
}

pub fn save(dir: &Path, state: &AppState) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let datasets: Vec<DatasetSnapshot> = {
        let map = state.datasets.read().unwrap();
        let mut v: Vec<DatasetSnapshot> = map
            .values()
            .map(|d| DatasetSnapshot {
                handle: d.handle.clone(),
                csv: d.data.to_csv(),
            })
            .collect();
        v.sort_by_key(|d| d.handle.id);
        v
    };
    fs::write(
        dir.join(DATASETS),
        serde_json::to_vec_pretty(&datasets).map_err(invalid)?,
    )?;
    fs::write(
        dir.join(JOBS),
        serde_json::to_vec_pretty(&state.jobs.all()).map_err(invalid)?,
    )?;
    Ok(())
}

pub fn load(dir: &Path, state: &AppState) -> io::Result<()> {
    let datasets = dir.join(DATASETS);
    if datasets.exists() {
        let snapshots: Vec<DatasetSnapshot> =
            serde_json::from_slice(&fs::read(&datasets)?).map_err(invalid)?;
        for s in snapshots {
            // to_csv puts the label column right after the features.
            let target = s.handle.has_labels.then_some(s.handle.features.len() + 1);
            let data = generate_dataset(&s.csv, target, Some(0)).map_err(invalid)?;
            state.add_dataset(s.handle.id, s.handle.name, data);
        }
    }
    let jobs = dir.join(JOBS);
    if jobs.exists() {
        let entries: Vec<JobEntry> = serde_json::from_slice(&fs::read(&jobs)?).map_err(invalid)?;
        for mut e in entries {
            if !e.job.status.is_terminal() {
                e.job.status = JobStatus::Failed;
                e.job.finished_at = Some(now_ms());
                e.job.error = Some(JobError {
                    name: "Interrupted".into(),
                    message: "server stopped before the job finished".into(),
                    failed_step: None,
                    steps: None,
                });
            }
            state.jobs.insert(e);
        }
    }
    Ok(())
}
