// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

// Index loops over parallel arrays keep the oracles close to their definitions.
#![allow(clippy::needless_range_loop)]

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};
use tsods_core::detection::iforest::{anomaly_score, average_path_length, IsolationForest};
use tsods_core::detection::knn::knn_detector;
use tsods_core::detection::matrix_profile::matrix_profile_discord;
use tsods_core::engine::{evaluate_pipeline, score, Metric, SplitScheme};
use tsods_core::features::{autocorrelation, nmf_fit};
use tsods_core::processing::seasonal_decomposition;
use tsods_core::search::{search, SearchConfig, SearchSpace, Strategy};
use tsods_core::synthetic::SpikeBenchmark;
use tsods_core::{parse_pipeline, serialize_pipeline};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Oracles are written independently of the library: plain loops, no shared helpers.

fn oracle_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s.sqrt()
}

fn oracle_knn(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    (0..rows.len())
        .map(|i| {
            let mut d: Vec<f64> = (0..rows.len())
                .filter(|&j| j != i)
                .map(|j| oracle_dist(&rows[i], &rows[j]))
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[k - 1]
        })
        .collect()
}

fn oracle_znorm(x: &[f64]) -> Vec<f64> {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
    let sd = var.sqrt();
    if sd < 1e-12 {
        return vec![0.0; x.len()];
    }
    x.iter().map(|v| (v - mean) / sd).collect()
}

fn oracle_matrix_profile(x: &[f64], w: usize) -> Vec<f64> {
    let starts = x.len() - w + 1;
    let subs: Vec<Vec<f64>> = (0..starts).map(|i| oracle_znorm(&x[i..i + w])).collect();
    (0..starts)
        .map(|i| {
            let mut best: Option<f64> = None;
            for j in 0..starts {
                if i.abs_diff(j) >= w {
                    let d = oracle_dist(&subs[i], &subs[j]);
                    best = Some(best.map_or(d, |b| b.min(d)));
                }
            }
            // No admissible neighbour: undefined, reported as NaN.
            best.unwrap_or(f64::NAN)
        })
        .collect()
}

/// Largest absolute difference; infinite if lengths differ or only one side is `NaN`.
fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| match (x.is_nan(), y.is_nan()) {
            (true, true) => 0.0,
            (false, false) => (x - y).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst, mut bitwise, mut total) = (0.0f64, 0usize, 0usize);
    for case in 0..50 {
        let n = rng.random_range(16..=256);
        let dims = rng.random_range(1..=4);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dims).map(|_| rng.random_range(-5.0..5.0)).collect())
            .collect();
        let k = rng.random_range(1..=5);
        let got = knn_detector(&rows, k).map_err(|e| format!("knn case {case}: {e}"))?;
        let want = oracle_knn(&rows, k);
        worst = worst.max(max_abs_diff(&got, &want));
        bitwise += usize::from(got.iter().zip(&want).all(|(a, b)| a.to_bits() == b.to_bits()));

        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w = rng.random_range(3..=(n / 2).min(32));
        let got = matrix_profile_discord(&x, w).map_err(|e| format!("mp case {case}: {e}"))?;
        let want = oracle_matrix_profile(&x, w);
        worst = worst.max(max_abs_diff(&got, &want));
        bitwise += usize::from(got.iter().zip(&want).all(|(a, b)| a.to_bits() == b.to_bits()));
        total += 2;
    }
    let elapsed = started.elapsed();
    ensure(worst <= 1e-9, || format!("max deviation {worst:e} > 1e-9"))?;
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "max |diff| {worst:e}, {bitwise}/{total} bitwise, {elapsed:.2?}"
    ))
}

fn decomposition_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for case in 0..100 {
        let period = 2 + case % 11;
        let n = rng.random_range(2 * period..=300);
        let x: Vec<f64> = (0..n)
            .map(|t| (t as f64 * 0.05) + (t % period) as f64 + rng.random_range(-1.0..1.0))
            .collect();
        let d = seasonal_decomposition(&x, period as i64).map_err(|e| format!("case {case}: {e}"))?;
        for t in 0..n {
            if d.trend[t].is_finite() {
                worst = worst.max((d.trend[t] + d.seasonal[t] + d.residual[t] - x[t]).abs());
                checked += 1;
            }
        }
        let season_sum: f64 = d.seasonal[..period].iter().sum();
        ensure(season_sum.abs() < 1e-9, || {
            format!("case {case}: seasonal sums to {season_sum}")
        })?;
    }
    ensure(worst <= 1e-9, || format!("max reconstruction error {worst:e}"))?;
    Ok(format!("{checked} interior points, max error {worst:e}"))
}

fn acf_golden() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..50 {
        let n = rng.random_range(2..100);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let r = autocorrelation(&x, n - 1).map_err(|e| e.to_string())?;
        ensure(r[0] == 1.0, || format!("case {case}: r[0] = {}", r[0]))?;
    }
    let alt = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
    let r = autocorrelation(&alt, 1).map_err(|e| e.to_string())?;
    ensure((r[1] + 0.875).abs() <= 1e-12, || format!("r[1] = {}", r[1]))?;
    Ok(format!("r[0] = 1 on 50 series, alternating r[1] = {}", r[1]))
}

fn nmf_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst_rise = 0.0f64;
    for case in 0..20 {
        let (m, n) = (rng.random_range(4..30), rng.random_range(4..30));
        let v = Array2::from_shape_fn((m, n), |_| rng.random_range(0.0..4.0));
        let rank = rng.random_range(1..=3.min(m).min(n));
        let fit = nmf_fit(&v, rank, 300, 0.0, case).map_err(|e| e.to_string())?;
        for w in fit.error_trace.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
        }
    }
    ensure(worst_rise <= 1e-10, || {
        format!("objective rose by {worst_rise:e}")
    })?;

    let u: Vec<f64> = (0..12).map(|_| rng.random_range(0.5..3.0)).collect();
    let c: Vec<f64> = (0..9).map(|_| rng.random_range(0.5..3.0)).collect();
    let v = Array2::from_shape_fn((12, 9), |(i, j)| u[i] * c[j]);
    let fit = nmf_fit(&v, 1, 500, 0.0, 3).map_err(|e| e.to_string())?;
    let resid = &v - &fit.reconstruction();
    let rel = (resid.iter().map(|x| x * x).sum::<f64>() / v.iter().map(|x| x * x).sum::<f64>()).sqrt();
    ensure(fit.error_trace.len() <= 500, || "more than 500 iterations".into())?;
    ensure(rel < 1e-6, || format!("rank-1 relative error {rel:e}"))?;
    Ok(format!(
        "max objective rise {worst_rise:e}, rank-1 relative error {rel:.2e} after {} iterations",
        fit.error_trace.len()
    ))
}

fn iforest_properties() -> Outcome {
    let c2 = average_path_length(2);
    ensure((c2 - 0.1544313298).abs() <= 1e-9, || format!("c(2) = {c2}"))?;
    let half = anomaly_score(average_path_length(64), 64);
    ensure((half - 0.5).abs() <= 1e-12, || {
        format!("s = {half} at E[h] = c(psi)")
    })?;

    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut hits = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Vec<f64>> = (0..100).map(|_| vec![normal.sample(&mut rng)]).collect();
        let planted = rng.random_range(0..100);
        rows[planted] = vec![10.0];
        let forest = IsolationForest::fit(&rows, 100, 64, seed).map_err(|e| e.to_string())?;
        let s = forest.score(&rows).map_err(|e| e.to_string())?;
        let best = (0..s.len()).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
        hits += usize::from(best == planted);
    }
    ensure(hits >= 95, || {
        format!("planted outlier ranked first in {hits}/100 seeds")
    })?;
    Ok(format!(
        "c(2) = {c2:.10}, s(c(psi)) = {half}, argmax hits {hits}/100"
    ))
}

fn scoring_properties() -> Outcome {
    let truth = [1, 1, 1, 0, 0];
    let pred = [1, 1, 0, 1, 0];
    let r = score(&pred, &truth, Metric::F1).map_err(|e| e.to_string())?;
    let c = r.counts;
    ensure((c.tp, c.fp, c.fn_) == (2, 1, 1), || format!("counts {c:?}"))?;
    for (name, v) in [("precision", r.precision), ("recall", r.recall), ("f1", r.f1)] {
        ensure((v - 2.0 / 3.0).abs() <= 1e-12, || format!("{name} = {v}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..1000 {
        let n = rng.random_range(1..200);
        let truth: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.2))).collect();
        let pred: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.2))).collect();
        let r = score(&pred, &truth, Metric::F1).map_err(|e| e.to_string())?;
        ensure(r.f1 <= r.f1_point_adjusted, || {
            format!("case {case}: f1 {} > f1_pa {}", r.f1, r.f1_point_adjusted)
        })?;
    }
    Ok("P = R = F1 = 2/3; f1 <= f1_pa on 1000 random pairs".into())
}

fn searcher_correctness() -> Outcome {
    let ds = SpikeBenchmark {
        n: 300,
        n_spikes: 3,
        noise_std: 0.3,
        magnitude: 4.0,
        seed: 11,
        ..SpikeBenchmark::default()
    }
    .generate()
    .0;
    let space = SearchSpace::from_json(&json!({
        "slots": {
            "data_processing": [{"primitive": "tods.data.timestamp_validation"}, {"primitive": null}],
            "ts_processing": [{"primitive": "tods.timeseries.difference", "grid": {"order": [1]}}],
            "feature_analysis": [{"primitive": null}],
            "detection": [
                {"primitive": "tods.detection.zscore"},
                {"primitive": "tods.detection.knn", "grid": {"k": [1, 8]}}
            ],
            "thresholding": [{"primitive": "tods.detection.threshold", "grid": {"contamination": [0.02]}}]
        }
    }))
    .map_err(|e| e.to_string())?;
    ensure(space.size() == 6, || {
        format!("space has {} candidates", space.size())
    })?;
    let cfg = SearchConfig {
        strategy: Strategy::Exhaustive,
        budget: 6,
        seed: 5,
        scheme: SplitScheme::KFold(3),
        metric: Metric::F1,
    };
    let outcome = search(&ds, &space, &cfg).map_err(|e| e.to_string())?;
    let mut hand: Option<(usize, f64)> = None;
    for (ordinal, p) in space.enumerate().enumerate() {
        let agg = evaluate_pipeline(&ds, &p, cfg.metric, &cfg.scheme, cfg.seed).map_or(-1.0, |e| e.aggregate);
        if hand.is_none_or(|(_, best)| agg > best) {
            hand = Some((ordinal, agg));
        }
    }
    let (hand_ordinal, hand_agg) = hand.unwrap();
    ensure(
        outcome.best.ordinal == hand_ordinal as u64 && outcome.best.aggregate.to_bits() == hand_agg.to_bits(),
        || {
            format!(
                "search picked {} ({}), loop picked {hand_ordinal} ({hand_agg})",
                outcome.best.ordinal, outcome.best.aggregate
            )
        },
    )?;

    let random = SearchConfig {
        strategy: Strategy::Random,
        budget: 4,
        seed: 1234,
        ..cfg
    };
    let fingerprint = || -> Result<Vec<(u64, u64, Vec<u64>)>, String> {
        let o = search(&ds, &space, &random).map_err(|e| e.to_string())?;
        Ok(o.leaderboard
            .iter()
            .map(|r| {
                (
                    r.ordinal,
                    r.aggregate.to_bits(),
                    r.fold_scores.iter().map(|f| f.to_bits()).collect(),
                )
            })
            .collect())
    };
    let (a, b) = (fingerprint()?, fingerprint()?);
    ensure(a == b, || "random search differs between runs".into())?;
    Ok(format!(
        "winner ordinal {hand_ordinal} (aggregate {hand_agg:.4}); random search reproducible"
    ))
}

fn tods(args: &[&str]) -> Result<Value, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_tods"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!(
            "tods {}: {}",
            args[0],
            String::from_utf8_lossy(&o.stderr).trim()
        ));
    }
    if o.stdout.is_empty() {
        return Ok(Value::Null);
    }
    serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())
}

fn end_to_end() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = dir.path().join("bench.csv");
    let data = data.to_str().unwrap();
    tods(&["generate", "--out", data])?;
    let pipeline = dir.path().join("default.json");
    std::fs::write(
        &pipeline,
        serialize_pipeline(&tsods_core::pipeline::default_pipeline()),
    )
    .map_err(|e| e.to_string())?;
    let pipeline = pipeline.to_str().unwrap();
    let out = dir.path().join("best.json");
    let out = out.to_str().unwrap();

    let run = |metric: &str| -> Result<f64, String> {
        let j = tods(&[
            "run",
            "--data",
            data,
            "--target-index",
            "2",
            "--pipeline",
            pipeline,
            "--metric",
            metric,
            "--report",
            "json",
        ])?;
        Ok(j["aggregate"].as_f64().unwrap_or(f64::NAN))
    };
    let default_pa = run("f1_pa")?;
    let default_f1 = run("f1")?;
    ensure(default_pa >= 0.8, || {
        format!("default pipeline f1_pa = {default_pa}")
    })?;
    ensure(default_f1 >= 0.8, || {
        format!("default pipeline f1 = {default_f1}")
    })?;

    let mut found = Vec::new();
    for (metric, default) in [("f1_pa", default_pa), ("f1", default_f1)] {
        let j = tods(&[
            "search",
            "--data",
            data,
            "--target-index",
            "2",
            "--budget",
            "20",
            "--metric",
            metric,
            "--out",
            out,
            "--report",
            "json",
        ])?;
        let best = j["best"]["aggregate"].as_f64().unwrap_or(f64::NAN);
        ensure(best >= default, || {
            format!("search best {metric} {best} < default {default}")
        })?;
        found.push(best);
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "default f1_pa {default_pa:.4} (f1 {default_f1:.4}); search best f1_pa {:.4}, f1 {:.4}; {elapsed:.2?}",
        found[0], found[1]
    ))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn pipeline_language() -> Outcome {
    let mut goldens: Vec<PathBuf> = std::fs::read_dir(fixtures().join("pipelines"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    goldens.sort();
    ensure(goldens.len() == 20, || format!("{} golden files", goldens.len()))?;
    for path in &goldens {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let p = parse_pipeline(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(serialize_pipeline(&p) == text, || {
            format!("{} does not round-trip", path.display())
        })?;
    }
    let invalid = fixtures().join("invalid");
    let expected: Value = serde_json::from_str(
        &std::fs::read_to_string(invalid.join("expected.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let expected = expected.as_object().unwrap();
    for (file, name) in expected {
        let text = std::fs::read_to_string(invalid.join(file)).map_err(|e| e.to_string())?;
        match parse_pipeline(&text) {
            Ok(_) => return Err(format!("{file} parsed")),
            Err(e) => ensure(e.name() == name, || {
                format!("{file}: {} instead of {name}", e.name())
            })?,
        }
    }
    Ok(format!(
        "{} goldens round-trip, {} invalid fixtures named",
        goldens.len(),
        expected.len()
    ))
}

fn service() -> Outcome {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async {
        let config = tsods_service::ServiceConfig {
            workers: 2,
            ui_dir: None,
            ..Default::default()
        };
        let server = tsods_service::start("127.0.0.1:0".parse().unwrap(), config)
            .await
            .map_err(|e| e.to_string())?;
        let result = service_checks(&format!("http://{}", server.addr)).await;
        server.shutdown().await.map_err(|e| e.to_string())?;
        result
    })
}

async fn service_checks(base: &str) -> Outcome {
    use reqwest::multipart::{Form, Part};
    use reqwest::StatusCode;

    let c = reqwest::Client::new();
    let e = |e: reqwest::Error| e.to_string();
    let started = Instant::now();
    let (ds, _) = SpikeBenchmark::default().generate();
    let form = Form::new()
        .part("file", Part::text(ds.to_csv()).file_name("bench.csv"))
        .text("target_index", "2");
    let r = c
        .post(format!("{base}/api/datasets"))
        .multipart(form)
        .send()
        .await
        .map_err(e)?;
    ensure(r.status() == StatusCode::CREATED, || {
        format!("upload status {}", r.status())
    })?;
    let handle: Value = r.json().await.map_err(e)?;

    let pipeline = tsods_core::pipeline::default_pipeline().to_json();
    let v: Value = c
        .post(format!("{base}/api/pipelines/validate"))
        .json(&pipeline)
        .send()
        .await
        .map_err(e)?
        .json()
        .await
        .map_err(e)?;
    ensure(v["diagnostics"] == json!([]), || format!("validate: {v}"))?;

    let r = c
        .post(format!("{base}/api/runs"))
        .json(&json!({"dataset_id": handle["id"], "pipeline": pipeline, "metric": "f1_pa"}))
        .send()
        .await
        .map_err(e)?;
    ensure(r.status() == StatusCode::ACCEPTED, || {
        format!("run status {}", r.status())
    })?;
    let job_id = r.json::<Value>().await.map_err(e)?["job_id"]
        .as_str()
        .unwrap_or_default()
        .to_string();
    let job = loop {
        let j: Value = c
            .get(format!("{base}/api/runs/{job_id}"))
            .send()
            .await
            .map_err(e)?
            .json()
            .await
            .map_err(e)?;
        if j["status"] == "succeeded" || j["status"] == "failed" {
            break j;
        }
        ensure(started.elapsed() < Duration::from_secs(5), || {
            "run did not finish in 5 s".into()
        })?;
        tokio::time::sleep(Duration::from_millis(10)).await;
    };
    ensure(job["status"] == "succeeded", || format!("job: {job}"))?;
    let scores: Value = c
        .get(format!("{base}/api/runs/{job_id}/scores"))
        .send()
        .await
        .map_err(e)?
        .json()
        .await
        .map_err(e)?;
    ensure(
        scores["scores"].as_array().map(Vec::len) == Some(ds.len()),
        || "scores length".into(),
    )?;
    let happy = started.elapsed();
    ensure(happy < Duration::from_secs(5), || {
        format!("happy path took {happy:?}")
    })?;

    let missing = "00000000-0000-4000-8000-000000000000";
    let r = c
        .get(format!("{base}/api/runs/{missing}"))
        .send()
        .await
        .map_err(e)?;
    let (status, body) = (r.status(), r.json::<Value>().await.map_err(e)?);
    ensure(
        status == StatusCode::NOT_FOUND && body["error"] == "UnknownJob",
        || format!("404: {status} {body}"),
    )?;
    let mut bad = pipeline.clone();
    bad["steps"][4]["hyperparams"]["contamination"] = json!(2.0);
    let r = c
        .post(format!("{base}/api/runs"))
        .json(&json!({"dataset_id": handle["id"], "pipeline": bad}))
        .send()
        .await
        .map_err(e)?;
    let (status, body) = (r.status(), r.json::<Value>().await.map_err(e)?);
    ensure(
        status == StatusCode::UNPROCESSABLE_ENTITY
            && body["error"] == "InvalidPipeline"
            && body["diagnostics"][0]["code"] == "HyperparamOutOfRange",
        || format!("422: {status} {body}"),
    )?;
    let r = c
        .post(format!("{base}/api/search"))
        .json(&json!({"dataset_id": handle["id"], "budget": 0}))
        .send()
        .await
        .map_err(e)?;
    let (status, body) = (r.status(), r.json::<Value>().await.map_err(e)?);
    ensure(
        status == StatusCode::UNPROCESSABLE_ENTITY && body["error"] == "BudgetZero",
        || format!("422: {status} {body}"),
    )?;
    Ok(format!(
        "happy path {happy:.2?}, aggregate {}, 404/422 bodies ok, no UI",
        job["result"]["aggregate"]
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence: knn and matrix profile", oracle_equivalence),
        ("decomposition identity", decomposition_identity),
        ("ACF golden values", acf_golden),
        ("NMF monotone objective and rank-1 recovery", nmf_properties),
        (
            "isolation forest constants and planted outlier",
            iforest_properties,
        ),
        ("scoring golden case and point adjustment", scoring_properties),
        ("searcher correctness and reproducibility", searcher_correctness),
        ("end-to-end spike benchmark", end_to_end),
        (
            "pipeline language goldens and invalid fixtures",
            pipeline_language,
        ),
        ("service happy path and error bodies", service),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(reason)) => {
                failed += 1;
                println!("FAIL  {name}: {reason}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
