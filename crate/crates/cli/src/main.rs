// SPDX-License-Identifier: Apache-2.0

//! `tods`: evaluate pipelines, search for good ones, and serve the REST API.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 pipeline error.

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use tsods_core::engine::{run_pipeline, EngineError, Metric, RunReport, SplitScheme};
use tsods_core::registry::Family;
use tsods_core::search::{
    export_best, search, SearchConfig, SearchError, SearchOutcome, SearchSpace, Strategy,
};
use tsods_core::synthetic::SpikeBenchmark;
use tsods_core::{generate_dataset, parse_pipeline, registry_list, PipelineDescription, TimeSeriesDataset};
use tsods_service::ServiceConfig;

#[derive(Parser)]
#[command(name = "tods", version, about = "Time-series outlier detection pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Report {
    Text,
    Json,
}

#[derive(clap::Args)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Column index of the 0/1 label column.
    #[arg(long)]
    target_index: usize,
    /// Column index of the timestamps; defaults to a column named `timestamp`.
    #[arg(long)]
    timestamp_column: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a pipeline with time-ordered cross-validation.
    Run {
        #[command(flatten)]
        data: DataArgs,
        /// Pipeline JSON file.
        #[arg(long)]
        pipeline: PathBuf,
        #[arg(long, default_value = "f1")]
        metric: Metric,
        /// `kfold:<k>` or `holdout:<fraction>`.
        #[arg(long, default_value = "kfold:5")]
        scheme: SplitScheme,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        report: Report,
    },
    /// Search a space of pipelines and write the best one.
    Search {
        #[command(flatten)]
        data: DataArgs,
        /// Search-space JSON file; the built-in space when omitted.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        budget: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// `random` or `exhaustive`.
        #[arg(long, default_value = "random")]
        strategy: Strategy,
        #[arg(long, default_value = "f1")]
        metric: Metric,
        #[arg(long, default_value = "kfold:5")]
        scheme: SplitScheme,
        /// Where to write the best pipeline.
        #[arg(long, default_value = "best_pipeline.json")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: Report,
    },
    /// List registered primitives.
    ListPrimitives {
        #[arg(long, value_enum, default_value = "text")]
        report: Report,
    },
    /// Print the built-in default pipeline or search space.
    Show {
        #[arg(value_enum)]
        what: Builtin,
    },
    /// Write the seeded spike benchmark as CSV (timestamp, value, label).
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        n: usize,
    },
    /// Serve the REST API.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Worker threads for queued jobs; defaults to the number of CPUs.
        #[arg(long)]
        workers: Option<usize>,
        /// Allowed CORS origin, or `*`.
        #[arg(long)]
        cors_origin: Option<String>,
        /// Directory with a built UI to serve at `/`.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        /// Directory for state snapshots, loaded at start and written at shutdown.
        #[arg(long)]
        persist: Option<PathBuf>,
        /// Upload size cap in bytes.
        #[arg(long, default_value_t = tsods_service::DEFAULT_MAX_UPLOAD)]
        max_upload_bytes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    DefaultPipeline,
    DefaultSpace,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn data_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn pipeline_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 3,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// `TSODS_LOG` takes `error`, `warn`, `info`, `debug` or `trace`; default `warn`.
fn init_logging() {
    let level = std::env::var("TSODS_LOG")
        .ok()
        .and_then(|v| v.parse::<tracing::Level>().ok())
        .unwrap_or(tracing::Level::WARN);
    tracing_subscriber::fmt()
        .with_max_level(level)
        .with_writer(std::io::stderr)
        .init();
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            data,
            pipeline,
            metric,
            scheme,
            seed,
            report,
        } => {
            let p = load_pipeline(&pipeline)?;
            let ds = load_dataset(&data)?;
            check_scheme(&scheme, ds.len())?;
            let result = run_pipeline(&ds, &p, metric, &scheme, seed).map_err(engine_failure)?;
            match report {
                Report::Json => println!("{}", pretty(&result.to_json())),
                Report::Text => print!("{}", run_text(&p, &result, &scheme, seed)),
            }
            Ok(())
        }
        Command::Search {
            data,
            space,
            budget,
            seed,
            strategy,
            metric,
            scheme,
            out,
            report,
        } => {
            if budget == 0 {
                return Err(usage("--budget must be at least 1"));
            }
            let space = match space {
                Some(path) => {
                    let text = read(&path).map_err(usage)?;
                    SearchSpace::from_json_str(&text)
                        .map_err(|e| pipeline_error(format!("{}: {e}", e.name())))?
                }
                None => SearchSpace::default_space(),
            };
            let ds = load_dataset(&data)?;
            check_scheme(&scheme, ds.len())?;
            let config = SearchConfig {
                strategy,
                budget,
                seed,
                scheme,
                metric,
            };
            let outcome = search(&ds, &space, &config).map_err(search_failure)?;
            let exported = export_best(&outcome.best).map_err(search_failure)?;
            std::fs::write(&out, exported)
                .map_err(|e| usage(format!("cannot write {}: {e}", out.display())))?;
            match report {
                Report::Json => {
                    let mut j = outcome.to_json();
                    j["out"] = json!(out.display().to_string());
                    println!("{}", pretty(&j));
                }
                Report::Text => print!("{}", search_text(&outcome, metric, &out)),
            }
            Ok(())
        }
        Command::ListPrimitives { report } => {
            let list = registry_list();
            match report {
                Report::Json => println!("{}", pretty(&json!(list))),
                Report::Text => {
                    for family in Family::ALL {
                        println!("{}", family.as_str());
                        for d in list.iter().filter(|d| d.family == family) {
                            println!("  {:<44} {}", d.id, d.description);
                        }
                    }
                }
            }
            Ok(())
        }
        Command::Show { what } => {
            match what {
                Builtin::DefaultPipeline => {
                    print!(
                        "{}",
                        tsods_core::serialize_pipeline(&tsods_core::pipeline::default_pipeline())
                    )
                }
                Builtin::DefaultSpace => print!("{}", SearchSpace::default_space_json()),
            }
            Ok(())
        }
        Command::Generate { out, seed, n } => {
            let bench = SpikeBenchmark {
                n,
                seed,
                ..SpikeBenchmark::default()
            };
            if n < bench.n_spikes * (2 * bench.margin + 1) {
                return Err(usage(format!(
                    "--n must be at least {}",
                    bench.n_spikes * (2 * bench.margin + 1)
                )));
            }
            let (ds, _) = bench.generate();
            std::fs::write(&out, ds.to_csv())
                .map_err(|e| usage(format!("cannot write {}: {e}", out.display())))
        }
        Command::Serve {
            host,
            port,
            workers,
            cors_origin,
            ui_dir,
            persist,
            max_upload_bytes,
        } => {
            let mut config = ServiceConfig {
                cors_origin,
                ui_dir,
                persist,
                max_upload_bytes,
                ..ServiceConfig::default()
            };
            if let Some(w) = workers {
                if w == 0 {
                    return Err(usage("--workers must be at least 1"));
                }
                config.workers = w;
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| usage(e.to_string()))?;
            let addr = SocketAddr::new(host, port);
            eprintln!("listening on http://{addr}");
            runtime
                .block_on(tsods_service::serve(addr, config))
                .map_err(|e| usage(format!("server: {e}")))
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_dataset(args: &DataArgs) -> Result<TimeSeriesDataset, Failure> {
    let text = read(&args.data).map_err(data_error)?;
    generate_dataset(&text, Some(args.target_index), args.timestamp_column)
        .map_err(|e| data_error(format!("{}: {}: {e}", args.data.display(), e.name())))
}

fn load_pipeline(path: &Path) -> Result<PipelineDescription, Failure> {
    let text = read(path).map_err(pipeline_error)?;
    parse_pipeline(&text).map_err(|e| pipeline_error(format!("{}: {}: {e}", path.display(), e.name())))
}

fn check_scheme(scheme: &SplitScheme, n: usize) -> Result<(), Failure> {
    scheme.validate_for(n).map_err(usage)
}

fn engine_failure(e: EngineError) -> Failure {
    let message = format!("{}: {e}", e.name());
    match e {
        EngineError::MissingGroundTruth | EngineError::LengthMismatch { .. } => data_error(message),
        EngineError::BadScheme(_) => usage(message),
        _ => pipeline_error(message),
    }
}

fn search_failure(e: SearchError) -> Failure {
    let message = format!("{}: {e}", e.name());
    match e {
        SearchError::NoLabels => data_error(message),
        SearchError::BudgetZero => usage(message),
        _ => pipeline_error(message),
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn run_text(p: &PipelineDescription, r: &RunReport, scheme: &SplitScheme, seed: u64) -> String {
    let e = &r.evaluation;
    let mut s = String::new();
    let _ = writeln!(s, "pipeline   {}", p.id);
    let _ = writeln!(s, "scheme     {scheme} (seed {seed})");
    let _ = writeln!(s, "metric     {}", e.primary_metric);
    let _ = writeln!(s, "aggregate  {:.6}", e.aggregate);
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "fold  precision  recall     f1         f1_pa      tp    fp    fn    tn"
    );
    for (i, f) in e.folds.iter().enumerate() {
        let c = f.counts;
        let _ = writeln!(
            s,
            "{i:<4}  {:<9.6}  {:<9.6}  {:<9.6}  {:<9.6}  {:<5} {:<5} {:<5} {}",
            f.precision, f.recall, f.f1, f.f1_point_adjusted, c.tp, c.fp, c.fn_, c.tn
        );
    }
    let [precision, recall, f1, f1_pa] = e.mean_scores();
    let _ = writeln!(
        s,
        "mean  {precision:<9.6}  {recall:<9.6}  {f1:<9.6}  {f1_pa:<9.6}"
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "step  primitive                                    output       ms"
    );
    for t in &r.execution.trace.steps {
        let shape = t
            .output_shape
            .map_or("-".to_string(), |(a, b)| format!("{a}x{b}"));
        let _ = writeln!(
            s,
            "{:<4}  {:<44} {:<12} {:.2}",
            t.index, t.primitive_id, shape, t.wall_ms
        );
    }
    s
}

fn search_text(o: &SearchOutcome, metric: Metric, out: &Path) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "evaluated {} of {} candidates ({metric})",
        o.evaluated.len(),
        o.space_size
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "rank  ordinal  aggregate  pipeline");
    for r in &o.leaderboard {
        let steps: Vec<&str> = r
            .pipeline
            .steps
            .iter()
            .map(|st| short(&st.primitive_id))
            .collect();
        let score = if r.is_ok() {
            format!("{:.6}", r.aggregate)
        } else {
            "failed".into()
        };
        let _ = writeln!(
            s,
            "{:<4}  {:<7}  {:<9}  {}",
            r.rank,
            r.ordinal,
            score,
            steps.join(" > ")
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "best pipeline written to {}", out.display());
    s
}

fn short(id: &str) -> &str {
    id.rsplit('.').next().unwrap_or(id)
}
