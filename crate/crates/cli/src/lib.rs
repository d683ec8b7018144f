//! Experiment orchestration for the `fbl` command line tool.
//!
//! `run` executes one config (or an ensemble of seeded copies) into a run
//! directory with a checksummed manifest; `report` turns a run directory into
//! `summary.json` and per-diagnostic CSV series.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod experiments;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use fbl_core::solver::DiagnosticRow;
use serde_json::{json, Value};

pub use artifacts::{read_manifest, verify_checksums, ArtifactWriter, ExitStatus, FileEntry, RunManifest, MANIFEST};
pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{CliError, CliResult};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Options of `fbl run` beyond the config path.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub ensemble: Option<usize>,
}

fn default_out(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("runs/{}-seed{}", cfg.kind.name(), cfg.initial.seed)))
}

/// Loads, validates and runs a config file. Returns the run directory.
pub fn run(config_path: &Path, opts: &RunOptions) -> CliResult<PathBuf> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let Some(seed) = opts.seed {
        cfg.initial.seed = seed;
    }
    let out = opts.out.clone().unwrap_or_else(|| default_out(&cfg));
    match opts.ensemble {
        None => run_config(&cfg, &out)?,
        Some(k) => run_ensemble(&cfg, &out, k)?,
    }
    Ok(out)
}

/// Runs one experiment into `out`. The manifest is written even when the run fails.
pub fn run_config(cfg: &ExperimentConfig, out: &Path) -> CliResult<()> {
    let started_at = artifacts::now();
    let mut writer = ArtifactWriter::create(out)?;
    let result = match experiments::run_kind(cfg, &mut writer) {
        Ok(Some(t)) => Err(CliError::BlowUp { t }),
        Ok(None) => Ok(()),
        Err(e) => Err(e),
    };
    let exit_status = match &result {
        Ok(()) => ExitStatus {
            code: 0,
            message: "ok".into(),
        },
        Err(e) => ExitStatus {
            code: e.exit_code(),
            message: e.to_string(),
        },
    };
    let manifest = RunManifest {
        config: cfg.clone(),
        code_version: CODE_VERSION.into(),
        started_at,
        finished_at: artifacts::now(),
        files: writer.files().to_vec(),
        exit_status,
    };
    writer.finish(&manifest)?;
    result
}

/// Worker count: `FBL_THREADS` if set, else the available parallelism.
pub fn worker_count() -> usize {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var("FBL_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(avail)
}

/// Runs `k` copies with seeds `seed, seed+1, ...` into `out/member_NNN`.
/// Fails with the most severe member error after all members finished.
pub fn run_ensemble(cfg: &ExperimentConfig, out: &Path, k: usize) -> CliResult<()> {
    if k == 0 {
        return Err(CliError::invalid("--ensemble", "must be at least 1"));
    }
    fs::create_dir_all(out)?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, CliResult<()>)>> = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..worker_count().min(k) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= k {
                    break;
                }
                let mut member = cfg.clone();
                member.initial.seed = cfg.initial.seed.wrapping_add(i as u64);
                let r = run_config(&member, &out.join(format!("member_{i:03}")));
                results.lock().expect("no poisoned worker").push((i, r));
            });
        }
    });
    let mut results = results.into_inner().expect("no poisoned worker");
    results.sort_by_key(|r| r.0);
    let members: Vec<Value> = results
        .iter()
        .map(|(i, r)| {
            json!({
                "dir": format!("member_{i:03}"),
                "seed": cfg.initial.seed.wrapping_add(*i as u64),
                "exit_code": r.as_ref().map_or_else(|e| e.exit_code(), |_| 0),
            })
        })
        .collect();
    fs::write(
        out.join("ensemble.json"),
        serde_json::to_string_pretty(&json!({"members": members}))?,
    )?;
    results
        .into_iter()
        .filter_map(|(_, r)| r.err())
        .max_by_key(|e| match e.exit_code() {
            1 => 0,
            c => c,
        })
        .map_or(Ok(()), Err)
}

fn read_json(path: &Path) -> Option<Value> {
    serde_json::from_slice(&fs::read(path).ok()?).ok()
}

fn parse_diagnostics(text: &str) -> Vec<[f64; 7]> {
    text.lines()
        .skip(1)
        .filter_map(|line| {
            let v: Vec<f64> = line.split(',').filter_map(|c| c.trim().parse().ok()).collect();
            v.try_into().ok()
        })
        .collect()
}

/// Writes `summary.json` and `series/<column>.csv` for a run directory.
pub fn report(run_dir: &Path) -> CliResult<Value> {
    let manifest = read_manifest(run_dir).map_err(CliError::Input)?;
    let bad = verify_checksums(run_dir, &manifest);
    if !bad.is_empty() {
        return Err(CliError::Input(format!("checksum mismatch: {}", bad.join(", "))));
    }
    let rep = read_json(&run_dir.join("report.json")).unwrap_or(Value::Null);
    let rows = fs::read_to_string(run_dir.join("diagnostics.csv"))
        .map(|t| parse_diagnostics(&t))
        .unwrap_or_default();

    let mut summary = BTreeMap::new();
    summary.insert("kind", json!(manifest.config.kind.name()));
    summary.insert("status", json!(manifest.exit_status));
    if let Some(last) = rows.last() {
        for (i, key) in ["t_end", "sup_norm_final", "grad_sup_final", "l2_norm_final", "mean_final"]
            .into_iter()
            .enumerate()
        {
            summary.insert(key, json!(last[i]));
        }
        summary.insert("blowup_integral", json!(last[5]));
    }
    for key in ["modulus_margin", "picard_ratios", "apriori_ratio", "negativity_max"] {
        if let Some(v) = rep.get(key) {
            summary.insert(key, v.clone());
        }
    }
    let summary = serde_json::to_value(summary)?;
    fs::write(run_dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;

    if !rows.is_empty() {
        let series = run_dir.join("series");
        fs::create_dir_all(&series)?;
        for (c, name) in DiagnosticRow::COLUMNS.iter().enumerate().skip(1) {
            let mut csv = format!("t,{name}\n");
            for r in &rows {
                csv.push_str(&format!("{},{}\n", artifacts::num(r[0]), artifacts::num(r[c])));
            }
            fs::write(series.join(format!("{name}.csv")), csv)?;
        }
    }
    Ok(summary)
}
