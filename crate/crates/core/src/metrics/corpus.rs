//! Corpus-level evaluation: per-model rows and aggregate report.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::accuracy::{acc_cmd, acc_param, DEFAULT_ETA};
use super::chamfer::chamfer;
use crate::geometry::{build_mesh, normalize_model, sample_mesh, Mesh, DEFAULT_SAMPLE_COUNT};
use crate::sequence::{validate_model, CadModel};

/// A predicted model, or the reason it could not be read.
#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Model(CadModel),
    Unparseable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalConfig {
    pub n_points: usize,
    pub seed: u64,
    pub eta: u32,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_points: DEFAULT_SAMPLE_COUNT,
            seed: 0,
            eta: DEFAULT_ETA,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub model_id: String,
    pub valid: bool,
    pub cd: Option<f64>,
    pub acc_cmd: f64,
    pub acc_param: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    pub ir: f64,
    pub median_cd: Option<f64>,
    pub mean_acc_cmd: f64,
    pub mean_acc_param: f64,
    pub config: EvalConfig,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no {missing} for model {model_id:?}")]
    MissingPair {
        model_id: String,
        missing: &'static str,
    },
    #[error("duplicate model id {0:?}")]
    DuplicateId(String),
    #[error("ground truth {model_id:?} is not usable: {reason}")]
    InvalidGroundTruth { model_id: String, reason: String },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Stable per-row seeds derived from the corpus seed and the model id. Ground truth
/// and prediction get different streams.
pub fn row_seeds(seed: u64, model_id: &str) -> (u64, u64) {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(model_id.as_bytes());
    let d = h.finalize();
    let word = |i: usize| u64::from_le_bytes(d[i..i + 8].try_into().unwrap());
    (word(0), word(8))
}

/// `100·invalid/total`, rounded to two decimals.
pub fn invalidity_ratio(rows: &[EvalRow]) -> Result<f64, EvalError> {
    if rows.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let invalid = rows.iter().filter(|r| !r.valid).count();
    Ok(round2(100.0 * invalid as f64 / rows.len() as f64))
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Normalized model and its mesh, or why it cannot be reconstructed.
fn reconstruct(m: &CadModel) -> Result<(CadModel, Mesh), String> {
    if let Some(v) = validate_model(m).violations.first() {
        return Err(v.to_string());
    }
    let n = normalize_model(m).map_err(|e| e.to_string())?;
    let mesh = build_mesh(&n).map_err(|e| e.to_string())?;
    Ok((n, mesh))
}

fn invalid_row(model_id: &str) -> EvalRow {
    EvalRow {
        model_id: model_id.to_string(),
        valid: false,
        cd: None,
        acc_cmd: 0.0,
        acc_param: 0.0,
    }
}

/// Scores one prediction against its ground truth.
pub fn evaluate_pair(
    model_id: &str,
    pred: &Prediction,
    gt: &CadModel,
    cfg: &EvalConfig,
) -> Result<EvalRow, EvalError> {
    let bad_gt = |reason: String| EvalError::InvalidGroundTruth {
        model_id: model_id.to_string(),
        reason,
    };
    let (gt_n, gt_mesh) = reconstruct(gt).map_err(bad_gt)?;
    let Prediction::Model(pred) = pred else {
        return Ok(invalid_row(model_id));
    };
    let Ok((pred_n, pred_mesh)) = reconstruct(pred) else {
        return Ok(invalid_row(model_id));
    };
    let (gt_seed, pred_seed) = row_seeds(cfg.seed, model_id);
    let sample = |mesh: &Mesh, seed| sample_mesh(mesh, cfg.n_points, seed);
    let gt_cloud = sample(&gt_mesh, gt_seed).map_err(|e| bad_gt(e.to_string()))?;
    let Ok(pred_cloud) = sample(&pred_mesh, pred_seed) else {
        return Ok(invalid_row(model_id));
    };
    let cd = chamfer(&pred_cloud.points, &gt_cloud.points).ok();
    Ok(EvalRow {
        model_id: model_id.to_string(),
        valid: cd.is_some(),
        cd,
        acc_cmd: acc_cmd(Some(&pred_n), &gt_n),
        acc_param: acc_param(Some(&pred_n), &gt_n, cfg.eta),
    })
}

/// Evaluates predictions against ground truth paired by model id. Rows follow the
/// prediction order; aggregates do not depend on it.
pub fn evaluate_corpus(
    preds: &[(String, Prediction)],
    gts: &[(String, CadModel)],
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    if preds.is_empty() && gts.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let mut gt_by_id = BTreeMap::new();
    for (id, m) in gts {
        if gt_by_id.insert(id.as_str(), m).is_some() {
            return Err(EvalError::DuplicateId(id.clone()));
        }
    }
    let mut seen = HashSet::new();
    for (id, _) in preds {
        if !seen.insert(id.as_str()) {
            return Err(EvalError::DuplicateId(id.clone()));
        }
        if !gt_by_id.contains_key(id.as_str()) {
            return Err(EvalError::MissingPair {
                model_id: id.clone(),
                missing: "ground truth",
            });
        }
    }
    if let Some(id) = gt_by_id.keys().find(|id| !seen.contains(*id)) {
        return Err(EvalError::MissingPair {
            model_id: id.to_string(),
            missing: "prediction",
        });
    }

    let run = || {
        preds
            .par_iter()
            .map(|(id, p)| evaluate_pair(id, p, gt_by_id[id.as_str()], cfg))
            .collect::<Result<Vec<_>, _>>()
    };
    let rows = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| EvalError::ThreadPool(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    summarize(rows, *cfg)
}

/// Aggregates rows into a report. Sums run in model-id order so the result is
/// independent of row order.
pub fn summarize(rows: Vec<EvalRow>, config: EvalConfig) -> Result<EvalReport, EvalError> {
    let ir = invalidity_ratio(&rows)?;
    let mut sorted: Vec<&EvalRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.model_id.cmp(&b.model_id));
    let n = rows.len() as f64;
    let mean_acc_cmd = sorted.iter().map(|r| r.acc_cmd).sum::<f64>() / n;
    let mean_acc_param = sorted.iter().map(|r| r.acc_param).sum::<f64>() / n;
    let mut cds: Vec<f64> = rows.iter().filter_map(|r| r.cd).collect();
    Ok(EvalReport {
        median_cd: median(&mut cds),
        rows,
        ir,
        mean_acc_cmd,
        mean_acc_param,
        config,
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    models: usize,
    invalid: usize,
    ir: f64,
    median_cd: Option<f64>,
    mean_acc_cmd: f64,
    mean_acc_param: f64,
    config: &'a EvalConfig,
}

impl EvalReport {
    /// One CSV line per row: `model_id,valid,cd,acc_cmd,acc_param` (cd empty if invalid).
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn summary_json(&self) -> String {
        let s = Summary {
            models: self.rows.len(),
            invalid: self.rows.iter().filter(|r| !r.valid).count(),
            ir: self.ir,
            median_cd: self.median_cd,
            mean_acc_cmd: self.mean_acc_cmd,
            mean_acc_param: self.mean_acc_param,
            config: &self.config,
        };
        serde_json::to_string_pretty(&s).expect("summary serializes") + "\n"
    }
}
