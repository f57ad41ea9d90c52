//! End-to-end corpus build: load, normalize, deduplicate, render or caption, and
//! write records.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::caption::{CaptionClient, CaptionVerdict};
use super::config::PipelineConfig;
use super::dedup::deduplicate;
use super::records::{image_record, make_text_records, write_jsonl, TuningRecord};
use super::render::{render_model, RenderConfig};
use crate::geometry::prepare_for_tokenization;
use crate::sequence::{parse_model, serialize_model, CadModel};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const IMAGES_DIR: &str = "images";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetMode {
    Image,
    Text,
}

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub mode: DatasetMode,
    pub seed: u64,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BuildSummary {
    pub read: usize,
    /// Files that failed to parse, validate or normalize, with the reason.
    pub rejected: Vec<(String, String)>,
    pub duplicates: usize,
    pub records: usize,
    /// Models dropped while rendering or tokenizing.
    pub skipped: Vec<(String, String)>,
    pub filtered: usize,
    pub uncaptioned: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `(id, reason)` for inputs that were dropped.
pub type Rejections = Vec<(String, String)>;

/// Reads every `*.json` file directly inside `dir`, sorted by file name. The model id
/// is the file stem. Returns the parsed models and the rejected files.
pub fn load_model_dir(dir: &Path) -> Result<(Vec<(String, CadModel)>, Rejections), DatasetError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut models = Vec::new();
    let mut rejected = Vec::new();
    for p in paths {
        let id = p
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        let text = fs::read_to_string(&p).map_err(io_err(&p))?;
        match parse_model(&text) {
            Ok(m) => models.push((id, m)),
            Err(e) => rejected.push((id, e.to_string())),
        }
    }
    Ok((models, rejected))
}

/// Builds a corpus from the models in `input` and writes it under `out`.
pub fn build_dataset(
    input: &Path,
    out: &Path,
    opts: &BuildOptions,
    captioner: &dyn CaptionClient,
) -> Result<BuildSummary, DatasetError> {
    let (models, mut rejected) = load_model_dir(input)?;
    let read = models.len() + rejected.len();
    let mut prepared = Vec::new();
    for (id, m) in models {
        match prepare_for_tokenization(&m) {
            Ok(p) => prepared.push((id, p)),
            Err(e) => rejected.push((id, e.to_string())),
        }
    }
    let before = prepared.len();
    let corpus = deduplicate(prepared, |(_, m)| m);
    let mut summary = BuildSummary {
        read,
        rejected,
        duplicates: before - corpus.len(),
        ..BuildSummary::default()
    };
    fs::create_dir_all(out).map_err(io_err(out))?;

    let records = match opts.mode {
        DatasetMode::Image => image_records(&corpus, out, opts, &mut summary)?,
        DatasetMode::Text => text_records(&corpus, opts, captioner, &mut summary),
    };
    summary.records = records.len();
    let path = out.join(RECORDS_FILE);
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    write_jsonl(&records, BufWriter::new(file)).map_err(io_err(&path))?;
    Ok(summary)
}

/// A record that survived rendering, with its PNG bytes.
pub type ImageRecord = (TuningRecord, Vec<u8>);

/// One image-conditioned record per model, rendered in parallel. Models that fail to
/// render or tokenize are returned separately with the reason. Image paths are
/// `images/<id>.png`, relative to the output directory.
pub fn make_image_records(
    corpus: &[(String, CadModel)],
    templates: &[String],
    seed: u64,
    render: &RenderConfig,
) -> (Vec<(String, ImageRecord)>, Rejections) {
    let results: Vec<_> = corpus
        .par_iter()
        .map(|(id, m)| {
            let png = render_model(m, render)
                .and_then(|img| img.to_png())
                .map_err(|e| e.to_string())?;
            let rel = format!("{IMAGES_DIR}/{id}.png");
            let record = image_record(id, m, &rel, templates, seed).map_err(|e| e.to_string())?;
            Ok::<_, String>((record, png))
        })
        .collect();
    let mut ok = Vec::new();
    let mut skipped = Vec::new();
    for ((id, _), r) in corpus.iter().zip(results) {
        match r {
            Ok(rec) => ok.push((id.clone(), rec)),
            Err(e) => skipped.push((id.clone(), e)),
        }
    }
    (ok, skipped)
}

fn image_records(
    corpus: &[(String, CadModel)],
    out: &Path,
    opts: &BuildOptions,
    summary: &mut BuildSummary,
) -> Result<Vec<TuningRecord>, DatasetError> {
    let images = out.join(IMAGES_DIR);
    fs::create_dir_all(&images).map_err(io_err(&images))?;
    let cfg = &opts.config;
    let (ok, skipped) = make_image_records(corpus, &cfg.templates, opts.seed, &cfg.render);
    for (id, e) in &skipped {
        log::warn!("skipping {id}: {e}");
    }
    summary.skipped.extend(skipped);
    // Single writer, corpus order.
    let mut records = Vec::new();
    for (id, (record, png)) in ok {
        let path = images.join(format!("{id}.png"));
        fs::write(&path, png).map_err(io_err(&path))?;
        records.push(record);
    }
    Ok(records)
}

fn text_records(
    corpus: &[(String, CadModel)],
    opts: &BuildOptions,
    captioner: &dyn CaptionClient,
    summary: &mut BuildSummary,
) -> Vec<TuningRecord> {
    let mut captions = BTreeMap::new();
    for (id, m) in corpus {
        let png = match render_model(m, &opts.config.render).and_then(|i| i.to_png()) {
            Ok(png) => png,
            Err(e) => {
                log::warn!("skipping {id}: {e}");
                summary.skipped.push((id.clone(), e.to_string()));
                continue;
            }
        };
        match captioner.describe(&png, &serialize_model(m)) {
            Ok(CaptionVerdict::Caption(c)) => {
                captions.insert(id.clone(), c);
            }
            Ok(CaptionVerdict::Filtered(reason)) => {
                log::info!("{id} filtered: {reason}");
                summary.filtered += 1;
            }
            Err(e) => {
                log::warn!("{id} left uncaptioned: {e}");
                summary.uncaptioned += 1;
            }
        }
    }
    make_text_records(corpus, &captions)
}
