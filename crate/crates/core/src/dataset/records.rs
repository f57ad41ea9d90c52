//! Instruction-tuning records in conversation layout, one JSON object per line.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metrics::row_seeds;
use crate::sequence::CadModel;
use crate::tokenizer::{encode_model, TokenizeError};

/// Marks where the image goes in an image-conditioned prompt.
pub const IMAGE_PLACEHOLDER: &str = "<image>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub from: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuningRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    pub conversations: Vec<Turn>,
}

impl TuningRecord {
    fn new(id: &str, image: Option<String>, instruction: String, target: String) -> Self {
        Self {
            id: id.to_string(),
            image,
            conversations: vec![
                Turn {
                    from: "human".into(),
                    value: instruction,
                },
                Turn {
                    from: "gpt".into(),
                    value: target,
                },
            ],
        }
    }

    pub fn instruction(&self) -> &str {
        &self.conversations[0].value
    }

    pub fn target(&self) -> &str {
        &self.conversations[1].value
    }
}

/// Template index for a model, drawn from a stream keyed by `(seed, id)` so the
/// choice does not depend on corpus order.
pub fn template_index(seed: u64, id: &str, count: usize) -> usize {
    let (s, _) = row_seeds(seed, id);
    ChaCha8Rng::seed_from_u64(s).random_range(0..count)
}

/// Builds an image-conditioned record. `model` must already be prepared for
/// tokenization.
pub fn image_record(
    id: &str,
    model: &CadModel,
    image_path: &str,
    templates: &[String],
    seed: u64,
) -> Result<TuningRecord, TokenizeError> {
    let target = encode_model(model)?.to_string();
    let t = &templates[template_index(seed, id, templates.len())];
    Ok(TuningRecord::new(
        id,
        Some(image_path.to_string()),
        format!("{IMAGE_PLACEHOLDER}\n{t}"),
        target,
    ))
}

/// Text-conditioned records for captioned models only; uncaptioned or untokenizable
/// models are skipped.
pub fn make_text_records(
    corpus: &[(String, CadModel)],
    captions: &BTreeMap<String, String>,
) -> Vec<TuningRecord> {
    corpus
        .iter()
        .filter_map(|(id, m)| {
            let caption = captions.get(id)?;
            match encode_model(m) {
                Ok(t) => Some(TuningRecord::new(id, None, caption.clone(), t.to_string())),
                Err(e) => {
                    log::warn!("skipping {id}: {e}");
                    None
                }
            }
        })
        .collect()
}

pub fn write_jsonl<W: Write>(records: &[TuningRecord], mut w: W) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_jsonl(text: &str) -> serde_json::Result<Vec<TuningRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
