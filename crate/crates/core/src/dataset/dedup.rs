use std::collections::HashSet;

use sha2::{Digest, Sha256};

use crate::geometry::prepare_for_tokenization;
use crate::sequence::{serialize_model, CadModel};
use crate::tokenizer::encode_model;

/// Hash of the model's token stream after normalization, so copies that quantize
/// identically share a key. Models that cannot be tokenized fall back to their
/// canonical JSON.
pub fn dedup_key(m: &CadModel) -> [u8; 32] {
    let text = prepare_for_tokenization(m)
        .ok()
        .and_then(|p| encode_model(&p).ok())
        .map(|t| format!("tokens:{t}"))
        .unwrap_or_else(|| format!("json:{}", serialize_model(&m.canonicalized())));
    Sha256::digest(text.as_bytes()).into()
}

/// Keeps the first model of every duplicate class, preserving order.
pub fn deduplicate<T, F>(items: Vec<T>, model: F) -> Vec<T>
where
    F: Fn(&T) -> &CadModel,
{
    let mut seen = HashSet::new();
    items
        .into_iter()
        .filter(|it| seen.insert(dedup_key(model(it))))
        .collect()
}
