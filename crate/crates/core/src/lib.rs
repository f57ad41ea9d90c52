//! Sketch-extrude CAD sequences with spatial tokenization.
//!
//! - [`sequence`]: model types, JSON format, validation
//! - [`tokenizer`]: spatial quantizers, vocabulary, token-stream codec
//! - [`geometry`]: reconstruction, meshing, sampling, export
//! - [`metrics`]: Chamfer distance, command/parameter accuracy, corpus evaluation
//! - [`dataset`]: dedup, rendering, instruction records, captioning

pub mod dataset;
pub mod geometry;
pub mod metrics;
pub mod sequence;
pub mod synth;
pub mod tokenizer;
